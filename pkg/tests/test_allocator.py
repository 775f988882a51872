"""Feasibility test, Dinkelbach power step, time step, and the outer loop."""

import math

import numpy as np
import pytest

from pinchsim import (
    InfeasibleError,
    SystemParams,
    bcd_solve,
    check_feasibility,
    dinkelbach_power,
    ee_objective,
    min_time,
    power_clamped,
    time_allocate,
)

P = SystemParams()

# single user, unit gain, free rate floor: the efficiency log2(1+p)/(P_f+p)
# with P_f = 1 peaks at p = e - 1 with value log2(e)/e
P_UNIT = SystemParams(K=1, N=1, P_max=10.0, P_f=1.0, R_min=0.0)
EE_UNIT_OPT = math.log2(math.e) / math.e


def feasible_hs(rng, k, lo=1e4, hi=1e7):
    return tuple(float(h) for h in np.exp(rng.uniform(np.log(lo), np.log(hi), k)))


def test_min_time():
    assert min_time(1e5, SystemParams(R_min=0.0)) == 0.0
    assert min_time(0.0, P) == math.inf
    h = 1e5
    expect = 0.5 / math.log2(1.0 + P.P_max * h)
    assert min_time(h, P) == pytest.approx(expect, rel=1e-12)


def test_check_feasibility_branches():
    good = check_feasibility((1e5, 2e5, 1e6), SystemParams(K=3))
    assert good.feasible
    assert good.slack == pytest.approx(1.0 - sum(good.tau_mins), rel=1e-12)
    assert all(tm > 0 for tm in good.tau_mins)
    # a gain of 10 needs tau > 1 on its own at 15 dBm
    bad = check_feasibility((10.0,), SystemParams(K=1))
    assert not bad.feasible
    assert bad.slack < 0.0
    assert bad.feasible == (bad.slack >= 0.0)


def test_power_clamped_interior():
    p = power_clamped(1.0, 1.0, 0.5, P_UNIT)
    assert p == pytest.approx(1.0 / (0.5 * math.log(2.0)) - 1.0, rel=1e-12)


def test_power_clamped_upper():
    # cheap power: stationary point beyond P_max
    assert power_clamped(1.0, 1.0, 1e-6, P_UNIT) == P_UNIT.P_max
    # beta <= 0 prices power for free
    assert power_clamped(1.0, 1.0, 0.0, P_UNIT) == P_UNIT.P_max
    assert power_clamped(1.0, 1.0, -1.0, P_UNIT) == P_UNIT.P_max


def test_power_clamped_lower():
    # expensive power: the rate floor keeps the user transmitting
    p = power_clamped(0.5, 1e6, 1e9, P)
    assert p == pytest.approx((2.0 ** (P.R_min / 0.5) - 1.0) / 1e6, rel=1e-12)


def test_power_clamped_degenerate():
    with pytest.raises(InfeasibleError):
        power_clamped(0.0, 1e5, 1.0, P)
    with pytest.raises(InfeasibleError):
        power_clamped(0.5, 0.0, 1.0, P)
    assert power_clamped(0.0, 1e5, 1.0, SystemParams(R_min=0.0)) == 0.0
    # floor above the power budget at this time share
    with pytest.raises(InfeasibleError):
        power_clamped(0.01, 100.0, 1.0, P)


def test_dinkelbach_unit_optimum():
    res = dinkelbach_power((1.0,), (1.0,), P_UNIT)
    assert res.converged
    assert res.ps[0] == pytest.approx(math.e - 1.0, rel=1e-8)
    assert res.beta == pytest.approx(EE_UNIT_OPT, rel=1e-12)
    assert res.trace[0] == pytest.approx(
        ee_objective((1.0,), (P_UNIT.P_max,), (1.0,), P_UNIT.P_f), rel=1e-12)
    assert res.trace[-1] == res.beta
    assert res.beta == pytest.approx(
        ee_objective((1.0,), res.ps, (1.0,), P_UNIT.P_f), rel=1e-12)


def test_dinkelbach_floor_binding():
    # huge gains and negligible circuit power drive the price of power so
    # high that every user retreats to its rate-floor power 1/h
    params = SystemParams(K=2, P_f=1e-12)
    res = dinkelbach_power((0.5, 0.5), (1e9, 1e9), params)
    assert res.converged
    assert res.ps == pytest.approx((1e-9, 1e-9), rel=1e-12)


def test_dinkelbach_trace_monotone():
    rng = np.random.default_rng(23)
    for _ in range(30):
        k = int(rng.integers(2, 6))
        hs = feasible_hs(rng, k)
        taus = (1.0 / k,) * k
        res = dinkelbach_power(taus, hs, P)
        assert res.converged
        assert res.iterations <= 100
        for a, b in zip(res.trace, res.trace[1:]):
            assert b >= a - 1e-12
        assert res.beta == pytest.approx(
            ee_objective(taus, res.ps, hs, P.P_f), rel=1e-12)
        for p, h in zip(res.ps, hs):
            lower = (2.0 ** (P.R_min * k) - 1.0) / h
            assert lower - 1e-15 <= p <= P.P_max * (1.0 + 1e-12)


def test_dinkelbach_beats_two_user_grid():
    # brute-force oracle on a box grid at fixed equal time shares
    hs = (2e5, 4e4)
    taus = (0.5, 0.5)
    res = dinkelbach_power(taus, hs, P)
    lowers = [(2.0 ** (P.R_min / t) - 1.0) / h for t, h in zip(taus, hs)]
    g1 = np.linspace(lowers[0], P.P_max, 400)
    g2 = np.linspace(lowers[1], P.P_max, 400)
    p1, p2 = np.meshgrid(g1, g2)
    rate = 0.5 * np.log2(1.0 + p1 * hs[0]) + 0.5 * np.log2(1.0 + p2 * hs[1])
    grid_best = float(np.max(rate / (P.P_f + p1 + p2)))
    assert res.beta >= grid_best - 1e-6
    assert res.beta == pytest.approx(grid_best, rel=1e-3)


def test_dinkelbach_infeasible_taus():
    with pytest.raises(InfeasibleError):
        dinkelbach_power((0.01, 0.99), (100.0, 1e6), P)
    with pytest.raises(ValueError):
        dinkelbach_power((0.5,), (1e5, 1e5), P)


def test_time_allocate_floors_plus_leader():
    taus = time_allocate((1.0, 1.0), (1.0, 3.0), SystemParams(K=2))
    assert taus == pytest.approx((0.5, 0.5), rel=1e-12)
    assert sum(taus) == pytest.approx(1.0, abs=1e-12)


def test_time_allocate_tie_lowest_index():
    taus = time_allocate((1.0, 1.0), (3.0, 3.0), SystemParams(K=2))
    assert taus == pytest.approx((0.75, 0.25), rel=1e-12)


def test_time_allocate_free_floor():
    taus = time_allocate((1.0, 1.0), (1.0, 3.0), SystemParams(K=2, R_min=0.0))
    assert taus == (0.0, 1.0)


def test_time_allocate_single_user():
    assert time_allocate((1.0,), (31.0,), SystemParams(K=1)) == (1.0,)


def test_time_allocate_infeasible():
    with pytest.raises(InfeasibleError):
        time_allocate((1.0, 1.0), (0.1, 0.1), SystemParams(K=2))
    with pytest.raises(InfeasibleError):
        time_allocate((0.0, 1.0), (1.0, 1.0), SystemParams(K=2))
    with pytest.raises(ValueError):
        time_allocate((1.0,), (1.0, 2.0), SystemParams(K=2))


def test_bcd_unit_case():
    res = bcd_solve((1.0,), P_UNIT)
    assert res.converged
    assert res.taus == (1.0,)
    assert res.ps[0] == pytest.approx(math.e - 1.0, rel=1e-8)
    assert res.ee == pytest.approx(EE_UNIT_OPT, rel=1e-12)
    assert res.iterations == 2
    assert res.trace[0] == pytest.approx(res.trace[1], rel=1e-12)


def test_bcd_infeasible():
    with pytest.raises(InfeasibleError):
        bcd_solve((10.0,), SystemParams(K=1))


def test_bcd_invariants_and_dominance():
    rng = np.random.default_rng(31)
    for _ in range(25):
        k = int(rng.integers(2, 6))
        hs = feasible_hs(rng, k)
        params = SystemParams(K=k)
        res = bcd_solve(hs, params)
        assert res.converged
        assert res.iterations <= 50
        for a, b in zip(res.trace, res.trace[1:]):
            assert b >= a - 1e-12
        assert sum(res.taus) <= 1.0 + 1e-12
        assert all(t >= 0.0 for t in res.taus)
        for p in res.ps:
            assert 0.0 <= p <= params.P_max * (1.0 + 1e-12)
        for r in res.rates:
            assert r >= params.R_min - 1e-9
        assert res.ee == pytest.approx(
            ee_objective(res.taus, res.ps, hs, params.P_f), rel=1e-12)
        # never worse than full power with the same time rule
        ps_full = (params.P_max,) * k
        taus_full = time_allocate(ps_full, hs, params)
        ee_full = ee_objective(taus_full, ps_full, hs, params.P_f)
        assert res.ee >= ee_full - 1e-9
