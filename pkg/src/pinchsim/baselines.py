"""Uniform interface over the four compared transmission strategies.

prop          per-user placement, then joint power/time optimization
equal_time    per-user placement, fixed equal time shares, power-only optimization
max_se        per-user placement, full power, sum-rate-optimal time split
conventional  fixed feed-anchored array, then the same joint optimization as prop

The last one differs from prop only in the channel gains it sees, so
the comparison isolates what reconfigurable placement buys.
"""

from __future__ import annotations

import enum
from typing import TYPE_CHECKING, Sequence

from .allocator import (
    AllocationResult,
    Feasibility,
    bcd_solve,
    check_feasibility,
    dinkelbach_power,
    min_time,
    time_allocate,
)
from .model import (
    DEFAULT_TOL,
    SystemParams,
    Tolerances,
    ee_objective,
    effective_gain_exact,
    user_rate,
)
from .placement import fixed_ula_positions, place_for_user

if TYPE_CHECKING:
    from .simulation import Scenario


class Scheme(enum.Enum):
    """Closed set of strategies; values double as CSV labels."""

    PROP = "prop"
    EQUAL_TIME = "equal_time"
    MAX_SE = "max_se"
    CONVENTIONAL = "conventional"


EQUAL_TIME_POWER_POLICIES = ("ee_opt", "max_power")
MAX_SE_TIME_POLICIES = ("rate_opt", "equal")


def scheme_gains(
    scheme: Scheme,
    scenario: "Scenario",
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[float, ...]:
    """Per-user channel gains under the scheme's antenna geometry."""
    params = scenario.params
    if scheme is Scheme.CONVENTIONAL:
        pins = fixed_ula_positions(params)
        return tuple(effective_gain_exact(u, pins, params) for u in scenario.users)
    return tuple(place_for_user(u, params, tol)[1] for u in scenario.users)


def _equal_slot_feasibility(tau_mins: tuple[float, ...], k: int) -> Feasibility:
    # equal slots admit a drop iff every user's minimum time fits in 1/K;
    # the slack is measured against the binding (worst) user
    worst = max(tau_mins)
    return Feasibility(worst <= 1.0 / k, tau_mins, 1.0 - k * worst)


def allocate_scheme(
    scheme: Scheme,
    hs: Sequence[float],
    params: SystemParams,
    tol: Tolerances = DEFAULT_TOL,
    *,
    equal_time_power: str = "ee_opt",
    max_se_time: str = "rate_opt",
) -> tuple[AllocationResult | None, Feasibility]:
    """Solve one scheme on precomputed gains.

    Returns (result, feasibility); result is None when the scheme's own
    admission test fails.  The two keyword policies pin down the open
    halves of the benchmarks: equal_time_power chooses EE-optimal vs
    full power at equal slots, max_se_time chooses the rate-floor time
    split vs equal slots at full power.
    """
    if equal_time_power not in EQUAL_TIME_POWER_POLICIES:
        raise ValueError(f"unknown equal_time_power policy: {equal_time_power}")
    if max_se_time not in MAX_SE_TIME_POLICIES:
        raise ValueError(f"unknown max_se_time policy: {max_se_time}")
    hs = tuple(hs)
    k = len(hs)

    if scheme in (Scheme.PROP, Scheme.CONVENTIONAL):
        feas = check_feasibility(hs, params)
        if not feas.feasible:
            return None, feas
        return bcd_solve(hs, params, tol), feas

    tau_mins = tuple(min_time(h, params) for h in hs)

    if scheme is Scheme.EQUAL_TIME:
        feas = _equal_slot_feasibility(tau_mins, k)
        if not feas.feasible:
            return None, feas
        taus = (1.0 / k,) * k
        if equal_time_power == "ee_opt":
            din = dinkelbach_power(taus, hs, params, tol)
            ps, ee = din.ps, din.beta
            converged, iterations = din.converged, din.iterations
        else:
            ps = (params.P_max,) * k
            ee = ee_objective(taus, ps, hs, params.P_f)
            converged, iterations = True, 0
        rates = tuple(user_rate(t, p, h) for t, p, h in zip(taus, ps, hs))
        return AllocationResult(ps, taus, rates, ee, (ee,), converged, iterations), feas

    if scheme is Scheme.MAX_SE:
        ps = (params.P_max,) * k
        if max_se_time == "rate_opt":
            feas = check_feasibility(hs, params)
            if not feas.feasible:
                return None, feas
            taus = time_allocate(ps, hs, params)
        else:
            feas = _equal_slot_feasibility(tau_mins, k)
            if not feas.feasible:
                return None, feas
            taus = (1.0 / k,) * k
        rates = tuple(user_rate(t, p, h) for t, p, h in zip(taus, ps, hs))
        ee = ee_objective(taus, ps, hs, params.P_f)
        return AllocationResult(ps, taus, rates, ee, (ee,), True, 0), feas

    raise ValueError(f"unknown scheme: {scheme!r}")


def solve_scheme(
    scheme: Scheme,
    scenario: "Scenario",
    tol: Tolerances = DEFAULT_TOL,
    *,
    equal_time_power: str = "ee_opt",
    max_se_time: str = "rate_opt",
) -> tuple[AllocationResult | None, Feasibility]:
    """Gains plus allocation for one scheme on one user drop."""
    hs = scheme_gains(scheme, scenario, tol)
    return allocate_scheme(
        scheme,
        hs,
        scenario.params,
        tol,
        equal_time_power=equal_time_power,
        max_se_time=max_se_time,
    )
