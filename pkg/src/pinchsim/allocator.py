"""Feasibility test, power allocation, time allocation, and the outer loop.

At fixed time shares the EE objective is a concave-over-affine fraction
of the powers, so the power step uses Dinkelbach's reduction: solve a
sequence of subtractive subproblems max_P rate(P) - beta * power(P),
each with a closed-form per-user clamped solution, while beta climbs
monotonically to the optimum.  The time step at fixed powers is also
closed form: each user gets exactly the share its rate floor requires
and the user with the best per-unit rate absorbs the rest of the frame.
Alternating the two steps never decreases EE, which provides the
stopping rule for the outer loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .model import DEFAULT_TOL, SystemParams, Tolerances, ee_objective, user_rate

LN2 = math.log(2.0)


class InfeasibleError(ValueError):
    """QoS targets cannot all be met within the power and time budget."""


class Feasibility(NamedTuple):
    """Outcome of a scheme's admission test.

    slack is the remaining time budget before the scheme's feasibility
    boundary; feasible holds exactly when slack >= 0.
    """

    feasible: bool
    tau_mins: tuple[float, ...]
    slack: float


def min_time(h: float, params: SystemParams) -> float:
    """Smallest time share that delivers R_min at full power on gain h.

    Returns inf when the rate floor is unreachable at any time share
    (zero gain or zero power budget), which makes the budget test fail.
    """
    if params.R_min == 0.0:
        return 0.0
    cap = math.log2(1.0 + params.P_max * h)
    if cap <= 0.0:
        return math.inf
    return params.R_min / cap


def check_feasibility(hs: Sequence[float], params: SystemParams) -> Feasibility:
    """Serving every user at P_max for its minimum time must fit one frame."""
    tau_mins = tuple(min_time(h, params) for h in hs)
    slack = 1.0 - sum(tau_mins)
    return Feasibility(slack >= 0.0, tau_mins, slack)


def power_clamped(tau: float, h: float, beta: float, params: SystemParams) -> float:
    """EE-optimal power for one user at fixed time share and price beta.

    The unconstrained stationary point tau/(beta*ln2) - 1/h is clamped
    into [rate-floor power, P_max].  tau = 0 is legal only when
    R_min = 0, and such a user transmits nothing.  beta <= 0 prices
    power for free, pushing to the upper clamp.
    """
    if tau <= 0.0 or h <= 0.0:
        if params.R_min > 0.0:
            raise InfeasibleError("rate floor unreachable with zero time share or gain")
        return 0.0
    lower = (2.0 ** (params.R_min / tau) - 1.0) / h if params.R_min > 0.0 else 0.0
    if lower > params.P_max * (1.0 + 1e-9) + 1e-18:
        raise InfeasibleError("rate floor needs more than P_max at this time share")
    p_der = math.inf if beta <= 0.0 else tau / (beta * LN2) - 1.0 / h
    return min(params.P_max, max(lower, p_der))


class DinkelbachResult(NamedTuple):
    ps: tuple[float, ...]
    beta: float
    iterations: int
    converged: bool
    trace: tuple[float, ...]  # beta at init and after each update; non-decreasing


def dinkelbach_power(
    taus: Sequence[float],
    hs: Sequence[float],
    params: SystemParams,
    tol: Tolerances = DEFAULT_TOL,
) -> DinkelbachResult:
    """Globally EE-optimal powers at fixed time shares.

    beta starts at the efficiency of the all-P_max point, each round
    solves the clamped subproblem per user and resets beta to the new
    iterate's efficiency; the loop stops once the increase drops below
    tol.dinkelbach_tol.  The final beta equals the EE of the returned
    powers.  Requires tau_k >= tau_k_min so every user's power box is
    non-empty; violations surface as InfeasibleError from the clamp.
    """
    if len(taus) != len(hs):
        raise ValueError("taus and hs must have equal length")
    taus = tuple(taus)
    hs = tuple(hs)
    beta = ee_objective(taus, (params.P_max,) * len(hs), hs, params.P_f)
    trace = [beta]
    ps: tuple[float, ...] = (0.0,) * len(hs)
    converged = False
    iterations = 0
    for iterations in range(1, tol.dinkelbach_max_iter + 1):
        ps = tuple(power_clamped(t, h, beta, params) for t, h in zip(taus, hs))
        new_beta = ee_objective(taus, ps, hs, params.P_f)
        trace.append(new_beta)
        gain = new_beta - beta
        beta = new_beta
        if gain < tol.dinkelbach_tol:
            converged = True
            break
    return DinkelbachResult(ps, beta, iterations, converged, tuple(trace))


def time_allocate(
    ps: Sequence[float],
    hs: Sequence[float],
    params: SystemParams,
) -> tuple[float, ...]:
    """Frame split at fixed powers: rate floors met with equality, the
    remainder handed to the user with the highest per-unit rate (lowest
    index on ties; the sum rate is the same for any tied choice)."""
    if len(ps) != len(hs):
        raise ValueError("ps and hs must have equal length")
    units = [math.log2(1.0 + p * h) for p, h in zip(ps, hs)]
    req = []
    for u in units:
        if params.R_min == 0.0:
            req.append(0.0)
        elif u <= 0.0:
            raise InfeasibleError("a zero-rate user cannot meet its rate floor")
        else:
            req.append(params.R_min / u)
    total = sum(req)
    if total > 1.0 + 1e-12:
        raise InfeasibleError("rate floors exceed the frame at these powers")
    l = max(range(len(units)), key=lambda k: (units[k], -k))
    taus = list(req)
    taus[l] = 1.0 - (total - req[l])
    return tuple(taus)


@dataclass(frozen=True)
class AllocationResult:
    """Joint power/time solution for one gain vector."""

    ps: tuple[float, ...]
    taus: tuple[float, ...]
    rates: tuple[float, ...]
    ee: float
    trace: tuple[float, ...]  # EE after each outer iteration
    converged: bool
    iterations: int


def bcd_solve(
    hs: Sequence[float],
    params: SystemParams,
    tol: Tolerances = DEFAULT_TOL,
) -> AllocationResult:
    """Alternate the power and time steps until EE stops improving.

    Starts from the feasible split tau_k = tau_k_min + slack/K, runs the
    power step first, and stops when an outer iteration improves EE by
    less than tol.bcd_tol (or at tol.bcd_max_iter).  Rejects infeasible
    gain vectors before iterating.
    """
    hs = tuple(hs)
    feas = check_feasibility(hs, params)
    if not feas.feasible:
        raise InfeasibleError("rate floors exceed the frame even at full power")
    share = feas.slack / len(hs)
    taus = tuple(tm + share for tm in feas.tau_mins)
    ps: tuple[float, ...] = (0.0,) * len(hs)
    ee = -math.inf
    trace: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, tol.bcd_max_iter + 1):
        ps = dinkelbach_power(taus, hs, params, tol).ps
        taus = time_allocate(ps, hs, params)
        new_ee = ee_objective(taus, ps, hs, params.P_f)
        trace.append(new_ee)
        gain = new_ee - ee
        ee = new_ee
        if gain < tol.bcd_tol:
            converged = True
            break
    rates = tuple(user_rate(t, p, h) for t, p, h in zip(taus, ps, hs))
    return AllocationResult(ps, taus, rates, ee, tuple(trace), converged, iterations)
