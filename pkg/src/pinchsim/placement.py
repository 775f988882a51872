"""Per-user antenna placement along the waveguide.

Gain is maximized in two stages: park the antenna cluster as close to
the user as the spacing constraint allows, then nudge each antenna so
its accumulated waveguide phase plus the free-space phase to the user
is a multiple of 2*pi.  After that every antenna contributes coherently
and the effective gain is essentially the coherent upper bound.

The total phase phi(x) is strictly increasing in x because n_eff > 1:
the waveguide term grows at 2*pi/lambda_g per metre while the free-space
term can shrink at most 2*pi/lambda per metre.  Every 2*m*pi level can
therefore be located by plain bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .model import (
    DEFAULT_TOL,
    SystemParams,
    Tolerances,
    UserLocation,
    check_antenna_positions,
    effective_gain_exact,
)


@dataclass(frozen=True)
class PlacementSolution:
    """Aligned positions and resulting exact gain for each user."""

    per_user: tuple[tuple[float, ...], ...]
    gains: tuple[float, ...]


def nominal_positions(user: UserLocation, params: SystemParams) -> tuple[float, ...]:
    """Cluster of N positions centred on the user's x coordinate.

    Spacing is delta_min + lambda_g: alignment later moves each antenna
    by at most lambda_g/2, so neighbours keep at least delta_min between
    them.  A cluster that would stick out of [0, L] is translated as a
    whole to the boundary.
    """
    s = params.delta_min + params.lam_g
    if (params.N - 1) * s > params.L:
        raise ValueError("waveguide too short for the antenna cluster")
    half = (params.N + 1) / 2.0
    xs = [user.x + (n - half) * s for n in range(1, params.N + 1)]
    if xs[0] < 0.0:
        shift = -xs[0]
        xs = [x + shift for x in xs]
    elif xs[-1] > params.L:
        shift = params.L - xs[-1]
        xs = [x + shift for x in xs]
    return tuple(xs)


def phase_total(x: float, user: UserLocation, params: SystemParams) -> float:
    """Waveguide phase from the feed at x=0 plus free-space phase to the user."""
    dx = x - user.x
    dist = math.sqrt(dx * dx + user.y * user.y + params.d * params.d)
    return 2.0 * math.pi * (dist / params.lam + x / params.lam_g)


def phase_align(
    x_nominal: float,
    user: UserLocation,
    params: SystemParams,
    tol: Tolerances = DEFAULT_TOL,
    lo: float = 0.0,
    hi: float | None = None,
) -> float:
    """Nearest x to x_nominal in [lo, hi] with total phase ≡ 0 (mod 2*pi).

    Searches the bracket x_nominal ± lambda_g/2 clipped to [lo, hi]; if
    clipping (or a locally stretched phase slope) leaves no 2*pi level
    inside, the bracket grows inward one guided wavelength per round.
    An already-aligned x is its own nearest root and comes back
    unchanged up to the bisection width.
    """
    if hi is None:
        hi = params.L
    if not lo <= x_nominal <= hi:
        raise ValueError("x_nominal outside the search interval")
    half = params.lam_g / 2.0
    a = max(lo, x_nominal - half)
    b = min(hi, x_nominal + half)
    # phi rises at least 2*pi*(n_eff-1)/lambda per metre, so a window of
    # width lambda/(n_eff-1) always spans a full 2*pi level; the round
    # count below reaches that width with margin
    max_rounds = math.ceil(params.n_eff / (params.n_eff - 1.0)) + 2
    for _ in range(max_rounds + 1):
        best = _nearest_level(a, b, x_nominal, user, params, tol)
        if best is not None:
            return best
        grown = False
        if a > lo:
            a = max(lo, a - params.lam_g)
            grown = True
        if b < hi:
            b = min(hi, b + params.lam_g)
            grown = True
        if not grown:
            break
    raise ValueError("no phase-aligned position inside the search interval")


def _nearest_level(
    a: float,
    b: float,
    x_ref: float,
    user: UserLocation,
    params: SystemParams,
    tol: Tolerances,
) -> float | None:
    """Root of phi(x) = 2*m*pi in [a, b] nearest to x_ref, if any."""
    two_pi = 2.0 * math.pi
    m_lo = math.ceil(phase_total(a, user, params) / two_pi)
    m_hi = math.floor(phase_total(b, user, params) / two_pi)
    best = None
    for m in range(m_lo, m_hi + 1):
        x = _bisect_level(a, b, two_pi * m, user, params, tol)
        if best is None or abs(x - x_ref) < abs(best - x_ref):
            best = x
    return best


def _bisect_level(
    a: float,
    b: float,
    target: float,
    user: UserLocation,
    params: SystemParams,
    tol: Tolerances,
) -> float:
    lo, hi = a, b
    for _ in range(tol.bisect_max_iter):
        if hi - lo <= tol.bisect_x_tol:
            break
        mid = 0.5 * (lo + hi)
        if phase_total(mid, user, params) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _align_left_to_right(
    nominal: Sequence[float],
    user: UserLocation,
    params: SystemParams,
    tol: Tolerances,
) -> tuple[float, ...]:
    """Align each antenna, repairing squeezed gaps by re-aligning with a
    hard floor one minimum spacing above the left neighbour."""
    out: list[float] = []
    for x_nom in nominal:
        x = phase_align(x_nom, user, params, tol)
        if out and x - out[-1] < params.delta_min - 1e-12:
            floor = out[-1] + params.delta_min
            x = phase_align(max(x_nom, floor), user, params, tol, lo=floor)
        out.append(x)
    return tuple(out)


def _align_right_to_left(
    nominal: Sequence[float],
    user: UserLocation,
    params: SystemParams,
    tol: Tolerances,
) -> tuple[float, ...]:
    """Mirror of the left-to-right pass, repairing downward instead."""
    out: list[float] = []
    for x_nom in reversed(nominal):
        x = phase_align(x_nom, user, params, tol)
        if out and out[-1] - x < params.delta_min - 1e-12:
            ceiling = out[-1] - params.delta_min
            x = phase_align(min(x_nom, ceiling), user, params, tol, hi=ceiling)
        out.append(x)
    return tuple(reversed(out))


def place_for_user(
    user: UserLocation,
    params: SystemParams,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[tuple[float, ...], float]:
    """Aligned antenna positions and exact effective gain for one user.

    At the default spacing, aligned roots sit on a near-uniform lattice
    one guided wavelength apart and gaps stay legal without repair.
    With wider spacing floors (delta_min above lambda_g) repairs walk
    antennas away from their nominals; a cluster parked against the
    right waveguide end can run out of room walking right, so the
    mirrored pass walks it left instead.
    """
    nominal = nominal_positions(user, params)
    try:
        positions = _align_left_to_right(nominal, user, params, tol)
    except ValueError:
        positions = _align_right_to_left(nominal, user, params, tol)
    check_antenna_positions(positions, params)
    return positions, effective_gain_exact(user, positions, params)


def place_all(
    users: Sequence[UserLocation],
    params: SystemParams,
    tol: Tolerances = DEFAULT_TOL,
) -> PlacementSolution:
    """Independent per-user placements collected into one solution."""
    per_user = []
    gains = []
    for user in users:
        xs, g = place_for_user(user, params, tol)
        per_user.append(xs)
        gains.append(g)
    return PlacementSolution(tuple(per_user), tuple(gains))


def fixed_ula_positions(params: SystemParams) -> tuple[float, ...]:
    """Half-wavelength array anchored at the feed, identical for all users."""
    spacing = params.lam / 2.0
    if (params.N - 1) * spacing > params.L:
        raise ValueError("fixed array longer than the waveguide")
    return tuple(n * spacing for n in range(params.N))
