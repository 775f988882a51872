"""Physical model of a waveguide-fed pinching-antenna downlink.

Geometry: a single dielectric waveguide runs along the x axis at height
``d`` above the ground plane and is fed at x = 0.  Small "pinching"
antennas can be applied at adjustable x positions on the waveguide and
radiate the guided signal from there.  Users sit on the ground plane
inside a rectangle of size D_x x D_y centred on the waveguide.

All quantities are kept in linear SI units internally (W, Hz, m, gains
in 1/W i.e. SNR per transmitted watt); dBm appears only at I/O
boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

SPEED_OF_LIGHT = 299792458.0  # m/s


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power level in dBm to watts."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    """Convert a power in watts to dBm (requires p_watts > 0)."""
    if p_watts <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_watts) + 30.0


def derive_constants(f_c: float, n_eff: float) -> tuple[float, float, float]:
    """Return (lambda, lambda_g, eta) for carrier f_c and refractive index n_eff.

    lambda   free-space wavelength c / f_c            [m]
    lambda_g guided wavelength lambda / n_eff         [m]
    eta      free-space path-loss coefficient
             c^2 / (16 pi^2 f_c^2) = lambda^2/(16 pi^2)  [m^2]
    """
    if f_c <= 0.0:
        raise ValueError("f_c must be positive")
    if n_eff <= 1.0:
        raise ValueError("n_eff must exceed 1 (guided wavelength < free-space)")
    lam = SPEED_OF_LIGHT / f_c
    return lam, lam / n_eff, lam * lam / (16.0 * math.pi * math.pi)


class UserLocation(NamedTuple):
    """Ground-plane user position (z = 0)."""

    x: float
    y: float


@dataclass(frozen=True)
class SystemParams:
    """All physical and protocol constants of one system configuration.

    Powers are linear watts here.  ``L`` defaults to ``D_x`` (waveguide
    spans the service area) and ``delta_min`` to half a free-space
    wavelength; pass explicit values to override.
    """

    f_c: float = 28e9          # carrier frequency [Hz]
    n_eff: float = 1.4         # effective refractive index of the waveguide
    d: float = 3.0             # waveguide height above ground plane [m]
    D_x: float = 60.0          # service-area x extent [m]
    D_y: float = 20.0          # service-area y extent [m]
    L: float | None = None     # waveguide length [m], default D_x
    N: int = 4                 # pinching antennas per waveguide
    K: int = 5                 # number of users
    P_max: float = 0.03162277660168379   # max transmit power [W] (15 dBm)
    P_f: float = 0.03162277660168379     # fixed circuit power [W] (15 dBm)
    sigma2: float = 1e-12      # noise power per user [W] (-90 dBm)
    R_min: float = 0.5         # per-user minimum rate [bps/Hz]
    delta_min: float | None = None  # minimum antenna spacing [m], default lambda/2

    def __post_init__(self) -> None:
        if self.f_c <= 0.0 or self.n_eff <= 1.0:
            raise ValueError("need f_c > 0 and n_eff > 1")
        if self.d <= 0.0 or self.D_x <= 0.0 or self.D_y <= 0.0:
            raise ValueError("geometry dimensions must be positive")
        if self.L is None:
            object.__setattr__(self, "L", float(self.D_x))
        if self.L <= 0.0:
            raise ValueError("waveguide length must be positive")
        if self.N < 1 or self.K < 1:
            raise ValueError("need at least one antenna and one user")
        if self.P_max < 0.0 or self.P_f <= 0.0 or self.sigma2 <= 0.0:
            raise ValueError("invalid power configuration")
        if self.R_min < 0.0:
            raise ValueError("R_min must be non-negative")
        if self.delta_min is None:
            object.__setattr__(self, "delta_min", self.lam / 2.0)
        if self.delta_min <= 0.0:
            raise ValueError("delta_min must be positive")
        if self.N * self.delta_min > self.L:
            raise ValueError("waveguide too short for N antennas at delta_min spacing")

    @property
    def lam(self) -> float:
        """Free-space wavelength [m]."""
        return SPEED_OF_LIGHT / self.f_c

    @property
    def lam_g(self) -> float:
        """Guided wavelength inside the waveguide [m]."""
        return self.lam / self.n_eff

    @property
    def eta(self) -> float:
        """Free-space path-loss coefficient [m^2]."""
        return self.lam * self.lam / (16.0 * math.pi * math.pi)

    def contains(self, user: UserLocation) -> bool:
        """True if the user lies inside the service rectangle."""
        return 0.0 <= user.x <= self.D_x and abs(user.y) <= self.D_y / 2.0


def check_antenna_positions(xs: Sequence[float], params: SystemParams) -> None:
    """Validate antenna x coordinates: N entries in [0, L], strictly
    increasing, consecutive gaps >= delta_min.  Raises ValueError."""
    if len(xs) != params.N:
        raise ValueError(f"expected {params.N} antenna positions, got {len(xs)}")
    for x in xs:
        if not (0.0 <= x <= params.L):
            raise ValueError(f"antenna position {x} outside waveguide [0, {params.L}]")
    for a, b in zip(xs, xs[1:]):
        # 1e-12 m slack: sub-picometre rounding from position arithmetic
        if b - a < params.delta_min - 1e-12:
            raise ValueError(f"antenna gap {b - a} below minimum spacing {params.delta_min}")


def effective_gain_exact(
    user: UserLocation, xs: Sequence[float], params: SystemParams
) -> float:
    """Noise-normalized channel gain of the coherent N-antenna sum [1/W].

    Each antenna at (x_n, 0, d) contributes amplitude sqrt(eta)/D_n with
    phase (2 pi / lambda) D_n from spherical free-space propagation plus
    (2 pi / lambda_g) x_n accumulated inside the waveguide from the feed
    at x = 0.  D_n >= d > 0, so the sum is always finite.
    """
    w_free = 2.0 * math.pi / params.lam
    w_guide = 2.0 * math.pi / params.lam_g
    amp = math.sqrt(params.eta)
    y2d2 = user.y * user.y + params.d * params.d
    re = 0.0
    im = 0.0
    for x in xs:
        dx = x - user.x
        dist = math.sqrt(dx * dx + y2d2)
        phase = w_free * dist + w_guide * x
        a = amp / dist
        re += a * math.cos(phase)
        im -= a * math.sin(phase)
    return (re * re + im * im) / (len(xs) * params.sigma2)


def effective_gain_aligned(
    user: UserLocation, xs: Sequence[float], params: SystemParams
) -> float:
    """Gain when all N contributions add in phase: (sum sqrt(eta)/D_n)^2/(N sigma^2).

    Valid for positions produced by phase-aligned placement; an upper
    bound on effective_gain_exact for arbitrary positions.
    """
    amp = math.sqrt(params.eta)
    y2d2 = user.y * user.y + params.d * params.d
    s = 0.0
    for x in xs:
        dx = x - user.x
        s += amp / math.sqrt(dx * dx + y2d2)
    return s * s / (len(xs) * params.sigma2)


def effective_gain_approx(user: UserLocation, params: SystemParams) -> float:
    """Equal-distance approximation eta*N / ((y^2 + d^2) sigma^2).

    Treats all antennas as sitting at the waveguide point closest to the
    user (x = x_user), which placement makes nearly true.
    """
    y2d2 = user.y * user.y + params.d * params.d
    return params.eta * params.N / (y2d2 * params.sigma2)


def user_rate(tau: float, p: float, h: float) -> float:
    """Achievable rate tau * log2(1 + p*h) [bps/Hz] for time share tau."""
    if tau == 0.0:
        return 0.0
    return tau * math.log2(1.0 + p * h)


def ee_objective(
    taus: Sequence[float],
    ps: Sequence[float],
    hs: Sequence[float],
    p_f: float,
) -> float:
    """Energy efficiency: sum of user rates over total consumed power [bps/Hz/W]."""
    if not (len(taus) == len(ps) == len(hs)):
        raise ValueError("taus, ps, hs must have equal length")
    total = p_f + sum(ps)
    if total <= 0.0:
        raise ValueError("total power must be positive")
    return sum(user_rate(t, p, h) for t, p, h in zip(taus, ps, hs)) / total


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across placement and allocation."""

    phase_tol: float = 1e-9        # max |total phase mod 2pi| after alignment [rad]
    bisect_x_tol: float = 1e-13    # bisection stops below this interval width [m]
    bisect_max_iter: int = 200
    dinkelbach_tol: float = 1e-6   # stop when beta increment falls below
    dinkelbach_max_iter: int = 100
    bcd_tol: float = 1e-6          # stop when EE improvement falls below
    bcd_max_iter: int = 50


DEFAULT_TOL = Tolerances()
