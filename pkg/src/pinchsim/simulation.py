"""Seeded Monte Carlo over random user drops and parameter sweeps.

Reproducibility contract: every trial's user drop is generated from a
per-trial seed derived from (master_seed, trial index) by the splitmix64
finalizer documented in trial_seed, and a sweep reuses the identical
drops at every axis value (paired trials), so two runs with the same
master seed and configuration agree bit for bit.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .baselines import Scheme, allocate_scheme, scheme_gains
from .model import DEFAULT_TOL, SystemParams, Tolerances, UserLocation, dbm_to_watts

AXES = ("p_max_dbm", "r_min", "n_antennas")
POLICIES = ("exclude_infeasible", "zero_infeasible")

_MASK64 = (1 << 64) - 1


def trial_seed(master_seed: int, index: int) -> int:
    """Per-trial RNG seed: splitmix64 finalizer of master_seed + (index+1)·golden.

    Spelled out so external tooling can regenerate any single trial:
    z = (master + (index+1)*0x9E3779B97F4A7C15) mod 2^64, then
    z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27;
    z *= 0x94D049BB133111EB; z ^= z>>31 (all mod 2^64).
    """
    z = (master_seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def sample_users(seed: int, params: SystemParams) -> tuple[UserLocation, ...]:
    """K users uniform over [0, D_x] x [-D_y/2, D_y/2], deterministic in seed."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, params.D_x, params.K)
    ys = rng.uniform(-params.D_y / 2.0, params.D_y / 2.0, params.K)
    return tuple(UserLocation(float(x), float(y)) for x, y in zip(xs, ys))


@dataclass(frozen=True)
class Scenario:
    """One user drop under one parameter set."""

    params: SystemParams
    users: tuple[UserLocation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "users", tuple(self.users))
        if len(self.users) != self.params.K:
            raise ValueError("user count does not match params.K")
        for user in self.users:
            if not self.params.contains(user):
                raise ValueError(f"user {user} outside the service area")


@dataclass(frozen=True)
class SchemeOutcome:
    """One scheme's result on one drop; ee is present iff feasible."""

    feasible: bool
    ee: float | None = None
    sum_rate: float | None = None
    total_power: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class TrialRecord:
    index: int
    seed: int
    outcomes: Mapping[Scheme, SchemeOutcome]


def run_trial(
    scenario: Scenario,
    schemes: Sequence[Scheme] | None = None,
    tol: Tolerances = DEFAULT_TOL,
    *,
    index: int = 0,
    seed: int = 0,
    shared_gains: dict[str, tuple[float, ...]] | None = None,
) -> TrialRecord:
    """Evaluate the requested schemes on one drop.

    Failures inside a scheme are recorded on its outcome instead of
    aborting, so a sweep survives pathological drops.  shared_gains
    ("pinch"/"ula" -> gain vector) lets a caller reuse geometry work
    across calls that differ only in power or rate settings; the dict
    is filled in place with whatever had to be computed.
    """
    scheme_list = tuple(Scheme) if schemes is None else tuple(schemes)
    cache = shared_gains if shared_gains is not None else {}
    outcomes: dict[Scheme, SchemeOutcome] = {}
    for scheme in scheme_list:
        flavor = "ula" if scheme is Scheme.CONVENTIONAL else "pinch"
        try:
            hs = cache.get(flavor)
            if hs is None:
                hs = scheme_gains(scheme, scenario, tol)
                cache[flavor] = hs
            result, feas = allocate_scheme(scheme, hs, scenario.params, tol)
            if result is None:
                outcomes[scheme] = SchemeOutcome(feasible=False)
            else:
                outcomes[scheme] = SchemeOutcome(
                    feasible=True,
                    ee=result.ee,
                    sum_rate=sum(result.rates),
                    total_power=scenario.params.P_f + sum(result.ps),
                )
        except Exception as exc:  # noqa: BLE001 - per-scheme failures must not kill a sweep
            outcomes[scheme] = SchemeOutcome(
                feasible=False, error=f"{type(exc).__name__}: {exc}"
            )
    return TrialRecord(index, seed, outcomes)


def apply_axis(params: SystemParams, axis: str, value: float) -> SystemParams:
    """params with one sweep axis applied (dBm converted at this boundary)."""
    if axis == "p_max_dbm":
        return replace(params, P_max=dbm_to_watts(value))
    if axis == "r_min":
        return replace(params, R_min=float(value))
    if axis == "n_antennas":
        n = int(value)
        if n != value:
            raise ValueError("n_antennas values must be integers")
        return replace(params, N=n)
    raise ValueError(f"unknown sweep axis: {axis}")


@dataclass(frozen=True)
class AggregateStats:
    """Per-scheme summary at one axis value; mean/stderr are None when no
    trial was feasible under the exclude policy."""

    mean_ee: float | None
    stderr_ee: float | None
    feasibility_rate: float
    n_feasible: int


def aggregate(
    records: Sequence[TrialRecord],
    policy: str = "exclude_infeasible",
) -> dict[Scheme, AggregateStats]:
    """Mean EE, its standard error, and feasibility rate per scheme.

    exclude_infeasible averages over feasible trials only;
    zero_infeasible scores infeasible trials as EE = 0.
    """
    if not records:
        raise ValueError("no records to aggregate")
    if policy not in POLICIES:
        raise ValueError(f"unknown policy: {policy}")
    out: dict[Scheme, AggregateStats] = {}
    for scheme in records[0].outcomes:
        outcomes = [r.outcomes[scheme] for r in records]
        feasible = [o for o in outcomes if o.feasible]
        rate = len(feasible) / len(outcomes)
        if policy == "exclude_infeasible":
            values = [o.ee for o in feasible]
        else:
            values = [o.ee if o.feasible else 0.0 for o in outcomes]
        if not values:
            out[scheme] = AggregateStats(None, None, rate, 0)
            continue
        mean = statistics.fmean(values)
        if len(values) >= 2:
            stderr = statistics.stdev(values) / math.sqrt(len(values))
        else:
            stderr = 0.0
        out[scheme] = AggregateStats(mean, stderr, rate, len(feasible))
    return out


@dataclass(frozen=True)
class SweepResult:
    """Aggregated sweep: stats[i] maps scheme -> AggregateStats at values[i]."""

    axis: str
    values: tuple[float, ...]
    schemes: tuple[Scheme, ...]
    n_trials: int
    master_seed: int
    policy: str
    stats: tuple[Mapping[Scheme, AggregateStats], ...]

    def rows(self):
        """CSV-ready tuples: (axis, value, scheme label, mean, stderr, rate, trials, seed)."""
        for value, per_scheme in zip(self.values, self.stats):
            for scheme in self.schemes:
                s = per_scheme[scheme]
                yield (
                    self.axis,
                    value,
                    scheme.value,
                    s.mean_ee,
                    s.stderr_ee,
                    s.feasibility_rate,
                    self.n_trials,
                    self.master_seed,
                )


def run_sweep(
    axis: str,
    values: Sequence[float],
    n_trials: int,
    master_seed: int,
    params: SystemParams,
    schemes: Sequence[Scheme] | None = None,
    policy: str = "exclude_infeasible",
    tol: Tolerances = DEFAULT_TOL,
) -> SweepResult:
    """Paired Monte Carlo sweep along one axis.

    Trial t draws one user drop and evaluates it at every axis value, so
    curves differ only through the swept parameter rather than through
    sampling noise.  Channel gains are cached per (geometry flavor, N)
    within a trial; no other state crosses trial boundaries.
    """
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis: {axis}")
    values = tuple(values)
    if not values:
        raise ValueError("values must be non-empty")
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if policy not in POLICIES:
        raise ValueError(f"unknown policy: {policy}")
    scheme_list = tuple(Scheme) if schemes is None else tuple(schemes)
    varied = tuple(apply_axis(params, axis, v) for v in values)
    per_value_records: list[list[TrialRecord]] = [[] for _ in values]
    for t in range(n_trials):
        seed = trial_seed(master_seed, t)
        users = sample_users(seed, params)
        gain_cache: dict[tuple[str, int], tuple[float, ...]] = {}
        for vi, params_v in enumerate(varied):
            scenario = Scenario(params_v, users)
            shared: dict[str, tuple[float, ...]] = {}
            for flavor in ("pinch", "ula"):
                cached = gain_cache.get((flavor, params_v.N))
                if cached is not None:
                    shared[flavor] = cached
            record = run_trial(
                scenario, scheme_list, tol, index=t, seed=seed, shared_gains=shared
            )
            for flavor, hs in shared.items():
                gain_cache[(flavor, params_v.N)] = hs
            per_value_records[vi].append(record)
    stats = tuple(aggregate(recs, policy) for recs in per_value_records)
    return SweepResult(axis, values, scheme_list, n_trials, master_seed, policy, stats)
