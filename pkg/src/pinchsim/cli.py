"""Command-line front end: JSON config, solve/sweep/figures subcommands, CSV output.

Exit codes: 0 success, 1 bad flags or config, 2 infeasible solve, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path
from typing import Mapping, Sequence

from .allocator import AllocationResult, Feasibility, InfeasibleError
from .baselines import Scheme, allocate_scheme, scheme_gains
from .model import SystemParams, dbm_to_watts
from .simulation import (
    AXES,
    POLICIES,
    Scenario,
    SweepResult,
    run_sweep,
    sample_users,
)

CSV_HEADER = "axis,value,scheme,mean_ee,stderr_ee,feasibility_rate,n_trials,seed"

_SCHEME_LABELS = tuple(s.value for s in Scheme)

# the three stock sweeps behind the figures subcommand
FIGURE_SWEEPS = (
    ("fig2.csv", "p_max_dbm", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)),
    ("fig3.csv", "r_min", (0.25, 0.5, 0.75, 1.0, 1.25, 1.5)),
    ("fig4.csv", "n_antennas", (1.0, 2.0, 4.0, 8.0)),
)


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


class UsageError(Exception):
    """Bad command line; maps to exit code 1."""


def parse_values(text: str) -> tuple[float, ...]:
    """Axis values from either a comma list or an inclusive start:step:stop grid."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:step:stop, got {text!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"grid has a non-numeric part: {text!r}") from None
        if step <= 0.0:
            raise ConfigError("grid step must be positive")
        if stop < start:
            raise ConfigError("grid stop must not be below start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    try:
        values = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"bad value list: {text!r}") from None
    if not values:
        raise ConfigError("empty value list")
    return values


@dataclasses.dataclass
class RunConfig:
    """Flat run configuration; powers in dBm, lengths in metres.

    l_m and delta_min_m default to the waveguide spanning the service
    area and half-wavelength spacing when left null.
    """

    f_c_hz: float = 28e9
    n_eff: float = 1.4
    d_m: float = 3.0
    d_x_m: float = 60.0
    d_y_m: float = 20.0
    l_m: float | None = None
    delta_min_m: float | None = None
    n_antennas: int = 4
    n_users: int = 5
    p_max_dbm: float = 15.0
    p_f_dbm: float = 15.0
    sigma2_dbm: float = -90.0
    r_min: float = 0.5
    schemes: tuple[str, ...] = _SCHEME_LABELS
    axis: str | None = None
    values: tuple[float, ...] | None = None
    n_trials: int = 10000
    master_seed: int = 1
    policy: str = "exclude_infeasible"
    out: str | None = None

    def to_system_params(self) -> SystemParams:
        try:
            return SystemParams(
                f_c=float(self.f_c_hz),
                n_eff=float(self.n_eff),
                d=float(self.d_m),
                D_x=float(self.d_x_m),
                D_y=float(self.d_y_m),
                L=None if self.l_m is None else float(self.l_m),
                N=self.n_antennas,
                K=self.n_users,
                P_max=dbm_to_watts(float(self.p_max_dbm)),
                P_f=dbm_to_watts(float(self.p_f_dbm)),
                sigma2=dbm_to_watts(float(self.sigma2_dbm)),
                R_min=float(self.r_min),
                delta_min=None if self.delta_min_m is None else float(self.delta_min_m),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def scheme_list(self) -> tuple[Scheme, ...]:
        return tuple(Scheme(label) for label in self.schemes)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _validate_config(cfg: RunConfig) -> None:
    for key in ("f_c_hz", "n_eff", "d_m", "d_x_m", "d_y_m",
                "p_max_dbm", "p_f_dbm", "sigma2_dbm", "r_min"):
        if not _is_number(getattr(cfg, key)):
            raise ConfigError(f"{key}: expected a number")
    for key in ("l_m", "delta_min_m"):
        value = getattr(cfg, key)
        if value is not None and not _is_number(value):
            raise ConfigError(f"{key}: expected a number or null")
    for key in ("n_antennas", "n_users", "n_trials"):
        value = getattr(cfg, key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigError(f"{key}: expected an integer >= 1")
    if (not isinstance(cfg.master_seed, int) or isinstance(cfg.master_seed, bool)
            or cfg.master_seed < 0):
        raise ConfigError("master_seed: expected an integer >= 0")
    if cfg.r_min < 0.0:
        raise ConfigError("r_min: must be >= 0")
    if cfg.policy not in POLICIES:
        raise ConfigError(f"policy: must be one of {', '.join(POLICIES)}")
    if cfg.axis is not None and cfg.axis not in AXES:
        raise ConfigError(f"axis: must be one of {', '.join(AXES)}")
    if cfg.out is not None and not isinstance(cfg.out, str):
        raise ConfigError("out: expected a path string")


def _build_config(data: Mapping) -> RunConfig:
    known = {f.name for f in dataclasses.fields(RunConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown config key: {key}")
    data = dict(data)
    if "schemes" in data:
        raw = data["schemes"]
        if isinstance(raw, str):
            raw = [p for p in raw.split(",") if p]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("schemes: expected a non-empty list of labels")
        for label in raw:
            if label not in _SCHEME_LABELS:
                raise ConfigError(f"schemes: unknown label {label!r}")
        data["schemes"] = tuple(raw)
    if data.get("values") is not None:
        raw = data["values"]
        if isinstance(raw, str):
            data["values"] = parse_values(raw)
        elif isinstance(raw, list) and raw and all(_is_number(v) for v in raw):
            data["values"] = tuple(float(v) for v in raw)
        else:
            raise ConfigError("values: expected a list of numbers or a grid string")
    cfg = RunConfig(**data)
    _validate_config(cfg)
    return cfg


def load_config(path) -> RunConfig:
    """Parse a JSON config file; an empty file yields all defaults."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return RunConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return _build_config(data)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(value, ".9g")


def write_csv(sweep: SweepResult, path) -> None:
    """Fixed-schema CSV: 9-significant-digit floats, LF endings, UTF-8.

    Means that do not exist (no feasible trial under the exclude
    policy) become empty fields, keeping the column count stable.
    """
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for row in sweep.rows():
            writer.writerow([_cell(c) for c in row])


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract wants 1,
    # so errors are re-raised and handled centrally
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pinchsim",
        description="Energy-efficiency optimizer and Monte Carlo harness "
        "for a TDMA pinching-antenna downlink.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="optimize one random user drop")
    solve.add_argument("--config", help="JSON config file")
    solve.add_argument("--seed", type=int, default=None,
                       help="user-drop seed (default: config master_seed)")
    solve.add_argument("--scheme", choices=_SCHEME_LABELS, default="prop")
    solve.add_argument("--json", action="store_true",
                       help="emit JSON instead of key=value lines")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="Monte Carlo sweep along one axis, written as CSV")
    sweep.add_argument("--config", help="JSON config file")
    sweep.add_argument("--axis", choices=AXES, default=None)
    sweep.add_argument("--values", default=None,
                       help="comma list or start:step:stop grid")
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--policy", choices=POLICIES, default=None)
    sweep.add_argument("--schemes", default=None, help="comma list of scheme labels")
    sweep.add_argument("--out", default=None, help="output CSV path")
    sweep.set_defaults(func=cmd_sweep)

    figures = sub.add_parser(
        "figures", help="run the three stock sweeps and write fig2/fig3/fig4 CSVs")
    figures.add_argument("--config", help="JSON config file")
    figures.add_argument("--out-dir", default="figures",
                         help="directory for the CSV files")
    figures.add_argument("--trials", type=int, default=None)
    figures.add_argument("--seed", type=int, default=None)
    figures.add_argument("--policy", choices=POLICIES, default=None)
    figures.add_argument("--plot", action="store_true",
                         help="also render PNGs (needs the pinchplot package)")
    figures.set_defaults(func=cmd_figures)
    return parser


def _load(path: str | None) -> RunConfig:
    return RunConfig() if path is None else load_config(path)


def _fmt(value: float) -> str:
    return format(value, ".9g")


def _print_solution(
    scheme: Scheme,
    result: AllocationResult | None,
    feas: Feasibility,
    hs: Sequence[float],
    params: SystemParams,
    as_json: bool,
) -> None:
    if as_json:
        payload = {
            "scheme": scheme.value,
            "feasible": result is not None,
            "gains": list(hs),
            "tau_mins": list(feas.tau_mins),
            "slack": feas.slack,
        }
        if result is not None:
            payload.update(
                ee=result.ee,
                sum_rate=sum(result.rates),
                total_power=params.P_f + sum(result.ps),
                converged=result.converged,
                iterations=result.iterations,
                ps=list(result.ps),
                taus=list(result.taus),
                rates=list(result.rates),
                trace=list(result.trace),
            )
        print(json.dumps(payload, indent=2))
        return
    print(f"scheme={scheme.value}")
    print(f"feasible={'true' if result is not None else 'false'}")
    print(f"slack={_fmt(feas.slack)}")
    for k, (h, tm) in enumerate(zip(hs, feas.tau_mins), start=1):
        print(f"h_{k}={_fmt(h)}")
        print(f"tau_min_{k}={_fmt(tm)}")
    if result is None:
        return
    print(f"ee={_fmt(result.ee)}")
    print(f"sum_rate={_fmt(sum(result.rates))}")
    print(f"total_power={_fmt(params.P_f + sum(result.ps))}")
    print(f"converged={'true' if result.converged else 'false'}")
    print(f"iterations={result.iterations}")
    for k, (p, t, r) in enumerate(zip(result.ps, result.taus, result.rates), start=1):
        print(f"p_{k}={_fmt(p)}")
        print(f"tau_{k}={_fmt(t)}")
        print(f"rate_{k}={_fmt(r)}")


def cmd_solve(args) -> int:
    cfg = _load(args.config)
    params = cfg.to_system_params()
    scheme = Scheme(args.scheme)
    seed = args.seed if args.seed is not None else cfg.master_seed
    scenario = Scenario(params, sample_users(seed, params))
    hs = scheme_gains(scheme, scenario)
    result, feas = allocate_scheme(scheme, hs, params)
    _print_solution(scheme, result, feas, hs, params, args.json)
    return 0 if result is not None else 2


def _parse_scheme_flag(text: str) -> tuple[Scheme, ...]:
    labels = [p for p in text.split(",") if p]
    if not labels:
        raise UsageError("empty --schemes list")
    try:
        return tuple(Scheme(label) for label in labels)
    except ValueError:
        raise UsageError(f"unknown scheme in --schemes: {text!r}") from None


def cmd_sweep(args) -> int:
    cfg = _load(args.config)
    params = cfg.to_system_params()
    axis = args.axis if args.axis is not None else cfg.axis
    if axis is None:
        raise UsageError("an axis is required (--axis or the config's axis key)")
    if args.values is not None:
        values = parse_values(args.values)
    elif cfg.values is not None:
        values = cfg.values
    else:
        raise UsageError("values are required (--values or the config's values key)")
    trials = args.trials if args.trials is not None else cfg.n_trials
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    seed = args.seed if args.seed is not None else cfg.master_seed
    policy = args.policy if args.policy is not None else cfg.policy
    schemes = _parse_scheme_flag(args.schemes) if args.schemes else cfg.scheme_list()
    out = args.out if args.out is not None else (cfg.out or "sweep.csv")
    sweep = run_sweep(axis, values, trials, seed, params, schemes, policy)
    write_csv(sweep, out)
    print(f"wrote {out}")
    return 0


def cmd_figures(args) -> int:
    cfg = _load(args.config)
    params = cfg.to_system_params()
    trials = args.trials if args.trials is not None else cfg.n_trials
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    seed = args.seed if args.seed is not None else cfg.master_seed
    policy = args.policy if args.policy is not None else cfg.policy
    schemes = cfg.scheme_list()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, axis, values in FIGURE_SWEEPS:
        sweep = run_sweep(axis, values, trials, seed, params, schemes, policy)
        path = out_dir / name
        write_csv(sweep, path)
        print(f"wrote {path}")
    if args.plot:
        try:
            from pinchplot import RenderError, render_figures
        except ImportError:
            print("error: --plot requires the pinchplot package", file=sys.stderr)
            return 1
        try:
            for image in render_figures(out_dir, out_dir):
                print(f"wrote {image}")
        except RenderError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
    return 0


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help prints and exits 0
        return 0 if exc.code is None else int(exc.code)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(run_cli())
