"""Turn sweep CSVs into energy-efficiency plots, one curve per scheme.

The only input format is the simulator's delimited output with header
``axis,value,scheme,mean_ee,stderr_ee,feasibility_rate,n_trials,seed``.
Empty mean cells (axis points where no trial was feasible) are skipped;
the stderr column feeds the error bars.  Styling is fixed so rerenders
of the same data look identical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first

EXPECTED_HEADER = (
    "axis", "value", "scheme", "mean_ee", "stderr_ee",
    "feasibility_rate", "n_trials", "seed",
)

AXIS_LABELS = {
    "p_max_dbm": "Maximum transmit power (dBm)",
    "r_min": "Minimum rate requirement (bps/Hz)",
    "n_antennas": "Number of antennas",
}
Y_LABEL = "Energy efficiency (bps/Hz/W)"

LEGEND_LABELS = {
    "prop": "Prop",
    "equal_time": "Equal Time",
    "max_se": "MaxSE",
    "conventional": "Conventional",
}
MARKERS = {"prop": "o", "equal_time": "s", "max_se": "^", "conventional": "d"}
COLORS = {
    "prop": "tab:red",
    "equal_time": "tab:blue",
    "max_se": "tab:green",
    "conventional": "tab:gray",
}

FIGSIZE = (6.4, 4.4)
DPI = 150


class RenderError(Exception):
    """A CSV is missing, malformed, or holds nothing to plot."""


@dataclass(frozen=True)
class FigureSpec:
    """One stock figure: which CSV, what the x axis means, where the PNG goes."""

    csv_name: str
    x_label: str
    out_name: str


FIGURES = (
    FigureSpec("fig2.csv", AXIS_LABELS["p_max_dbm"], "fig2.png"),
    FigureSpec("fig3.csv", AXIS_LABELS["r_min"], "fig3.png"),
    FigureSpec("fig4.csv", AXIS_LABELS["n_antennas"], "fig4.png"),
)


def _float(cell: str, path: Path, what: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise RenderError(f"{path.name}: bad {what} value {cell!r}") from None


def read_curves(path) -> tuple[str, dict[str, tuple[list, list, list]]]:
    """Parse one sweep CSV into scheme -> (x, mean, stderr) series.

    Raises RenderError, always naming the file, on a missing file, a
    header mismatch, short or non-numeric rows, mixed axes, an unknown
    scheme label, or a file with no plottable means at all.
    """
    path = Path(path)
    if not path.is_file():
        raise RenderError(f"{path.name}: file not found in {path.parent}")
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise RenderError(f"{path.name}: unreadable ({exc})") from exc
    if not rows:
        raise RenderError(f"{path.name}: empty file")
    if tuple(rows[0]) != EXPECTED_HEADER:
        raise RenderError(f"{path.name}: unexpected header {rows[0]!r}")
    axis = None
    curves: dict[str, tuple[list, list, list]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(EXPECTED_HEADER):
            raise RenderError(f"{path.name}: line {lineno} has {len(row)} fields")
        row_axis, value, scheme, mean, stderr = row[0], row[1], row[2], row[3], row[4]
        if axis is None:
            axis = row_axis
        elif row_axis != axis:
            raise RenderError(f"{path.name}: mixes axes {axis!r} and {row_axis!r}")
        if scheme not in LEGEND_LABELS:
            raise RenderError(f"{path.name}: unknown scheme {scheme!r}")
        xs, ys, es = curves.setdefault(scheme, ([], [], []))
        if mean == "":
            continue
        xs.append(_float(value, path, "axis"))
        ys.append(_float(mean, path, "mean_ee"))
        es.append(_float(stderr, path, "stderr_ee") if stderr else 0.0)
    if axis is None:
        raise RenderError(f"{path.name}: no data rows")
    curves = {s: series for s, series in curves.items() if series[0]}
    if not curves:
        raise RenderError(f"{path.name}: no plottable mean values")
    return axis, curves


def render_one(csv_path, out_path=None, x_label: str | None = None):
    """Plot one CSV; returns the Figure, optionally saving it as PNG."""
    csv_path = Path(csv_path)
    axis, curves = read_curves(csv_path)
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    for scheme, (xs, ys, es) in curves.items():
        order = sorted(range(len(xs)), key=xs.__getitem__)
        ax.errorbar(
            [xs[i] for i in order],
            [ys[i] for i in order],
            yerr=[es[i] for i in order],
            marker=MARKERS[scheme],
            color=COLORS[scheme],
            label=LEGEND_LABELS[scheme],
            capsize=3,
            linewidth=1.5,
            markersize=5,
        )
    ax.set_xlabel(x_label if x_label is not None else AXIS_LABELS.get(axis, axis))
    ax.set_ylabel(Y_LABEL)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    if out_path is not None:
        try:
            fig.savefig(out_path)
        except OSError as exc:
            raise RenderError(f"cannot write {Path(out_path).name}: {exc}") from exc
    return fig


def render_figures(in_dir, out_dir) -> list[Path]:
    """Render the three stock sweep CSVs in in_dir to PNGs in out_dir."""
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for figure in FIGURES:
        out_path = out_dir / figure.out_name
        fig = render_one(in_dir / figure.csv_name, out_path, figure.x_label)
        plt.close(fig)
        written.append(out_path)
    return written
