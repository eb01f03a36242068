"""Small-multiples renderer for perturbation-experiment CSVs.

Input schema (exactly the experiment harness's CSV):

    rule,op,p,phi,level,num_elections,frac_changed,avg_replaced,std_replaced,seed

The grid shows one panel per (rule, phi) pair: rules as columns, phi as
rows, perturbation level on the x axis.  Within a panel there is one line
per (p, op) combination; p picks the color (lowest p is blue, next
orange), op picks the line style (add solid, remove dashed).  A shaded
+-1 standard deviation band is drawn for the avg_replaced metric only:
frac_changed is a per-cell proportion with no per-election spread in this
data, so a band there would be fabricated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

CSV_FIELDS = (
    "rule", "op", "p", "phi", "level", "num_elections",
    "frac_changed", "avg_replaced", "std_replaced", "seed",
)
METRICS = ("frac_changed", "avg_replaced")
METRIC_LABELS = {
    "frac_changed": "change probability",
    "avg_replaced": "avg replaced members",
}
DEFAULT_RULE_ORDER = ("av", "greedycc", "greedypav", "phragmen")
SERIES_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple")
OP_STYLES = {"add": "-", "remove": "--"}


@dataclass(frozen=True)
class Row:
    rule: str
    op: str
    p: float
    phi: float
    level: float
    metric_value: float
    std: float


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    metric: str
    out_path: str
    rule_order: tuple[str, ...] = DEFAULT_RULE_ORDER
    phi_order: tuple[float, ...] = field(default=())  # empty: ascending from data

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")


def read_rows(csv_path: str, metric: str) -> list[Row]:
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(CSV_FIELDS):
            raise ValueError(f"{csv_path}: unexpected header {header}")
        col = {name: i for i, name in enumerate(header)}
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(CSV_FIELDS):
                raise ValueError(f"{csv_path}:{lineno}: wrong column count")
            rows.append(
                Row(
                    rule=raw[col["rule"]],
                    op=raw[col["op"]],
                    p=float(raw[col["p"]]),
                    phi=float(raw[col["phi"]]),
                    level=float(raw[col["level"]]),
                    metric_value=float(raw[col[metric]]),
                    std=float(raw[col["std_replaced"]]),
                )
            )
    if not rows:
        raise ValueError(f"{csv_path}: no data rows")
    return rows


def render_grid(spec: PlotSpec):
    """Render the grid and write it to spec.out_path; returns the figure
    so callers can inspect the plotted data."""
    rows = read_rows(spec.csv_path, spec.metric)
    rules = [r for r in spec.rule_order if any(row.rule == r for row in rows)]
    extras = sorted({row.rule for row in rows} - set(rules))
    rules += extras
    data_phis = {row.phi for row in rows}
    if spec.phi_order:
        missing = [phi for phi in spec.phi_order if phi not in data_phis]
        if missing:
            raise ValueError(f"phi values not present in the data: {missing}")
        phis = list(spec.phi_order)
    else:
        phis = sorted(data_phis)
    ps = sorted({row.p for row in rows})
    ops = sorted({row.op for row in rows})
    color_of = {p: SERIES_COLORS[i % len(SERIES_COLORS)] for i, p in enumerate(ps)}

    fig, axes = plt.subplots(
        nrows=len(phis),
        ncols=len(rules),
        figsize=(2.8 * len(rules), 2.2 * len(phis)),
        sharex=True,
        sharey=True,
        squeeze=False,
    )
    for ri, phi in enumerate(phis):
        for ci, rule in enumerate(rules):
            ax = axes[ri][ci]
            panel = [row for row in rows if row.rule == rule and row.phi == phi]
            for p in ps:
                for op in ops:
                    series = sorted(
                        (row for row in panel if row.p == p and row.op == op),
                        key=lambda row: row.level,
                    )
                    if not series:
                        continue
                    xs = [row.level for row in series]
                    ys = [row.metric_value for row in series]
                    ax.plot(
                        xs,
                        ys,
                        OP_STYLES.get(op, "-"),
                        color=color_of[p],
                        linewidth=1.2,
                        label=f"p={p:g} {op}",
                    )
                    if spec.metric == "avg_replaced":
                        lo = [row.metric_value - row.std for row in series]
                        hi = [row.metric_value + row.std for row in series]
                        ax.fill_between(xs, lo, hi, color=color_of[p], alpha=0.2, linewidth=0)
            if ri == 0:
                ax.set_title(rule, fontsize=10)
            if ci == 0:
                ax.set_ylabel(f"phi={phi:g}", fontsize=9)
            if ri == len(phis) - 1:
                ax.set_xlabel("perturbation level", fontsize=9)
    handles, labels = axes[0][0].get_legend_handles_labels()
    if handles:
        fig.legend(handles, labels, loc="lower center", ncol=len(handles), fontsize=8)
    fig.suptitle(METRIC_LABELS[spec.metric], fontsize=11)
    fig.tight_layout(rect=(0, 0.06, 1, 0.96))
    fig.savefig(spec.out_path, dpi=120, metadata={"Software": None})
    return fig


def plotted_data(fig) -> list[list[tuple[tuple[float, float], ...]]]:
    """Per-panel line coordinates, for structural comparisons in tests."""
    out = []
    for ax in fig.axes:
        lines = [tuple(map(tuple, line.get_xydata())) for line in ax.get_lines()]
        out.append(lines)
    return out


__version__ = "0.1.0"
