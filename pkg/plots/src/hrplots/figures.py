"""Figure assembly: block-autocovariance stems and theory-vs-empirics overlay.

Rendering uses the object-oriented matplotlib API with an Agg canvas, so no
interactive backend is ever touched.  Figures plot the rows exactly as
loaded; huge absolute lags never reach an axis because blocks are drawn
against the within-block ordinal r (the lag is r times the block spacing).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .data import (
    AcovRow,
    OverlayRow,
    SchemaError,
    load_acov,
    load_overlay,
    plottable_acov,
)


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSV, kind, optional y truncation, output path."""

    csv_path: str
    kind: str                      # "block-acov" | "overlay"
    out_path: str
    y_cap: Optional[float] = None  # overlay truncation, e.g. 1.25

    def __post_init__(self) -> None:
        if self.kind not in ("block-acov", "overlay"):
            raise ValueError(f"unknown figure kind {self.kind!r}")


def build_block_acov_figure(rows: Sequence[AcovRow]) -> tuple[Figure, list[AcovRow]]:
    """Stem plot per block against the within-block ordinal r."""
    used = plottable_acov(rows)
    if not used:
        raise SchemaError("no in-block rows to plot")
    blocks = sorted({row.block for row in used})
    fig = Figure(figsize=(10, 3.2 * len(blocks)))
    for i, k in enumerate(blocks, start=1):
        ax = fig.add_subplot(len(blocks), 1, i)
        rs = [row.r for row in used if row.block == k]
        vals = [row.value for row in used if row.block == k]
        markerline, stemlines, baseline = ax.stem(rs, vals)
        markerline.set_markersize(2.5)
        stemlines.set_linewidth(0.7)
        baseline.set_linewidth(0.6)
        ax.set_xlabel(f"r  (lag = r x c_{k})")
        ax.set_ylabel("autocovariance")
        ax.set_title(f"block {k}")
        ax.grid(alpha=0.25)
    fig.tight_layout()
    return fig, used


def build_overlay_figure(
    rows: Sequence[OverlayRow], has_empirics: bool, y_cap: Optional[float] = 1.25
) -> Figure:
    """Theoretical stems plus empirical means with a +-2 SE band."""
    if not rows:
        raise SchemaError("no rows to plot")
    fig = Figure(figsize=(10, 5))
    ax = fig.add_subplot(1, 1, 1)
    lags = [row.lag for row in rows]
    theo = [row.theoretical for row in rows]
    ax.vlines(lags, 0, theo, color="tab:blue", linewidth=1.2, alpha=0.8)
    ax.plot(lags, theo, "o", color="tab:blue", markersize=4, label="theoretical")
    if has_empirics:
        emp = [row.empirical_mean for row in rows]
        se = [row.empirical_se for row in rows]
        ax.plot(lags, emp, "x", color="tab:red", markersize=5, label="empirical mean")
        ax.fill_between(
            lags,
            [m - 2 * s for m, s in zip(emp, se)],
            [m + 2 * s for m, s in zip(emp, se)],
            color="tab:red",
            alpha=0.15,
            label="+-2 SE",
        )
    ax.axhline(0.0, color="k", linewidth=0.6)
    if y_cap is not None:
        bottom = min(min(theo), 0.0) - 0.1
        ax.set_ylim(bottom, y_cap)
    ax.set_xlabel("lag")
    ax.set_ylabel("autocovariance")
    ax.legend(loc="upper right")
    ax.grid(alpha=0.25)
    fig.tight_layout()
    return fig


def _save(fig: Figure, out_path: str) -> None:
    FigureCanvasAgg(fig)
    fig.savefig(out_path, dpi=150)


def plot_block_acov(spec: FigureSpec) -> list[AcovRow]:
    """Render a block-acov CSV; returns the rows used (for --dump-plotdata)."""
    rows = load_acov(spec.csv_path)
    fig, used = build_block_acov_figure(rows)
    _save(fig, spec.out_path)
    return used


def plot_overlay(spec: FigureSpec) -> list[OverlayRow]:
    """Render a comparison CSV; returns the rows used (for --dump-plotdata)."""
    rows, has_empirics = load_overlay(spec.csv_path)
    fig = build_overlay_figure(rows, has_empirics, y_cap=spec.y_cap)
    _save(fig, spec.out_path)
    return rows
