"""Figure rendering for classification sweeps and delay reports.

All plots go straight to image files through the Agg backend so the CLI
can run headless; every renderer returns the path it wrote.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .classification import DelayClass, SweepPoint  # noqa: E402
from .evaluation import ComparisonReport  # noqa: E402

PathLike = Union[str, Path]
Intervals = Sequence[tuple[DelayClass, float, float]]


def render_sweep(points: Sequence[SweepPoint], path: PathLike,
                 title: str = "Class delay ranges vs coupling factor") -> Path:
    """Shaded per-class delay bands across a coupling-factor sweep."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    if points:
        lams = [p.lam for p in points]
        classes = [dc for dc, _, _ in points[0].intervals]
        for ci, dc in enumerate(classes):
            los = [p.intervals[ci][1] for p in points]
            his = [p.intervals[ci][2] for p in points]
            ax.fill_between(lams, los, his, alpha=0.35, label=str(dc))
            ax.plot(lams, his, linewidth=1.0)
        ax.legend(loc="upper left", fontsize=8, ncol=2)
    ax.set_xlabel("coupling factor")
    ax.set_ylabel("50% delay (ps)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_intervals(intervals: Intervals, path: PathLike,
                     title: str = "Class delay intervals") -> Path:
    """Horizontal per-class delay interval bars at one parameter snapshot."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 0.6 * max(len(intervals), 4) + 1.2))
    labels = []
    for row, (dc, lo, hi) in enumerate(intervals):
        ax.barh(row, max(hi - lo, 0.02), left=lo, height=0.5)
        labels.append(str(dc))
    ax.set_yticks(range(len(labels)), labels)
    ax.invert_yaxis()
    ax.set_xlabel("50% delay (ps)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_wire_profile(comparison: ComparisonReport, path: PathLike) -> Path:
    """Per-wire worst delays of every evaluated codebook, one line each."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for entry in comparison.entries:
        wires = range(1, entry.width + 1)
        ax.plot(wires, entry.delays.wire_worst_ps, marker="o", markersize=3,
                label=f"{entry.label} (n={entry.width})")
    if comparison.entries:
        ax.legend(fontsize=8)
        ax.set_xticks(range(1, max(e.width for e in comparison.entries) + 1))
    ax.set_xlabel("wire")
    ax.set_ylabel("worst 50% delay (ps)")
    ax.set_title(f"Per-wire worst-case delay "
                 f"(lambda={comparison.params.lam:g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
