"""CSV reports and their figures.

The CSV files are the primary output; PNGs are rendered next to them with the
Agg backend and without timestamps or software tags, so reruns are
byte-identical.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

STRETCH_BINS = (1.0, 1.0 + 1e-9, 1.001, 1.01, 1.05, 1.1, 1.25, 1.5, 2.0, 4.0, math.inf)


def write_csv(path, header: list[str], rows) -> None:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(header)
    for row in rows:
        out.writerow([repr(x) if isinstance(x, float) else x for x in row])
    Path(path).write_text(buf.getvalue())


def stretch_histogram(ratios: np.ndarray) -> list[tuple[float, float, int]]:
    """Counts of finite stretch values per bin ``[lo, hi)``."""
    r = ratios[np.isfinite(ratios)]
    edges = np.asarray(STRETCH_BINS)
    counts, _ = np.histogram(r, bins=edges)
    return [(float(lo), float(hi), int(c)) for lo, hi, c in zip(edges[:-1], edges[1:], counts)]


def _figure(ncols: int = 1):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rc("font", family="DejaVu Sans", size=9)
    plt.rc("axes", linewidth=0.6)
    fig, ax = plt.subplots(1, ncols, figsize=(5 if ncols == 1 else 3.5 * ncols, 3), dpi=100)
    return plt, fig, ax


def _save(plt, fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)


def plot_stretch(hist, path, epsilon: float | None = None) -> None:
    plt, fig, ax = _figure()
    labels = ["exact" if lo == 1.0 and hi - lo < 1e-6 else f"<{hi:g}" if math.isfinite(hi)
              else f">={lo:g}" for lo, hi, _ in hist]
    ax.bar(range(len(hist)), [c for _, _, c in hist], color="0.35")
    ax.set_xticks(range(len(hist)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_xlabel("stretch")
    ax.set_ylabel("pairs")
    if epsilon is not None:
        ax.set_title(f"bound 1+eps = {1 + epsilon:g}")
    _save(plt, fig, path)


def plot_bench(summary: list[tuple[str, float, float, float]], path) -> None:
    """``summary`` rows are (method, mean time, mean rounds, mean relaxations)."""
    plt, fig, axes = _figure(2)
    names = [s[0] for s in summary]
    for ax, col, label in ((axes[0], 2, "rounds per source"),
                           (axes[1], 3, "relaxations per source")):
        ax.bar(range(len(names)), [s[col] for s in summary], color="0.35")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names)
        ax.set_yscale("log")
        ax.set_ylabel(label)
    _save(plt, fig, path)
