"""The two figure types: log-log growth plot and slope histogram.

Rendering is deterministic: Agg backend, fixed geometry, no timestamp or
writer metadata in the PNG, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import FigureDataError, config_digest, read_histogram, read_summary, read_trajectory

FIGSIZE = (6.4, 4.8)
DPI = 100
# strip the backend's Software chunk so bytes depend on inputs only
PNG_METADATA = {"Software": None}


def _footer(summary: dict | None, window) -> str:
    win = f"window [{window[0]:g}, {window[1]:g}]" if window else "window: all points"
    if summary is None:
        return f"no config | {win}"
    return f"config {config_digest(summary)} | {win}"


def _fit_line(ns, values, window):
    log_n, log_v = [], []
    skipped = 0
    for n, v in zip(ns, values):
        if window and not window[0] <= n <= window[1]:
            continue
        if n <= 0 or not (math.isfinite(v) and v > 0):
            skipped += 1
            continue
        log_n.append(math.log(n))
        log_v.append(math.log(v))
    if len(log_n) < 2 or min(log_n) == max(log_n):
        raise FigureDataError(
            f"need at least two positive points with distinct n in the window, got {len(log_n)}"
        )
    slope, intercept = np.polyfit(log_n, log_v, 1)
    return float(slope), float(intercept), np.array(log_n), np.array(log_v), skipped


def _save(fig, out_image):
    out_image = Path(out_image)
    out_image.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_image, dpi=DPI, metadata=PNG_METADATA)
    plt.close(fig)


def plot_loglog(traj_csv, summary_json=None, out_image="loglog.png", fit_window=None) -> dict:
    """Scatter of log X against log n with the fitted regression line.

    The value column is ``X`` (or ``x``); the fit window comes from the
    argument, else the summary, else spans all points. Returns metadata
    including the fitted slope.
    """
    cols = read_trajectory(traj_csv)
    values = cols.get("X", cols.get("x"))
    if values is None:
        raise FigureDataError(f"{traj_csv}: no 'X' or 'x' column")
    summary = read_summary(summary_json) if summary_json else None
    window = fit_window
    if window is None and summary is not None:
        window = tuple(summary["fit_window"])
    if window is not None and not window[0] <= window[1]:
        raise FigureDataError(f"fit window is empty: {window}")

    slope, intercept, log_n, log_v, skipped = _fit_line(cols["n"], values, window)
    label = f"fit slope {slope:.3f}"

    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.plot(log_n, log_v, ".", markersize=3, color="#1f77b4", label="trajectory")
    span = np.array([log_n.min(), log_n.max()])
    ax.plot(span, slope * span + intercept, "-", color="#d62728", label=label)
    ax.set_xlabel("log n")
    ax.set_ylabel("log X")
    ax.legend(loc="upper left")
    footer = _footer(summary, window)
    fig.text(0.01, 0.005, footer, fontsize=7, color="0.35", family="monospace")
    _save(fig, out_image)
    return {
        "out": str(out_image),
        "slope": slope,
        "intercept": intercept,
        "n_points": int(log_n.size),
        "skipped": skipped,
        "legend_label": label,
        "footer": footer,
    }


def plot_histogram(hist_csv, summary_json=None, out_image="hist.png") -> dict:
    """Bar chart of the slope histogram with a vertical mean marker.

    The marker sits at the summary's slope_mean; without a summary it
    falls back to the count-weighted bin-center mean (for a single bin,
    the bin center). Returns metadata including the marker position.
    """
    lo, hi, count = read_histogram(hist_csv)
    summary = read_summary(summary_json) if summary_json else None
    if summary is not None:
        marker = float(summary["slope_mean"])
        window = tuple(summary["fit_window"])
    else:
        total = count.sum()
        if total <= 0:
            raise FigureDataError(f"{hist_csv}: all counts zero, no marker position")
        centers = (lo + hi) / 2.0
        marker = float((centers * count).sum() / total)
        window = None
    label = f"mean = {marker:.4f}"

    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.bar(lo, count, width=hi - lo, align="edge", color="#1f77b4", edgecolor="white")
    ax.axvline(marker, color="#d62728", linestyle="--", label=label)
    ax.set_xlabel("fitted slope")
    ax.set_ylabel("paths")
    ax.legend(loc="upper left")
    footer = _footer(summary, window)
    fig.text(0.01, 0.005, footer, fontsize=7, color="0.35", family="monospace")
    _save(fig, out_image)
    return {
        "out": str(out_image),
        "marker": marker,
        "total_count": int(count.sum()),
        "legend_label": label,
        "footer": footer,
    }
