"""Readers for the three artifact formats, plus the config fingerprint."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np


class FigureDataError(ValueError):
    """Input file exists but does not carry the expected schema."""


def read_trajectory(path) -> dict[str, np.ndarray]:
    """Parse a trajectory CSV into named columns.

    Works for both walk families (``n,x,y,kappa,...`` and
    ``n,wx,wy,...,X,absY,absY_flag``); only the header is interpreted.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if "n" not in header:
        raise FigureDataError(f"{path}: no 'n' column (header: {header})")
    if data.size == 0 or data.shape[1] != len(header):
        raise FigureDataError(f"{path}: malformed trajectory CSV")
    return {name: data[:, i] for i, name in enumerate(header)}


HIST_HEADER = "bin_lo,bin_hi,count"


def read_histogram(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != HIST_HEADER:
            raise FigureDataError(f"{path}: expected header {HIST_HEADER!r}, got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0 or data.shape[1] != 3:
        raise FigureDataError(f"{path}: malformed histogram CSV")
    lo, hi, count = data[:, 0], data[:, 1], data[:, 2]
    if np.any(hi <= lo) or np.any(count < 0):
        raise FigureDataError(f"{path}: bins must have positive width and counts >= 0")
    return lo, hi, count


def read_summary(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        summary = json.load(fh)
    if "config" not in summary or "fit_window" not in summary:
        raise FigureDataError(f"{path}: not an ensemble summary (missing config/fit_window)")
    return summary


def config_digest(summary: dict) -> str:
    """Short stable fingerprint of the producing config, for footers."""
    canonical = json.dumps(summary["config"], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]
