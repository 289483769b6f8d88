"""Estimators shared by the simulators: log-log slopes, path sums,
running maxima, ensemble merging, and the moment-ratio diagnostic.

All slope fits are ordinary least squares on natural logs of checkpointed
samples.  Nonpositive samples are skipped (they only occur at early times)
and counted, never imputed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class InsufficientDataError(ValueError):
    """Fewer than two usable points inside the fit window."""


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    n_points: int
    window: tuple[float, float]
    skipped: int = 0


def loglog_slope(
    ns: Sequence[float],
    values: Sequence[float],
    window: tuple[float, float],
) -> RegressionResult:
    """OLS slope of log(values) against log(ns) inside [window[0], window[1]].

    Points with value <= 0 are skipped and counted in ``skipped``.
    """
    lo, hi = window
    if not lo <= hi:
        raise ValueError(f"fit window is empty: {window}")
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.shape != values.shape:
        raise ValueError("ns and values must have equal length")
    in_win = (ns >= lo) & (ns <= hi) & (ns > 0)
    usable = in_win & (values > 0) & np.isfinite(values)
    skipped = int(in_win.sum() - usable.sum())
    if usable.sum() < 2:
        raise InsufficientDataError(
            f"need at least 2 positive samples in window {window}, have {int(usable.sum())}"
        )
    lx = np.log(ns[usable])
    ly = np.log(values[usable])
    mx = lx.mean()
    my = ly.mean()
    dx = lx - mx
    var = float(dx @ dx)
    if var == 0.0:
        raise InsufficientDataError("all samples share one abscissa; slope undefined")
    slope = float(dx @ (ly - my)) / var
    intercept = my - slope * mx
    return RegressionResult(
        slope=slope,
        intercept=float(intercept),
        n_points=int(usable.sum()),
        window=(float(lo), float(hi)),
        skipped=skipped,
    )


def gamma_path_sum(values: Sequence[float], beta: float, gamma: float) -> float:
    """Weighted path sum over m = 1..n of m^(-beta) * values[m-1]^gamma.

    ``values`` holds s_1..s_n (nonnegative).  Accumulated in index order so
    partial sums of a prefix equal the sum of that prefix.
    """
    total = 0.0
    for m, s in enumerate(values, start=1):
        if s < 0:
            raise ValueError(f"values must be nonnegative, got {s} at m={m}")
        total += float(m) ** (-beta) * s**gamma
    return total


def running_max(values: Sequence[float]) -> np.ndarray:
    """Prefix maxima of |values|."""
    arr = np.abs(np.asarray(values, dtype=float))
    return np.maximum.accumulate(arr)


def log_checkpoints(steps: int, count: int = 512) -> np.ndarray:
    """Log-spaced integer sample times in [1, steps], deduplicated.

    Decade marks (10, 100, ...) up to ``steps`` are always included so that
    path sums can be compared at round times across configurations.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if count < 1:
        raise ValueError(f"checkpoint count must be >= 1, got {count}")
    grid = np.exp(np.linspace(0.0, math.log(steps), num=min(count, steps)))
    pts = set(int(round(g)) for g in grid)
    decade = 10
    while decade <= steps:
        pts.add(decade)
        decade *= 10
    pts.add(1)
    pts.add(steps)
    return np.array(sorted(p for p in pts if 1 <= p <= steps), dtype=np.int64)


@dataclass(frozen=True)
class PathSummary:
    """Per-path digest fed to the ensemble merge."""

    path_index: int
    seed: int
    final_state: tuple
    slope_x: float | None
    slope_maxy: float | None
    slope_gamma: float | None
    slope_maxxi: float | None = None
    max_zeta: float | None = None
    zeta_bound: float | None = None
    residual: float | None = None
    flagged_absy: int = 0

    def jsonl_record(self) -> dict:
        # fixed key order; this is the paths.jsonl schema
        return {
            "path_index": self.path_index,
            "seed": self.seed,
            "slope_x": self.slope_x,
            "slope_maxy": self.slope_maxy,
            "slope_gamma": self.slope_gamma,
            "max_zeta": self.max_zeta,
            "zeta_bound": self.zeta_bound,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class BinSpec:
    lo: float = 0.5
    hi: float = 1.0
    bins: int = 40

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bin range is empty: [{self.lo}, {self.hi}]")
        if self.bins < 1:
            raise ValueError(f"need at least one bin, got {self.bins}")


def slope_histogram(slopes: Iterable[float], spec: BinSpec = BinSpec()) -> list[tuple[float, float, int]]:
    """Fixed-width histogram rows (lo, hi, count) covering every finite slope.

    The requested range is extended by whole bin-widths when a slope falls
    outside it, so counts always total the number of finite slopes.
    """
    vals = np.array([s for s in slopes if s is not None and math.isfinite(s)], dtype=float)
    width = (spec.hi - spec.lo) / spec.bins
    lo, hi = spec.lo, spec.hi
    if vals.size:
        while vals.min() < lo:
            lo -= width
        while vals.max() >= hi:
            hi += width
    nbins = int(round((hi - lo) / width))
    edges = lo + width * np.arange(nbins + 1)
    counts, _ = np.histogram(vals, bins=edges)
    rows = [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(nbins)]
    assert sum(r[2] for r in rows) == vals.size
    return rows


def population_std(values: Sequence[float]) -> float:
    """Standard deviation with the 1/N normalizer (not Bessel's 1/(N-1))."""
    arr = np.asarray(values, dtype=float)
    return float(np.sqrt(np.mean((arr - arr.mean()) ** 2)))


def moment_band_check(
    abs_y: np.ndarray,
    order: float,
    ns: Sequence[int],
) -> list[tuple[int, float, float]]:
    """Rows (n, mean |Y_n|^order over paths, ratio to n^(order/2)).

    ``abs_y`` has one row per path, one column per checkpoint; NaN entries
    (flagged observations) are excluded from the mean.
    """
    abs_y = np.asarray(abs_y, dtype=float)
    ns = np.asarray(ns, dtype=np.int64)
    if abs_y.ndim != 2 or abs_y.shape[1] != ns.shape[0]:
        raise ValueError("abs_y must be (paths, checkpoints) matching ns")
    out = []
    with np.errstate(invalid="ignore"):
        powered = np.abs(abs_y) ** order
    for j, n in enumerate(ns):
        col = powered[:, j]
        col = col[np.isfinite(col)]
        est = float(col.mean()) if col.size else math.nan
        ratio = est / float(n) ** (order / 2.0) if n > 0 else math.nan
        out.append((int(n), est, ratio))
    return out


@dataclass(frozen=True)
class EnsembleSummary:
    """Merged view of one ensemble; serialized into summary.json."""

    n_paths: int
    steps: int
    chi_predicted: float
    fit_window: tuple[float, float]
    slope_mean: float | None
    slope_stddev: float | None
    slope_histogram: list[tuple[float, float, int]]
    moment_order: float
    moment_curve: list[tuple[int, float, float]]
    slope_maxy_mean: float | None = None
    slope_gamma_mean: float | None = None
    flagged_absy_total: int = 0


def _finite_or_none(values: list[float | None]) -> list[float]:
    return [v for v in values if v is not None and math.isfinite(v)]


def merge_summaries(
    summaries: Sequence[PathSummary],
    steps: int,
    chi_predicted: float,
    fit_window: tuple[float, float],
    moment_order: float,
    moment_curve: list[tuple[int, float, float]],
    bin_spec: BinSpec = BinSpec(),
) -> EnsembleSummary:
    """Merge per-path digests in ascending path order.

    The result is invariant under permutation of ``summaries`` because they
    are re-sorted by path_index before any reduction.
    """
    ordered = sorted(summaries, key=lambda s: s.path_index)
    seen = [s.path_index for s in ordered]
    if len(set(seen)) != len(seen):
        raise ValueError("duplicate path_index in summaries")
    slopes = _finite_or_none([s.slope_x for s in ordered])
    maxy = _finite_or_none([s.slope_maxy for s in ordered])
    gam = _finite_or_none([s.slope_gamma for s in ordered])
    return EnsembleSummary(
        n_paths=len(ordered),
        steps=steps,
        chi_predicted=chi_predicted,
        fit_window=(float(fit_window[0]), float(fit_window[1])),
        slope_mean=float(np.mean(slopes)) if slopes else None,
        slope_stddev=population_std(slopes) if slopes else None,
        slope_histogram=slope_histogram(slopes, bin_spec),
        moment_order=moment_order,
        moment_curve=moment_curve,
        slope_maxy_mean=float(np.mean(maxy)) if maxy else None,
        slope_gamma_mean=float(np.mean(gam)) if gam else None,
        flagged_absy_total=sum(s.flagged_absy for s in ordered),
    )
