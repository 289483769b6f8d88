"""Ensemble orchestration and on-disk artifacts.

A run is described by a RunConfig; each path gets its own stream derived
from (master_seed, path_index), workers pull paths from a thread pool, and
results are merged in ascending path order.  Output bytes therefore depend
only on the config, never on thread count or scheduling.

Artifacts: summary.json (merged statistics plus the config echo),
paths.jsonl (one fixed-schema record per path), hist.csv (slope histogram),
and optional traj_<i>.csv files.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import barycentric, drift
from .exponents import ModelParams, chi
from .rng import DEFAULT_MASTER_SEED, new_stream
from .stats import (
    BinSpec,
    EnsembleSummary,
    PathSummary,
    log_checkpoints,
    merge_summaries,
    moment_band_check,
)

MODELS = ("lattice", "lattice-verbatim", "barycentric", "barycentric-sym")

_DRIFT_VARIANTS = {"lattice": "lattice", "lattice-verbatim": "verbatim"}
_BARY_VARIANTS = {"barycentric": "original", "barycentric-sym": "symmetrized"}

#: Conjectured growth exponent for the barycentric walk's X observable.
BARYCENTRIC_CHI = 0.75

THREADS_ENV_VAR = "WALKLAB_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output bytes.

    ``threads`` and ``out_dir`` are execution details; they are excluded
    from the config echo inside summary.json so byte-level reproducibility
    holds across pool sizes and directories.
    """

    model: str = "lattice"
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 1.0
    rho: float = 1.0
    steps: int = 100_000
    paths: int = 200
    master_seed: int = DEFAULT_MASTER_SEED
    x0: float = 0.0
    y0: float = 0.0
    checkpoints: int = 512
    fit_window: tuple[float, float] | None = None
    out_dir: str | None = None
    threads: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.paths < 1:
            raise ValueError(f"paths must be >= 1, got {self.paths}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.checkpoints < 1:
            raise ValueError(f"checkpoints must be >= 1, got {self.checkpoints}")
        if self.threads < 0:
            raise ValueError(f"threads must be >= 0 (0 = auto), got {self.threads}")
        if self.fit_window is not None:
            object.__setattr__(self, "fit_window", (float(self.fit_window[0]), float(self.fit_window[1])))
            if not self.fit_window[0] <= self.fit_window[1]:
                raise ValueError(f"fit_window is empty: {self.fit_window}")

    def is_drift(self) -> bool:
        return self.model in _DRIFT_VARIANTS

    def drift_variant(self) -> str:
        return _DRIFT_VARIANTS[self.model]

    def bary_variant(self) -> str:
        return _BARY_VARIANTS[self.model]

    def model_params(self) -> ModelParams:
        return drift.params_for_variant(
            self.drift_variant(), self.alpha, self.beta, self.gamma, self.rho
        )

    def resolved_fit_window(self) -> tuple[float, float]:
        if self.fit_window is not None:
            return self.fit_window
        return drift.default_fit_window(self.steps)

    def resolved_threads(self) -> int:
        if self.threads > 0:
            return self.threads
        env = os.environ.get(THREADS_ENV_VAR, "").strip()
        if env:
            n = int(env)
            if n < 1:
                raise ValueError(f"{THREADS_ENV_VAR} must be positive, got {env}")
            return n
        return os.cpu_count() or 1

    def to_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if d["fit_window"] is not None:
            d["fit_window"] = list(d["fit_window"])
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        d = dict(d)
        if d.get("fit_window") is not None:
            d["fit_window"] = tuple(d["fit_window"])
        return cls(**d)

    def serialize(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        return cls.from_json_dict(json.loads(text))

    def summary_echo(self) -> dict:
        d = self.to_json_dict()
        d.pop("out_dir")
        d.pop("threads")
        return d


@dataclass(frozen=True)
class EnsembleResult:
    summary: EnsembleSummary
    path_summaries: list[PathSummary]
    checkpoints: np.ndarray
    abs_y: np.ndarray  # (paths, checkpoints); NaN where flagged
    max_zeta_overall: float | None
    zeta_bound: float | None
    max_residual: float | None
    unit_step_deviation: float | None
    cone_margin: float | None
    antipodal_events: int | None


def _sanitize(obj):
    # JSON has no NaN/Inf; emit null instead
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def run_ensemble(
    config: RunConfig,
    save_trajectories: bool = False,
    checkpoint_grid: np.ndarray | None = None,
) -> EnsembleResult:
    """Simulate config.paths paths and merge them.

    ``checkpoint_grid`` overrides the log-spaced default (library callers
    only; the CLI always derives the grid from the config).
    """
    if checkpoint_grid is None:
        cps = log_checkpoints(config.steps, config.checkpoints)
    else:
        cps = np.asarray(checkpoint_grid, dtype=np.int64)
    window = config.resolved_fit_window()
    out_dir = Path(config.out_dir) if config.out_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    drift_run = config.is_drift()
    params = config.model_params() if drift_run else None

    def run_one(i: int):
        stream = new_stream(config.master_seed, i)
        if drift_run:
            traj, summary = drift.simulate_drift_path(
                params,
                config.drift_variant(),
                config.steps,
                stream,
                x0=config.x0,
                y0=config.y0,
                checkpoints=cps,
                fit_window=window,
            )
            if save_trajectories and out_dir is not None:
                drift.write_trajectory_csv(out_dir / f"traj_{i}.csv", traj)
            return summary, np.abs(traj.y), None
        traj, summary, diag = barycentric.simulate_barycentric_path(
            config.bary_variant(),
            config.steps,
            stream,
            checkpoints=cps,
            fit_window=window,
        )
        if save_trajectories and out_dir is not None:
            barycentric.write_trajectory_csv(out_dir / f"traj_{i}.csv", traj)
        abs_y = np.where(traj.abs_y_flag > 0, np.nan, traj.abs_y)
        return summary, abs_y, diag

    n_workers = config.resolved_threads()
    if n_workers == 1:
        results = [run_one(i) for i in range(config.paths)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run_one, range(config.paths)))

    path_summaries = [r[0] for r in results]
    abs_y = np.vstack([r[1] for r in results])

    if drift_run:
        chi_predicted = chi(params)
        moment_order = config.gamma if config.gamma > 0 else 2.0
        max_zeta_overall = max(s.max_zeta for s in path_summaries)
        zbound = path_summaries[0].zeta_bound
        max_residual = max(s.residual for s in path_summaries)
        unit_dev = cone_margin = None
        antipodal = None
    else:
        chi_predicted = BARYCENTRIC_CHI
        moment_order = 1.0
        max_zeta_overall = zbound = max_residual = None
        diags = [r[2] for r in results]
        unit_dev = max(d.unit_step_deviation for d in diags)
        cone_margin = min(d.cone_margin for d in diags)
        antipodal = sum(d.antipodal_events for d in diags)

    curve = moment_band_check(abs_y, moment_order, cps)
    summary = merge_summaries(
        path_summaries,
        steps=config.steps,
        chi_predicted=chi_predicted,
        fit_window=window,
        moment_order=moment_order,
        moment_curve=curve,
        bin_spec=BinSpec(),
    )
    result = EnsembleResult(
        summary=summary,
        path_summaries=path_summaries,
        checkpoints=cps,
        abs_y=abs_y,
        max_zeta_overall=max_zeta_overall,
        zeta_bound=zbound,
        max_residual=max_residual,
        unit_step_deviation=unit_dev,
        cone_margin=cone_margin,
        antipodal_events=antipodal,
    )
    if out_dir is not None:
        write_artifacts(out_dir, config, result)
    return result


def summary_payload(config: RunConfig, result: EnsembleResult) -> dict:
    s = result.summary
    return _sanitize(
        {
            "config": config.summary_echo(),
            "n_paths": s.n_paths,
            "steps": s.steps,
            "chi_predicted": s.chi_predicted,
            "fit_window": list(s.fit_window),
            "slope_mean": s.slope_mean,
            "slope_stddev": s.slope_stddev,
            "slope_maxy_mean": s.slope_maxy_mean,
            "slope_gamma_mean": s.slope_gamma_mean,
            "slope_histogram": [list(r) for r in s.slope_histogram],
            "moment_order": s.moment_order,
            "moment_curve": [list(r) for r in s.moment_curve],
            "flagged_absy_total": s.flagged_absy_total,
            "max_zeta": result.max_zeta_overall,
            "zeta_bound": result.zeta_bound,
            "max_residual": result.max_residual,
            "unit_step_deviation": result.unit_step_deviation,
            "cone_margin": result.cone_margin,
            "antipodal_events": result.antipodal_events,
        }
    )


SUMMARY_FILE = "summary.json"
PATHS_FILE = "paths.jsonl"
HIST_FILE = "hist.csv"


def write_artifacts(out_dir: Path, config: RunConfig, result: EnsembleResult) -> None:
    out_dir = Path(out_dir)
    payload = summary_payload(config, result)
    (out_dir / SUMMARY_FILE).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    with open(out_dir / PATHS_FILE, "w", encoding="utf-8") as fh:
        for s in result.path_summaries:
            fh.write(json.dumps(_sanitize(s.jsonl_record())) + "\n")
    with open(out_dir / HIST_FILE, "w", encoding="utf-8") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        for lo, hi, count in result.summary.slope_histogram:
            fh.write(f"{lo!r},{hi!r},{count}\n")
