"""The planar walk Z = (X, Y) with drift kappa acting on X only.

Two concrete transition laws are provided.

``verbatim``
    Horizontal jumps ceil(kappa) and ceil(kappa)-1 with phi-weighted
    probabilities, vertical +/-1 moves with probability 1/4 each.  The
    downward jump is only available from x >= 1; below that its mass sits on
    the upward jump, which reduces to the familiar split between {x = 0} and
    {x >= 1} whenever X is on the integer lattice.  X itself becomes
    real-valued because the vertical moves carry the drift kappa.
    Innovation bound B = 1, ellipticity delta = 1/2.

``lattice``
    Product form dx in {ceil(kappa), ceil(kappa)-1} independent of
    dy = +/-1, each sign with probability 1/2.  Keeps Z on Z+ x Z,
    E[dx] = kappa everywhere, B = sqrt(2), delta = 1/2.

Outcome order in each law is fixed and documented; sampling is inverse-CDF
over that order with exactly one uniform per step, which is what makes runs
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _kernels
from .exponents import ModelParams, zeta_bound
from .rng import RngStream
from .stats import (
    InsufficientDataError,
    PathSummary,
    RegressionResult,
    log_checkpoints,
    loglog_slope,
)

Variant = Literal["verbatim", "lattice"]

VERBATIM_B = 1.0
LATTICE_B = math.sqrt(2.0)
ELLIPTICITY_DELTA = 0.5

_VARIANT_CODES = {"verbatim": _kernels.VERBATIM, "lattice": _kernels.LATTICE}


def innovation_bound(variant: Variant) -> float:
    if variant == "verbatim":
        return VERBATIM_B
    if variant == "lattice":
        return LATTICE_B
    raise ValueError(f"unknown variant {variant!r}")


def params_for_variant(
    variant: Variant, alpha: float, beta: float, gamma: float, rho: float
) -> ModelParams:
    return ModelParams(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        rho=rho,
        big_b=innovation_bound(variant),
        delta=ELLIPTICITY_DELTA,
    )


def kappa(params: ModelParams, n: int, x: float, y: float) -> float:
    """Drift rho * |y|^gamma / ((1+x)^alpha (1+n)^beta) at state (x, y), time n."""
    if n < 0:
        raise ValueError(f"time index must be nonnegative, got {n}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return params.rho * abs(y) ** params.gamma / ((1.0 + x) ** params.alpha * (1.0 + n) ** params.beta)


@dataclass(frozen=True)
class Outcome:
    dx: float
    dy: float
    probability: float


@dataclass(frozen=True)
class TransitionLaw:
    """Finite outcome list in fixed CDF order, plus the kappa it decomposes against."""

    kappa: float
    big_b: float
    outcomes: tuple[Outcome, ...]

    def total_probability(self) -> float:
        total = 0.0
        for o in self.outcomes:
            total += o.probability
        return total

    def mean_dx(self) -> float:
        return sum(o.dx * o.probability for o in self.outcomes)

    def mean_dy(self) -> float:
        return sum(o.dy * o.probability for o in self.outcomes)

    def prob_abs_dy_at_least(self, delta: float) -> float:
        return sum(o.probability for o in self.outcomes if abs(o.dy) >= delta)

    def max_innovation_norm(self) -> float:
        return max(math.hypot(o.dx - self.kappa, o.dy) for o in self.outcomes)


def example1_law(params: ModelParams, n: int, x: float, y: float) -> TransitionLaw:
    """The verbatim law at state (x, y), time n.  Zero-probability outcomes
    are dropped; survivors keep the order up, down, +1, -1."""
    kap = kappa(params, n, x, y)
    ceil_k = math.ceil(kap)
    phi = ceil_k - kap
    if x >= 1.0:
        p_up = 0.5 * (1.0 - phi)
        p_dn = 0.5 * phi
    else:
        p_up = 0.5
        p_dn = 0.0
    outcomes = []
    if p_up > 0.0:
        outcomes.append(Outcome(dx=float(ceil_k), dy=0.0, probability=p_up))
    if p_dn > 0.0:
        outcomes.append(Outcome(dx=float(ceil_k) - 1.0, dy=0.0, probability=p_dn))
    outcomes.append(Outcome(dx=kap, dy=1.0, probability=0.25))
    outcomes.append(Outcome(dx=kap, dy=-1.0, probability=0.25))
    return TransitionLaw(kappa=kap, big_b=VERBATIM_B, outcomes=tuple(outcomes))


def lattice_product_law(params: ModelParams, n: int, x: float, y: float) -> TransitionLaw:
    """The product law at lattice state (x, y), time n.  Order: (up, +1),
    (up, -1), (down, +1), (down, -1)."""
    if x != int(x) or y != int(y):
        raise ValueError(f"lattice law needs integer state, got ({x}, {y})")
    kap = kappa(params, n, x, y)
    ceil_k = math.ceil(kap)
    phi = ceil_k - kap
    h = 0.5 * (1.0 - phi)
    outcomes = []
    if h > 0.0:
        outcomes.append(Outcome(dx=float(ceil_k), dy=1.0, probability=h))
        outcomes.append(Outcome(dx=float(ceil_k), dy=-1.0, probability=h))
    if phi > 0.0:
        outcomes.append(Outcome(dx=float(ceil_k) - 1.0, dy=1.0, probability=0.5 * phi))
        outcomes.append(Outcome(dx=float(ceil_k) - 1.0, dy=-1.0, probability=0.5 * phi))
    return TransitionLaw(kappa=kap, big_b=LATTICE_B, outcomes=tuple(outcomes))


def law_for(variant: Variant, params: ModelParams, n: int, x: float, y: float) -> TransitionLaw:
    if variant == "verbatim":
        return example1_law(params, n, x, y)
    if variant == "lattice":
        return lattice_product_law(params, n, x, y)
    raise ValueError(f"unknown variant {variant!r}")


def step(law: TransitionLaw, stream: RngStream) -> Outcome:
    """Inverse-CDF sample over the law's outcome order; one uniform draw."""
    u = stream.uniform_unit()
    cum = 0.0
    for outcome in law.outcomes:
        cum += outcome.probability
        if u < cum:
            return outcome
    return law.outcomes[-1]


class InvariantViolationError(RuntimeError):
    """A runtime invariant that theory guarantees failed during simulation."""


class OverflowAbortError(RuntimeError):
    """X exceeded the overflow guard; parameters are outside sane territory."""


@dataclass(frozen=True)
class DriftTrajectory:
    """Checkpointed view of one path; arrays share one index."""

    ns: np.ndarray
    x: np.ndarray
    y: np.ndarray
    kappa: np.ndarray
    zeta: np.ndarray
    a: np.ndarray
    xi: np.ndarray
    max_abs_y: np.ndarray
    max_abs_xi: np.ndarray
    gamma_sum_01: np.ndarray
    gamma_sum_21: np.ndarray


def default_fit_window(steps: int) -> tuple[float, float]:
    """[1e3, steps] for production lengths; degrades to [1, steps] for toys."""
    return (1000.0, float(steps)) if steps >= 2000 else (1.0, float(steps))


def _maybe_slope(ns, values, window) -> RegressionResult | None:
    try:
        return loglog_slope(ns, values, window)
    except InsufficientDataError:
        return None


def simulate_drift_path(
    params: ModelParams,
    variant: Variant,
    steps: int,
    stream: RngStream,
    x0: float = 0.0,
    y0: float = 0.0,
    checkpoints: np.ndarray | int | None = None,
    fit_window: tuple[float, float] | None = None,
) -> tuple[DriftTrajectory, PathSummary]:
    """Run one path; returns checkpointed trajectory plus its summary.

    Raises InvariantViolationError if the confinement bound
    zeta_n <= max(zeta_0, C0') ever fails (theory says it cannot), and
    OverflowAbortError if X passes 1e300.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if x0 < 0:
        raise ValueError(f"x0 must be nonnegative, got {x0}")
    if variant == "lattice" and (x0 != int(x0) or y0 != int(y0)):
        raise ValueError(f"lattice variant needs integer start, got ({x0}, {y0})")
    if params.big_b != innovation_bound(variant):
        raise ValueError(
            f"params.big_b={params.big_b} does not match variant {variant!r}; "
            "build params with params_for_variant()"
        )
    if checkpoints is None:
        cps = log_checkpoints(steps)
    elif isinstance(checkpoints, (int, np.integer)):
        cps = log_checkpoints(steps, int(checkpoints))
    else:
        cps = np.asarray(checkpoints, dtype=np.int64)
        if cps.size and (np.any(np.diff(cps) <= 0) or cps[0] < 0 or cps[-1] > steps):
            raise ValueError("explicit checkpoints must be strictly increasing within [0, steps]")
    window = fit_window if fit_window is not None else default_fit_window(steps)

    bound = zeta_bound(params, x0, y0)
    rows = np.empty((cps.size, _kernels.DRIFT_COLS), dtype=np.float64)
    info = np.zeros(_kernels.DRIFT_INFO, dtype=np.float64)
    state = _kernels.state_array(stream)
    status = _kernels.drift_kernel(
        state,
        _VARIANT_CODES[variant],
        params.alpha,
        params.beta,
        params.gamma,
        params.rho,
        params.big_b,
        float(x0),
        float(y0),
        steps,
        cps,
        bound,
        rows,
        info,
    )
    if status == _kernels.ZETA_VIOLATION:
        raise InvariantViolationError(
            "confinement invariant failed: "
            f"zeta={info[_kernels.DI_VIOLZ]!r} > bound={bound!r} at "
            f"n={int(info[_kernels.DI_VIOLN])}, x={info[_kernels.DI_VIOLX]!r}, "
            f"y={info[_kernels.DI_VIOLY]!r} (origin={stream.origin})"
        )
    if status == _kernels.OVERFLOW:
        raise OverflowAbortError(f"X exceeded {_kernels.X_OVERFLOW_LIMIT} (origin={stream.origin})")

    traj = DriftTrajectory(
        ns=cps.copy(),
        x=rows[:, _kernels.D_X].copy(),
        y=rows[:, _kernels.D_Y].copy(),
        kappa=rows[:, _kernels.D_KAPPA].copy(),
        zeta=rows[:, _kernels.D_ZETA].copy(),
        a=rows[:, _kernels.D_A].copy(),
        xi=rows[:, _kernels.D_XI].copy(),
        max_abs_y=rows[:, _kernels.D_MAXY].copy(),
        max_abs_xi=rows[:, _kernels.D_MAXXI].copy(),
        gamma_sum_01=rows[:, _kernels.D_G01].copy(),
        gamma_sum_21=rows[:, _kernels.D_G21].copy(),
    )
    slope_x = _maybe_slope(traj.ns, traj.x, window)
    slope_maxy = _maybe_slope(traj.ns, traj.max_abs_y, window)
    slope_gamma = _maybe_slope(traj.ns, traj.gamma_sum_01, window)
    slope_maxxi = _maybe_slope(traj.ns, 1.0 + traj.max_abs_xi, window)
    summary = PathSummary(
        path_index=stream.origin[1],
        seed=stream.origin[0],
        final_state=(
            int(info[_kernels.DI_FINALN]),
            float(info[_kernels.DI_FINALX]),
            float(info[_kernels.DI_FINALY]),
        ),
        slope_x=slope_x.slope if slope_x else None,
        slope_maxy=slope_maxy.slope if slope_maxy else None,
        slope_gamma=slope_gamma.slope if slope_gamma else None,
        slope_maxxi=slope_maxxi.slope if slope_maxxi else None,
        max_zeta=float(info[_kernels.DI_MAXZETA]),
        zeta_bound=bound,
        residual=float(info[_kernels.DI_RESID]),
    )
    return traj, summary


TRAJECTORY_HEADER = "n,x,y,kappa,zeta,A,Xi"


def write_trajectory_csv(path, traj: DriftTrajectory) -> None:
    """Full round-trip precision rows under the fixed header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for i in range(traj.ns.size):
            fh.write(
                f"{int(traj.ns[i])},{float(traj.x[i])!r},{float(traj.y[i])!r},"
                f"{float(traj.kappa[i])!r},{float(traj.zeta[i])!r},"
                f"{float(traj.a[i])!r},{float(traj.xi[i])!r}\n"
            )


__all__ = [
    "Variant",
    "VERBATIM_B",
    "LATTICE_B",
    "ELLIPTICITY_DELTA",
    "innovation_bound",
    "params_for_variant",
    "kappa",
    "Outcome",
    "TransitionLaw",
    "example1_law",
    "lattice_product_law",
    "law_for",
    "step",
    "InvariantViolationError",
    "OverflowAbortError",
    "DriftTrajectory",
    "default_fit_window",
    "simulate_drift_path",
    "write_trajectory_csv",
    "TRAJECTORY_HEADER",
]
