"""The unit-step walk repelled from its running barycenter.

State is (W_n, G_n) with G_n the mean of W_1..W_n (G_0 = 0).  Writing
T_n = W_n - G_n, the half-angle beta_n = arccos(W.T / (|W||T|)) / 2 opens a
forbidden cone around -v_n, where v_n bisects w-hat and t-hat.  The step is
a unit vector at angle (pi - beta_n) * U from v_n, U uniform on [-1, 1], so
the excluded arc has width 2*beta_n.

The ``symmetrized`` variant also excludes the mirror of that cone across the
W_n axis: its step sits at angle (pi - 2*beta_n) * U measured from w-hat.

``mean_drift`` returns the constant obtained by integrating the sampling law
itself, sin(beta)/(pi - beta) along v (and sin(2*beta)/(pi - 2*beta) along
w-hat for the symmetrized variant).  Larger constants circulate for this
model; the sampling law as defined above is what this module simulates, so
its own integral is the honest comparison point for the drift oracle.

Observables mimic the planar drift walk: X_n = |W_n| and
|Y_n| = |W_n| * tan(2*beta_n), the latter flagged once 2*beta_n comes within
1e-6 of pi/2 (the tangent blows up; flagged samples never enter fits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from . import _kernels
from .rng import RngStream
from .stats import (
    InsufficientDataError,
    PathSummary,
    log_checkpoints,
    loglog_slope,
)

BaryVariant = Literal["original", "symmetrized"]

_VARIANT_CODES = {"original": _kernels.ORIGINAL, "symmetrized": _kernels.SYMMETRIZED}

ABSY_GUARD = _kernels.ABSY_GUARD

Vec2 = tuple[float, float]


class Geometry(NamedTuple):
    t: Vec2
    v: Vec2
    v_perp: Vec2
    beta: float


def _norm(a: Vec2) -> float:
    return math.hypot(a[0], a[1])


def _rot90(a: Vec2) -> Vec2:
    return (-a[1], a[0])


def geometry(w: Vec2, g: Vec2, antipodal_sign: float = 1.0) -> Geometry:
    """Cone geometry at state (w, g).

    Degenerate states (|w| = 0 or w = g) return beta = 0 with the fixed
    reference axis (1, 0); with zero exclusion the axis choice is
    distribution-neutral.  The exactly-antipodal case |w-hat + t-hat| = 0
    takes v perpendicular to w-hat; the simulator picks ``antipodal_sign``
    with one extra uniform draw.
    """
    t = (w[0] - g[0], w[1] - g[1])
    nw = _norm(w)
    nt = _norm(t)
    if nw * nt == 0.0:
        return Geometry(t=t, v=(1.0, 0.0), v_perp=(0.0, 1.0), beta=0.0)
    c = (w[0] * t[0] + w[1] * t[1]) / (nw * nt)
    c = min(1.0, max(-1.0, c))
    beta = 0.5 * math.acos(c)
    hx = w[0] / nw + t[0] / nt
    hy = w[1] / nw + t[1] / nt
    hn = math.hypot(hx, hy)
    if hn == 0.0:
        v = (-w[1] / nw * antipodal_sign, w[0] / nw * antipodal_sign)
    else:
        v = (hx / hn, hy / hn)
    return Geometry(t=t, v=v, v_perp=_rot90(v), beta=beta)


def sample_increment(
    geo: Geometry,
    u: float,
    variant: BaryVariant = "original",
    w: Vec2 | None = None,
) -> Vec2:
    """Unit step at angle (pi - beta) * u from v (original) or
    (pi - 2*beta) * u from w-hat (symmetrized).  ``u`` lies in [-1, 1]."""
    if not -1.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [-1, 1], got {u}")
    if variant == "original":
        axis, axis_perp = geo.v, geo.v_perp
        half = math.pi - geo.beta
    elif variant == "symmetrized":
        if w is None:
            raise ValueError("symmetrized variant needs the current w for its axis")
        nw = _norm(w)
        axis = (w[0] / nw, w[1] / nw) if nw > 0.0 else (1.0, 0.0)
        axis_perp = _rot90(axis)
        half = math.pi - 2.0 * geo.beta
        if half <= 0.0:
            raise ValueError(f"symmetrized variant needs 2*beta < pi, got beta={geo.beta}")
    else:
        raise ValueError(f"unknown variant {variant!r}")
    theta = half * u
    c = math.cos(theta)
    s = math.sin(theta)
    return (axis[0] * c + axis_perp[0] * s, axis[1] * c + axis_perp[1] * s)


def update_center(g: Vec2, n: int, w_next: Vec2) -> Vec2:
    """G_{n+1} = (n * G_n + W_{n+1}) / (n + 1); n is the time before the step."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return ((n * g[0] + w_next[0]) / (n + 1), (n * g[1] + w_next[1]) / (n + 1))


class Observables(NamedTuple):
    x: float
    abs_y: float
    flagged: bool
    beta: float


def observables(w: Vec2, g: Vec2) -> Observables:
    """X = |w| and |Y| = |w| tan(2*beta); |Y| is NaN + flagged near the pole."""
    geo = geometry(w, g)
    x = _norm(w)
    twob = 2.0 * geo.beta
    if twob < 0.5 * math.pi - ABSY_GUARD:
        return Observables(x=x, abs_y=x * math.tan(twob), flagged=False, beta=geo.beta)
    return Observables(x=x, abs_y=math.nan, flagged=True, beta=geo.beta)


def mean_drift(beta: float, variant: BaryVariant = "original") -> float:
    """E[step] magnitude along the sampling axis, by direct integration:
    sin(beta)/(pi-beta), or sin(2*beta)/(pi-2*beta) for the symmetrized law."""
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    if variant == "original":
        if beta > math.pi:
            raise ValueError(f"beta must not exceed pi, got {beta}")
        return math.sin(beta) / (math.pi - beta)
    if variant == "symmetrized":
        if not 2.0 * beta < math.pi:
            raise ValueError(f"symmetrized variant needs 2*beta < pi, got {beta}")
        return math.sin(2.0 * beta) / (math.pi - 2.0 * beta)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class BarycentricTrajectory:
    """Checkpointed view of one (W, G) path."""

    ns: np.ndarray
    wx: np.ndarray
    wy: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    beta: np.ndarray
    x: np.ndarray
    abs_y: np.ndarray
    abs_y_flag: np.ndarray
    max_abs_y: np.ndarray
    gamma_sum_01: np.ndarray
    gamma_sum_21: np.ndarray


@dataclass(frozen=True)
class BarycentricDiagnostics:
    """Exact per-step invariant margins accumulated over a whole path."""

    unit_step_deviation: float
    cone_margin: float
    antipodal_events: int
    flagged_absy: int


def _maybe_slope(ns, values, window):
    try:
        return loglog_slope(ns, values, window)
    except InsufficientDataError:
        return None


def default_fit_window(steps: int) -> tuple[float, float]:
    return (1000.0, float(steps)) if steps >= 2000 else (1.0, float(steps))


def simulate_barycentric_path(
    variant: BaryVariant,
    steps: int,
    stream: RngStream,
    checkpoints: np.ndarray | int | None = None,
    fit_window: tuple[float, float] | None = None,
) -> tuple[BarycentricTrajectory, PathSummary, BarycentricDiagnostics]:
    """Run one path from W_0 = G_0 = 0; one uniform draw per step."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if checkpoints is None:
        cps = log_checkpoints(steps)
    elif isinstance(checkpoints, (int, np.integer)):
        cps = log_checkpoints(steps, int(checkpoints))
    else:
        cps = np.asarray(checkpoints, dtype=np.int64)
        if cps.size and (np.any(np.diff(cps) <= 0) or cps[0] < 0 or cps[-1] > steps):
            raise ValueError("explicit checkpoints must be strictly increasing within [0, steps]")
    window = fit_window if fit_window is not None else default_fit_window(steps)

    rows = np.empty((cps.size, _kernels.BARY_COLS), dtype=np.float64)
    info = np.zeros(_kernels.BARY_INFO, dtype=np.float64)
    state = _kernels.state_array(stream)
    _kernels.bary_kernel(state, _VARIANT_CODES[variant], steps, cps, rows, info)

    traj = BarycentricTrajectory(
        ns=cps.copy(),
        wx=rows[:, _kernels.B_WX].copy(),
        wy=rows[:, _kernels.B_WY].copy(),
        gx=rows[:, _kernels.B_GX].copy(),
        gy=rows[:, _kernels.B_GY].copy(),
        beta=rows[:, _kernels.B_BETA].copy(),
        x=rows[:, _kernels.B_X].copy(),
        abs_y=rows[:, _kernels.B_ABSY].copy(),
        abs_y_flag=rows[:, _kernels.B_FLAG].copy(),
        max_abs_y=rows[:, _kernels.B_MAXY].copy(),
        gamma_sum_01=rows[:, _kernels.B_G01].copy(),
        gamma_sum_21=rows[:, _kernels.B_G21].copy(),
    )
    diag = BarycentricDiagnostics(
        unit_step_deviation=float(info[_kernels.BI_UNITDEV]),
        cone_margin=float(info[_kernels.BI_CONEMARGIN]),
        antipodal_events=int(info[_kernels.BI_ANTIPODAL]),
        flagged_absy=int(info[_kernels.BI_FLAGGED]),
    )
    slope_x = _maybe_slope(traj.ns, traj.x, window)
    slope_maxy = _maybe_slope(traj.ns, traj.max_abs_y, window)
    slope_gamma = _maybe_slope(traj.ns, traj.gamma_sum_01, window)
    summary = PathSummary(
        path_index=stream.origin[1],
        seed=stream.origin[0],
        final_state=(
            int(info[_kernels.BI_FINALN]),
            (float(info[_kernels.BI_FINALWX]), float(info[_kernels.BI_FINALWY])),
            (float(info[_kernels.BI_FINALGX]), float(info[_kernels.BI_FINALGY])),
        ),
        slope_x=slope_x.slope if slope_x else None,
        slope_maxy=slope_maxy.slope if slope_maxy else None,
        slope_gamma=slope_gamma.slope if slope_gamma else None,
        flagged_absy=diag.flagged_absy,
    )
    return traj, summary, diag


TRAJECTORY_HEADER = "n,wx,wy,gx,gy,beta,X,absY,absY_flag"


def write_trajectory_csv(path, traj: BarycentricTrajectory) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for i in range(traj.ns.size):
            fh.write(
                f"{int(traj.ns[i])},{float(traj.wx[i])!r},{float(traj.wy[i])!r},"
                f"{float(traj.gx[i])!r},{float(traj.gy[i])!r},{float(traj.beta[i])!r},"
                f"{float(traj.x[i])!r},{float(traj.abs_y[i])!r},"
                f"{int(traj.abs_y_flag[i])}\n"
            )
