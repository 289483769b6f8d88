"""Cone geometry, the arc sampler, the running-mean recursion, and parity
between the compiled path kernel and the pure-Python building blocks."""

import math

import numpy as np
import pytest

from walklab.barycentric import (
    BarycentricDiagnostics,
    TRAJECTORY_HEADER,
    geometry,
    mean_drift,
    observables,
    sample_increment,
    simulate_barycentric_path,
    update_center,
    write_trajectory_csv,
)
from walklab.rng import new_stream

SQ2 = math.sqrt(2.0)


# --- geometry ---------------------------------------------------------------

def test_geometry_aligned():
    geo = geometry((2.0, 0.0), (1.0, 0.0))
    assert geo.beta == 0.0
    assert geo.t == (1.0, 0.0)
    assert geo.v == (1.0, 0.0)
    assert geo.v_perp == (0.0, 1.0)


def test_geometry_right_angle():
    # t = w - g = (0, -1) perpendicular to w: beta = pi/4,
    # v bisects (1,0) and (0,-1)
    geo = geometry((1.0, 0.0), (1.0, 1.0))
    assert geo.beta == pytest.approx(math.pi / 4.0, rel=1e-15)
    assert geo.v[0] == pytest.approx(1.0 / SQ2, rel=1e-15)
    assert geo.v[1] == pytest.approx(-1.0 / SQ2, rel=1e-15)
    assert geo.v_perp[0] == pytest.approx(1.0 / SQ2, rel=1e-15)
    assert geo.v_perp[1] == pytest.approx(1.0 / SQ2, rel=1e-15)


def test_geometry_degenerate_states():
    for w, g in [((0.0, 0.0), (0.0, 0.0)), ((3.0, 4.0), (3.0, 4.0))]:
        geo = geometry(w, g)
        assert geo.beta == 0.0
        assert geo.v == (1.0, 0.0)


def test_geometry_antipodal_uses_sign():
    # t anti-parallel to w: the bisector vanishes, v goes perpendicular
    up = geometry((1.0, 0.0), (3.0, 0.0), antipodal_sign=1.0)
    dn = geometry((1.0, 0.0), (3.0, 0.0), antipodal_sign=-1.0)
    assert up.beta == pytest.approx(math.pi / 2.0, rel=1e-15)
    assert up.v == pytest.approx((0.0, 1.0))
    assert dn.v == pytest.approx((0.0, -1.0))


def test_geometry_clamps_rounding():
    # nearly-collinear state whose cosine could drift past 1
    w = (1e8, 1.0)
    g = (0.5e8, 0.5)
    geo = geometry(w, g)
    assert 0.0 <= geo.beta <= math.pi / 2.0


# --- increment sampler --------------------------------------------------------

def test_increment_quarter_arc():
    geo = geometry((2.0, 0.0), (1.0, 0.0))  # beta=0, axis (1,0), half=pi
    inc = sample_increment(geo, 0.5)
    assert inc[0] == pytest.approx(0.0, abs=1e-12)
    assert inc[1] == pytest.approx(1.0, rel=1e-12)
    assert sample_increment(geo, 0.0) == (1.0, 0.0)
    back = sample_increment(geo, 1.0)
    assert back[0] == pytest.approx(-1.0, rel=1e-12)


def test_increment_mirror_symmetry():
    geo = geometry((1.0, 0.0), (1.0, 1.0))
    for u in (0.1, 0.33, 0.9):
        plus = sample_increment(geo, u)
        minus = sample_increment(geo, -u)
        along = plus[0] * geo.v[0] + plus[1] * geo.v[1]
        along_m = minus[0] * geo.v[0] + minus[1] * geo.v[1]
        perp = plus[0] * geo.v_perp[0] + plus[1] * geo.v_perp[1]
        perp_m = minus[0] * geo.v_perp[0] + minus[1] * geo.v_perp[1]
        assert along == pytest.approx(along_m, rel=1e-14)
        assert perp == pytest.approx(-perp_m, rel=1e-14)


def test_increment_unit_norm():
    geo = geometry((1.0, 0.0), (1.0, 1.0))
    stream = new_stream(31, 0)
    for variant in ("original", "symmetrized"):
        for _ in range(200):
            inc = sample_increment(geo, stream.uniform_signed(), variant, w=(1.0, 0.0))
            assert math.hypot(*inc) == pytest.approx(1.0, abs=1e-14)


def test_increment_stays_out_of_cone():
    # original law: angle from v never exceeds pi - beta
    geo = geometry((1.0, 0.0), (1.0, 1.0))
    cos_limit = math.cos(math.pi - geo.beta)
    stream = new_stream(32, 0)
    for _ in range(500):
        inc = sample_increment(geo, stream.uniform_signed())
        assert inc[0] * geo.v[0] + inc[1] * geo.v[1] >= cos_limit - 1e-12


def test_increment_symmetrized_axis_is_w():
    geo = geometry((1.0, 0.0), (1.0, 1.0))  # beta = pi/4, half = pi/2
    inc = sample_increment(geo, 1.0, "symmetrized", w=(1.0, 0.0))
    assert inc[0] == pytest.approx(0.0, abs=1e-12)
    assert inc[1] == pytest.approx(1.0, rel=1e-12)
    inc0 = sample_increment(geo, 0.0, "symmetrized", w=(1.0, 0.0))
    assert inc0 == (1.0, 0.0)


def test_increment_validation():
    geo = geometry((2.0, 0.0), (1.0, 0.0))
    with pytest.raises(ValueError):
        sample_increment(geo, 1.5)
    with pytest.raises(ValueError):
        sample_increment(geo, 0.5, "symmetrized")  # needs w
    with pytest.raises(ValueError):
        sample_increment(geo, 0.5, "hexagonal", w=(1.0, 0.0))
    anti = geometry((1.0, 0.0), (3.0, 0.0))  # beta = pi/2
    with pytest.raises(ValueError):
        sample_increment(anti, 0.5, "symmetrized", w=(1.0, 0.0))


# --- center-of-mass recursion --------------------------------------------------

def test_update_center_hand_value():
    assert update_center((3.0, 4.0), 1, (1.0, 0.0)) == (2.0, 2.0)


def test_update_center_first_point():
    assert update_center((0.0, 0.0), 0, (0.3, -0.7)) == (0.3, -0.7)


def test_update_center_rejects_negative_n():
    with pytest.raises(ValueError):
        update_center((0.0, 0.0), -1, (1.0, 0.0))


def test_update_center_matches_direct_mean():
    rng = np.random.default_rng(8)
    n = 10_000
    angles = rng.uniform(-math.pi, math.pi, size=n)
    w_steps = np.column_stack([np.cos(angles), np.sin(angles)])
    w_pos = np.cumsum(w_steps, axis=0)
    direct = np.cumsum(w_pos, axis=0) / np.arange(1, n + 1)[:, None]
    g = (0.0, 0.0)
    for t in range(n):
        g = update_center(g, t, (float(w_pos[t, 0]), float(w_pos[t, 1])))
        assert abs(g[0] - direct[t, 0]) <= 1e-9
        assert abs(g[1] - direct[t, 1]) <= 1e-9


# --- observables ----------------------------------------------------------------

def test_observables_tan_relation():
    # angle(w, t) = pi/4 so beta = pi/8 and |Y| = |w| tan(pi/4) = 1
    w = (1.0, 0.0)
    t = (math.cos(math.pi / 4.0), math.sin(math.pi / 4.0))
    g = (w[0] - t[0], w[1] - t[1])
    obs = observables(w, g)
    assert obs.x == 1.0
    assert obs.beta == pytest.approx(math.pi / 8.0, rel=1e-12)
    assert obs.abs_y == pytest.approx(1.0, rel=1e-12)
    assert not obs.flagged


def test_observables_flagged_at_pole():
    obs = observables((1.0, 0.0), (3.0, 0.0))  # beta = pi/2
    assert obs.flagged
    assert math.isnan(obs.abs_y)
    assert obs.x == 1.0


# --- mean drift constant ---------------------------------------------------------

def test_mean_drift_values():
    assert mean_drift(0.0) == 0.0
    assert mean_drift(math.pi / 4.0) == pytest.approx(
        math.sin(math.pi / 4.0) / (math.pi - math.pi / 4.0), rel=1e-15
    )
    assert mean_drift(math.pi / 4.0, "symmetrized") == pytest.approx(2.0 / math.pi, rel=1e-15)


def test_mean_drift_validation():
    with pytest.raises(ValueError):
        mean_drift(-0.1)
    with pytest.raises(ValueError):
        mean_drift(math.pi / 2.0, "symmetrized")
    with pytest.raises(ValueError):
        mean_drift(0.3, "hexagonal")


@pytest.mark.parametrize("variant", ["original", "symmetrized"])
def test_mean_drift_matches_monte_carlo(variant):
    # independent draws (numpy PCG) against the closed-form integral
    w, g = (1.0, 0.0), (1.0, 1.0)
    geo = geometry(w, g)
    if variant == "original":
        axis = geo.v
        half = math.pi - geo.beta
    else:
        axis = (1.0, 0.0)
        half = math.pi - 2.0 * geo.beta
    rng = np.random.default_rng(99)
    u = rng.uniform(-1.0, 1.0, size=200_000)
    along = np.cos(half * u)
    across = np.sin(half * u)
    pred = mean_drift(geo.beta, variant)
    se_along = along.std() / math.sqrt(u.size)
    se_across = across.std() / math.sqrt(u.size)
    assert abs(along.mean() - pred) <= 3.0 * se_along
    assert abs(across.mean()) <= 3.0 * se_across
    # and the projection identity: mean increment = pred * axis
    inc_x = axis[0] * along - axis[1] * across
    inc_y = axis[1] * along + axis[0] * across
    assert inc_x.mean() == pytest.approx(pred * axis[0], abs=4.0 * se_along)
    assert inc_y.mean() == pytest.approx(pred * axis[1], abs=4.0 * se_along)


# --- simulated paths ---------------------------------------------------------------

def reference_bary(variant, steps, stream):
    w = (0.0, 0.0)
    g = (0.0, 0.0)
    rows = []
    antipodal = 0
    for t in range(steps + 1):
        obs = observables(w, g)
        rows.append((w, g, obs.beta, obs.x, obs.abs_y, obs.flagged))
        if t == steps:
            break
        geo = geometry(w, g)
        if variant == "original":
            tv = (w[0] - g[0], w[1] - g[1])
            nw, nt = math.hypot(*w), math.hypot(*tv)
            if nw * nt > 0.0 and math.hypot(w[0] / nw + tv[0] / nt, w[1] / nw + tv[1] / nt) == 0.0:
                antipodal += 1
                sgn = 1.0 if stream.uniform_signed() >= 0.0 else -1.0
                geo = geometry(w, g, antipodal_sign=sgn)
        inc = sample_increment(geo, stream.uniform_signed(), variant, w=w)
        w = (w[0] + inc[0], w[1] + inc[1])
        g = update_center(g, t, w)
    return rows, antipodal


@pytest.mark.parametrize("variant", ["original", "symmetrized"])
def test_kernel_matches_python_reference(variant):
    steps = 400
    cps = np.arange(0, steps + 1, dtype=np.int64)
    traj, summary, diag = simulate_barycentric_path(variant, steps, new_stream(42, 5), checkpoints=cps)
    rows, antipodal = reference_bary(variant, steps, new_stream(42, 5))
    assert diag.antipodal_events == antipodal == 0  # measure-zero event
    for i, (w, g, beta, x, abs_y, flagged) in enumerate(rows):
        assert traj.wx[i] == pytest.approx(w[0], rel=1e-10, abs=1e-10)
        assert traj.wy[i] == pytest.approx(w[1], rel=1e-10, abs=1e-10)
        assert traj.gx[i] == pytest.approx(g[0], rel=1e-10, abs=1e-10)
        assert traj.gy[i] == pytest.approx(g[1], rel=1e-10, abs=1e-10)
        assert traj.beta[i] == pytest.approx(beta, abs=1e-10)
        assert traj.x[i] == pytest.approx(x, rel=1e-10, abs=1e-10)
        assert bool(traj.abs_y_flag[i]) == flagged
        if not flagged:
            assert traj.abs_y[i] == pytest.approx(abs_y, rel=1e-8, abs=1e-8)


def test_first_step_is_unit():
    traj, _, diag = simulate_barycentric_path(
        "original", 1, new_stream(42, 0), checkpoints=np.array([0, 1], dtype=np.int64)
    )
    assert traj.x[0] == 0.0
    assert traj.x[1] == pytest.approx(1.0, abs=1e-12)
    assert traj.gx[1] == traj.wx[1] and traj.gy[1] == traj.wy[1]
    assert diag.unit_step_deviation <= 1e-12


@pytest.mark.parametrize("variant", ["original", "symmetrized"])
def test_path_invariants(variant):
    traj, summary, diag = simulate_barycentric_path(variant, 30_000, new_stream(42, 7))
    assert diag.unit_step_deviation <= 1e-12
    assert diag.cone_margin >= -1e-12
    assert summary.flagged_absy == diag.flagged_absy >= 0
    assert np.all((traj.beta >= 0.0) & (traj.beta <= math.pi / 2.0 + 1e-15))
    # X never exceeds n (unit steps) and the tan relation holds where unflagged
    assert np.all(traj.x <= np.maximum(traj.ns, 1))
    clean = traj.abs_y_flag == 0.0
    expect = traj.x[clean] * np.tan(2.0 * traj.beta[clean])
    assert traj.abs_y[clean] == pytest.approx(expect, rel=1e-9, abs=1e-12)


def test_center_column_matches_direct_mean():
    steps = 2000
    cps = np.arange(0, steps + 1, dtype=np.int64)
    traj, _, _ = simulate_barycentric_path("original", steps, new_stream(13, 2), checkpoints=cps)
    w = np.column_stack([traj.wx, traj.wy])[1:]  # W_1..W_n
    direct = np.cumsum(w, axis=0) / np.arange(1, steps + 1)[:, None]
    assert np.abs(traj.gx[1:] - direct[:, 0]).max() <= 1e-9
    assert np.abs(traj.gy[1:] - direct[:, 1]).max() <= 1e-9


def test_gamma_sums_recomputable():
    steps = 3000
    cps = np.arange(0, steps + 1, dtype=np.int64)
    traj, _, _ = simulate_barycentric_path("symmetrized", steps, new_stream(21, 4), checkpoints=cps)
    contrib = np.where(traj.abs_y_flag > 0.0, 0.0, np.nan_to_num(traj.abs_y))
    contrib[0] = 0.0
    g01 = np.cumsum(contrib)
    m = np.arange(0, steps + 1, dtype=float)
    m[0] = 1.0  # avoid 0/0; the t=0 term is zero anyway
    g21 = np.cumsum(contrib / (m * m))
    assert traj.gamma_sum_01 == pytest.approx(g01, rel=1e-12, abs=1e-12)
    assert traj.gamma_sum_21 == pytest.approx(g21, rel=1e-12, abs=1e-12)


def test_deterministic_under_replay():
    a = simulate_barycentric_path("original", 5000, new_stream(3, 3))
    b = simulate_barycentric_path("original", 5000, new_stream(3, 3))
    assert np.array_equal(a[0].wx, b[0].wx)
    assert np.array_equal(a[0].gy, b[0].gy)
    assert a[1] == b[1]
    assert a[2] == BarycentricDiagnostics(
        unit_step_deviation=a[2].unit_step_deviation,
        cone_margin=a[2].cone_margin,
        antipodal_events=a[2].antipodal_events,
        flagged_absy=a[2].flagged_absy,
    )


def test_input_validation():
    with pytest.raises(ValueError):
        simulate_barycentric_path("original", 0, new_stream())
    with pytest.raises(ValueError):
        simulate_barycentric_path(
            "original", 10, new_stream(), checkpoints=np.array([5, 2], dtype=np.int64)
        )


def test_trajectory_csv_round_trip(tmp_path):
    traj, _, _ = simulate_barycentric_path("original", 2000, new_stream(42, 9))
    out = tmp_path / "bary.csv"
    write_trajectory_csv(out, traj)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == TRAJECTORY_HEADER == "n,wx,wy,gx,gy,beta,X,absY,absY_flag"
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert data.shape == (traj.ns.size, 9)
    assert np.array_equal(data[:, 1], traj.wx)
    assert np.array_equal(data[:, 6], traj.x)
    flags = data[:, 8]
    assert set(np.unique(flags)) <= {0.0, 1.0}
