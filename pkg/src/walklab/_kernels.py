"""Compiled inner loops.

The generator step here must stay bit-identical to the pure-Python
reference in :mod:`walklab.rng`; a test enforces that.  All integer work is
done in uint64 with wraparound, so every constant below is pre-cast.

Path state sums (X, A, Xi) use Neumaier-compensated accumulators.  X is fed
the exact outcome jump ``dx`` while A and Xi are fed ``kappa`` and
``dx - kappa``, so the decomposition X - X0 = A + Xi holds to a provable
few-ulp bound even on super-ballistic runs where X dwarfs the 1e-9
tolerance times its own ulp.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64

_K11 = U64(11)
_K17 = U64(17)
_K19 = U64(19)
_K23 = U64(23)
_K41 = U64(41)
_K45 = U64(45)

_INV53 = 2.0**-53

# drift kernel / bary kernel exit codes
OK = 0
ZETA_VIOLATION = 1
OVERFLOW = 2

X_OVERFLOW_LIMIT = 1e300

# absY is flagged once 2*beta comes within this of pi/2 (tan blows up)
ABSY_GUARD = 1e-6

_PI = float(np.pi)
_HALF_PI = 0.5 * _PI


def state_array(stream) -> np.ndarray:
    """xoshiro state of an RngStream as a uint64 vector the kernels mutate."""
    return np.array(stream.state, dtype=np.uint64)


@njit(cache=True, nogil=True, inline="always")
def _next_u64(s):
    x = s[0] + s[3]
    out = ((x << _K23) | (x >> _K41)) + s[0]
    t = s[1] << _K17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << _K45) | (s[3] >> _K19)
    return out


@njit(cache=True, nogil=True, inline="always")
def _uniform_unit(s):
    return (_next_u64(s) >> _K11) * _INV53


@njit(cache=True, nogil=True, inline="always")
def _uniform_signed(s):
    return 2.0 * ((_next_u64(s) >> _K11) * _INV53) - 1.0


@njit(cache=True, nogil=True)
def fill_raw(s, out):
    for i in range(out.shape[0]):
        out[i] = _next_u64(s)


@njit(cache=True, nogil=True)
def fill_uniform_unit(s, out):
    for i in range(out.shape[0]):
        out[i] = _uniform_unit(s)


@njit(cache=True, nogil=True)
def fill_uniform_signed(s, out):
    for i in range(out.shape[0]):
        out[i] = _uniform_signed(s)


@njit(cache=True, nogil=True, inline="always")
def _acc(s, c, v):
    # Neumaier update: returns (sum, compensation)
    t = s + v
    if abs(s) >= abs(v):
        c += (s - t) + v
    else:
        c += (v - t) + s
    return t, c


# row layout shared with drift.py
DRIFT_COLS = 10
D_X, D_Y, D_KAPPA, D_ZETA, D_A, D_XI, D_MAXY, D_MAXXI, D_G01, D_G21 = range(10)

DRIFT_INFO = 10
DI_MAXZETA, DI_RESID, DI_FINALX, DI_FINALY, DI_FINALN, DI_VIOLN, DI_VIOLZ, DI_VIOLX, DI_VIOLY, DI_NROWS = range(10)

VERBATIM = 0
LATTICE = 1


@njit(cache=True, nogil=True)
def drift_kernel(state, variant, alpha, beta, gamma, rho, big_b,
                 x0, y0, steps, cps, zeta_bound, rows, info):
    xs = x0
    xc = 0.0
    a_s = 0.0
    a_c = 0.0
    xi_s = 0.0
    xi_c = 0.0
    y = y0
    max_abs_y = abs(y0)
    max_abs_xi = 0.0
    g01 = 0.0
    g21 = 0.0
    max_zeta = 0.0
    max_resid = 0.0
    cp_i = 0
    ncp = cps.shape[0]
    status = OK
    t = 0
    while True:
        x = xs + xc
        tf = 1.0 + t
        kap = rho * abs(y) ** gamma / ((1.0 + x) ** alpha * tf**beta)
        zeta = max(big_b, abs(y)) ** gamma / (tf**beta * (1.0 + x) ** (1.0 + alpha))
        if zeta > max_zeta:
            max_zeta = zeta
        if zeta > zeta_bound:
            status = ZETA_VIOLATION
            info[DI_VIOLN] = t
            info[DI_VIOLZ] = zeta
            info[DI_VIOLX] = x
            info[DI_VIOLY] = y
            break
        if x > X_OVERFLOW_LIMIT:
            status = OVERFLOW
            break
        resid = abs(((xs - a_s) - xi_s - x0) + ((xc - a_c) - xi_c))
        if resid > max_resid:
            max_resid = resid
        if cp_i < ncp and cps[cp_i] == t:
            rows[cp_i, D_X] = x
            rows[cp_i, D_Y] = y
            rows[cp_i, D_KAPPA] = kap
            rows[cp_i, D_ZETA] = zeta
            rows[cp_i, D_A] = a_s + a_c
            rows[cp_i, D_XI] = xi_s + xi_c
            rows[cp_i, D_MAXY] = max_abs_y
            rows[cp_i, D_MAXXI] = max_abs_xi
            rows[cp_i, D_G01] = g01
            rows[cp_i, D_G21] = g21
            cp_i += 1
        if t == steps:
            break

        u = _uniform_unit(state)
        ceil_k = np.ceil(kap)
        phi = ceil_k - kap
        dy = 0.0
        if variant == VERBATIM:
            # mass of the downward jump shifts onto the upward one below x=1
            if x >= 1.0:
                p_up = 0.5 * (1.0 - phi)
                p_dn = 0.5 * phi
            else:
                p_up = 0.5
                p_dn = 0.0
            c1 = p_up
            c2 = c1 + p_dn
            c3 = c2 + 0.25
            if u < c1:
                dx = ceil_k
            elif u < c2:
                dx = ceil_k - 1.0
            elif u < c3:
                dx = kap
                dy = 1.0
            else:
                dx = kap
                dy = -1.0
        else:
            h = 0.5 * (1.0 - phi)
            c1 = h
            c2 = c1 + h
            c3 = c2 + 0.5 * phi
            if u < c1:
                dx = ceil_k
                dy = 1.0
            elif u < c2:
                dx = ceil_k
                dy = -1.0
            elif u < c3:
                dx = ceil_k - 1.0
                dy = 1.0
            else:
                dx = ceil_k - 1.0
                dy = -1.0

        xs, xc = _acc(xs, xc, dx)
        a_s, a_c = _acc(a_s, a_c, kap)
        xi_s, xi_c = _acc(xi_s, xi_c, dx - kap)
        y += dy
        t += 1

        ay = abs(y)
        if ay > max_abs_y:
            max_abs_y = ay
        g01 += ay
        g21 += ay / (float(t) * float(t))
        axi = abs(xi_s + xi_c)
        if axi > max_abs_xi:
            max_abs_xi = axi

    info[DI_MAXZETA] = max_zeta
    info[DI_RESID] = max_resid
    info[DI_FINALX] = xs + xc
    info[DI_FINALY] = y
    info[DI_FINALN] = t
    info[DI_NROWS] = cp_i
    return status


# row layout shared with barycentric.py
BARY_COLS = 11
B_WX, B_WY, B_GX, B_GY, B_BETA, B_X, B_ABSY, B_FLAG, B_MAXY, B_G01, B_G21 = range(11)

BARY_INFO = 10
BI_UNITDEV, BI_CONEMARGIN, BI_ANTIPODAL, BI_FLAGGED, BI_FINALWX, BI_FINALWY, BI_FINALGX, BI_FINALGY, BI_FINALN, BI_NROWS = range(10)

ORIGINAL = 0
SYMMETRIZED = 1


@njit(cache=True, nogil=True)
def bary_kernel(state, variant, steps, cps, rows, info):
    wx = 0.0
    wy = 0.0
    gx = 0.0
    gy = 0.0
    max_abs_y = 0.0
    g01 = 0.0
    g21 = 0.0
    unit_dev = 0.0
    cone_margin = 2.0
    antipodal = 0.0
    flagged = 0.0
    cp_i = 0
    ncp = cps.shape[0]
    t = 0
    while True:
        tx = wx - gx
        ty = wy - gy
        nw = np.sqrt(wx * wx + wy * wy)
        nt = np.sqrt(tx * tx + ty * ty)
        ax = 1.0
        ay = 0.0
        beta = 0.0
        if nw * nt > 0.0:
            cosg = (wx * tx + wy * ty) / (nw * nt)
            if cosg > 1.0:
                cosg = 1.0
            elif cosg < -1.0:
                cosg = -1.0
            beta = 0.5 * np.arccos(cosg)
            if variant == ORIGINAL:
                hx = wx / nw + tx / nt
                hy = wy / nw + ty / nt
                hn = np.sqrt(hx * hx + hy * hy)
                if hn == 0.0:
                    # exact antipodal fallback: perpendicular of w-hat,
                    # sign from one extra draw
                    antipodal += 1.0
                    sgn = 1.0 if _uniform_signed(state) >= 0.0 else -1.0
                    ax = -wy / nw * sgn
                    ay = wx / nw * sgn
                else:
                    ax = hx / hn
                    ay = hy / hn
        if variant == ORIGINAL:
            half = _PI - beta
        else:
            # axis is w-hat whenever defined, even if w == g
            if nw > 0.0:
                ax = wx / nw
                ay = wy / nw
            half = _PI - 2.0 * beta

        twob = 2.0 * beta
        if twob < _HALF_PI - ABSY_GUARD:
            abs_y = nw * np.tan(twob)
            flag = 0.0
        else:
            abs_y = np.nan
            flag = 1.0

        if t >= 1:
            if flag == 0.0:
                if abs_y > max_abs_y:
                    max_abs_y = abs_y
                g01 += abs_y
                g21 += abs_y / (float(t) * float(t))
            else:
                flagged += 1.0

        if cp_i < ncp and cps[cp_i] == t:
            rows[cp_i, B_WX] = wx
            rows[cp_i, B_WY] = wy
            rows[cp_i, B_GX] = gx
            rows[cp_i, B_GY] = gy
            rows[cp_i, B_BETA] = beta
            rows[cp_i, B_X] = nw
            rows[cp_i, B_ABSY] = abs_y
            rows[cp_i, B_FLAG] = flag
            rows[cp_i, B_MAXY] = max_abs_y
            rows[cp_i, B_G01] = g01
            rows[cp_i, B_G21] = g21
            cp_i += 1
        if t == steps:
            break

        u = _uniform_signed(state)
        theta = half * u
        ci = np.cos(theta)
        si = np.sin(theta)
        ix = ax * ci - ay * si
        iy = ay * ci + ax * si

        dev = abs(np.sqrt(ix * ix + iy * iy) - 1.0)
        if dev > unit_dev:
            unit_dev = dev
        margin = (ix * ax + iy * ay) - np.cos(half)
        if margin < cone_margin:
            cone_margin = margin

        wx += ix
        wy += iy
        tf = float(t)
        gx = (tf * gx + wx) / (tf + 1.0)
        gy = (tf * gy + wy) / (tf + 1.0)
        t += 1

    info[BI_UNITDEV] = unit_dev
    info[BI_CONEMARGIN] = cone_margin
    info[BI_ANTIPODAL] = antipodal
    info[BI_FLAGGED] = flagged
    info[BI_FINALWX] = wx
    info[BI_FINALWY] = wy
    info[BI_FINALGX] = gx
    info[BI_FINALGY] = gy
    info[BI_FINALN] = t
    info[BI_NROWS] = cp_i
    return OK
