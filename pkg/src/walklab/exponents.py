"""Scaling-exponent calculus for the polynomial-drift walk.

The drift field is kappa(n, x, y) = rho * |y|^gamma / ((1+x)^alpha (1+n)^beta).
Everything in this module is closed-form: the predicted growth exponent chi,
the superdiffusivity condition, the upper-bound recursion that contracts to
nu*chi, and the confinement constant that caps the Lyapunov ratio zeta.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """Drift-field exponents plus the innovation constants (B, delta).

    Constraints: alpha > -1, beta >= 0, gamma >= 0, rho > 0, B >= 0,
    0 < delta < 1.  Violations raise ValueError at construction.
    """

    alpha: float
    beta: float = 0.0
    gamma: float = 0.0
    rho: float = 1.0
    big_b: float = 1.0
    delta: float = 0.5

    def __post_init__(self):
        if not self.alpha > -1:
            raise ValueError(f"alpha must exceed -1, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.big_b < 0:
            raise ValueError(f"B must be nonnegative, got {self.big_b}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


def chi(params: ModelParams) -> float:
    """Predicted exponent of X-growth: (2 + gamma - 2*beta) / (2 + 2*alpha)."""
    return (2.0 + params.gamma - 2.0 * params.beta) / (2.0 + 2.0 * params.alpha)


def is_superdiffusive(params: ModelParams) -> bool:
    """Strict inequality 1 + gamma > max(0, alpha) + 2*beta."""
    return 1.0 + params.gamma > max(0.0, params.alpha) + 2.0 * params.beta


def chi_ladder(params: ModelParams, k: int) -> float:
    """Partial exponent chi_k = chi * (1 - (-alpha)^k) for alpha in (-1, 0).

    The ladder climbs strictly toward chi from below; only the negative-alpha
    regime admits this closed form.
    """
    if not -1 < params.alpha < 0:
        raise ValueError(f"chi_ladder requires alpha in (-1, 0), got {params.alpha}")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return chi(params) * (1.0 - (-params.alpha) ** k)


def _check_recursion_domain(params: ModelParams, nu: float) -> None:
    if not nu > max(2.0, 1.0 + params.alpha):
        raise ValueError(f"nu must exceed max(2, 1+alpha)={max(2.0, 1.0 + params.alpha)}, got {nu}")
    if not 1.0 + params.gamma > params.alpha + 2.0 * params.beta:
        raise ValueError(
            "recursion requires 1 + gamma > alpha + 2*beta; "
            f"got gamma={params.gamma}, alpha={params.alpha}, beta={params.beta}"
        )


def theta_next(params: ModelParams, nu: float, theta: float) -> float:
    """One step of the moment-exponent recursion: 1 + max(F(theta), G(theta))."""
    _check_recursion_domain(params, nu)
    f = params.gamma / 2.0 - params.beta + (nu - 1.0 - params.alpha) / nu * theta
    g = (nu - 2.0) / nu * theta
    return 1.0 + max(f, g)


@dataclass(frozen=True)
class ThetaIteration:
    """Trace of the recursion run down to its fixed point nu*chi."""

    nu: float
    sequence: tuple[float, ...]
    limit: float


class ThetaDivergenceError(RuntimeError):
    """Raised when the recursion fails to reach tolerance within max_iter."""


def contraction_rate(params: ModelParams, nu: float) -> float:
    """Guaranteed per-step shrink factor of theta_k - nu*chi: min(2, 1+alpha)/nu."""
    return min(2.0, 1.0 + params.alpha) / nu


def theta_iterate(
    params: ModelParams,
    nu: float,
    theta0: float,
    tol: float = 1e-9,
    max_iter: int = 10_000,
) -> ThetaIteration:
    """Iterate theta_{k+1} = theta_next(theta_k) until within tol of nu*chi.

    Requires theta0 >= nu*chi; from there the sequence decreases monotonically
    onto the fixed point (starting exactly on it returns immediately).
    """
    _check_recursion_domain(params, nu)
    limit = nu * chi(params)
    if not theta0 >= limit:
        raise ValueError(f"theta0 must be at least nu*chi={limit}, got {theta0}")
    seq = [theta0]
    theta = theta0
    for _ in range(max_iter):
        if abs(theta - limit) <= tol:
            return ThetaIteration(nu=nu, sequence=tuple(seq), limit=limit)
        theta = theta_next(params, nu, theta)
        seq.append(theta)
    if abs(theta - limit) <= tol:
        return ThetaIteration(nu=nu, sequence=tuple(seq), limit=limit)
    raise ThetaDivergenceError(
        f"theta recursion still {abs(theta - limit):.3e} from {limit} after {max_iter} steps"
    )


def confinement_constant(params: ModelParams) -> float:
    """Cap on the Lyapunov ratio zeta once it leaves its initial value behind.

    C0' = 2^(gamma+1+alpha) * (1+B)^(1+alpha) / rho
          * max(2^(gamma/(1+alpha)) + B, rho * B^gamma)

    B = 0 with gamma = 0 uses the convention 0^0 = 1 (Python's pow already
    does), so the constant stays finite and positive.
    """
    a, g, rho, bb = params.alpha, params.gamma, params.rho, params.big_b
    lead = 2.0 ** (g + 1.0 + a) * (1.0 + bb) ** (1.0 + a) / rho
    return lead * max(2.0 ** (g / (1.0 + a)) + bb, rho * bb**g)


def zeta(params: ModelParams, n: int, x: float, y: float) -> float:
    """Lyapunov ratio max(B,|y|)^gamma / ((1+n)^beta (1+x)^(1+alpha))."""
    return max(params.big_b, abs(y)) ** params.gamma / (
        (1.0 + n) ** params.beta * (1.0 + x) ** (1.0 + params.alpha)
    )


def zeta_bound(params: ModelParams, x0: float = 0.0, y0: float = 0.0) -> float:
    """Runtime invariant level: zeta_n never exceeds max(zeta_0, C0')."""
    return max(zeta(params, 0, x0, y0), confinement_constant(params))
