"""Closed-form solution of the relaxed filter-placement problem.

The relaxed problem places real support points ``1 = x_0 < x_1 < ... < x_{m-1}``
so that the product ``eta(x) = prod x_j`` is minimal subject to the
feasibility constraint

    f(x) = sum_j prod'_i x_i / |x_i - x_j|  <=  gamma.

The minimiser is the affinely mapped set of critical points of ``T_m``,

    x_j = 1 + K (1 + z_j),   K = 1 / (2 sinh^2 beta),

with ``beta`` the positive root of ``cosh((2m-1) beta) / cosh(beta) = gamma``.
Everything that is a product of many factors is carried in log form; the
objective overflows a double near ``m ~ 150``.

The B-matrix helpers at the bottom of the module are numerical checks of the
linear-algebra facts behind uniqueness of the minimiser.  They are meant for
small orders (``m <= 12``) only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .chebyshev import second_kind_zeros

__all__ = [
    "NoSolutionError",
    "InvalidOrderError",
    "SingularPointError",
    "DomainError",
    "ShapeError",
    "ConstraintPoint",
    "RelaxedSolution",
    "solve_beta",
    "beta_bracket",
    "relaxed_minimizer",
    "minimizer_from_nodes",
    "sigma_from_gamma",
    "gamma_from_sigma",
    "constraint_f",
    "log_constraint_f",
    "log_eta",
    "is_subordinate",
    "b_coefficients",
    "build_b_matrix",
    "b_tilde_matrix",
    "jordan_p_matrix",
    "jordan_residual",
    "b_tilde_singular_values",
    "residue_polynomial_values",
]


class NoSolutionError(ValueError):
    """The constraint level admits no relaxed solution (``gamma <= 1``)."""


class InvalidOrderError(ValueError):
    """Filter order outside the supported range."""


class SingularPointError(ValueError):
    """Two support points coincide, so ``f`` or ``B`` is undefined."""


class DomainError(ValueError):
    """A point lies outside the domain of the objective."""


class ShapeError(ValueError):
    """Two points of different length were compared."""


def _check_order(m, minimum=2):
    if int(m) != m or m < minimum:
        raise InvalidOrderError(f"order must be an integer >= {minimum}, got {m!r}")
    return int(m)


@dataclass(frozen=True)
class ConstraintPoint:
    """A point ``(x_1, ..., x_{m-1})`` with the implicit anchor ``x_0 = 1``.

    The consecutive log-ratios ``log(x_j / x_{j-1})`` are stored next to the
    coordinates so that callers able to supply them accurately (the closed
    form minimiser does) avoid the cancellation of ``x_j - x_{j-1}``.
    """

    x: np.ndarray
    log_r: np.ndarray = field(repr=False)

    @classmethod
    def from_x(cls, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        full = np.concatenate(([1.0], x))
        with np.errstate(divide="ignore", invalid="ignore"):
            log_r = np.log(full[1:]) - np.log(full[:-1])
        return cls(x=x, log_r=log_r)

    @classmethod
    def from_ratios(cls, r):
        r = np.asarray(r, dtype=float).reshape(-1)
        log_r = np.log(r)
        return cls(x=np.exp(np.cumsum(log_r)), log_r=log_r)

    @property
    def m(self):
        return self.x.size + 1

    @property
    def r(self):
        return np.exp(self.log_r)

    def full(self):
        """Coordinates including the anchor ``x_0 = 1``."""
        return np.concatenate(([1.0], self.x))


def _as_point(x):
    if isinstance(x, ConstraintPoint):
        return x
    return ConstraintPoint.from_x(x)


def sigma_from_gamma(gamma):
    """``sigma = pi^2 / acosh(gamma)^2``, the growth constant of ``x_j ~ 1 + sigma j^2``."""
    return math.pi ** 2 / math.acosh(gamma) ** 2


def gamma_from_sigma(sigma):
    """Inverse of :func:`sigma_from_gamma`: ``gamma = cosh(pi / sqrt(sigma))``."""
    return math.cosh(math.pi / math.sqrt(sigma))


# ----------------------------------------------------------------------------
# beta equation and the closed-form minimiser
# ----------------------------------------------------------------------------

def _beta_ratio(m, beta):
    return math.cosh((2 * m - 1) * beta) / math.cosh(beta)


def beta_bracket(m, gamma):
    """Interval ``[acosh(gamma)/(2m), acosh(gamma)/(2m-2)]`` known to contain beta."""
    a = math.acosh(gamma)
    return a / (2 * m), a / (2 * m - 2)


def solve_beta(m, gamma, *, rtol=1e-15, maxiter=200):
    """Positive root of ``cosh((2m-1) beta) / cosh(beta) = gamma`` by bisection.

    The left-hand side is strictly increasing in ``beta``, and the root is
    bracketed by :func:`beta_bracket`, so plain bisection is both safe and
    fast (about 50 halvings).

    Raises
    ------
    InvalidOrderError
        If ``m < 2``.
    NoSolutionError
        If ``gamma <= 1``.
    """
    m = _check_order(m)
    if not gamma > 1.0:
        raise NoSolutionError(f"gamma must exceed 1, got {gamma!r}")
    lo, hi = beta_bracket(m, gamma)
    # the bracket endpoints are exact only in exact arithmetic
    lo *= 1.0 - 1e-12
    hi *= 1.0 + 1e-12
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= rtol * hi:
            break
        if _beta_ratio(m, mid) < gamma:
            lo = mid
        else:
            hi = mid
    # pick whichever end leaves the smaller residual
    if abs(_beta_ratio(m, lo) - gamma) <= abs(_beta_ratio(m, hi) - gamma):
        return lo
    return hi


@dataclass(frozen=True)
class RelaxedSolution:
    """Optimal relaxed support points for order ``m`` and level ``gamma``."""

    m: int
    gamma: float
    beta: float
    K: float
    x: np.ndarray
    log_eta_min: float

    @property
    def eta_min(self):
        return math.exp(self.log_eta_min)

    def sin2(self):
        """``sin^2(j pi / (2m))`` for ``j = 0..m-1``; ``x_j = 1 + 2 K sin2_j``."""
        j = np.arange(self.m)
        return np.sin(j * np.pi / (2 * self.m)) ** 2

    def log_ratios(self):
        """``log(x_j / x_{j-1})`` for ``j = 1..m-1`` without forming differences of x."""
        m = self.m
        j = np.arange(1, m)
        sh2 = math.sinh(self.beta) ** 2
        s_prev = np.sin((j - 1) * np.pi / (2 * m)) ** 2
        # sin^2 a - sin^2 b = sin(a+b) sin(a-b)
        step = np.sin((2 * j - 1) * np.pi / (2 * m)) * math.sin(np.pi / (2 * m))
        return np.log1p(step / (sh2 + s_prev))

    def ratios(self):
        return np.exp(self.log_ratios())

    def point(self):
        return ConstraintPoint(x=self.x, log_r=self.log_ratios())


def relaxed_minimizer(m, gamma) -> RelaxedSolution:
    """Closed-form minimiser of ``eta`` on ``{f = gamma}``.

    ``x_j`` is evaluated as ``1 + sin^2(j pi / 2m) / sinh^2(beta)``, which equals
    ``1 + K (1 + z_j)`` but keeps full relative accuracy for small ``j``.
    """
    beta = solve_beta(m, gamma)
    m = int(m)
    sh = math.sinh(beta)
    K = 1.0 / (2.0 * sh * sh)
    j = np.arange(1, m)
    x = 1.0 + np.sin(j * np.pi / (2 * m)) ** 2 / (sh * sh)
    log_eta_min = (
        math.log(math.sinh(2 * m * beta))
        - (2 * m - 1) * math.log(2.0 * sh)
        - math.log(math.cosh(beta))
    )
    return RelaxedSolution(m=m, gamma=float(gamma), beta=beta, K=K, x=x,
                           log_eta_min=log_eta_min)


def minimizer_from_nodes(m, gamma):
    """Same points as :func:`relaxed_minimizer`, built literally from ``1 + K (1 + z_j)``."""
    sol = relaxed_minimizer(m, gamma)
    return 1.0 + sol.K * (1.0 + second_kind_zeros(m).z)


# ----------------------------------------------------------------------------
# constraint and objective
# ----------------------------------------------------------------------------

def log_constraint_f(x, *, gap_tol=1e-6):
    """Natural log of :func:`constraint_f`."""
    p = _as_point(x)
    full = p.full()
    if full.size == 1:
        return 0.0
    if np.unique(full).size != full.size:
        raise SingularPointError("support points must be distinct")
    if np.any(full <= 0.0):
        raise DomainError("support points must be positive")
    n = full.size
    off = ~np.eye(n, dtype=bool)
    gaps = np.abs(full[:, None] - full[None, :])[off]
    if gaps.min() < gap_tol * full.max():
        # ratio form: x_i / |x_i - x_j| = 1 / |expm1(log x_j - log x_i)|
        L = np.concatenate(([0.0], np.cumsum(p.log_r)))
        with np.errstate(divide="ignore"):
            logs = -np.log(np.abs(np.expm1(L[None, :] - L[:, None])))
    else:
        with np.errstate(divide="ignore"):
            logs = np.log(full)[:, None] - np.log(np.abs(full[:, None] - full[None, :]))
    if not np.all(np.isfinite(logs[off])):
        raise SingularPointError("support points must be distinct")
    logs[~off] = 0.0
    # rows index i, columns j; term j sums over i != j
    return float(logsumexp(logs.sum(axis=0)))


def constraint_f(x, *, gap_tol=1e-6):
    """Feasibility functional ``f(x) = sum_j prod'_i x_i / |x_i - x_j|`` with ``x_0 = 1``.

    Each product is accumulated as a sum of logs and the terms are combined
    with a log-sum-exp, so large orders neither overflow nor underflow.  When
    two coordinates are closer than ``gap_tol`` times the largest one, the
    factors are formed from the stored log-ratios instead of coordinate
    differences.

    Raises
    ------
    SingularPointError
        If two coordinates coincide (including coincidence with ``x_0 = 1``).
    """
    return math.exp(log_constraint_f(x, gap_tol=gap_tol))


def log_eta(x):
    """``sum_j log x_j``, the log of the objective ``eta``."""
    arr = x.x if isinstance(x, ConstraintPoint) else np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("objective undefined for nonpositive coordinates")
    return float(np.sum(np.log(arr)))


def is_subordinate(x, y, *, rtol=1e-12):
    """True iff ``1 <= y_1/x_1 <= y_2/x_2 <= ...`` (``y`` subordinate to ``x``).

    ``rtol`` absorbs rounding in the ratios, so an integer point that lands on
    a floating-point minimiser coordinate still counts as subordinate.
    """
    xa = x.x if isinstance(x, ConstraintPoint) else np.asarray(x, dtype=float).reshape(-1)
    ya = y.x if isinstance(y, ConstraintPoint) else np.asarray(y, dtype=float).reshape(-1)
    if xa.shape != ya.shape:
        raise ShapeError(f"length mismatch: {xa.size} vs {ya.size}")
    rho = np.concatenate(([1.0], ya / xa))
    return bool(np.all(rho[1:] >= rho[:-1] * (1.0 - rtol)))


# ----------------------------------------------------------------------------
# B-matrix and Jordan-form checks (small m only)
# ----------------------------------------------------------------------------

def _anchored(y):
    y = np.asarray(y, dtype=float).reshape(-1)
    full = np.concatenate(([1.0], y))
    if np.unique(full).size != full.size:
        raise SingularPointError("coordinates must be distinct from each other and from 1")
    return full


def b_coefficients(y):
    """``b_j = prod'_i 1 / (y_i - y_j)`` for ``j = 0..m-1`` (with ``y_0 = 1``)."""
    full = _anchored(y)
    diff = full[:, None] - full[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=0)


def _recip_diffs(full):
    diff = full[:, None] - full[None, :]
    np.fill_diagonal(diff, np.inf)
    rec = 1.0 / diff
    np.fill_diagonal(rec, 0.0)
    return rec


def build_b_matrix(y):
    """The ``(m-1) x m`` matrix ``B(y)`` of the stationarity system.

    Row ``k`` (``k = 1..m-1``) has ``b_j / (y_k - y_j)`` off the diagonal and
    ``b_k * sum'_l 1 / (y_k - y_l)`` in column ``k``.
    """
    full = _anchored(y)
    b = b_coefficients(y)
    rec = _recip_diffs(full)
    B = rec * b[None, :]
    idx = np.arange(full.size)
    B[idx, idx] = b * rec.sum(axis=1)
    return B[1:]


def b_tilde_matrix(y):
    """Square extension of ``B`` with columns divided by ``b_j`` and the ``y_0`` row added."""
    full = _anchored(y)
    rec = _recip_diffs(full)
    out = rec.copy()
    np.fill_diagonal(out, rec.sum(axis=1))
    return out


def jordan_p_matrix(y):
    """Similarity ``P(y)`` with ``P[j, n] = b_j (y_j - y_{m-1})^n / n!``."""
    full = _anchored(y)
    b = b_coefficients(y)
    m = full.size
    n = np.arange(m)
    base = full - full[-1]
    fact = np.array([math.factorial(k) for k in n], dtype=float)
    with np.errstate(invalid="ignore"):
        P = b[:, None] * base[:, None] ** n[None, :] / fact[None, :]
    return P


def jordan_residual(y):
    """Relative residual ``max|B~ P - P J| / max|B~ P|`` of the Jordan decomposition.

    ``J`` is the nilpotent Jordan block with ones on the superdiagonal.
    """
    Bt = b_tilde_matrix(y)
    P = jordan_p_matrix(y)
    J = np.eye(P.shape[0], k=1)
    lhs = Bt @ P
    return float(np.max(np.abs(lhs - P @ J)) / np.max(np.abs(lhs)))


def b_tilde_singular_values(y):
    """Singular values of ``B~(y)`` in descending order (one of them is ~0)."""
    return np.linalg.svd(b_tilde_matrix(y), compute_uv=False)


def residue_polynomial_values(y):
    """``p_y(y_j)``, ``j = 0..m-1``, where ``p_y' = prod (s - y_j)`` and ``p_y(0) = 0``.

    Evaluated as ``int_0^{y_j} prod (s - y_i) ds`` with Gauss-Legendre
    quadrature exact for the degree, avoiding the monomial basis.
    """
    full = _anchored(y)
    roots = full[1:]
    m = full.size
    nodes, weights = np.polynomial.legendre.leggauss(max(m, 1))
    s = 0.5 * full[:, None] * (1.0 + nodes[None, :])
    integrand = np.prod(s[:, :, None] - roots[None, None, :], axis=2)
    return 0.5 * full * (integrand @ weights)
