"""Integer-supported, minimally supported feedback filters.

A minimally supported filter of order ``m`` is

    h = sum_{j=1}^m d_j delta^(n_j),    1 = n_1 < n_2 < ... < n_m,

with coefficients fixed by the ``m`` moment conditions,
``d_j = prod'_i n_i / (n_i - n_j)``.  Its accumulated filter ``g`` solves
``Delta^m g = delta^(0) - h`` and has ``||g||_1 = prod n_j / m!``.

The support used here is the minimal integer sequence subordinate to the
relaxed minimiser: ``n_{j+1} = ceil(n_j x_j / x_{j-1})``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .relaxed import (
    InvalidOrderError,
    NoSolutionError,
    SingularPointError,
    relaxed_minimizer,
)

__all__ = [
    "InfeasibleFilterError",
    "OutOfRegimeError",
    "FilterDesign",
    "SparseFilter",
    "minimal_subordinate_sequence",
    "filter_coefficients",
    "design_filter",
    "h_from_design",
    "g_from_h",
    "exact_coefficients",
    "design_from_support",
    "support_log_g1",
    "w_sequence",
    "asymptotic_position",
    "optimality_ratio",
]

# tolerance for snapping n_j * x_j / x_{j-1} onto an integer before the ceiling
SNAP_ATOL = 1e-9
SNAP_RTOL = 1e-13


class InfeasibleFilterError(ValueError):
    """The filter violates the moment conditions, so ``g`` is not finitely supported."""


class OutOfRegimeError(ValueError):
    """Parameter outside the range where an asymptotic formula holds."""


@numba.njit(cache=True)
def _ceiling_chain(ratios, atol, rtol):
    n = np.empty(ratios.size + 1, dtype=np.int64)
    n[0] = 1
    last = 1.0
    for j in range(ratios.size):
        v = last * ratios[j]
        k = np.round(v)
        if abs(v - k) > max(atol, rtol * abs(v)):
            k = np.ceil(v)
        n[j + 1] = np.int64(k)
        last = k
    return n


def minimal_subordinate_sequence(m, gamma):
    """Smallest integer support subordinate to the relaxed minimiser.

    Parameters
    ----------
    m : int
        Filter order, ``m >= 1``.
    gamma : float
        Constraint level ``gamma > 1`` (``gamma = 2 - mu`` for one-bit input
        bound ``mu``).

    Returns
    -------
    ndarray of int64
        ``(n_1, ..., n_m)`` with ``n_1 = 1``.

    Notes
    -----
    The ratios ``x_j / x_{j-1}`` come straight from the closed form, and a
    product that lands within ``1e-9`` of an integer is snapped to it before
    the ceiling, so exact coincidences (``m = 2``, ``gamma = 1.5`` gives
    ``x_1 = 5``) do not jump to the next integer.
    """
    if int(m) != m or m < 1:
        raise InvalidOrderError(f"order must be an integer >= 1, got {m!r}")
    if not gamma > 1.0:
        raise NoSolutionError(f"gamma must exceed 1, got {gamma!r}")
    m = int(m)
    if m == 1:
        return np.array([1], dtype=np.int64)
    ratios = np.ascontiguousarray(relaxed_minimizer(m, gamma).ratios(), dtype=float)
    return _ceiling_chain(ratios, SNAP_ATOL, SNAP_RTOL)


def _check_support(n):
    n = np.asarray(n, dtype=np.int64).reshape(-1)
    if n.size == 0:
        raise ValueError("empty support")
    if n[0] < 1:
        raise ValueError("filter must be strictly causal (positions >= 1)")
    if np.any(np.diff(n) <= 0):
        if np.any(np.diff(n) == 0):
            raise SingularPointError("repeated support position")
        raise ValueError("support positions must be increasing")
    return n


def filter_coefficients(n):
    """Coefficients ``d_j = prod'_i n_i / (n_i - n_j)`` as ``(sign, log|d_j|)``.

    Integer differences are exact in double precision, and the product is
    accumulated in log form, so any order the support fits in memory for is
    handled.  ``sign_j = (-1)^(j-1)`` for increasing ``n``.
    """
    n = _check_support(n)
    m = n.size
    if m == 1:
        return np.array([1.0]), np.array([0.0])
    nf = n.astype(float)
    diff = nf[:, None] - nf[None, :]          # [i, j] = n_i - n_j
    np.fill_diagonal(diff, 1.0)
    logn = np.log(nf)
    logabs = (logn.sum() - logn) - np.log(np.abs(diff)).sum(axis=0)
    negatives = (diff < 0).sum(axis=0)
    sign = np.where(negatives % 2 == 0, 1.0, -1.0)
    return sign, logabs


@dataclass(frozen=True)
class SparseFilter:
    """Strictly causal sparse filter ``h = sum_j c_j delta^(p_j)``."""

    positions: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64)
        if pos.size and (pos[0] < 1 or np.any(np.diff(pos) <= 0)):
            raise ValueError("positions must be strictly increasing and >= 1")

    @property
    def one_norm(self):
        return math.fsum(abs(c) for c in self.coefficients)

    @property
    def span(self):
        return int(self.positions[-1]) if len(self.positions) else 0

    def dense(self, length=None):
        """Dense array ``h_0, ..., h_{length-1}`` (``h_0 = 0``)."""
        length = self.span + 1 if length is None else length
        out = np.zeros(length)
        keep = self.positions < length
        out[self.positions[keep]] = self.coefficients[keep]
        return out


@dataclass(frozen=True)
class FilterDesign:
    """A realizable minimally supported filter of order ``m``."""

    m: int
    gamma: float
    n: np.ndarray
    d_sign: np.ndarray
    d_logabs: np.ndarray
    log_g1: float
    h_one_norm: float

    @property
    def d(self):
        return self.d_sign * np.exp(self.d_logabs)

    @property
    def g_one_norm(self):
        return math.exp(self.log_g1)

    def to_dict(self):
        return {
            "m": self.m,
            "gamma": self.gamma,
            "n": [int(k) for k in self.n],
            "d": [float(v) for v in self.d],
            "h_one_norm": self.h_one_norm,
            "log_g1": self.log_g1,
        }

    def to_json(self):
        """JSON document with every real rendered at 17 significant digits."""
        def num(v):
            return format(float(v), ".17g")

        ns = ", ".join(str(int(k)) for k in self.n)
        ds = ", ".join(num(v) for v in self.d)
        return (
            "{\n"
            f'  "m": {self.m},\n'
            f'  "gamma": {num(self.gamma)},\n'
            f'  "n": [{ns}],\n'
            f'  "d": [{ds}],\n'
            f'  "h_one_norm": {num(self.h_one_norm)},\n'
            f'  "log_g1": {num(self.log_g1)}\n'
            "}"
        )


def support_log_g1(n):
    """``log ||g||_1 = sum log n_j - log m!``."""
    n = np.asarray(n)
    return float(np.sum(np.log(n.astype(float))) - math.lgamma(n.size + 1))


def design_from_support(n, gamma=float("nan")):
    """:class:`FilterDesign` for an arbitrary increasing integer support."""
    n = _check_support(n)
    sign, logabs = filter_coefficients(n)
    h1 = math.fsum(np.exp(logabs).tolist())
    return FilterDesign(m=int(n.size), gamma=float(gamma), n=n, d_sign=sign,
                        d_logabs=logabs, log_g1=support_log_g1(n), h_one_norm=h1)


def design_filter(m, gamma) -> FilterDesign:
    """Minimal subordinate design of order ``m`` at level ``gamma``."""
    return design_from_support(minimal_subordinate_sequence(m, gamma), gamma)


def h_from_design(design: FilterDesign) -> SparseFilter:
    return SparseFilter(positions=np.asarray(design.n, dtype=np.int64),
                        coefficients=design.d.copy())


def exact_coefficients(n):
    """Coefficients ``d_j`` as exact :class:`fractions.Fraction` values."""
    n = [int(k) for k in _check_support(n)]
    out = []
    for j, nj in enumerate(n):
        num = math.prod(ni for i, ni in enumerate(n) if i != j)
        den = math.prod(ni - nj for i, ni in enumerate(n) if i != j)
        out.append(Fraction(num, den))
    return out


def g_from_h(m, h: SparseFilter, *, tail_tol=1e-9):
    """Accumulated filter ``g`` with ``Delta^m g = delta^(0) - h``.

    Computed by ``m`` cumulative sums of ``delta^(0) - h``.  When ``h`` is the
    minimally supported filter on its positions (coefficients agree with the
    moment solution to ``1e-9`` relative) the sums run over exact rationals,
    since in double precision the cancellation grows like ``n_m^m`` and wipes
    out the result past ``m ~ 8``.  Any other ``h`` is summed in floating
    point as given.

    For a filter satisfying the moment conditions ``g`` lives on
    ``[0, n_m - m]``; entries past that index must vanish to
    ``tail_tol * ||g||_1`` and are dropped.

    Raises
    ------
    InfeasibleFilterError
        If the tail does not vanish.
    """
    m = int(m)
    span = h.span
    if span < m:
        raise InfeasibleFilterError("support too short for the order")
    pos = np.asarray(h.positions, dtype=np.int64)
    coef = np.asarray(h.coefficients, dtype=float)
    exact = None
    if pos.size == m:
        cand = exact_coefficients(pos)
        ref = np.array([float(c) for c in cand])
        if np.allclose(coef, ref, rtol=1e-9, atol=0.0):
            exact = cand

    if exact is not None:
        den = math.lcm(*(c.denominator for c in exact))
        seq = [0] * (span + 1)
        seq[0] = den
        for p, c in zip(pos.tolist(), exact):
            seq[p] -= c.numerator * (den // c.denominator)
        for _ in range(m):
            seq = list(itertools.accumulate(seq))
        g = np.array([float(Fraction(v, den)) for v in seq])
    else:
        g = -h.dense(span + 1)
        g[0] += 1.0
        for _ in range(m):
            g = np.cumsum(g)

    body, tail = g[: span - m + 1], g[span - m + 1:]
    scale = np.abs(body).sum()
    if tail.size and np.max(np.abs(tail)) > tail_tol * scale:
        raise InfeasibleFilterError(
            f"moment conditions violated: tail {np.max(np.abs(tail)):.3g} vs ||g||_1 {scale:.3g}")
    return body


def w_sequence(sigma, m):
    """``w_j = 1 + sigma j^2`` for ``j = 1..m-1``."""
    j = np.arange(1, int(m), dtype=float)
    return 1.0 + sigma * j * j


def asymptotic_position(sigma, j):
    """Large-order limit ``1 + ceil(sigma) (j-1)^2`` of ``n_j``, valid for ``sigma > 5/4``."""
    if not sigma > 1.25:
        raise OutOfRegimeError(f"limit formula needs sigma > 5/4, got {sigma!r}")
    return 1 + math.ceil(sigma) * (int(j) - 1) ** 2


def optimality_ratio(m, gamma):
    """``(eta(n) / eta(x))^(1/m)`` for the minimal subordinate support ``n``.

    Both products are formed in log space; the value is ``>= 1`` because ``n``
    is subordinate to ``x``.
    """
    n = minimal_subordinate_sequence(m, gamma)
    sol = relaxed_minimizer(m, gamma)
    log_n = float(np.sum(np.log(n[1:].astype(float))))
    log_x = float(np.sum(np.log(sol.x)))
    return math.exp((log_n - log_x) / m)
