"""Chebyshev polynomials of the first and second kind.

Values are computed from the trigonometric / hyperbolic closed forms

    T_m(cos t) = cos(m t),        T_m(cosh t) = cosh(m t),
    U_m(cos t) = sin((m+1)t)/sin t,  U_m(cosh t) = sinh((m+1)t)/sinh t,

so degrees in the thousands stay well conditioned.  Monomial expansions and
three-term recurrences are never used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChebNodeSet",
    "InvalidDegreeError",
    "cheb_t",
    "cheb_u",
    "second_kind_zeros",
    "critical_points",
    "critical_point_products",
    "critical_point_products_closed_form",
]


class InvalidDegreeError(ValueError):
    """Raised when a polynomial degree is outside the supported range."""


def _check_degree(m, minimum):
    if int(m) != m or m < minimum:
        raise InvalidDegreeError(f"degree must be an integer >= {minimum}, got {m!r}")
    return int(m)


def cheb_t(m, x):
    """Chebyshev polynomial of the first kind ``T_m(x)``.

    Parameters
    ----------
    m : int
        Degree, ``m >= 0``.
    x : float or array_like
        Evaluation point(s); any real value is accepted.

    Returns
    -------
    float or ndarray
        ``T_m(x)``.  Outside ``[-1, 1]`` the value grows like ``cosh`` and may
        overflow to ``inf`` for very large ``m``.
    """
    m = _check_degree(m, 0)
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inside = ax <= 1.0
    with np.errstate(invalid="ignore", over="ignore"):
        trig = np.cos(m * np.arccos(np.clip(x, -1.0, 1.0)))
        hyp = np.cosh(m * np.arccosh(np.maximum(ax, 1.0)))
    sign = np.where((x < 0) & (m % 2 == 1), -1.0, 1.0)
    out = np.where(inside, trig, sign * hyp)
    return out[()] if out.ndim == 0 else out


def cheb_u(m, x):
    """Chebyshev polynomial of the second kind ``U_m(x)``.

    At ``x = +-1`` the removable singularity of ``sin((m+1)t)/sin t`` is
    replaced by its limit, ``U_m(1) = m+1`` and ``U_m(-1) = (-1)^m (m+1)``.
    """
    m = _check_degree(m, 0)
    x0 = np.asarray(x, dtype=float)
    x = np.atleast_1d(x0)
    ax = np.abs(x)
    out = np.empty(x.shape)
    parity = -1.0 if m % 2 else 1.0

    edge = ax == 1.0
    inside = ax < 1.0
    outside = ax > 1.0

    theta = np.arccos(x[inside])
    out[inside] = np.sin((m + 1) * theta) / np.sin(theta)

    with np.errstate(over="ignore", invalid="ignore"):
        tau = np.arccosh(ax[outside])
        val = np.sinh((m + 1) * tau) / np.sinh(tau)
    out[outside] = np.where(x[outside] < 0, parity * val, val)

    out[edge] = np.where(x[edge] < 0, parity * (m + 1), float(m + 1))
    if m % 2:
        out[x == 0.0] = 0.0  # odd polynomial
    return out[0] if x0.ndim == 0 else out


@dataclass(frozen=True)
class ChebNodeSet:
    """Zeros ``z_1 < ... < z_{m-1}`` of ``U_{m-1}`` (critical points of ``T_m``)."""

    m: int
    z: np.ndarray

    def with_left_endpoint(self):
        """Nodes prefixed by ``z_0 = -1``."""
        return np.concatenate(([-1.0], self.z))


def second_kind_zeros(m) -> ChebNodeSet:
    """Zeros of ``U_{m-1}``: ``z_j = cos((m-j) pi / m)``, ``j = 1..m-1``, ascending.

    The cosine is evaluated in the shifted form ``sin((2j-m) pi / (2m))``,
    which is the same number but makes ``z_j = -z_{m-j}`` hold bit-exactly and
    gives ``z = 0`` exactly at the midpoint of even ``m``.
    """
    m = _check_degree(m, 2)
    j = np.arange(1, m)
    z = np.sin((2 * j - m) * np.pi / (2 * m))
    return ChebNodeSet(m=m, z=z)


def critical_points(m):
    """``(z_0, ..., z_{m-1})`` with ``z_0 = -1`` prepended to the zeros of ``U_{m-1}``."""
    return second_kind_zeros(m).with_left_endpoint()


def critical_point_products(m, *, log=False, log_threshold=40):
    """Products ``prod'_{i} (z_k - z_i)`` over the critical points, ``k = 0..m-1``.

    Parameters
    ----------
    m : int
        Degree of ``T_m``, ``m >= 2``.
    log : bool
        If true return ``(sign, log|value|)`` arrays instead of values.
    log_threshold : int
        Above this degree the products are always accumulated as sign plus
        log-magnitude before exponentiating.
    """
    m = _check_degree(m, 2)
    z = critical_points(m)
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    if log or m > log_threshold:
        sign = np.prod(np.sign(diff), axis=1)
        logabs = np.sum(np.log(np.abs(diff)), axis=1)
        if log:
            return sign, logabs
        return sign * np.exp(logabs)
    return np.prod(diff, axis=1)


def critical_point_products_closed_form(m, *, log=False):
    """Closed form of :func:`critical_point_products`.

    ``m (-1)^(m-1) / 2^(m-1)`` for ``k = 0`` and
    ``m (-1)^(m-1-k) / (2^(m-1) (1 - z_k))`` for ``k > 0``.
    """
    m = _check_degree(m, 2)
    k = np.arange(m)
    sign = np.where((m - 1 - k) % 2 == 0, 1.0, -1.0)
    # 1 - z_k = 2 sin^2((m-k) pi / (2m)), free of cancellation near z = 1
    one_minus_z = 2.0 * np.sin((m - k) * np.pi / (2 * m)) ** 2
    logabs = np.log(m) - (m - 1) * np.log(2.0) - np.log(one_minus_z)
    logabs[0] = np.log(m) - (m - 1) * np.log(2.0)
    if log:
        return sign, logabs
    return sign * np.exp(logabs)
