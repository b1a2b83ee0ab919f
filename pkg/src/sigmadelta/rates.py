"""Error bounds, order selection and exponential-rate bookkeeping.

For a stable order-``m`` scheme with ``||v||_inf <= 1`` the reconstruction
error is bounded by

    ||g||_1 * ||phi_0||_1 * (pi (1 + eps))^m * lambda^-m,

and choosing ``m`` as a function of ``lambda`` turns this polynomial bound
into an exponential one.  Everything is carried in logarithms because
``||g||_1`` overflows a double long before the interesting orders.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .filters import minimal_subordinate_sequence, support_log_g1
from .relaxed import gamma_from_sigma

__all__ = [
    "OrderChoice",
    "BoundCurve",
    "RateRow",
    "EfficiencyPoint",
    "log2_error_bound",
    "design_log_g1",
    "optimize_order",
    "bound_curve",
    "rate_constant",
    "minimal_sigma",
    "multilevel_table",
    "limit_factor",
    "efficiency_curve",
    "sigma_quantization_curve",
    "write_rate_table_csv",
    "write_bound_curve_csv",
    "write_efficiency_csv",
]

LN2 = math.log(2.0)


def log2_error_bound(m, lam, log_g1, log_phi_l1=0.0, epsilon=0.01):
    """``log2`` of ``||g||_1 ||phi_0||_1 (pi (1+eps) / lambda)^m``.

    ``log_g1`` and ``log_phi_l1`` are natural logarithms.  Vectorizes over
    ``m`` and ``log_g1``.
    """
    if np.any(np.asarray(lam) <= 0):
        raise ValueError("oversampling ratio must be positive")
    m = np.asarray(m, dtype=float)
    val = (np.asarray(log_g1, dtype=float) + log_phi_l1
           + m * (math.log(math.pi * (1.0 + epsilon)) - np.log(lam))) / LN2
    return val[()] if val.ndim == 0 else val


@lru_cache(maxsize=16)
def _log_g1_table(gamma, m_max):
    out = np.empty(m_max)
    for m in range(1, m_max + 1):
        out[m - 1] = support_log_g1(minimal_subordinate_sequence(m, gamma))
    out.setflags(write=False)
    return out


def design_log_g1(gamma, m_max):
    """``log ||g||_1`` of the minimal subordinate designs ``m = 1 .. m_max`` (memoized)."""
    return _log_g1_table(float(gamma), int(m_max))


@dataclass(frozen=True)
class OrderChoice:
    m_opt: int
    log2_bound: float
    at_boundary: bool


def optimize_order(lam, gamma, epsilon=0.01, m_max=1000, *, log_phi_l1=0.0) -> OrderChoice:
    """Order in ``1 .. m_max`` minimizing the error bound at oversampling ``lam``.

    ``at_boundary`` is set when the minimum sits at ``m_max``, meaning the
    scan was too short to see the true optimum.
    """
    table = design_log_g1(gamma, m_max)
    m = np.arange(1, m_max + 1)
    vals = log2_error_bound(m, lam, table, log_phi_l1, epsilon)
    i = int(np.argmin(vals))
    return OrderChoice(m_opt=i + 1, log2_bound=float(vals[i]), at_boundary=(i == m_max - 1))


@dataclass(frozen=True)
class BoundCurve:
    gamma: float
    epsilon: float
    entries: tuple  # (lambda, m_opt, log2_bound)


def bound_curve(lambdas, gamma, epsilon=0.01, m_max=1000, *, log_phi_l1=0.0) -> BoundCurve:
    rows = []
    for lam in lambdas:
        c = optimize_order(lam, gamma, epsilon, m_max, log_phi_l1=log_phi_l1)
        rows.append((float(lam), c.m_opt, c.log2_bound))
    return BoundCurve(gamma=float(gamma), epsilon=float(epsilon), entries=tuple(rows))


def rate_constant(sigma):
    """``r0 = pi / (e^2 sigma ln 2)``."""
    return math.pi / (math.e ** 2 * sigma * LN2)


def minimal_sigma(L):
    """Smallest positive integer ``sigma`` with ``cosh(pi / sqrt(sigma)) < L``."""
    if int(L) != L or L < 2:
        raise ValueError(f"need an integer number of levels >= 2, got {L!r}")
    sigma = 1
    while gamma_from_sigma(sigma) >= L:
        sigma += 1
    return sigma


@dataclass(frozen=True)
class RateRow:
    L: int
    bits_per_sample: float
    sigma: int
    max_input: float
    r0: float
    efficiency: float


def multilevel_table(L_values=(2, 3, 4, 5, 12)):
    """Rate and efficiency figures for each alphabet size."""
    rows = []
    for L in L_values:
        sigma = minimal_sigma(L)
        bits = math.log2(L)
        r0 = rate_constant(sigma)
        rows.append(RateRow(L=int(L), bits_per_sample=bits, sigma=sigma,
                            max_input=L - gamma_from_sigma(sigma), r0=r0,
                            efficiency=r0 / bits))
    return rows


def limit_factor(sigma, m):
    """``m^2 / eta(n)^(1/m)`` for the minimal subordinate support at level ``cosh(pi/sqrt(sigma))``."""
    n = minimal_subordinate_sequence(m, gamma_from_sigma(sigma))
    log_eta = float(np.sum(np.log(n[1:].astype(float))))
    return math.exp(2 * math.log(m) - log_eta / m)


@dataclass(frozen=True)
class EfficiencyPoint:
    sigma: float
    limit_factor: float
    efficiency: float
    converged: bool


def efficiency_curve(sigma_grid, m_est=2000, *, rel_tol=0.01):
    """Coding efficiency of the minimal subordinate family as a function of ``sigma``.

    The limit ``m^2 / eta^(1/m)`` is read off at ``m_est``; ``converged``
    records whether it moved by less than ``rel_tol`` from ``m_est // 2``.
    """
    if m_est < 100:
        raise ValueError("m_est must be at least 100")
    out = []
    for sigma in sigma_grid:
        lf = limit_factor(sigma, m_est)
        half = limit_factor(sigma, m_est // 2)
        levels = math.ceil(gamma_from_sigma(sigma))
        eff = lf / (math.pi * math.e ** 2 * math.log(levels))
        out.append(EfficiencyPoint(float(sigma), lf, eff, abs(lf - half) < rel_tol * abs(lf)))
    return out


def sigma_quantization_curve(sigma_grid, j_values, m_est=1000):
    """Rows ``(sigma, j, x_{j-1}, n_j)`` at order ``m_est`` (with ``x_0 = 1``)."""
    from .relaxed import relaxed_minimizer

    rows = []
    for sigma in sigma_grid:
        gamma = gamma_from_sigma(sigma)
        x = np.concatenate(([1.0], relaxed_minimizer(m_est, gamma).x))
        n = minimal_subordinate_sequence(m_est, gamma)
        for j in j_values:
            rows.append((float(sigma), int(j), float(x[j - 1]), int(n[j - 1])))
    return rows


def _g(v):
    return format(float(v), ".17g")


def write_rate_table_csv(rows, fh):
    w = csv.writer(fh)
    w.writerow(["L", "bits", "sigma", "max_input", "r0", "efficiency"])
    for r in rows:
        w.writerow([r.L, _g(r.bits_per_sample), r.sigma, _g(r.max_input), _g(r.r0),
                    _g(r.efficiency)])


def write_bound_curve_csv(curve: BoundCurve, fh):
    w = csv.writer(fh)
    w.writerow(["lambda", "m_opt", "log2_bound"])
    for lam, m, b in curve.entries:
        w.writerow([_g(lam), m, _g(b)])


def write_efficiency_csv(points, fh):
    w = csv.writer(fh)
    w.writerow(["sigma", "limit_factor", "efficiency"])
    for p in points:
        w.writerow([_g(p.sigma), _g(p.limit_factor), _g(p.efficiency)])
