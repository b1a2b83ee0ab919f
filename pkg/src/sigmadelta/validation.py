"""Self-check suites grouped by module, used by ``sigmadelta validate``.

Each check yields ``(label, worst, tolerance)`` triples; a group's score is
the largest ``worst / tolerance``, so a failing report says by how much and
where a tolerance was missed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import chebyshev as cb
from . import filters as fl
from . import modulator as md
from . import rates as rt
from . import relaxed as rx

__all__ = ["GroupResult", "GROUPS", "run_groups"]


@dataclass(frozen=True)
class GroupResult:
    name: str
    passed: bool
    score: float
    seconds: float
    detail: str = ""


def _check_chebyshev(rng):
    osc = prod = deriv = 0.0
    for m in range(2, 26):
        z = np.concatenate(([-1.0], cb.second_kind_zeros(m).z, [1.0]))
        sign = np.where((m - np.arange(m + 1)) % 2 == 0, 1.0, -1.0)
        osc = max(osc, float(np.max(np.abs(cb.cheb_t(m, z) - sign))))
        direct = cb.critical_point_products(m)
        closed = cb.critical_point_products_closed_form(m)
        prod = max(prod, float(np.max(np.abs(direct / closed - 1.0))))
        x = rng.uniform(-0.95, 0.95, 20)
        h = 1e-6
        fd = (cb.cheb_t(m, x + h) - cb.cheb_t(m, x - h)) / (2 * h)
        ref = m * cb.cheb_u(m - 1, x)
        deriv = max(deriv, float(np.max(np.abs(fd - ref) / np.maximum(np.abs(ref), 1.0))))
    return [("equi-oscillation", osc, 1e-12), ("critical products", prod, 1e-10),
            ("T' = m U", deriv, 1e-5)]


def _check_relaxed(rng):
    worst = 0.0
    for gamma in (1.2, 1.5, rx.gamma_from_sigma(6)):
        for m in range(2, 61):
            sol = rx.relaxed_minimizer(m, gamma)
            worst = max(worst, abs(rx.constraint_f(sol.x) - gamma) / gamma)
    sol = rx.relaxed_minimizer(2, 1.5)
    worst = max(worst, abs(sol.beta - math.log(2) / 2), abs(sol.K - 4) / 4, abs(sol.x[0] - 5) / 5)
    return [("active constraint", worst, 1e-8)]


def _check_jordan(rng):
    kern = resid = jordan = 0.0
    rank_ok = True
    for m in range(2, 13):
        for _ in range(20):
            y = np.sort(rng.uniform(1.5, 50.0, m - 1))
            B = rx.build_b_matrix(y)
            scale = np.max(np.abs(B))
            kern = max(kern, float(np.max(np.abs(B.sum(axis=1)))) / scale)
            p = rx.residue_polynomial_values(y)
            target = (-1) ** m / m
            resid = max(resid, float(np.max(np.abs(B @ p - target)))
                        / max(scale * np.max(np.abs(p)), 1.0))
            jordan = max(jordan, rx.jordan_residual(y))
            sv = rx.b_tilde_singular_values(y)
            if m > 1 and (sv[-1] > 1e-8 * sv[0] or (m > 2 and sv[-2] <= 1e-8 * sv[0])):
                rank_ok = False
    return [("B e = 0", kern, 1e-9), ("B p = (-1)^m/m e", resid, 1e-9),
            ("Jordan residual", jordan, 1e-8), ("rank m-1", 0.0 if rank_ok else math.inf, 1.0)]


def _check_filters(rng):
    g6 = rx.gamma_from_sigma(6)
    n = fl.minimal_subordinate_sequence(2000, g6)
    miss = sum(int(n[j - 1] != 1 + 6 * (j - 1) ** 2) for j in range(2, 11))
    n = fl.minimal_subordinate_sequence(1000, rx.gamma_from_sigma(1.1))
    miss += int(n[2] != 8) + int(n[3] != 17)
    norm = dsum = excess = 0.0
    for gamma in (1.5, g6):
        for m in range(1, 21):
            d = fl.design_filter(m, gamma)
            g = fl.g_from_h(m, fl.h_from_design(d))
            norm = max(norm, abs(np.abs(g).sum() / d.g_one_norm - 1.0))
            dsum = max(dsum, abs(d.d.sum() - 1.0))
            excess = max(excess, d.h_one_norm / gamma - 1.0)
    return [("integer limits", float(miss), 0.0), ("||g||_1 identity", norm, 1e-8),
            ("sum d = 1", dsum, 1e-9), ("||h||_1 <= gamma", max(excess, 0.0), 1e-12)]


def _check_stability(rng, pairs=10, steps=100_000):
    worst = replay = 0.0
    for _ in range(pairs):
        m = int(rng.integers(1, 40))
        gamma = float(rng.uniform(1.05, 1.95))
        d = fl.design_filter(m, gamma)
        mu = max(0.0, 2.0 - d.h_one_norm) * (1 - 1e-9)
        y = rng.uniform(-mu, mu, steps)
        h = fl.h_from_design(d)
        tr = md.run_greedy(h, y, 2)
        worst = max(worst, float(np.max(np.abs(tr.v))))
        replay = max(replay, md.recursion_residual(h, tr))
    return [("max|v| - 1", max(0.0, worst - 1.0), 0.0), ("recursion replay", replay, 0.0)]


def _check_table(rng):
    reference = {
        2: (1.0, 6, 0.058, 0.102, 0.102),
        3: (1.585, 4, 0.490, 0.153, 0.097),
        4: (2.0, 3, 0.851, 0.204, 0.102),
        5: (2.322, 2, 0.335, 0.306, 0.132),
        12: (3.585, 1, 0.408, 0.613, 0.171),
    }
    worst = 0.0
    for row in rt.multilevel_table(sorted(reference)):
        ref = reference[row.L]
        got = (row.bits_per_sample, row.sigma, row.max_input, row.r0, row.efficiency)
        worst = max(worst, max(abs(a - b) for a, b in zip(got, ref)))
    return [("rate table cells", worst, 1e-3)]


GROUPS = {
    "chebyshev": _check_chebyshev,
    "relaxed": _check_relaxed,
    "jordan": _check_jordan,
    "filters": _check_filters,
    "stability": _check_stability,
    "table": _check_table,
}


def _ratio(worst, tol):
    # zero tolerance means the check must hold exactly
    if tol == 0:
        return 0.0 if worst == 0 else math.inf
    return worst / tol


def run_groups(names=None, seed=0):
    """Run the named groups (all by default) and return their results in order."""
    names = list(GROUPS) if not names else list(names)
    unknown = [n for n in names if n not in GROUPS]
    if unknown:
        raise KeyError(f"unknown validation group(s): {', '.join(unknown)}")
    out = []
    for name in names:
        rng = np.random.default_rng([seed, list(GROUPS).index(name)])
        t0 = time.perf_counter()
        checks = GROUPS[name](rng)
        score, label = 0.0, ""
        for lab, worst, tol in checks:
            r = _ratio(worst, tol)
            if r >= score:
                score, label = float(r), lab
        out.append(GroupResult(name, bool(score <= 1.0), score, time.perf_counter() - t0,
                               f"tightest check: {label}"))
    return out
