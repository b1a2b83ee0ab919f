"""Bandlimited test signals, a smooth low-pass kernel and sup-norm error measurement.

The kernel has the transform

    phi_hat(xi) = 1                          |xi| <= Omega
                = b((|xi| - Omega) / w)      Omega < |xi| < Omega + w
                = 0                          otherwise,

with ``w = eps * Omega`` and the quintic blend ``b(s) = 1 - 10 s^3 + 15 s^4 - 6 s^5``.
``b`` matches value, slope and curvature at both ends, so ``phi`` decays like
``|t|^-4``.  Because ``b`` is a polynomial, integrating the transition band
by parts terminates after six terms; this gives ``phi`` in closed form away
from the origin and an exact majorant ``|phi(t)| <= B(t)`` that controls the
truncated reconstruction sums.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import fftconvolve

from .modulator import ModulatorTrace

__all__ = [
    "KernelMismatchError",
    "WindowError",
    "SignalSpec",
    "Kernel",
    "ErrorReport",
    "eval_signal",
    "two_tone",
    "design_kernel",
    "reconstruct",
    "sup_error",
    "write_sweep_csv",
    "BLEND_INTEGRAL",
]

# b(s) = 1 - 10 s^3 + 15 s^4 - 6 s^5, ascending coefficients
_BLEND = np.array([1.0, 0.0, 0.0, -10.0, 15.0, -6.0])
_BLEND_DERIVS = [P.polyder(_BLEND, k) if k else _BLEND for k in range(6)]
_B0 = np.array([P.polyval(0.0, c) for c in _BLEND_DERIVS])
_B1 = np.array([P.polyval(1.0, c) for c in _BLEND_DERIVS])
# coefficients of the majorant sum_k c_k / a^(k+1), k = 3..5
_MAJ = {k: abs(_B0[k]) + abs(_B1[k]) for k in range(3, 6)}

#: exact value of the integral of ``b`` over ``[0, 1]``
BLEND_INTEGRAL = 0.5

# below this value of a = 2 pi w |t| the by-parts series is evaluated by quadrature
_A_SWITCH = 8.0
_GL_S, _GL_W = np.polynomial.legendre.leggauss(32)
_GL_S = 0.5 * (_GL_S + 1.0)
_GL_W = 0.5 * _GL_W
_GL_B = P.polyval(_GL_S, _BLEND)


class KernelMismatchError(ValueError):
    """The kernel's transition band reaches past half the sampling rate."""


class WindowError(ValueError):
    """The evaluation window is too close to the ends of the sampled range."""


@dataclass(frozen=True)
class SignalSpec:
    """Finite sum of cosines ``sum_i a_i cos(2 pi f_i t + theta_i)``."""

    omega: float
    frequencies: tuple = ()
    amplitudes: tuple = ()
    phases: tuple = ()
    mu: float = 1.0

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        a = np.asarray(self.amplitudes, dtype=float)
        th = np.asarray(self.phases, dtype=float)
        if not (f.shape == a.shape == th.shape):
            raise ValueError("frequencies, amplitudes and phases must have equal length")
        if self.omega <= 0:
            raise ValueError("band limit must be positive")
        if np.any(np.abs(f) >= self.omega):
            raise ValueError("component frequency outside the open band")
        if np.abs(a).sum() > self.mu * (1 + 1e-15) or self.mu > 1:
            raise ValueError("amplitudes exceed the stated bound mu <= 1")


def two_tone(mu=0.3, omega=0.5):
    """Fixed two-component test signal with ``sum |a_i| = mu``."""
    return SignalSpec(omega=omega,
                      frequencies=(0.137 * omega / 0.5, 0.311 * omega / 0.5),
                      amplitudes=(0.6 * mu, 0.4 * mu),
                      phases=(0.3, 1.1), mu=mu)


def eval_signal(spec: SignalSpec, t):
    """Evaluate the signal at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    for f, a, th in zip(spec.frequencies, spec.amplitudes, spec.phases):
        out += a * np.cos(2 * np.pi * f * t + th)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class Kernel:
    """Admissible reconstruction kernel with flat band ``[-omega, omega]``.

    Attributes
    ----------
    epsilon, omega : float
        Transition width is ``epsilon * omega``.
    t_max : float
        Truncation radius; the one-sided majorant tail ``2 * int_T^inf B``
        is below ``tail_tol``.
    l1_norm : float
        ``int |phi|``, computed by Gauss-Legendre quadrature between the zeros
        of ``phi`` plus the majorant tail.
    decay_constant : float
        ``C`` with ``|phi(t)| <= C / (1 + t^4)``.
    """

    epsilon: float
    omega: float
    t_max: float
    tail_tol: float
    l1_norm: float = field(default=float("nan"))
    decay_constant: float = field(default=float("nan"))

    @property
    def width(self):
        return self.epsilon * self.omega

    @property
    def cutoff(self):
        return (1.0 + self.epsilon) * self.omega

    @property
    def peak(self):
        """``phi(0) = int phi_hat``."""
        return 2.0 * self.omega * (1.0 + self.epsilon * BLEND_INTEGRAL)

    def transform(self, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        s = np.clip((xi - self.omega) / self.width, 0.0, 1.0)
        return P.polyval(s, _BLEND)

    def __call__(self, t):
        return _phi(np.asarray(t, dtype=float), self.omega, self.width)

    def majorant(self, t):
        """``B(t) >= |phi(t)|``, capped at ``phi(0)``."""
        t = np.abs(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            a = 2 * np.pi * self.width * t
            b = 2 * self.width * sum(c / a ** (k + 1) for k, c in _MAJ.items())
        return np.minimum(b, self.peak)

    def tail_integral(self, T):
        """``int_T^inf B(t) dt`` (one side)."""
        tw = 2 * np.pi * self.width
        return 2 * self.width * sum(c / (tw ** (k + 1) * k * T ** k) for k, c in _MAJ.items())

    def truncation_budget(self, tau, q_max=1.0):
        """Bound on the samples dropped by truncating at ``t_max``, both sides."""
        return float(2.0 * q_max * (tau * float(self.majorant(self.t_max)) + self.tail_integral(self.t_max)))


def _phi(t, omega, w):
    t = np.abs(t)
    out = np.empty(t.shape)
    a = 2 * np.pi * w * t
    th = 2 * np.pi * omega * t
    small = a < _A_SWITCH
    if np.any(small):
        ts, as_, ths = t[small], a[small], th[small]
        main = 2 * omega * np.sinc(2 * omega * ts)
        band = (np.cos(ths[:, None] + as_[:, None] * _GL_S[None, :]) * (_GL_B * _GL_W)).sum(axis=1)
        out[small] = main + 2 * w * band
    big = ~small
    if np.any(big):
        ab, thb = a[big], th[big]
        e = np.exp(1j * ab)
        acc = np.zeros(ab.shape, dtype=complex)
        # the k = 0 by-parts term cancels the flat-band sinc exactly; k = 1, 2 vanish
        for k in range(3, 6):
            acc += (-1) ** k * (_B1[k] * e - _B0[k]) / (1j * ab) ** (k + 1)
        out[big] = 2 * w * (np.exp(1j * thb) * acc).real
    return out


def _zero_partition(kern, X):
    """Zeros of ``phi`` on ``(0, X)`` located to machine precision, plus the end points."""
    h = 1.0 / (64 * kern.cutoff)
    t = np.arange(0.0, X + h, h)
    f = kern(t)
    idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    lo, hi = t[idx], t[idx + 1]
    flo = f[idx]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = kern(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return np.concatenate(([0.0], 0.5 * (lo + hi), [t[-1]]))


def _integrate_pieces(kern, edges, absolute):
    nodes, weights = np.polynomial.legendre.leggauss(20)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    total = 0.0
    # chunk to bound memory
    for s in range(0, a.size, 20000):
        aa, hh = a[s:s + 20000], half[s:s + 20000]
        pts = (aa + hh)[:, None] + hh[:, None] * nodes[None, :]
        vals = kern(pts)
        if absolute:
            vals = np.abs(vals)
        total += math.fsum(((vals * weights).sum(axis=1) * hh).tolist())
    return total


def _quad_radius(kern, tol):
    T = 1.0 / kern.cutoff
    while 2 * kern.tail_integral(T) > tol:
        T *= 1.25
    return T


def kernel_l1(kern, tol=1e-10):
    """``int |phi|`` over the real line."""
    X = _quad_radius(kern, tol)
    edges = _zero_partition(kern, X)
    return 2.0 * (_integrate_pieces(kern, edges, True) + kern.tail_integral(edges[-1]))


def kernel_integral(kern, tol=1e-10):
    """``int phi`` over the real line (equals ``phi_hat(0) = 1``)."""
    X = _quad_radius(kern, tol)
    edges = _zero_partition(kern, X)
    return 2.0 * _integrate_pieces(kern, edges, False)


def _decay_constant(kern):
    t = np.concatenate((np.linspace(0, 4 / kern.width, 4001),
                        np.geomspace(4 / kern.width, 1e6 / kern.width, 2001)))
    env = np.minimum(kern.majorant(t), kern.peak)
    env[0] = kern.peak
    return float(np.max(env * (1 + t ** 4)))


def design_kernel(omega=0.5, epsilon=0.01, *, tail_tol=1e-8, with_norm=True) -> Kernel:
    """Build the quintic-blend kernel.

    Parameters
    ----------
    omega : float
        Flat band edge.
    epsilon : float
        Relative transition width, ``> 0``.
    tail_tol : float
        Target for the two-sided majorant tail beyond ``t_max``.
    with_norm : bool
        Compute ``l1_norm`` (a quadrature over ``~1/epsilon^(4/3)`` periods).
    """
    if not epsilon > 0:
        raise ValueError(f"transition parameter must be positive, got {epsilon!r}")
    if not omega > 0:
        raise ValueError(f"band edge must be positive, got {omega!r}")
    probe = Kernel(epsilon=float(epsilon), omega=float(omega), t_max=1.0, tail_tol=tail_tol)
    tw = 2 * np.pi * probe.width
    # leading term dominates for large T; then step up until the full tail fits
    T = (2 * 2 * probe.width * _MAJ[3] / (tw ** 4 * 3 * tail_tol)) ** (1 / 3)
    while 2 * probe.tail_integral(T) > tail_tol:
        T *= 1.01
    probe = Kernel(epsilon=float(epsilon), omega=float(omega), t_max=T, tail_tol=tail_tol)
    l1 = kernel_l1(probe) if with_norm else float("nan")
    return Kernel(epsilon=float(epsilon), omega=float(omega), t_max=T, tail_tol=tail_tol,
                  l1_norm=l1, decay_constant=_decay_constant(probe))


def _check_admissible(kern, tau):
    if kern.cutoff > 0.5 / tau * (1 + 1e-12):
        raise KernelMismatchError(
            f"kernel cutoff {kern.cutoff:g} exceeds half the sampling rate {0.5 / tau:g}")


def reconstruct(q, tau, kernel: Kernel, t):
    """``tau * sum_n q_n phi(t - n tau)`` over samples with ``|t - n tau| <= t_max``.

    Samples sit at ``n tau``, ``n = 0 .. len(q) - 1``.
    """
    _check_admissible(kernel, tau)
    q = np.asarray(q, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.shape)
    for i, ti in enumerate(t):
        lo = max(0, math.ceil((ti - kernel.t_max) / tau))
        hi = min(q.size - 1, math.floor((ti + kernel.t_max) / tau))
        if hi < lo:
            out[i] = 0.0
            continue
        n = np.arange(lo, hi + 1)
        out[i] = tau * np.dot(q[lo:hi + 1], kernel(ti - n * tau))
    return out


@dataclass(frozen=True)
class ErrorReport:
    """Measured sup error on the grid and the truncation budget on top of it."""

    measured: float
    budget: float
    grid_points: int

    @property
    def total(self):
        return self.measured + self.budget

    def __float__(self):
        return self.total


def sup_error(spec: SignalSpec, trace: ModulatorTrace, tau, kernel: Kernel, window,
              phases=8) -> ErrorReport:
    """Sup-norm reconstruction error on a window.

    The grid starts at the first sample instant inside ``window`` and has
    spacing ``tau / phases``; each phase is one FFT convolution of the
    quantized sequence with sampled kernel values.

    Raises
    ------
    WindowError
        If the window is closer than ``t_max`` to either end of the samples.
    """
    _check_admissible(kernel, tau)
    t_lo, t_hi = window
    q = np.asarray(trace.q, dtype=float)
    N = q.size
    if t_lo - kernel.t_max < 0 or t_hi + kernel.t_max > (N - 1) * tau:
        raise WindowError("window needs t_max of margin inside the sampled range")
    n0 = math.ceil(t_lo / tau)
    K = int(math.floor((t_hi - n0 * tau) * phases / tau)) + 1
    J = int(math.floor(kernel.t_max / tau)) + 1
    j = np.arange(-J, J + 1)
    worst = 0.0
    q_max = 0.0
    for p in range(phases):
        count = len(range(p, K, phases))
        if count == 0:
            continue
        start, stop = n0 - J, n0 + count - 1 + J + 1
        lo_c, hi_c = max(start, 0), min(stop, N)
        qs = np.zeros(stop - start)
        qs[lo_c - start: hi_c - start] = q[lo_c:hi_c]
        q_max = max(q_max, float(np.max(np.abs(qs))))
        s = (j + p / phases) * tau
        kv = np.where(np.abs(s) <= kernel.t_max, kernel(s), 0.0)
        rec = tau * fftconvolve(qs, kv, mode="valid")
        tg = (n0 + np.arange(count) + p / phases) * tau
        worst = max(worst, float(np.max(np.abs(eval_signal(spec, tg) - rec))))
    return ErrorReport(measured=worst, budget=kernel.truncation_budget(tau, q_max),
                       grid_points=K)


def write_sweep_csv(rows, fh):
    """Rows of ``(lambda, m, sup_error, bound, truncation_budget)``."""
    w = csv.writer(fh)
    w.writerow(["lambda", "m", "sup_error", "bound", "truncation_budget"])
    for lam, m, err, bound, budget in rows:
        w.writerow([format(float(lam), ".17g"), int(m), format(float(err), ".17g"),
                    format(float(bound), ".17g"), format(float(budget), ".17g")])
