"""Greedy noise-shaping quantizer driven by a sparse feedback filter.

The state obeys ``v_n = (h*v)_n + y_n - q_n`` where ``q_n`` is the alphabet
level nearest to ``s_n = (h*v)_n + y_n``.  The inner loop is compiled with
numba; the same compiled kernel re-evaluates a stored trace so the recursion
identity can be checked bit for bit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .filters import FilterDesign, SparseFilter

__all__ = [
    "Alphabet",
    "ModulatorTrace",
    "NonCausalFilterError",
    "run_greedy",
    "recursion_residual",
    "canonical_state",
    "stability_margin",
    "write_trace_csv",
]


class NonCausalFilterError(ValueError):
    """Filter has a tap at position ``<= 0``."""


@dataclass(frozen=True)
class Alphabet:
    """Symmetric mid-rise/mid-tread alphabet ``{-(L-1), ..., L-3, L-1}`` with step 2."""

    L: int

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise ValueError(f"alphabet needs L >= 2 levels, got {self.L!r}")

    @property
    def levels(self):
        return np.arange(-(self.L - 1), self.L, 2, dtype=float)

    def quantize(self, s):
        """Nearest level, ties toward the larger level (so ``sign(0) = +1`` for ``L = 2``)."""
        s = np.asarray(s, dtype=float)
        i = np.clip(np.floor((s + self.L - 1) / 2.0 + 0.5), 0, self.L - 1)
        return -(self.L - 1) + 2.0 * i


@dataclass
class ModulatorTrace:
    """Input, output and state of one run of the recursion.

    ``v_init[k]`` holds ``v_{-1-k}``; it has the filter span as length and is
    all zero unless initial conditions were supplied.
    """

    y: np.ndarray
    q: np.ndarray
    v: np.ndarray
    v_init: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return self.y.size


@numba.njit(cache=True)
def _greedy_kernel(pos, coef, y, L, prefix):
    span = prefix.size
    N = y.size
    buf = np.empty(span + N)
    buf[:span] = prefix
    q = np.empty(N)
    for n in range(N):
        s = 0.0
        for j in range(pos.size):
            s += coef[j] * buf[span + n - pos[j]]
        s += y[n]
        i = math.floor((s + L - 1) / 2.0 + 0.5)
        if i < 0:
            i = 0
        elif i > L - 1:
            i = L - 1
        qn = -(L - 1) + 2.0 * i
        q[n] = qn
        buf[span + n] = s - qn
    return q, buf[span:].copy()


@numba.njit(cache=True)
def _replay_kernel(pos, coef, y, q, v, prefix):
    span = prefix.size
    N = y.size
    buf = np.empty(span + N)
    buf[:span] = prefix
    buf[span:] = v
    worst = 0.0
    for n in range(N):
        s = 0.0
        for j in range(pos.size):
            s += coef[j] * buf[span + n - pos[j]]
        s += y[n]
        d = abs((s - q[n]) - v[n])
        if d > worst:
            worst = d
    return worst


def _prefix(h, v_init):
    """Buffer prefix laid out in time order: ``(v_{-span}, ..., v_{-1})``."""
    span = h.span
    pre = np.zeros(span)
    if v_init is None:
        return pre, np.zeros(span)
    if isinstance(v_init, dict):
        vi = np.zeros(span)
        for k, val in v_init.items():
            if k >= 0:
                raise ValueError("initial conditions live at negative indices")
            if -k <= span:
                vi[-k - 1] = val
    else:
        vi = np.zeros(span)
        arr = np.asarray(v_init, dtype=float)
        vi[: min(span, arr.size)] = arr[:span]
    pre[:] = vi[::-1]
    return pre, vi


def _taps(h):
    pos = np.asarray(h.positions, dtype=np.int64)
    if pos.size and pos[0] < 1:
        raise NonCausalFilterError("feedback filter must be strictly causal")
    return pos, np.asarray(h.coefficients, dtype=float)


def run_greedy(h: SparseFilter, y, alphabet: Alphabet | int = 2, *, v_init=None):
    """Run the greedy recursion over the whole input.

    Parameters
    ----------
    h : SparseFilter
        Strictly causal feedback filter.
    y : array_like
        Input samples.
    alphabet : Alphabet or int
        Output alphabet, or its number of levels.
    v_init : dict or array_like, optional
        Initial state.  A dict maps negative indices to values; a sequence
        gives ``(v_{-1}, v_{-2}, ...)``.  Defaults to zero.

    Returns
    -------
    ModulatorTrace
    """
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(int(alphabet))
    pos, coef = _taps(h)
    y = np.ascontiguousarray(y, dtype=float).reshape(-1)
    prefix, vi = _prefix(h, v_init)
    if y.size == 0:
        return ModulatorTrace(y=y, q=np.zeros(0), v=np.zeros(0), v_init=vi)
    q, v = _greedy_kernel(pos, coef, y, alphabet.L, prefix)
    return ModulatorTrace(y=y, q=q, v=v, v_init=vi)


def recursion_residual(h: SparseFilter, trace: ModulatorTrace):
    """Largest ``|(h*v)_n + y_n - q_n - v_n|`` over the trace; zero for an untouched trace."""
    pos, coef = _taps(h)
    if len(trace) == 0:
        return 0.0
    pre = np.zeros(h.span)
    vi = np.asarray(trace.v_init, dtype=float)
    if vi.size:
        pre[: min(h.span, vi.size)] = vi[: h.span]
    return float(_replay_kernel(pos, coef, trace.y, trace.q, trace.v, pre[::-1].copy()))


def canonical_state(g, trace: ModulatorTrace):
    """Bounded state ``u = g*v`` of the difference equation ``Delta^m u = y - q``.

    Initial conditions stored in the trace are included in the convolution, so
    every returned sample is fully formed.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("g must be a non-empty one-dimensional sequence")
    v = np.asarray(trace.v, dtype=float)
    if v.ndim != 1 or v.shape != trace.y.shape:
        raise ValueError("trace arrays have inconsistent shapes")
    k = g.size - 1
    past = np.zeros(k)
    vi = np.asarray(trace.v_init, dtype=float)
    take = min(k, vi.size)
    if take:
        past[k - take:] = vi[:take][::-1]
    full = np.concatenate((past, v))
    return np.convolve(full, g)[k: k + v.size]


def stability_margin(design: FilterDesign, mu, L=2):
    """``L - (||h||_1 + mu)``; nonnegative means the greedy rule stays bounded by 1."""
    if mu < 0:
        raise ValueError("input bound must be nonnegative")
    return L - (design.h_one_norm + mu)


def write_trace_csv(trace: ModulatorTrace, fh, u=None):
    """Write columns ``n, y, q, v`` (and ``u``) to an open text file."""
    w = csv.writer(fh)
    header = ["n", "y", "q", "v"] + (["u"] if u is not None else [])
    w.writerow(header)
    fmt = "{:.17g}".format
    for n in range(len(trace)):
        row = [n, fmt(trace.y[n]), fmt(trace.q[n]), fmt(trace.v[n])]
        if u is not None:
            row.append(fmt(u[n]))
        w.writerow(row)
