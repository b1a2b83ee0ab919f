import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigmadelta.filters import (
    InfeasibleFilterError,
    OutOfRegimeError,
    SparseFilter,
    asymptotic_position,
    design_filter,
    design_from_support,
    filter_coefficients,
    g_from_h,
    h_from_design,
    minimal_subordinate_sequence,
    optimality_ratio,
    w_sequence,
)
from sigmadelta.relaxed import (
    InvalidOrderError,
    NoSolutionError,
    SingularPointError,
    constraint_f,
    gamma_from_sigma,
    is_subordinate,
    relaxed_minimizer,
)

import oracles

G6 = gamma_from_sigma(6)


# -- minimal subordinate sequence ---------------------------------------------------

def test_sequence_closed_form_case():
    assert minimal_subordinate_sequence(2, 1.5).tolist() == [1, 5]
    assert minimal_subordinate_sequence(1, 1.5).tolist() == [1]


def test_sequence_integer_sigma_limit():
    n = minimal_subordinate_sequence(2000, G6)
    assert [int(n[j - 1]) for j in range(2, 11)] == [1 + 6 * (j - 1) ** 2 for j in range(2, 11)]


def test_sequence_small_sigma_exceptions():
    n = minimal_subordinate_sequence(1000, gamma_from_sigma(1.1))
    assert int(n[2]) == 8 and int(n[3]) == 17


@pytest.mark.parametrize("m", [2, 3, 7, 12, 20])
@pytest.mark.parametrize("gamma", [1.2, 1.5, G6])
def test_sequence_matches_high_precision_chain(m, gamma):
    assert minimal_subordinate_sequence(m, gamma).tolist() == oracles.ceiling_chain_mp(m, gamma)


def test_sequence_errors():
    with pytest.raises(InvalidOrderError):
        minimal_subordinate_sequence(0, 1.5)
    with pytest.raises(NoSolutionError):
        minimal_subordinate_sequence(3, 1.0)


@pytest.mark.parametrize("gamma", [1.5, G6])
def test_sequence_feasible_and_subordinate(gamma):
    for m in range(2, 501, 7):
        n = minimal_subordinate_sequence(m, gamma).astype(float)
        x = relaxed_minimizer(m, gamma).x
        assert n[0] == 1 and np.all(np.diff(n) > 0)
        assert is_subordinate(x, n[1:])
        assert constraint_f(n[1:]) <= gamma * (1 + 1e-12)


@pytest.mark.parametrize("m", range(2, 13))
def test_sequence_is_minimal(m):
    # no subordinate integer vector with entries in [ceil(x_j), n_j + 2] is
    # componentwise below n except n itself
    gamma = 1.5
    n = minimal_subordinate_sequence(m, gamma)
    x = relaxed_minimizer(m, gamma).x
    lo = np.ceil(x - 1e-9).astype(int)
    rng = np.random.default_rng(m)
    for _ in range(2000):
        k = np.array([rng.integers(lo[j], n[j + 1] + 3) for j in range(m - 1)])
        if is_subordinate(x, k.astype(float)):
            assert np.all(k >= n[1:])


@pytest.mark.parametrize("m", range(2, 7))
def test_sequence_is_minimal_exhaustive(m):
    gamma = 1.5
    n = minimal_subordinate_sequence(m, gamma)
    x = relaxed_minimizer(m, gamma).x
    ranges = [range(int(math.ceil(x[j] - 1e-9)), int(n[j + 1]) + 3) for j in range(m - 1)]
    for k in itertools.product(*ranges):
        k = np.array(k, dtype=float)
        if is_subordinate(x, k):
            assert np.all(k >= n[1:])


# -- coefficients ---------------------------------------------------------------------

def test_coefficients_small():
    sign, logabs = filter_coefficients([1])
    assert sign.tolist() == [1.0] and logabs.tolist() == [0.0]
    sign, logabs = filter_coefficients([1, 5])
    np.testing.assert_allclose(sign * np.exp(logabs), [1.25, -0.25], rtol=1e-15)


def test_coefficients_reject_repeats():
    with pytest.raises(SingularPointError):
        filter_coefficients([1, 3, 3])


increasing_supports = st.lists(st.integers(1, 400), min_size=1, max_size=12, unique=True).map(sorted)


@settings(max_examples=150, deadline=None)
@given(increasing_supports)
def test_coefficients_match_exact_rationals(n):
    sign, logabs = filter_coefficients(n)
    exact = [float(c) for c in oracles.exact_coefficients(n)]
    np.testing.assert_allclose(sign * np.exp(logabs), exact, rtol=1e-11)
    assert sign.tolist() == [(-1.0) ** j for j in range(len(n))]
    assert abs(float(np.sum(sign * np.exp(logabs))) - 1.0) < 1e-9 * max(1.0, np.exp(logabs).max())


# -- designs ---------------------------------------------------------------------------

def test_design_closed_form_case():
    d = design_filter(2, 1.5)
    assert d.n.tolist() == [1, 5]
    np.testing.assert_allclose(d.d, [1.25, -0.25], rtol=1e-15)
    assert d.h_one_norm == pytest.approx(1.5, rel=1e-15)
    assert d.g_one_norm == pytest.approx(2.5, rel=1e-15)
    h = h_from_design(d)
    assert h.positions.tolist() == [1, 5]
    assert h.one_norm == pytest.approx(1.5)


def test_order_one_design_is_unit_delay():
    d = design_filter(1, 1.5)
    h = h_from_design(d)
    assert h.positions.tolist() == [1] and h.coefficients.tolist() == [1.0]
    g = g_from_h(1, h)
    assert g.tolist() == [1.0]


@pytest.mark.parametrize("m", range(1, 21))
@pytest.mark.parametrize("gamma", [1.5, G6])
def test_design_invariants(m, gamma):
    d = design_filter(m, gamma)
    assert d.n[0] == 1 and np.all(np.diff(d.n) > 0)
    assert abs(d.d.sum() - 1) < 1e-9
    assert d.h_one_norm <= gamma * (1 + 1e-12)
    prod = math.prod(int(k) for k in d.n)
    assert d.g_one_norm == pytest.approx(prod / math.factorial(m), rel=1e-9)
    if m > 1:
        assert d.h_one_norm == pytest.approx(constraint_f(d.n[1:].astype(float)), rel=1e-9)


def test_design_json():
    doc = json.loads(design_filter(2, 1.5).to_json())
    assert doc == {"m": 2, "gamma": 1.5, "n": [1, 5], "d": [1.25, -0.25],
                   "h_one_norm": 1.5, "log_g1": pytest.approx(math.log(2.5), rel=1e-15)}
    text = design_filter(5, G6).to_json()
    for v in json.loads(text)["d"]:
        assert repr(v) in text or format(v, ".17g") in text


# -- accumulated filter -------------------------------------------------------------------

def test_g_two_tap_case():
    g = g_from_h(2, h_from_design(design_filter(2, 1.5)))
    ref = [float(v) for v in oracles.exact_g([1, 5])][: len(g)]
    np.testing.assert_allclose(g, ref, rtol=1e-15)
    assert np.abs(g).sum() == pytest.approx(2.5, rel=1e-15)


@pytest.mark.parametrize("m", range(1, 21))
@pytest.mark.parametrize("gamma", [1.5, G6])
def test_g_norm_identity(m, gamma):
    d = design_filter(m, gamma)
    g = g_from_h(m, h_from_design(d))
    assert abs(np.abs(g).sum() / d.g_one_norm - 1) < 1e-8
    assert g.size == d.n[-1] - m + 1


@pytest.mark.parametrize("m", [3, 6, 10])
def test_g_matches_exact_sums(m):
    d = design_filter(m, G6)
    g = g_from_h(m, h_from_design(d))
    ref = np.array([float(v) for v in oracles.exact_g(d.n.tolist())])
    # exact tail is zero
    assert all(v == 0 for v in ref[g.size:])
    np.testing.assert_allclose(g, ref[: g.size], rtol=1e-12, atol=1e-12 * np.abs(ref).max())


def test_g_third_order_sigma_six():
    d = design_filter(3, G6)
    g = g_from_h(3, h_from_design(d))
    assert np.abs(g).sum() == pytest.approx(math.prod(d.n.tolist()) / 6, rel=1e-8)


def test_g_rejects_broken_filter():
    h = SparseFilter(np.array([1, 5]), np.array([1.3, -0.3]))
    with pytest.raises(InfeasibleFilterError):
        g_from_h(2, h)


def test_sparse_filter_validation():
    with pytest.raises(ValueError):
        SparseFilter(np.array([0, 2]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        SparseFilter(np.array([3, 2]), np.array([1.0, 0.0]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 60), min_size=1, max_size=6, unique=True).map(sorted))
def test_g_difference_equation(n):
    d = design_from_support(n)
    m = len(n)
    g = g_from_h(m, h_from_design(d))
    # Delta^m g = delta - h on the full support
    padded = np.concatenate((g, np.zeros(m)))
    diff = padded.copy()
    for _ in range(m):
        diff = np.diff(np.concatenate(([0.0], diff)))
    target = -h_from_design(d).dense(padded.size)
    target[0] += 1
    np.testing.assert_allclose(diff, target, atol=1e-9 * max(1.0, np.abs(g).max()))


# -- asymptotic helpers ----------------------------------------------------------------------

def test_w_sequence_values():
    np.testing.assert_array_equal(w_sequence(6, 4), [7, 25, 55])
    np.testing.assert_array_equal(w_sequence(1, 3), [2, 5])


def test_asymptotic_position():
    assert asymptotic_position(6, 5) == 97
    assert asymptotic_position(6, 1) == 1
    with pytest.raises(OutOfRegimeError):
        asymptotic_position(1.1, 3)


def test_optimality_ratio_examples():
    assert optimality_ratio(2, 1.5) == pytest.approx(1.0, abs=1e-14)
    assert 1.0 <= optimality_ratio(500, G6) <= 1.05
    sigma = 6.5
    r = optimality_ratio(500, gamma_from_sigma(sigma))
    assert r > (1 + math.ceil(sigma)) / (1 + sigma) - 0.02
    assert r > 1.05


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 200), st.floats(1.05, 3.0))
def test_optimality_ratio_at_least_one(m, gamma):
    assert optimality_ratio(m, gamma) >= 1.0 - 1e-12
