import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segre_ode.errors import DivByZeroSeries, EvalAtPole, RadiusWarning, SchemaError
from segre_ode.series import (TruncatedSeries, arithmetic, conjugate_bar, differentiate, evaluate,
                              max_abs_diff, ord0)

S = TruncatedSeries
N = 12

complexes = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


def series_strategy(n=N):
    return st.lists(complexes, min_size=n, max_size=n).map(lambda c: S(0, c))


def divisor_strategy(n=N):
    """Leading term dominating the tail, so that 1/b stays well conditioned."""
    lead = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(1, 2), st.floats(0, 2 * np.pi))
    small = st.builds(complex, st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
    tail = st.lists(small, min_size=n - 1, max_size=n - 1)
    return st.builds(lambda b0, t: S(0, [b0, *t]), lead, tail)


def rel_close(a, b, rel):
    scale = 1.0 + max(float(np.max(np.abs(a.coeffs))), float(np.max(np.abs(b.coeffs))))
    return max_abs_diff(a, b) <= rel * scale


# -- documented examples -----------------------------------------------------------

def test_difference_of_squares():
    a = S.from_coeffs([1, 1], order=8)
    b = S.from_coeffs([1, -1], order=8)
    assert arithmetic(a, b, "mul").allclose(S.from_coeffs([1, 0, -1], order=8), atol=0)


def test_monomial_quotient_has_valuation_one():
    q = arithmetic(S.monomial(2, 1.0, 10), S.monomial(1, 1.0, 10), "div")
    assert ord0(q) == 1
    assert q.coeff(1) == 1
    # w^2 + O(w^10) over w + O(w^10) is w + O(w^9)
    assert q.truncation_order == 9


def test_geometric_series_by_division():
    q = arithmetic(S.constant(1, N), S.from_coeffs([1, -1], order=N), "div")
    assert np.allclose(q.coeffs, np.ones(N))
    back = q * S.from_coeffs([1, -1], order=N)
    assert back.allclose(S.constant(1, N), atol=1e-14)


@pytest.mark.parametrize("op,expected", [
    ("add", [3, 1]),
    ("sub", [-1, 1]),
])
def test_add_sub(op, expected):
    a = S.from_coeffs([1, 1], order=4)
    b = S.constant(2, 4)
    assert np.allclose(arithmetic(a, b, op).dense(0, 2), expected)


def test_divide_by_zero_series():
    with pytest.raises(DivByZeroSeries):
        arithmetic(S.constant(1, 5), S.zero(5), "div")
    with pytest.raises(DivByZeroSeries):
        arithmetic(S.constant(1, 5), S(0, [1e-14, 1e-15]), "div")


def test_product_truncation_is_pessimistic():
    a = S(0, [1, 2, 3])        # known through w^2
    b = S(1, [1, 1, 1, 1, 1])  # known through w^5
    p = a * b
    assert p.truncation_order == min(0 + 6, 1 + 3)


@pytest.mark.parametrize("s,expected", [
    (S(0, [0, 0, 1]), S(0, [0, 2])),
    (S.constant(3j, 5), S.zero(4)),
    (S.monomial(-1, 1.0, 4), S(-2, [-1, 0, 0, 0, 0])),
])
def test_differentiate_examples(s, expected):
    d = differentiate(s)
    assert d.allclose(expected, atol=0)
    assert d.truncation_order == s.truncation_order - 1


def test_derivative_lowers_valuation():
    d = differentiate(S.monomial(3, 1.0, 8))
    assert ord0(d) == 2


@pytest.mark.parametrize("s,expected", [
    (S(0, [0, 0, 3]), 2),
    (S(0, [1e-12, 1e-11, 0]), math.inf),
    (S(-2, [5]), -2),
])
def test_ord0_examples(s, expected):
    assert ord0(s) == expected


def test_ord0_uses_scale():
    # 1e-8 is below 1e-9 * (1 + 1e3)
    assert ord0(S(0, [1e-8, 1e3])) == 1
    assert ord0(S(0, [1e-8, 1e3]), scale=1.0) == 0


@pytest.mark.parametrize("s,expected", [
    (S.monomial(1, 2j, 4), S.monomial(1, -2j, 4)),
    (S(0, [1.0, -3.0, 0.5]), S(0, [1.0, -3.0, 0.5])),
    (S(0, [1 + 1j, 3 - 1j]), S(0, [1 - 1j, 3 + 1j])),
])
def test_conjugate_bar_examples(s, expected):
    assert conjugate_bar(s).allclose(expected, atol=0)


def test_eval_examples():
    assert evaluate(S(0, [1, 1]), 0.5) == pytest.approx(1.5)
    assert evaluate(S(-1, [1]), 2) == pytest.approx(0.5)
    g = S(0, np.ones(32))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        val = evaluate(g, 0.5)
    assert abs(val - (2 - 2 ** -31)) < 1e-12
    assert abs(val - 2.0) < 1e-9


def test_eval_at_pole():
    with pytest.raises(EvalAtPole):
        evaluate(S(-1, [1]), 0)
    assert evaluate(S(0, [3, 1]), 0) == 3


def test_eval_warns_beyond_radius():
    g = S(0, 2.0 ** np.arange(20))  # radius 1/2
    with pytest.warns(RadiusWarning):
        evaluate(g, 0.9)


def test_json_round_trip():
    s = S(-1, [1 + 2j, 0, -3])
    back = S.from_json(s.to_json())
    assert back.allclose(s, atol=0)
    assert back.truncation_order == s.truncation_order


def test_json_padding_and_schema():
    s = S.from_json({"valuation": 0, "coeffs": [1, [0, 2]]}, order=10)
    assert s.truncation_order == 10 and s.coeff(1) == 2j
    assert S.from_json({"valuation": 0, "coeffs": [1]}).truncation_order == 1
    with pytest.raises(SchemaError):
        S.from_json({"valuation": 0, "coeffs": ["x"]})
    with pytest.raises(SchemaError):
        S.from_json({"coeffs": [1], "extra": 2})


def test_coefficients_beyond_truncation_are_unknown():
    with pytest.raises(IndexError):
        S(0, [1, 2]).coeff(2)


def test_antiderivative_inverts_derivative():
    s = S(0, [0, 1, 2, 3, 4])
    assert s.derivative().antiderivative().allclose(s, atol=1e-15)
    with pytest.raises(ValueError):
        S(-1, [1, 0]).antiderivative()


# -- properties -----------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(series_strategy(), series_strategy(), series_strategy())
def test_mul_associative_and_distributive(a, b, c):
    assert rel_close((a * b) * c, a * (b * c), 1e-12)
    assert rel_close(a * (b + c), a * b + a * c, 1e-12)


@settings(max_examples=60, deadline=None)
@given(series_strategy(), divisor_strategy())
def test_div_inverts_mul(a, b):
    q = arithmetic(a * b, b, "div")
    assert max_abs_diff(q, a) <= 1e-10 * (1 + np.max(np.abs(a.coeffs)))


@settings(max_examples=60, deadline=None)
@given(series_strategy(), series_strategy())
def test_product_rule(a, b):
    lhs = differentiate(a * b)
    rhs = differentiate(a) * b + a * differentiate(b)
    assert rel_close(lhs, rhs, 1e-12)


@settings(max_examples=60, deadline=None)
@given(series_strategy(), series_strategy())
def test_conjugate_bar_involution_and_multiplicative(a, b):
    assert conjugate_bar(conjugate_bar(a)).allclose(a, atol=0)
    assert rel_close(conjugate_bar(a * b), conjugate_bar(a) * conjugate_bar(b), 1e-14)


@settings(max_examples=40, deadline=None)
@given(series_strategy(), st.integers(-3, 3))
def test_shift_moves_valuation(a, k):
    b = a.shift(k)
    assert b.valuation == a.valuation + k
    assert b.truncation_order == a.truncation_order + k
