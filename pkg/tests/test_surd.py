"""Exact surd arithmetic, checked against high-precision mpmath."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radsum import RootValue, SurdValue, exact_cmp, frac, root_max, root_min, surd_sign
from radsum._surd import squarefree_decompose
from radsum.errors import InvalidParams, MismatchedVariance

mpmath.mp.dps = 60


def mp_of_terms(terms):
    return sum(mpmath.mpf(str(c)) * mpmath.sqrt(mpmath.mpf(str(r))) for c, r in terms)


def test_frac_parses_and_rejects_floats():
    assert frac("3/7") == Fraction(3, 7)
    assert frac("0.31") == Fraction(31, 100)
    assert frac(5) == Fraction(5)
    with pytest.raises(InvalidParams):
        frac(0.5)


@pytest.mark.parametrize(
    "n,expect",
    [(1, (1, 1)), (4, (2, 1)), (12, (2, 3)), (360, (6, 10)), (9999991, (1, 9999991))],
)
def test_squarefree_decompose(n, expect):
    assert squarefree_decompose(n) == expect


@given(st.integers(min_value=1, max_value=10**9))
def test_squarefree_decompose_reconstructs(n):
    s, k = squarefree_decompose(n)
    assert s * s * k == n
    # k has no square divisor up to a small bound
    for d in range(2, 50):
        assert k % (d * d) != 0


rationals = st.fractions(
    min_value=-10, max_value=10, max_denominator=50
)
radicands = st.integers(min_value=0, max_value=60)


@given(st.lists(st.tuples(rationals, radicands), min_size=0, max_size=5))
@settings(max_examples=300)
def test_surd_sign_matches_mpmath(terms):
    s = surd_sign(terms)
    val = mp_of_terms(terms)
    if s == 0:
        assert abs(val) < mpmath.mpf("1e-40")
    else:
        assert val * s > 0


def test_surd_sign_exact_cancellation():
    assert surd_sign([(1, 8), (-2, 2)]) == 0
    assert surd_sign([(Fraction(1, 3), 18), (-1, 2)]) == 0
    assert surd_sign([(1, 2), (1, 3), (-1, 5), (-1, Fraction(49, 10))]) != 0


def test_surdvalue_canonicalizes_radicand():
    a = SurdValue(0, 1, 8)  # sqrt(8) = 2 sqrt(2)
    b = SurdValue(0, 2, 2)
    assert a == b
    assert a.v == 2 and a.q == 2
    c = SurdValue(0, 3, Fraction(1, 2))  # 3/sqrt(2)
    assert c.v == 2 and c.q == Fraction(3, 2)
    assert SurdValue(1, 5, 4).is_rational  # sqrt(4) folds into p


@given(rationals, rationals, st.integers(min_value=2, max_value=30),
       rationals, rationals)
@settings(max_examples=200)
def test_surdvalue_field_ops(p1, q1, v, p2, q2):
    x = SurdValue(p1, q1, v)
    y = SurdValue(p2, q2, v)
    fx = mp_of_terms([(p1, 1), (q1, v)])
    fy = mp_of_terms([(p2, 1), (q2, v)])
    for op, fop in [
        (x + y, fx + fy),
        (x - y, fx - fy),
        (x * y, fx * fy),
    ]:
        assert abs(float(op) - float(fop)) < 1e-9
    if y.sign() != 0:
        assert abs(float(x / y) - float(fx / fy)) < 1e-9
        assert (x / y) * y == x


@given(rationals, rationals, st.integers(min_value=2, max_value=30))
@settings(max_examples=200)
def test_surdvalue_sign_matches_mpmath(p, q, v):
    x = SurdValue(p, q, v)
    val = mp_of_terms([(p, 1), (q, v)])
    s = x.sign()
    if s == 0:
        assert abs(val) < mpmath.mpf("1e-40")
    else:
        assert val * s > 0


def test_surdvalue_sign_positive_parts_with_small_square():
    # p > 0, q > 0 but p^2 < q^2 v: sign must still be +1
    x = SurdValue(1, 5, 7)
    assert x.sign() == 1
    y = SurdValue(-1, -5, 7)
    assert y.sign() == -1


def test_surdvalue_mixed_radicands_rejected():
    x = SurdValue(1, 1, 2)
    y = SurdValue(1, 1, 3)
    with pytest.raises(MismatchedVariance):
        _ = x + y
    # rational SurdValue combines with anything
    z = SurdValue(3)
    assert (x + z).v == 2


def test_rootvalue_roundtrip_and_compare():
    r = RootValue.from_value(Fraction(-3, 4))
    assert r.sign == -1 and r.square == Fraction(9, 16)
    assert r.as_rational() == Fraction(-3, 4)
    s2 = RootValue(1, 2)
    assert s2.as_rational() is None
    assert s2 > 1
    assert s2 < Fraction(3, 2)
    assert RootValue(1, 8) == SurdValue(0, 2, 2)
    # cross-radicand comparison: sqrt(2) + nothing vs golden-ish surds
    assert RootValue(1, 2) < RootValue(1, 3)
    assert RootValue(-1, 2) > RootValue(-1, 3)


@given(rationals, rationals)
@settings(max_examples=200)
def test_exact_cmp_matches_rational_order(a, b):
    c = exact_cmp(a, b)
    assert c == (a > b) - (a < b)


@given(rationals, rationals, st.integers(min_value=2, max_value=30),
       rationals, rationals, st.integers(min_value=2, max_value=30))
@settings(max_examples=200)
def test_exact_cmp_cross_radicand(p1, q1, v1, p2, q2, v2):
    x = SurdValue(p1, q1, v1)
    y = SurdValue(p2, q2, v2)
    fx = mp_of_terms(x.terms())
    fy = mp_of_terms(y.terms())
    c = exact_cmp(x, y)
    if c == 0:
        assert abs(fx - fy) < mpmath.mpf("1e-40")
    else:
        assert (fx - fy) * c > 0


def test_rootvalue_scale_and_minmax():
    r = RootValue(1, Fraction(1, 2))
    assert r.scale(2) == RootValue(1, 2)
    assert r.scale(-2) == RootValue(-1, 2)
    assert root_min(RootValue(1, 2), RootValue(1, 3)) == RootValue(1, 2)
    assert root_max(RootValue(-1, 2), RootValue(-1, 3)) == RootValue(-1, 2)


def test_rootvalue_surd_square():
    # sqrt(3 + sqrt(2)) compared against sqrt(4.4): 3+sqrt(2) = 4.414...
    sq = SurdValue(3, 1, 2)
    r = RootValue(1, sq)
    assert r > RootValue(1, Fraction(44, 10))
    assert r < RootValue(1, Fraction(45, 10))
    assert r.as_rational() is None


def test_rootvalue_rejects_negative_square():
    with pytest.raises(InvalidParams):
        RootValue(1, -2)
    with pytest.raises(InvalidParams):
        RootValue(1, SurdValue(1, -5, 7))
