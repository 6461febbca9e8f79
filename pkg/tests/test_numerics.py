"""Enclosed integration, Gaussian CDF, and the theta root."""

import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radsum.errors import InvalidBounds, InvalidParams
from radsum.numerics import THETA, RigorousValue, gauss_cdf, rigorous_integrate, theta_root


class TestRigorousValue:
    def test_contains_after_ops(self):
        a = RigorousValue(1.0, 1e-10)
        b = RigorousValue(2.0, 1e-12)
        assert (a + b).contains(3.0)
        assert (a - b).contains(-1.0)
        assert (a * b).contains(2.0)
        assert (-a).contains(-1.0)
        assert (a + 1).contains(2.0)
        assert (1 - a).contains(0.0)
        assert (3 * a).contains(3.0)

    def test_outward(self):
        a = RigorousValue(1.0, 0.0)
        s = a + a
        assert s.rad > 0  # slack is added even for exact inputs

    def test_le(self):
        assert RigorousValue(0.5, 0.1) <= 0.6
        assert not (RigorousValue(0.5, 0.1) <= 0.59)

    def test_invalid(self):
        with pytest.raises(InvalidParams):
            RigorousValue(0.0, -1e-9)
        with pytest.raises(InvalidParams):
            RigorousValue(math.inf, 0.0)


class TestIntegrate:
    def test_constant(self):
        r = rigorous_integrate(lambda u: 3.25, 0.0, 2.0, 0.0, 7)
        assert r.contains(6.5)
        assert r.rad < 1e-12

    def test_linear_exact(self):
        r = rigorous_integrate(lambda u: u, 0.0, 1.0, 1.0, 10)
        assert abs(r.mid - 0.5) < 1e-15
        assert r.contains(0.5)
        assert r.rad <= 1.0 / 40 + 1e-12

    def test_sin(self):
        r = rigorous_integrate(math.sin, 0.0, math.pi, 1.0, 2000)
        assert r.contains(2.0)

    def test_known_antiderivatives(self):
        cases = [
            (math.exp, 0.0, 1.0, math.e, math.e - 1.0),
            (math.cos, 0.0, 1.0, 1.0, math.sin(1.0)),
            (lambda u: u * u, 0.0, 2.0, 4.0, 8.0 / 3.0),
            (lambda u: 1.0 / (1.0 + u), 0.0, 1.0, 1.0, math.log(2.0)),
        ]
        for f, a, b, bound, truth in cases:
            for n in (13, 57, 301):
                r = rigorous_integrate(f, a, b, bound, n)
                assert r.contains(truth), (truth, n, r)

    def test_refinement_shrinks(self):
        r1 = rigorous_integrate(math.sin, 0.0, 2.0, 1.0, 50)
        r2 = rigorous_integrate(math.sin, 0.0, 2.0, 1.0, 100)
        assert r2.rad <= r1.rad * 0.51

    def test_empty_interval(self):
        r = rigorous_integrate(math.sin, 1.0, 1.0, 1.0, 5)
        assert r.mid == 0.0 and r.rad == 0.0

    def test_invalid(self):
        with pytest.raises(InvalidBounds):
            rigorous_integrate(math.sin, 1.0, 0.0, 1.0, 5)
        with pytest.raises(InvalidBounds):
            rigorous_integrate(math.sin, 0.0, 1.0, -1.0, 5)
        with pytest.raises(InvalidParams):
            rigorous_integrate(math.sin, 0.0, 1.0, 1.0, 0)

    @given(
        a=st.floats(min_value=-3.0, max_value=3.0),
        width=st.floats(min_value=0.01, max_value=3.0),
        n=st.integers(min_value=1, max_value=400),
    )
    @settings(max_examples=60, deadline=None)
    def test_enclosure_property_cos(self, a, width, n):
        b = a + width
        r = rigorous_integrate(math.cos, a, b, 1.0, n)
        truth = math.sin(b) - math.sin(a)
        assert r.lo - 1e-15 <= truth <= r.hi + 1e-15


class TestGaussCdf:
    def test_reference_values(self):
        mpmath.mp.dps = 40
        for x in (-4.0, -2.5, -1.0, -0.3, 0.0, 0.5, 1.0, 1.65, 2.0, 3.7):
            want = float(mpmath.ncdf(x))
            assert abs(gauss_cdf(x) - want) < 1e-13

    def test_phi_zero(self):
        assert gauss_cdf(0.0) == 0.5

    def test_phi_one(self):
        assert abs(gauss_cdf(1.0) - 0.8413447460685429) < 1e-13

    def test_central_prob(self):
        assert 2 * gauss_cdf(1.0) - 1 >= 0.682

    @given(st.floats(min_value=-8.0, max_value=8.0))
    @settings(max_examples=80, deadline=None)
    def test_symmetry(self, x):
        assert abs(gauss_cdf(x) + gauss_cdf(-x) - 1.0) < 1e-12

    def test_nonfinite(self):
        with pytest.raises(InvalidParams):
            gauss_cdf(math.nan)


class TestThetaRoot:
    def test_bracket_signs(self):
        assert math.exp(0.0) + math.cos(0.0) > 0
        assert math.exp(-math.pi**2 / 2) + math.cos(math.pi) < 0

    def test_value(self):
        t = theta_root()
        assert abs(t - 1.778) < 1e-4
        assert abs(math.exp(-t * t / 2) + math.cos(t)) < 1e-9

    def test_constant_matches(self):
        assert abs(theta_root(1e-12) - THETA) < 1e-10
