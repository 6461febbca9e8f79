"""Tests for the Gaussian-comparison bound machinery."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radsum import WeightVector, exact_distribution
from radsum._surd import RootValue
from radsum.errors import InvalidParams, MarginViolated, NonpositiveT
from radsum.numerics import THETA, gauss_cdf
from radsum.prawitz import (
    SEQUENCE_X,
    PrawitzParams,
    g_envelope,
    h_envelope,
    kernel_bound,
    phi_X,
    prawitz_bound,
    prawitz_kernel,
    prawitz_terms,
    verify_prop_022,
    verify_prop_031,
    verify_sequence_93,
)

PARAMS_031 = PrawitzParams(a1=Fraction(31, 100), x=1.0, T=10.0, q=0.4)
PARAMS_022_END = PrawitzParams(a1=Fraction(22, 100), x=1.65, T=14.5, q=0.4)


class TestParams:
    def test_validation(self) -> None:
        with pytest.raises(InvalidParams):
            PrawitzParams(a1=Fraction(0), x=1.0, T=10.0, q=0.4)
        with pytest.raises(InvalidParams):
            PrawitzParams(a1=Fraction(1), x=1.0, T=10.0, q=0.4)
        with pytest.raises(NonpositiveT):
            PrawitzParams(a1=Fraction(1, 2), x=1.0, T=0.0, q=0.4)
        with pytest.raises(InvalidParams):
            PrawitzParams(a1=Fraction(1, 2), x=-1.0, T=10.0, q=0.4)
        with pytest.raises(InvalidParams):
            PrawitzParams(a1=Fraction(1, 2), x=1.0, T=10.0, q=1.5)
        with pytest.raises(InvalidParams):
            PrawitzParams(a1=Fraction(1, 2), x=1.0, T=10.0, q=0.4, n1=0)

    def test_string_a1_coerced(self) -> None:
        params = PrawitzParams(a1="0.31", x=1.0, T=10.0, q=0.4)
        assert params.a1 == Fraction(31, 100)


class TestKernel:
    def test_x_zero_is_one_minus_u(self) -> None:
        for u in (0.0, 0.125, 0.5, 0.875, 1.0):
            assert prawitz_kernel(u, 0.0, 10.0) == pytest.approx(1.0 - u, abs=1e-12)

    def test_endpoint_limits(self) -> None:
        x, T = 0.7, 12.0
        assert prawitz_kernel(0.0, x, T) == pytest.approx(1.0 - T * x / math.pi, abs=1e-12)
        assert prawitz_kernel(1.0, x, T) == 0.0
        # continuity at both ends
        assert prawitz_kernel(1e-9, x, T) == pytest.approx(prawitz_kernel(0.0, x, T), abs=1e-6)
        assert prawitz_kernel(1 - 1e-9, x, T) == pytest.approx(prawitz_kernel(1.0, x, T), abs=1e-6)

    def test_uniform_bound(self) -> None:
        rng = random.Random(7)
        for _ in range(500):
            u = rng.random()
            x = 2.0 * rng.random()
            T = 0.5 + 14.0 * rng.random()
            assert abs(prawitz_kernel(u, x, T)) <= kernel_bound(x, T) + 1e-9

    def test_rejects_outside_domain(self) -> None:
        with pytest.raises(InvalidParams):
            prawitz_kernel(-0.1, 1.0, 10.0)
        with pytest.raises(InvalidParams):
            prawitz_kernel(1.1, 1.0, 10.0)


def _random_vector(rng: random.Random, a1_cap: Fraction, n_cap: int = 24) -> WeightVector:
    # exact vector whose largest normalized weight is <= a1_cap; that needs
    # at least 1/a1_cap^2 near-equal coordinates (max weight >= 1/sqrt(n))
    c2 = a1_cap**2
    n_min = 1
    while n_min * c2 < 1:
        n_min += 1
    for _ in range(400):
        n = min(n_cap, n_min + rng.randint(0, 3))
        w1 = rng.randint(7, 12)
        ws = [w1] + [w1 - rng.choice([0, 0, 0, 1]) for _ in range(n - 1)]
        w = WeightVector([Fraction(v) for v in ws])
        if w.weights[0] ** 2 <= c2 * w.variance:
            return w
    raise AssertionError("no qualifying vector found")


class TestEnvelopes:
    def test_phi_matches_direct_product(self) -> None:
        w = WeightVector([3, 2, 2, 1])
        v = math.sqrt(18.0)
        t = 1.7
        expected = math.cos(3 / v * t) * math.cos(2 / v * t) ** 2 * math.cos(1 / v * t)
        assert phi_X(w, t) == pytest.approx(expected, abs=1e-12)

    def test_h_branches(self) -> None:
        a1 = 0.31
        # below theta: gaussian; between theta and pi: cosine power; beyond: 1
        v1 = (THETA - 0.01) / a1
        assert h_envelope(v1, a1) == pytest.approx(math.exp(-0.5 * v1 * v1), abs=1e-15)
        v2 = (THETA + 0.2) / a1
        expected = (-math.cos(a1 * v2)) ** (1.0 / a1**2)
        assert h_envelope(v2, a1) == pytest.approx(expected, abs=1e-15)
        assert h_envelope((math.pi + 0.5) / a1, a1) == 1.0

    def test_g_branches(self) -> None:
        a1 = 0.31
        v1 = 1.0
        expected = math.exp(-0.5) - math.cos(a1) ** (1.0 / a1**2)
        assert g_envelope(v1, a1) == pytest.approx(expected, abs=1e-15)
        v2 = (math.pi / 2 + 0.3) / a1
        assert g_envelope(v2, a1) == pytest.approx(math.exp(-0.5 * v2 * v2) + 1.0, abs=1e-15)

    def test_envelopes_dominate_random_sums(self) -> None:
        # |phi_X| <= h and |phi_X - gauss| <= g for the largest normalized
        # weight, sampled across the frequency range used by the integrals
        rng = random.Random(20240817)
        for cap in (Fraction(31, 100), Fraction(22, 100)):
            for _ in range(12):
                w = _random_vector(rng, cap)
                a1f = float(w.weights[0]) / math.sqrt(float(w.variance))
                for j in range(120):
                    v = 16.0 * (j + 0.5) / 120
                    phi = phi_X(w, v)
                    assert abs(phi) <= h_envelope(v, a1f) + 1e-12
                    assert abs(phi - math.exp(-0.5 * v * v)) <= g_envelope(v, a1f) + 1e-12

    def test_envelope_monotone_in_a1(self) -> None:
        # larger cap means weaker (larger) envelopes pointwise
        for j in range(80):
            v = 14.0 * (j + 0.5) / 80
            assert h_envelope(v, 0.30) <= h_envelope(v, 0.31) + 1e-12
            assert g_envelope(v, 0.30) <= g_envelope(v, 0.31) + 1e-12


class TestBound:
    def test_reference_enclosure_031(self) -> None:
        bound = prawitz_bound(PARAMS_031)
        assert abs(bound.mid - 0.09114) <= 1e-5
        assert bound.hi <= 0.09115
        assert bound.rad <= 5e-6

    def test_reference_enclosure_022(self) -> None:
        bound = prawitz_bound(PARAMS_022_END)
        assert bound.hi < 0.0314
        assert abs(bound.mid - 0.03137) <= 2e-5

    def test_terms_assemble(self) -> None:
        terms = prawitz_terms(PARAMS_031)
        assert len(terms) == 4
        total = prawitz_bound(PARAMS_031)
        assert total.mid == pytest.approx(sum(t.mid for t in terms), abs=1e-12)
        # S4 = Phi(x) - 1/2
        assert terms[3].mid == pytest.approx(gauss_cdf(1.0) - 0.5, abs=1e-12)

    def test_q_zero_drops_s1_s3(self) -> None:
        params = PrawitzParams(a1=Fraction(31, 100), x=0.5, T=6.0, q=0.0, target=1e-4)
        s1, s2, s3, s4 = prawitz_terms(params)
        assert s1.mid == 0.0 and s1.rad == 0.0
        assert s3.mid == 0.0 and s3.rad == 0.0
        assert s2.rad > 0.0

    def test_q_one_drops_s2(self) -> None:
        params = PrawitzParams(a1=Fraction(31, 100), x=0.5, T=6.0, q=1.0, target=1e-4)
        _, s2, _, _ = prawitz_terms(params)
        assert s2.mid == 0.0 and s2.rad == 0.0

    def test_enclosure_shrinks_with_panels(self) -> None:
        # explicit overrides: more panels, smaller radius, compatible mids
        base = dict(a1=Fraction(31, 100), x=1.0, T=10.0, q=0.4)
        coarse = prawitz_bound(PrawitzParams(n1=400, n2=400, n3=400, **base))
        fine = prawitz_bound(PrawitzParams(n1=6400, n2=6400, n3=6400, **base))
        assert fine.rad < coarse.rad
        assert abs(fine.mid - coarse.mid) <= coarse.rad + fine.rad

    def test_non_rigorous_mode(self) -> None:
        rig = prawitz_bound(PARAMS_031)
        loose = prawitz_bound(PARAMS_031, rigorous=False)
        assert loose.rad == 0.0
        assert loose.mid == rig.mid

    def test_soundness_against_exact_sums(self) -> None:
        # Pr[Z < x] - Pr[X < x sqrt(V)] <= bound.hi for exact vectors whose
        # largest normalized weight is below the a1 parameter
        rng = random.Random(99)
        for cap, T in ((Fraction(31, 100), 10.0), (Fraction(22, 100), 14.5)):
            for _ in range(6):
                w = _random_vector(rng, cap)
                dist = exact_distribution(w)
                for x in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
                    cut = RootValue(1, x * x * w.variance)
                    exact_p = float(dist.pr_lt(cut))
                    params = PrawitzParams(a1=cap, x=float(x), T=T, q=0.4, target=1e-4)
                    bound = prawitz_bound(params)
                    deficit = gauss_cdf(float(x)) - exact_p
                    assert deficit <= bound.hi + 1e-9

    @settings(max_examples=12, deadline=None)
    @given(
        x=st.floats(min_value=0.05, max_value=1.8),
        T=st.floats(min_value=2.0, max_value=15.0),
        q=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_bound_finite_and_enclosure_valid(self, x: float, T: float, q: float) -> None:
        params = PrawitzParams(a1=Fraction(3, 10), x=x, T=T, q=q, target=1e-3)
        bound = prawitz_bound(params)
        assert math.isfinite(bound.mid) and bound.rad >= 0.0
        assert bound.lo <= bound.mid <= bound.hi


class TestVerifications:
    def test_prop_031_report(self) -> None:
        report = verify_prop_031()
        assert report.ok, report.summary()
        labels = [c.label for c in report.checks]
        assert "bound_hi_le_0.09115" in labels
        assert "pr_abs_lt_1_ge_0.5002" in labels
        assert "PASS" in report.summary()

    def test_sequence_values(self) -> None:
        assert len(SEQUENCE_X) == 94
        assert SEQUENCE_X[0] == 0.35 and SEQUENCE_X[-1] == 1.65
        assert all(a < b for a, b in zip(SEQUENCE_X, SEQUENCE_X[1:]))

    def test_sequence_prefix_margins(self) -> None:
        report = verify_sequence_93(limit=4)
        assert report.pair_count == 4
        assert report.min_margin >= 2e-5
        assert math.isnan(report.endpoint_bound_hi)

    def test_sequence_tight_threshold_raises(self) -> None:
        with pytest.raises(MarginViolated) as err:
            verify_sequence_93(threshold=0.02, limit=4)
        assert err.value.index == 0

    def test_prop_022_branches(self) -> None:
        assert verify_prop_022(0.1).ok
        assert verify_prop_022(0.215).ok
        assert verify_prop_022(0.3).ok
        report = verify_prop_022(0.42)
        assert report.name == "prop_022[grid]" and report.ok
        assert verify_prop_022(1.9).ok
        with pytest.raises(InvalidParams):
            verify_prop_022(-0.5)

    def test_prop_022_aux_inequality_pin(self) -> None:
        # 1/2 + (Phi(0.7) - 0.584)/3 >= Phi(0.35) - 0.084
        lhs = 0.5 + (gauss_cdf(0.7) - 0.584) / 3.0
        rhs = gauss_cdf(0.35) - 0.084
        assert lhs >= rhs
        assert lhs - rhs == pytest.approx(0.00518, abs=5e-4)
