"""Polynomial engine, factor justification, and the certificate catalogue."""

import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radsum._surd import SurdValue
from radsum.certificates import (
    Certificate,
    Factor,
    Term,
    default_catalog_path,
    load_catalog,
    poly_degree,
    poly_eval,
    poly_identity,
    poly_is_zero,
    poly_mul,
    poly_parse,
    poly_str,
    poly_sub,
    verify_catalog,
    verify_certificate,
)
from radsum.errors import (
    IdentityMismatch,
    InvalidParams,
    RegionUnsatisfiable,
    UnjustifiedFactor,
)


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


class TestPolyParse:
    def test_decimals_are_exact(self):
        p = poly_parse("0.8453")
        assert p == {(): Fraction(8453, 10000)}
        q = poly_parse("0.42*x")
        assert q[(("x", 1),)] == Fraction(21, 50)

    def test_fractions_and_powers(self):
        p = poly_parse("3/4*x^2 - x/2 + 1")
        assert p[(("x", 2),)] == Fraction(3, 4)
        assert p[(("x", 1),)] == Fraction(-1, 2)
        assert p[()] == 1

    def test_double_star_power(self):
        assert poly_parse("x**3") == poly_parse("x^3")

    def test_products_expand(self):
        p = poly_parse("(x + y)*(x - y)")
        assert p == poly_parse("x^2 - y^2")

    def test_unary_minus(self):
        assert poly_parse("-x + x") == {}

    def test_eval(self):
        p = poly_parse("x^2*y - 2*y + 7")
        val = poly_eval(p, {"x": Fraction(2), "y": Fraction(1, 3)})
        assert val == Fraction(4, 3) - Fraction(2, 3) + 7

    def test_degree(self):
        assert poly_degree(poly_parse("x^2*y + x")) == 3
        assert poly_degree(poly_parse("5")) == 0
        assert poly_degree({}) == 0

    def test_root_reduction(self):
        p = poly_parse("(1 + r2)^2", root=("r2", 2))
        assert p == poly_parse("3 + 2*r2")
        q = poly_parse("r3^4 + r3^3", root=("r3", 3))
        assert q == poly_parse("9 + 3*r3")

    def test_rejects_bad_syntax(self):
        with pytest.raises(InvalidParams):
            poly_parse("x +")
        with pytest.raises(InvalidParams):
            poly_parse("f(x)")
        with pytest.raises(InvalidParams):
            poly_parse("x^y")
        with pytest.raises(InvalidParams):
            poly_parse("x^(-1)")
        with pytest.raises(InvalidParams):
            poly_parse("1/x")
        with pytest.raises(InvalidParams):
            poly_parse("x/0")

    def test_round_trip_through_str(self):
        p = poly_parse("2*x^2*y - 11/2*x + 3 - y")
        assert poly_parse(poly_str(p)) == p


class TestPolyIdentity:
    def test_difference_of_squares(self):
        assert poly_identity("a^2 - b^2", "(a - b)*(a + b)")

    def test_quartic_sum_of_squares(self):
        lhs = "a1^4 - 11*a1^3 + 55*a1^2 - 52*a1 + 14"
        rhs = "(a1^2 - 11/2*a1 + 3)^2 + 75/4*(a1 - 38/75)^2 + 14/75"
        assert poly_identity(lhs, rhs)

    def test_quartic_tail_rearrangement(self):
        assert poly_identity("2*t^4 - 8*t + 3", "2*(t^2)^2 + (3 - 8*t)")

    def test_not_identical(self):
        assert not poly_identity("a^2 - b^2", "(a - b)^2")

    def test_root_identity(self):
        assert poly_identity("(1 - r2/2)^2", "3/2 - r2", root=("r2", 2))


@st.composite
def polys(draw):
    names = ("x", "y")
    n_terms = draw(st.integers(min_value=0, max_value=5))
    p = {}
    for _ in range(n_terms):
        mono = tuple(
            (v, e)
            for v in names
            if (e := draw(st.integers(min_value=0, max_value=3))) > 0
        )
        num = draw(st.integers(min_value=-9, max_value=9))
        den = draw(st.integers(min_value=1, max_value=9))
        c = Fraction(num, den)
        if c:
            p[mono] = p.get(mono, Fraction(0)) + c
    return {m: c for m, c in p.items() if c}


class TestPolyAlgebra:
    @settings(max_examples=60, deadline=None)
    @given(polys(), polys())
    def test_mul_commutes(self, p, q):
        assert poly_mul(p, q) == poly_mul(q, p)

    @settings(max_examples=60, deadline=None)
    @given(polys(), polys())
    def test_sub_self_is_zero(self, p, q):
        s = poly_mul(p, q)
        assert poly_is_zero(poly_sub(s, s))

    @settings(max_examples=60, deadline=None)
    @given(polys())
    def test_str_round_trip(self, p):
        assert poly_parse(poly_str(p)) == p


class TestCatalog:
    def test_loads_and_has_expected_entries(self, catalog):
        assert default_catalog_path().exists()
        assert len(catalog) >= 100
        for cid in (
            "G.sigma31s",
            "E1.case1",
            "E1.case2",
            "E2.sos",
            "E5.deriv_aux",
            "E6.net",
            "E7.R2",
            "E8.R2",
            "E9.R1",
            "E10.L3q",
            "E11.T12",
            "C1.i1",
            "C2.c45",
            "C3.c32",
        ):
            assert cid in catalog

    def test_full_catalog_verifies(self, catalog):
        report = verify_catalog()
        assert report.ok, report.summary()
        counts = report.counts
        assert counts.get("verified", 0) >= 96
        assert counts.get("delegated", 0) == 4
        assert "failed" not in counts

    def test_report_summary_mentions_each_entry(self, catalog):
        report = verify_catalog()
        text = report.summary()
        for cid in catalog:
            assert cid in text

    def test_single_entry_reports(self, catalog):
        rep = verify_certificate(catalog["E2.sos"], catalog)
        assert rep.ok and rep.status == "verified"
        rep = verify_certificate(catalog["E6.net"], catalog)
        assert rep.status == "delegated"

    def test_zero_certificate(self):
        cert = Certificate("zero", "nonneg", ("x",), ("x >= 0",), "0", ())
        assert verify_certificate(cert).status == "verified"

    def test_duplicate_ids_rejected(self, tmp_path):
        text = "[CERT a]\nkind: nonneg\ntarget: 0\n[CERT a]\nkind: nonneg\ntarget: 0\n"
        path = tmp_path / "cat.txt"
        path.write_text(text)
        with pytest.raises(InvalidParams):
            load_catalog(path)

    def test_malformed_lines_rejected(self, tmp_path):
        path = tmp_path / "cat.txt"
        path.write_text("kind: nonneg\n")
        with pytest.raises(InvalidParams):
            load_catalog(path)
        path.write_text("[CERT a]\nnonsense without colon\n")
        with pytest.raises(InvalidParams):
            load_catalog(path)

    def test_verify_catalog_collects_failures(self, tmp_path):
        path = tmp_path / "cat.txt"
        path.write_text(
            "[CERT bad]\nkind: nonneg\nvars: x\nregion: x >= 0\n"
            "target: x + 1\nterm: affine{x}\n"
        )
        report = verify_catalog(path)
        assert not report.ok
        assert "misses target" in report.entries[0].detail


class TestMutations:
    @pytest.mark.parametrize(
        "cid", ["E2.sos", "E7.R2", "E8.L4R1", "C2.c45", "E11.T18", "C3.c32"]
    )
    def test_perturbed_target_fails(self, catalog, cid):
        cert = catalog[cid]
        bad = dataclasses.replace(cert, target=cert.target + " + 1/97")
        with pytest.raises(IdentityMismatch):
            verify_certificate(bad, catalog)

    def test_flipped_sign_inside_term_fails(self, catalog):
        cert = catalog["G.sumsq3"]
        bad_terms = (Term((Factor("square", "a1 + a2"),)),) + cert.terms[1:]
        with pytest.raises(IdentityMismatch):
            verify_certificate(dataclasses.replace(cert, terms=bad_terms), catalog)

    def test_weakened_tag_fails_justification(self, catalog):
        cert = catalog["E7.dhi"]
        # same polynomial, but over a widened region the minimum is negative
        widened = dataclasses.replace(
            cert, region=("a1 >= 31/100", "a1 <= 1", "a2 >= 0", "a3 >= 0")
        )
        with pytest.raises(IdentityMismatch):
            # widening the region does not break the identity, so break it
            verify_certificate(
                dataclasses.replace(widened, target="5/25 - a1 + a2 + a3"), catalog
            )
        bad = dataclasses.replace(
            cert,
            region=("a1 >= 31/100", "a1 <= 1", "a2 >= 0", "a3 >= 0"),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(bad, catalog)


class TestFactorJustification:
    def test_affine_minimum_exact(self):
        # min(x + y) over {x >= 1, y >= 2, x + y <= 10} is exactly 3
        base = Certificate(
            "lp",
            "nonneg",
            ("x", "y"),
            ("x >= 1", "y >= 2", "x + y <= 10"),
            "x + y - 3",
            (Term((Factor("affine", "x + y - 3"),)),),
        )
        assert verify_certificate(base).status == "verified"
        worse = dataclasses.replace(
            base,
            target="x + y - 301/100",
            terms=(Term((Factor("affine", "x + y - 301/100"),)),),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(worse)

    def test_affine_unbounded_below_rejected(self):
        cert = Certificate(
            "unb",
            "nonneg",
            ("x", "y"),
            ("x >= 0",),
            "y",
            (Term((Factor("affine", "y"),)),),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert)

    def test_empty_region_raises(self):
        cert = Certificate(
            "empty", "nonneg", ("x",), ("x >= 1", "x <= 0"), "x",
            (Term((Factor("affine", "x"),)),),
        )
        with pytest.raises(RegionUnsatisfiable):
            verify_certificate(cert)

    def test_quad1_window_must_cover_region(self):
        cert = Certificate(
            "window",
            "nonneg",
            ("x",),
            ("x >= 0", "x <= 2"),
            "2*x^2 - 4*x + 1",
            (Term((Factor("quad1", "2*x^2 - 4*x + 1", ("x", "0", "1/4")),)),),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert)

    def test_quad1_interior_vertex_needs_nonpositive_discriminant(self):
        cert = Certificate(
            "dip",
            "nonneg",
            ("x",),
            ("x >= 0", "x <= 3"),
            "x^2 - 3*x + 1",
            (Term((Factor("quad1", "x^2 - 3*x + 1", ("x", "0", "3")),)),),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert)

    def test_concave_quad1_needs_finite_endpoints(self):
        cert = Certificate(
            "concave",
            "nonneg",
            ("x",),
            ("x >= 0",),
            "-x^2 + 1",
            (Term((Factor("quad1", "-x^2 + 1", ("x", "0", "inf")),)),),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert)

    def test_negative_constant_rejected(self):
        cert = Certificate(
            "negc", "nonneg", (), (), "-1/3", (Term((Factor("const", "-1/3"),)),)
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert)

    def test_raw_only_in_identity_entries(self):
        cert = Certificate(
            "rawbad", "nonneg", ("x",), (), "x", (Term((Factor("raw", "x"),)),)
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert)

    def test_ref_region_implication_enforced(self, catalog):
        cert = Certificate(
            "refbad",
            "nonneg",
            ("a1", "a2", "a3"),
            ("a1 >= 0",),
            "a1^2 + a2^2 + a3^2 - 1547/10000",
            (Term((Factor("ref", "", ("G.sigma31s",)),)),),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert, catalog)

    def test_ref_to_unknown_id(self, catalog):
        cert = Certificate(
            "refmiss", "nonneg", ("x",), (), "0",
            (Term((Factor("ref", "", ("no.such",)),)),),
        )
        with pytest.raises(InvalidParams):
            verify_certificate(cert, catalog)

    def test_negative_surd_rejected(self):
        # 4/3 - sqrt(2) < 0
        cert = Certificate(
            "surdneg",
            "nonneg",
            (),
            (),
            "4/3 - r2",
            (Term((Factor("surd", "4/3 - r2"),)),),
            root=("r2", 2),
        )
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(cert)


class TestSurdEndpoints:
    def test_quartic_window_endpoint_is_exact_zero(self, catalog):
        # 2u^2 - 4u + 1 vanishes exactly at u = 1 - sqrt(2)/2
        cert = catalog["E1.case1"]
        p = poly_parse(cert.target, root=cert.root)
        u = SurdValue(1, Fraction(-1, 2), 2)
        total = SurdValue(0)
        for mono, c in p.items():
            term = SurdValue(c)
            for name, e in mono:
                assert name == "u"
                for _ in range(e):
                    term = term * u
            total = total + term
        assert total.sign() == 0

    def test_shrunk_surd_window_fails(self, catalog):
        # widening the region past the surd endpoint must be rejected
        cert = catalog["E1.case1"]
        bad = dataclasses.replace(cert, region=("u >= 0", "u <= 3/10"))
        with pytest.raises(UnjustifiedFactor):
            verify_certificate(bad, catalog)

    def test_root_extension_entry_rejects_perturbation(self, catalog):
        cert = catalog["C3.c34"]
        bad = dataclasses.replace(cert, target=cert.target + " - r3/1000")
        with pytest.raises(IdentityMismatch):
            verify_certificate(bad, catalog)


class TestNumericEntries:
    def test_registered_checks_pass(self, catalog):
        for cid in ("E1.case3red", "E5.endpoint", "E6.inner_max"):
            rep = verify_certificate(catalog[cid], catalog)
            assert rep.ok, rep

    def test_unregistered_numeric_id_rejected(self):
        cert = Certificate("no.check", "numeric")
        with pytest.raises(InvalidParams):
            verify_certificate(cert)
