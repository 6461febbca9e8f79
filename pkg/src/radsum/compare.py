"""Segment comparison: precedence tests and the explicit measure injection.

For a Rademacher sum X with max weight M, the half-bracket of (C, D) is
dominated by that of (A, B) under any of three sufficient hypotheses:

* first criterion:   min(|A|, |B|) <= C  and  D - C + 2M <= B - A
* second criterion:  |A| <= C  and  2 max(M, D - B) <= C - A
* combined form:     |A| <= min(B, C),  2M <= C - A,
                     and  D - C + min(2M, D - B) <= B - A

``prec_relation`` classifies a quad by the first hypothesis set it meets
(degenerate D <= C counts first and is trivially dominated), and
``segment_injection`` builds the explicit injection behind the second
criterion: recursively flip the large coordinates, then conditionally
prefix-flip the small ones.  All endpoint arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ._surd import RootValue, SurdValue, as_surd, exact_cmp, frac, surd_sign
from .core import ExactDist, Exact, Segment, WeightVector, segment_prob
from .errors import HypothesisNotSatisfied, InvalidParams
from .flips import (
    SignVector,
    prefix_flip,
    recursive_flip,
    recursive_flip_table,
)

_KINDS = ("closed", "open", "half")

RELATIONS = ("degenerate", "lemma1", "lemma2", "general", "none")


def _terms(x: Exact) -> List[Tuple[Fraction, Fraction]]:
    """Term list (coef, radicand) of an exact value, for surd_sign sums."""
    if isinstance(x, str):
        x = frac(x)
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return [(x, Fraction(1))] if x else []
    if isinstance(x, SurdValue):
        return x.terms()
    if isinstance(x, RootValue):
        return x.terms()
    raise InvalidParams(f"unsupported endpoint type {type(x).__name__}")


class Lin:
    """Exact linear combination of square roots of rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms) -> None:
        self.terms = tuple(terms)

    @classmethod
    def of(cls, x: Exact) -> "Lin":
        return cls(_terms(x))

    def __add__(self, other: "Lin") -> "Lin":
        return Lin(self.terms + other.terms)

    def __sub__(self, other: "Lin") -> "Lin":
        return Lin(self.terms + tuple((-c, r) for c, r in other.terms))

    def __neg__(self) -> "Lin":
        return Lin(tuple((-c, r) for c, r in self.terms))

    def scale(self, c) -> "Lin":
        c = Fraction(c)
        return Lin(tuple((c * tc, r) for tc, r in self.terms))

    def sign(self) -> int:
        return surd_sign(self.terms)

    def __le__(self, other: "Lin") -> bool:
        return (self - other).sign() <= 0

    def __lt__(self, other: "Lin") -> bool:
        return (self - other).sign() < 0

    def abs(self) -> "Lin":
        return -self if self.sign() < 0 else self


def _lin_min(a: Lin, b: Lin) -> Lin:
    return a if (a - b).sign() <= 0 else b


def _lin_max(a: Lin, b: Lin) -> Lin:
    return a if (a - b).sign() >= 0 else b


@dataclass(frozen=True)
class CompareQuad:
    """Endpoints (A, B) and (C, D) plus the max-weight bound M."""

    A: Exact
    B: Exact
    C: Exact
    D: Exact
    M: Exact

    def __post_init__(self):
        for name in ("A", "B", "C", "D", "M"):
            x = getattr(self, name)
            if isinstance(x, str):
                object.__setattr__(self, name, frac(x))
        if exact_cmp(self.M, 0) <= 0:
            raise InvalidParams("M must be positive")

    def lins(self) -> Tuple[Lin, Lin, Lin, Lin, Lin]:
        return (
            Lin.of(self.A),
            Lin.of(self.B),
            Lin.of(self.C),
            Lin.of(self.D),
            Lin.of(self.M),
        )


def prec_relation(quad: CompareQuad) -> str:
    """Classify the quad by the first dominance hypothesis it satisfies.

    Priority: "degenerate" (D <= C), then "lemma1" (first criterion),
    "lemma2" (second criterion), "general" (combined form), else "none".
    """
    a, b, c, d, m = quad.lins()
    if (d - c).sign() <= 0:
        return "degenerate"
    two_m = m.scale(2)
    if _lin_min(a.abs(), b.abs()) <= c and d - c + two_m <= b - a:
        return "lemma1"
    if a.abs() <= c and _lin_max(two_m, (d - b).scale(2)) <= c - a:
        return "lemma2"
    if (
        a.abs() <= _lin_min(b, c)
        and two_m <= c - a
        and d - c + _lin_min(two_m, d - b) <= b - a
    ):
        return "general"
    return "none"


@dataclass(frozen=True)
class SegCompareResult:
    relation: str
    prob_cd: Fraction
    prob_ab: Fraction
    holds: bool


def check_seg_compare(
    dist: Union[ExactDist, WeightVector, Sequence],
    quad: CompareQuad,
) -> SegCompareResult:
    """Verify Pr[X in <C,D>] <= Pr[X in <A,B>] on an exact distribution.

    Raises HypothesisNotSatisfied when the quad fits no dominance
    hypothesis; the returned probabilities are exact.
    """
    relation = prec_relation(quad)
    if relation == "none":
        raise HypothesisNotSatisfied("quad satisfies no dominance hypothesis")
    d = _as_dist(dist)
    p_cd = segment_prob(d, Segment.half(quad.C, quad.D))
    p_ab = segment_prob(d, Segment.half(quad.A, quad.B))
    return SegCompareResult(relation, p_cd, p_ab, p_cd <= p_ab)


def check_other_segment_types(
    dist: Union[ExactDist, WeightVector, Sequence],
    quad: CompareQuad,
) -> Dict[Tuple[str, str], Tuple[Fraction, Fraction, bool]]:
    """Verify the dominance for all nine endpoint-kind combinations.

    Returns {(lo_kind, hi_kind): (prob_cd, prob_ab, holds)}.  All nine hold
    whenever the quad satisfies a dominance hypothesis (for the first
    criterion with A < B < -A this relies on the strict prefix-flip tweak,
    which only changes the injection, not the probabilities).
    """
    relation = prec_relation(quad)
    if relation == "none":
        raise HypothesisNotSatisfied("quad satisfies no dominance hypothesis")
    d = _as_dist(dist)
    out = {}
    for lk in _KINDS:
        for hk in _KINDS:
            p_cd = segment_prob(d, Segment(quad.C, quad.D, lk, hk))
            p_ab = segment_prob(d, Segment(quad.A, quad.B, lk, hk))
            out[(lk, hk)] = (p_cd, p_ab, p_cd <= p_ab)
    return out


def _as_dist(dist: Union[ExactDist, WeightVector, Sequence]) -> ExactDist:
    if isinstance(dist, ExactDist):
        return dist
    if isinstance(dist, WeightVector):
        return ExactDist(dist)
    return ExactDist(WeightVector(dist))


# -- explicit injection ----------------------------------------------------

@dataclass(frozen=True)
class InjectionResult:
    """The explicit map v -> u on {X(v) in [C, D]} plus verified properties."""

    mapping: Dict[SignVector, SignVector]
    injective: bool
    into: bool          # every X(u) lies in [A, B]
    endpoints_ok: bool  # X(u) = A only from X(v) = C, X(u) = B only from X(v) = D

    @property
    def ok(self) -> bool:
        return self.injective and self.into and self.endpoints_ok


_RF_TABLE_MAX = 12


def segment_injection(
    weights: Union[WeightVector, Sequence],
    quad: CompareQuad,
) -> InjectionResult:
    """Build and verify the second-criterion injection for a concrete sum.

    Requires the quad to satisfy the second criterion with M at least the
    largest weight.  Endpoints must lie in a single quadratic field (after
    canonicalization) so that exact threshold arithmetic stays closed.
    """
    wv = weights if isinstance(weights, WeightVector) else WeightVector(weights)
    n = len(wv)
    if n > 20:
        raise InvalidParams("segment injection supports n <= 20")
    if not _lemma2_holds(quad):
        raise HypothesisNotSatisfied(
            "quad does not satisfy the second dominance criterion"
        )
    if exact_cmp(quad.M, wv.weights[0]) < 0:
        raise InvalidParams("quad M must be at least the largest weight")

    a_ = as_surd(quad.A)
    b_ = as_surd(quad.B)
    c_ = as_surd(quad.C)
    d_ = as_surd(quad.D)
    gap = d_ - b_  # D - B, exact in one field

    # partition into large (a_i >= (D-B)/2) and small coordinates
    half_gap = gap / 2
    large = [i for i in range(n) if exact_cmp(wv.weights[i], half_gap) >= 0]
    small = [i for i in range(n) if i not in large]
    wl = [wv.weights[i] for i in large]
    ws = [wv.weights[i] for i in small]
    wv_l = WeightVector(wl) if wl else None
    wv_s = WeightVector(ws) if ws else None

    trivial = gap.sign() <= 0  # D <= B: [C,D] subset of [A,B], identity map
    rf_map = None
    if not trivial and wv_l is not None and len(large) <= _RF_TABLE_MAX:
        rf_map = recursive_flip_table(wv_l)

    mapping: Dict[SignVector, SignVector] = {}
    cache: Dict[SignVector, Tuple[SignVector, SurdValue]] = {}
    for mask in range(1 << n):
        v = tuple(1 if mask & (1 << i) else -1 for i in range(n))
        x = sum(w * s for w, s in zip(wv.weights, v))
        if not (exact_cmp(x, quad.C) >= 0 and exact_cmp(x, quad.D) <= 0):
            continue
        if trivial:
            mapping[v] = v
            continue
        v_l = tuple(v[i] for i in large)
        if v_l in cache:
            w_l, q_v = cache[v_l]
        else:
            if wv_l is None:
                w_l = v_l
                delta = Fraction(0)
            else:
                w_l = rf_map[v_l] if rf_map is not None else recursive_flip(wv_l, v_l)
                delta = sum(
                    wl[j] * (v_l[j] - w_l[j]) for j in range(len(large))
                )
            q_v = gap - delta
            cache[v_l] = (w_l, q_v)
        if q_v.sign() <= 0:
            u_s = tuple(v[i] for i in small)
        else:
            assert wv_s is not None, "positive Q with no small coordinates"
            u_s = prefix_flip(wv_s, q_v, tuple(v[i] for i in small))
        u = list(v)
        for j, i in enumerate(large):
            u[i] = w_l[j]
        for j, i in enumerate(small):
            u[i] = u_s[j]
        mapping[v] = tuple(u)

    # verify the three proof obligations on the explicit map
    injective = len(set(mapping.values())) == len(mapping)
    into = True
    endpoints_ok = True
    for v, u in mapping.items():
        xv = sum(w * s for w, s in zip(wv.weights, v))
        xu = sum(w * s for w, s in zip(wv.weights, u))
        if not (exact_cmp(xu, quad.A) >= 0 and exact_cmp(xu, quad.B) <= 0):
            into = False
        if exact_cmp(xu, quad.A) == 0 and exact_cmp(xv, quad.C) != 0:
            endpoints_ok = False
        if exact_cmp(xu, quad.B) == 0 and exact_cmp(xv, quad.D) != 0:
            endpoints_ok = False
    return InjectionResult(mapping, injective, into, endpoints_ok)


def _lemma2_holds(quad: CompareQuad) -> bool:
    a, b, c, d, m = quad.lins()
    return a.abs() <= c and _lin_max(m.scale(2), (d - b).scale(2)) <= c - a
