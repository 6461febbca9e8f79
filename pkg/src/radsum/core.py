"""Exact distributions of weighted sign sums and segment probabilities.

A weight vector a_1 >= ... >= a_n > 0 defines X = sum(a_i x_i) over uniform
signs x in {-1, 1}^n.  All probabilities are exact Fractions: weights are
scaled to integers by their common denominator D and the 2^n sums are
enumerated into a sorted (value, count) table.  Segment endpoints may be
rationals, SurdValue's or RootValue's; comparisons against atoms stay exact.

The half-open bracket of a segment [a, b] is
    <a, b> = Pr[a <= X <= b] - (1/2) Pr[X = a] - (1/2) Pr[X = b]
for a < b, and 0 otherwise.  Closed/open/half endpoint kinds generalize
this by weighting boundary atoms with 1, 0 or 1/2.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from . import _backend
from ._surd import RootValue, SurdValue, exact_cmp, frac
from .errors import (
    DimensionTooLarge,
    GridNotMonotone,
    InvalidParams,
    MismatchedVariance,
    NonpositiveT,
    NotNormalizedGrid,
)

Exact = Union[int, Fraction, SurdValue, RootValue]

_KIND_WEIGHT = {
    "closed": Fraction(1),
    "open": Fraction(0),
    "half": Fraction(1, 2),
}

MAX_ENUM_N = 24


class WeightVector:
    """Positive weights sorted in nonincreasing order, with exact variance."""

    __slots__ = ("weights", "variance", "_denom", "_ints")

    def __init__(self, weights: Iterable[Union[int, str, Fraction]]) -> None:
        ws = sorted((frac(w) for w in weights), reverse=True)
        if not ws:
            raise InvalidParams("weight vector must be nonempty")
        if ws[-1] <= 0:
            raise InvalidParams("weights must be positive")
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "variance", sum(w * w for w in ws))
        object.__setattr__(self, "_denom", None)
        object.__setattr__(self, "_ints", None)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("WeightVector is immutable")

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def __repr__(self) -> str:
        return f"WeightVector({[str(w) for w in self.weights]})"

    def __eq__(self, other):
        if isinstance(other, WeightVector):
            return self.weights == other.weights
        return NotImplemented

    def __hash__(self):
        return hash(self.weights)

    @property
    def denom(self) -> int:
        """Common denominator D: every D * a_i is an integer."""
        if self._denom is None:
            d = lcm(*(w.denominator for w in self.weights))
            object.__setattr__(self, "_denom", d)
        return self._denom

    @property
    def int_weights(self) -> Tuple[int, ...]:
        if self._ints is None:
            d = self.denom
            object.__setattr__(
                self, "_ints", tuple(int(w * d) for w in self.weights)
            )
        return self._ints

    def is_normalized(self) -> bool:
        return self.variance == 1

    def scale(self, c: Union[int, str, Fraction]) -> "WeightVector":
        c = frac(c)
        if c <= 0:
            raise InvalidParams("scale factor must be positive")
        return WeightVector([w * c for w in self.weights])

    def tail(self, m: int) -> "WeightVector":
        """Weights after dropping the m largest."""
        if not 0 < m < len(self.weights):
            raise InvalidParams("tail index out of range")
        return WeightVector(self.weights[m:])


def parse_weights(text: str) -> WeightVector:
    """Parse a weight list: whitespace/comma separated, '#' comments."""
    tokens: List[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.replace(",", " ").split())
    if not tokens:
        raise InvalidParams("no weights found")
    return WeightVector(tokens)


class Segment:
    """An interval with endpoint kinds 'closed', 'open' or 'half'.

    ``lo=None`` / ``hi=None`` stand for -inf / +inf (the kind on an infinite
    endpoint is irrelevant).  A segment with hi <= lo is degenerate and has
    probability 0 under every kind combination.
    """

    __slots__ = ("lo", "hi", "lo_kind", "hi_kind")

    def __init__(
        self,
        lo: Optional[Exact],
        hi: Optional[Exact],
        lo_kind: str = "half",
        hi_kind: str = "half",
    ) -> None:
        if lo_kind not in _KIND_WEIGHT or hi_kind not in _KIND_WEIGHT:
            raise InvalidParams(f"unknown endpoint kind {lo_kind!r}/{hi_kind!r}")
        for x in (lo, hi):
            if x is not None and not isinstance(
                x, (int, Fraction, SurdValue, RootValue)
            ):
                raise InvalidParams(
                    f"segment endpoints must be exact values, got {type(x).__name__}"
                )
        if (
            isinstance(lo, SurdValue)
            and isinstance(hi, SurdValue)
            and lo.q
            and hi.q
            and lo.v != hi.v
        ):
            raise MismatchedVariance(
                f"segment endpoints mix radicands {lo.v} and {hi.v}"
            )
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "lo_kind", lo_kind)
        object.__setattr__(self, "hi_kind", hi_kind)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("Segment is immutable")

    def __repr__(self) -> str:
        return (
            f"Segment({self.lo!r}, {self.hi!r}, "
            f"{self.lo_kind!r}, {self.hi_kind!r})"
        )

    @classmethod
    def half(cls, lo: Optional[Exact], hi: Optional[Exact]) -> "Segment":
        return cls(lo, hi, "half", "half")

    @classmethod
    def closed(cls, lo: Optional[Exact], hi: Optional[Exact]) -> "Segment":
        return cls(lo, hi, "closed", "closed")

    @classmethod
    def open(cls, lo: Optional[Exact], hi: Optional[Exact]) -> "Segment":
        return cls(lo, hi, "open", "open")

    @classmethod
    def of(
        cls, lo: Optional[Exact], hi: Optional[Exact], lo_kind: str, hi_kind: str
    ) -> "Segment":
        return cls(lo, hi, lo_kind, hi_kind)

    def is_degenerate(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        return exact_cmp(self.hi, self.lo) <= 0


class ExactDist:
    """Exact distribution of X = sum(a_i x_i) as sorted scaled atoms.

    Atoms live at integer points v with X = v / denom; ``counts[i]`` sign
    vectors hit ``values[i]`` and ``total = 2**n``.
    """

    __slots__ = ("weights", "denom", "values", "counts", "_cum", "total")

    def __init__(self, weights: WeightVector) -> None:
        n = len(weights)
        if n > MAX_ENUM_N:
            raise DimensionTooLarge(
                f"enumeration supports n <= {MAX_ENUM_N}, got {n}"
            )
        ints = weights.int_weights
        # int64 merge needs headroom: values span +-sum(w), counts <= 2^n
        if sum(ints) < (1 << 62):
            values, counts = _backend.enum_dist_int64(list(ints))
        else:
            values, counts = _backend.enum_dist_big(list(ints))
        cum: List[int] = []
        running = 0
        for c in counts:
            running += int(c)
            cum.append(running)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "denom", weights.denom)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "total", 1 << n)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("ExactDist is immutable")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def variance(self) -> Fraction:
        return self.weights.variance

    def atoms(self) -> dict:
        """{value: probability} with exact Fractions (small dists only)."""
        d, t = self.denom, self.total
        return {
            Fraction(int(v), d): Fraction(int(c), t)
            for v, c in zip(self.values, self.counts)
        }

    # -- exact rank queries ------------------------------------------------
    def _against(self, x: Exact) -> Callable[[int], int]:
        """Comparator f(v) = sign(v - D*x) for scaled atom values v."""
        d = self.denom
        if isinstance(x, (int, Fraction)):
            t = Fraction(x) * d
            return lambda v: (v > t) - (v < t)
        if isinstance(x, SurdValue):
            t = x * d
            if t.is_rational:
                tp = t.p
                return lambda v: (v > tp) - (v < tp)
            return lambda v: (SurdValue(v) - t).sign()
        if isinstance(x, RootValue):
            t = x.scale(d)
            r = t.as_rational()
            if r is not None:
                return lambda v: (v > r) - (v < r)
            return lambda v: -exact_cmp(t, Fraction(v))
        raise InvalidParams(f"unsupported endpoint type {type(x).__name__}")

    def _first_geq(self, cmp: Callable[[int], int]) -> int:
        """First index i with values[i] >= x, i.e. cmp(values[i]) >= 0."""
        vals = self.values
        lo, hi = 0, len(vals)
        while lo < hi:
            mid = (lo + hi) // 2
            if cmp(int(vals[mid])) >= 0:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def _first_gt(self, cmp: Callable[[int], int]) -> int:
        vals = self.values
        lo, hi = 0, len(vals)
        while lo < hi:
            mid = (lo + hi) // 2
            if cmp(int(vals[mid])) > 0:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def _cum_before(self, idx: int) -> int:
        return self._cum[idx - 1] if idx > 0 else 0

    def count_lt(self, x: Exact) -> int:
        return self._cum_before(self._first_geq(self._against(x)))

    def count_le(self, x: Exact) -> int:
        return self._cum_before(self._first_gt(self._against(x)))

    def count_eq(self, x: Exact) -> int:
        r = _as_rational(x)
        if r is None:
            return 0
        t = r * self.denom
        if t.denominator != 1:
            return 0
        cmp = self._against(r)
        i = self._first_geq(cmp)
        if i < len(self.values) and cmp(int(self.values[i])) == 0:
            return int(self.counts[i])
        return 0

    # -- probabilities -----------------------------------------------------
    def pr_lt(self, x: Exact) -> Fraction:
        return Fraction(self.count_lt(x), self.total)

    def pr_le(self, x: Exact) -> Fraction:
        return Fraction(self.count_le(x), self.total)

    def pr_gt(self, x: Exact) -> Fraction:
        return Fraction(self.total - self.count_le(x), self.total)

    def pr_ge(self, x: Exact) -> Fraction:
        return Fraction(self.total - self.count_lt(x), self.total)

    def pr_eq(self, x: Exact) -> Fraction:
        return Fraction(self.count_eq(x), self.total)

    def segment_prob(self, seg: Segment) -> Fraction:
        return segment_prob(self, seg)


def _as_rational(x: Exact) -> Optional[Fraction]:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, SurdValue):
        return x.p if x.is_rational else None
    if isinstance(x, RootValue):
        return x.as_rational()
    return None


def exact_distribution(weights: Union[WeightVector, Sequence]) -> ExactDist:
    """Enumerate the exact distribution of X for the given weights."""
    if not isinstance(weights, WeightVector):
        weights = WeightVector(weights)
    return ExactDist(weights)


def segment_prob(d: ExactDist, seg: Segment) -> Fraction:
    """Exact probability mass of a segment under its endpoint kinds."""
    if seg.is_degenerate():
        return Fraction(0)
    total = d.total
    if seg.lo is None:
        below = 0
        lo_term = Fraction(0)
    else:
        below = d.count_le(seg.lo)
        lo_term = _KIND_WEIGHT[seg.lo_kind] * d.count_eq(seg.lo)
    if seg.hi is None:
        interior = total - below
        hi_term = Fraction(0)
    else:
        interior = d.count_lt(seg.hi) - below
        hi_term = _KIND_WEIGHT[seg.hi_kind] * d.count_eq(seg.hi)
    return (Fraction(interior) + lo_term + hi_term) / total


def half_bracket(d: ExactDist, lo: Exact, hi: Exact) -> Fraction:
    """<lo, hi>: both endpoints weighted 1/2; 0 if hi <= lo."""
    return segment_prob(d, Segment.half(lo, hi))


def check_tomaszewski(weights: Union[WeightVector, Sequence]) -> Tuple[bool, Fraction]:
    """Exact Pr[|X| <= sqrt(V)] and whether it is >= 1/2."""
    d = exact_distribution(weights)
    bound = RootValue(1, d.variance)
    count = d.count_le(bound) - d.count_lt(-bound)
    prob = Fraction(count, d.total)
    return prob >= Fraction(1, 2), prob


def check_scale_duality(
    weights: Union[WeightVector, Sequence], t: Union[int, str, Fraction]
) -> Tuple[bool, Fraction, Fraction]:
    """Pr[|X| < t*sqrt(V)] >= Pr[|X| > sqrt(V)/t] for rational t > 0.

    Returns (holds, lhs, rhs) with both probabilities exact.
    """
    t = frac(t)
    if t <= 0:
        raise NonpositiveT(f"t must be positive, got {t}")
    d = exact_distribution(weights)
    v = d.variance
    lo_thr = RootValue(1, t * t * v)
    lhs = Fraction(d.count_lt(lo_thr) - d.count_le(-lo_thr), d.total)
    hi_thr = RootValue(1, v / (t * t))
    rhs = Fraction(d.total - d.count_le(hi_thr) + d.count_lt(-hi_thr), d.total)
    return lhs >= rhs, lhs, rhs


def _grid_root(x) -> RootValue:
    if isinstance(x, str):
        x = frac(x)
    if isinstance(x, (int, Fraction, SurdValue, RootValue)):
        return RootValue.from_value(x)
    raise InvalidParams(f"grid entries must be exact values, got {type(x).__name__}")


def _grid_square(r: RootValue) -> Fraction:
    sq = r.square
    if isinstance(sq, SurdValue):
        if not sq.is_rational:
            raise InvalidParams("grid entries must have rational squares")
        sq = sq.p
    return sq


def _scaled(r: RootValue, v: Fraction) -> RootValue:
    """r * sqrt(v): the grid entry in the unnormalized units of X."""
    if r.sign == 0:
        return RootValue(0, 0)
    return RootValue(r.sign, _grid_square(r) * v)


def cheby_refined(
    d: ExactDist,
    c: Sequence,
    dseq: Sequence,
    variant: str = "tail",
) -> Tuple[Fraction, Fraction, bool]:
    """Refined second-moment inequality on normalized grids.

    ``c`` is a grid 0 = c_0 <= ... <= c_n = 1 and ``dseq`` a grid
    1 = d_0 <= d_1 <= ... <= d_m, both in units of sqrt(V).  Returns
    (lhs, rhs, holds) for

        sum_i (1 - c_i^2) <c_i, c_{i+1}>   >=   rhs

    where rhs is, by variant:
      * "tail":     sum_{i>=1} (d_i^2 - d_{i-1}^2) Pr[X >= d_i]
      * "segments": sum_{i>=1} (d_i^2 - 1) <d_i, d_{i+1}>, with
        d_{m+1} = +inf appended implicitly.
    """
    if variant not in ("tail", "segments"):
        raise InvalidParams(f"unknown variant {variant!r}")
    if len(c) < 2 or len(dseq) < 1:
        raise InvalidParams("grids too short")
    c_roots = [_grid_root(x) for x in c]
    d_roots = [_grid_root(x) for x in dseq]
    if exact_cmp(c_roots[0], 0) != 0 or exact_cmp(c_roots[-1], 1) != 0:
        raise NotNormalizedGrid("c grid must run from 0 to 1")
    if exact_cmp(d_roots[0], 1) != 0:
        raise NotNormalizedGrid("d grid must start at 1")
    for seq, name in ((c_roots, "c"), (d_roots, "d")):
        for a, b in zip(seq, seq[1:]):
            if exact_cmp(a, b) > 0:
                raise GridNotMonotone(f"{name} grid is not nondecreasing")
    v = d.variance
    c_sq = [_grid_square(r) for r in c_roots]
    d_sq = [_grid_square(r) for r in d_roots]
    c_raw = [_scaled(r, v) for r in c_roots]
    d_raw = [_scaled(r, v) for r in d_roots]

    lhs = Fraction(0)
    for i in range(len(c_raw) - 1):
        coef = 1 - c_sq[i]
        if coef:
            lhs += coef * half_bracket(d, c_raw[i], c_raw[i + 1])

    rhs = Fraction(0)
    if variant == "tail":
        for i in range(1, len(d_raw)):
            coef = d_sq[i] - d_sq[i - 1]
            if coef:
                rhs += coef * d.pr_ge(d_raw[i])
    else:
        for i in range(1, len(d_raw)):
            coef = d_sq[i] - 1
            if not coef:
                continue
            hi = d_raw[i + 1] if i + 1 < len(d_raw) else None
            rhs += coef * segment_prob(d, Segment.half(d_raw[i], hi))
    return lhs, rhs, lhs >= rhs


def variance_split(d: ExactDist) -> Tuple[Fraction, Fraction]:
    """Both sides of E[(1 - Y^2) 1{|Y|<1}] = E[(Y^2 - 1) 1{|Y|>1}], Y = X/sqrt(V).

    Exact; the two returned Fractions are equal for every distribution.
    """
    dv = Fraction(d.denom * d.denom) * d.variance
    inner = Fraction(0)
    outer = Fraction(0)
    for v, cnt in zip(d.values, d.counts):
        v = int(v)
        q = Fraction(v * v) / dv
        if q < 1:
            inner += int(cnt) * (1 - q)
        elif q > 1:
            outer += int(cnt) * (q - 1)
    return inner / d.total, outer / d.total
