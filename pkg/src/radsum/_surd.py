"""Exact arithmetic for quadratic surds.

The package does all threshold comparisons without floating point.  The two
value types are:

* ``SurdValue`` -- a number p + q*sqrt(V) with rational p, q and a shared
  radicand V.  Radicands are canonicalized (squarefree integer), so values
  built from different but equivalent V's still compare.
* ``RootValue`` -- a signed square root, sign * sqrt(square), where the
  square is a rational or a SurdValue.  This is the universal form for
  segment endpoints: any rational r is RootValue(sign(r), r**2).

``surd_sign`` decides the sign of a finite sum of terms c*sqrt(r) exactly.
Distinct squarefree radicands are linearly independent over the rationals,
so a grouped, nonzero combination is never numerically ambiguous; sums with
three or more distinct radicands are settled by interval arithmetic at
increasing precision, which must terminate.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Tuple, Union

from .errors import InvalidParams, MismatchedVariance

Rational = Union[int, Fraction]

_SMALL_PRIME_LIMIT = 10_000


def frac(x: Union[int, str, Fraction]) -> Fraction:
    """Parse an exact rational: int, Fraction, 'p/q' or decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise InvalidParams(
            f"refusing to coerce float {x!r}; pass a string or Fraction"
        )
    raise InvalidParams(f"cannot interpret {x!r} as an exact rational")


def squarefree_decompose(n: int) -> Tuple[int, int]:
    """Return (s, k) with n = s*s*k and k squarefree, for n >= 1."""
    if n <= 0:
        raise InvalidParams("squarefree_decompose needs a positive integer")
    s, k = 1, 1
    m = n
    d = 2
    while d * d <= m and d <= _SMALL_PRIME_LIMIT:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            s *= d ** (e // 2)
            if e % 2:
                k *= d
        d += 1 if d == 2 else 2
    if m > 1:
        r = isqrt(m)
        if r * r == m:
            s *= r
        elif m < _SMALL_PRIME_LIMIT * _SMALL_PRIME_LIMIT:
            # no prime factor below the trial limit, so m is prime
            k *= m
        else:
            from sympy import factorint

            for p, e in factorint(m).items():
                s *= p ** (e // 2)
                if e % 2:
                    k *= p
    return s, k


def _canonical_term(coef: Fraction, radicand: Fraction) -> Tuple[Fraction, int]:
    """Rewrite coef*sqrt(radicand) as coef'*sqrt(k) with k squarefree int."""
    if radicand < 0:
        raise InvalidParams("negative radicand")
    if coef == 0 or radicand == 0:
        return Fraction(0), 1
    num, den = radicand.numerator, radicand.denominator
    s, k = squarefree_decompose(num * den)
    return coef * Fraction(s, den), k


def surd_sign(terms: Iterable[Tuple[Rational, Rational]]) -> int:
    """Exact sign of sum(c * sqrt(r) for c, r in terms), r >= 0."""
    grouped: dict[int, Fraction] = {}
    for coef, radicand in terms:
        c, k = _canonical_term(Fraction(coef), Fraction(radicand))
        if c:
            acc = grouped.get(k, Fraction(0)) + c
            if acc:
                grouped[k] = acc
            else:
                grouped.pop(k, None)
    if not grouped:
        return 0
    coefs = list(grouped.values())
    if all(c > 0 for c in coefs):
        return 1
    if all(c < 0 for c in coefs):
        return -1
    if len(grouped) == 2:
        (k1, c1), (k2, c2) = sorted(grouped.items())
        # opposite signs: compare |c1|sqrt(k1) against |c2|sqrt(k2)
        mag = c1 * c1 * k1 - c2 * c2 * k2
        if mag == 0:
            return 0  # impossible for distinct squarefree k, kept defensively
        bigger = c1 if mag > 0 else c2
        return 1 if bigger > 0 else -1
    return _interval_sign(grouped)


def _interval_sign(grouped: dict[int, Fraction]) -> int:
    from mpmath import iv

    prec = 64
    while prec <= 1 << 14:
        old = iv.prec
        try:
            iv.prec = prec
            total = iv.mpf(0)
            for k, c in grouped.items():
                t = iv.mpf(c.numerator) / iv.mpf(c.denominator)
                total += t * iv.sqrt(iv.mpf(k))
            if total > 0:
                return 1
            if total < 0:
                return -1
        finally:
            iv.prec = old
        prec *= 2
    raise ArithmeticError("surd_sign: interval refinement did not resolve")


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


class SurdValue:
    """Exact number p + q*sqrt(v) with rational p, q and squarefree int v."""

    __slots__ = ("p", "q", "v")

    def __init__(self, p: Rational, q: Rational = 0, v: Rational = 0) -> None:
        p, q, v = Fraction(p), Fraction(q), Fraction(v)
        if v < 0:
            raise InvalidParams("SurdValue radicand must be nonnegative")
        q, k = _canonical_term(q, v) if q else (Fraction(0), 1)
        if k == 1:
            p, q, k = p + q, Fraction(0), 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "v", k)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("SurdValue is immutable")

    # -- helpers ---------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def terms(self) -> list:
        """Terms (coef, radicand) suitable for surd_sign."""
        out = []
        if self.p:
            out.append((self.p, Fraction(1)))
        if self.q:
            out.append((self.q, Fraction(self.v)))
        return out

    def _coerce(self, other) -> "SurdValue":
        if isinstance(other, SurdValue):
            if self.q and other.q and self.v != other.v:
                raise MismatchedVariance(
                    f"cannot combine radicands {self.v} and {other.v}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return SurdValue(other)
        return NotImplemented  # type: ignore[return-value]

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        v = self.v if self.q else o.v
        return SurdValue(self.p + o.p, self.q + o.q, v)

    __radd__ = __add__

    def __neg__(self):
        return SurdValue(-self.p, -self.q, self.v)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.q and o.q:
            # same radicand guaranteed by _coerce
            return SurdValue(
                self.p * o.p + self.q * o.q * self.v,
                self.p * o.q + self.q * o.p,
                self.v,
            )
        v = self.v if self.q else o.v
        return SurdValue(self.p * o.p, self.p * o.q + self.q * o.p, v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        denom = o.p * o.p - o.q * o.q * o.v
        if denom == 0:
            if o.p == 0 and o.q == 0:
                raise ZeroDivisionError("division by zero SurdValue")
            # o = p + q*sqrt(v) with p^2 == q^2 v nonzero: impossible for
            # squarefree v != 1, kept defensively
            raise ZeroDivisionError("division by zero-norm SurdValue")
        conj = SurdValue(o.p, -o.q, o.v)
        num = self * conj
        return SurdValue(num.p / denom, num.q / denom, num.v)

    # -- comparisons -----------------------------------------------------
    def sign(self) -> int:
        if self.q == 0:
            return _sign(self.p)
        if self.p == 0:
            return _sign(self.q)
        if self.p > 0 and self.q > 0:
            return 1
        if self.p < 0 and self.q < 0:
            return -1
        # opposite signs: the part with larger magnitude wins
        mag = _sign(self.p * self.p - self.q * self.q * self.v)
        return mag if self.p > 0 else -mag

    def _cmp(self, other) -> int:
        diff = self - other
        if diff is NotImplemented:
            return NotImplemented
        return diff.sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __eq__(self, other):
        if isinstance(other, (SurdValue, int, Fraction)):
            c = self._cmp(other)
            return NotImplemented if c is NotImplemented else c == 0
        return NotImplemented

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.v))

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * float(self.v) ** 0.5

    def __repr__(self) -> str:
        if self.q == 0:
            return f"SurdValue({self.p})"
        return f"SurdValue({self.p} + {self.q}*sqrt({self.v}))"


def _square_terms(square) -> list:
    if isinstance(square, SurdValue):
        return square.terms()
    return [(Fraction(square), Fraction(1))] if square else []


class RootValue:
    """A signed square root: sign * sqrt(square).

    ``square`` is a nonnegative rational or SurdValue.  RootValue supports
    exact comparison (including across unrelated radicands), negation and
    scaling by rationals, but not addition; callers that need signs of sums
    of roots assemble term lists for ``surd_sign`` instead.
    """

    __slots__ = ("sign", "square")

    def __init__(self, sign: int, square) -> None:
        if sign not in (-1, 0, 1):
            raise InvalidParams("RootValue sign must be -1, 0 or 1")
        if isinstance(square, (int, Fraction)):
            square = Fraction(square)
            sq_sign = _sign(square)
        elif isinstance(square, SurdValue):
            sq_sign = square.sign()
        else:
            raise InvalidParams(f"unsupported square type {type(square).__name__}")
        if sq_sign < 0:
            raise InvalidParams("RootValue square must be nonnegative")
        if sq_sign == 0:
            sign, square = 0, Fraction(0)
        elif sign == 0:
            raise InvalidParams("zero sign with nonzero square")
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "square", square)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("RootValue is immutable")

    @classmethod
    def from_value(cls, x) -> "RootValue":
        if isinstance(x, RootValue):
            return x
        if isinstance(x, (int, Fraction)):
            x = Fraction(x)
            return cls(_sign(x), x * x)
        if isinstance(x, SurdValue):
            if x.is_rational:
                return cls.from_value(x.p)
            return cls(x.sign(), x * x) if x.sign() else cls(0, 0)
        raise InvalidParams(f"cannot interpret {x!r} as a RootValue")

    def terms(self) -> list:
        """Terms (coef, radicand) for surd_sign; requires rational square."""
        if isinstance(self.square, SurdValue):
            if self.square.is_rational:
                return [(Fraction(self.sign), self.square.p)] if self.sign else []
            raise InvalidParams(
                "RootValue over a surd square has no flat term representation"
            )
        return [(Fraction(self.sign), self.square)] if self.sign else []

    def as_rational(self) -> Fraction | None:
        """Exact rational value if the root is rational, else None."""
        sq = self.square
        if isinstance(sq, SurdValue):
            if not sq.is_rational:
                return None
            sq = sq.p
        rn, rd = isqrt(sq.numerator), isqrt(sq.denominator)
        if rn * rn == sq.numerator and rd * rd == sq.denominator:
            return Fraction(self.sign) * Fraction(rn, rd)
        return None

    def scale(self, c: Rational) -> "RootValue":
        c = Fraction(c)
        if c == 0 or self.sign == 0:
            return RootValue(0, 0)
        s = self.sign * _sign(c)
        return RootValue(s, self.square * c * c)

    def __neg__(self) -> "RootValue":
        return RootValue(-self.sign, self.square) if self.sign else self

    def _cmp(self, other) -> int:
        o = RootValue.from_value(other)
        if self.sign != o.sign:
            return 1 if self.sign > o.sign else -1
        if self.sign == 0:
            return 0
        d = _square_terms(self.square) + [
            (-c, r) for c, r in _square_terms(o.square)
        ]
        s = surd_sign(d)
        return s if self.sign > 0 else -s

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (RootValue, SurdValue, int, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __hash__(self):
        r = self.as_rational()
        if r is not None:
            return hash(r)
        sq = self.square
        key = (sq.p, sq.q, sq.v) if isinstance(sq, SurdValue) else sq
        return hash((self.sign, key))

    def __float__(self) -> float:
        return self.sign * float(self.square) ** 0.5

    def __repr__(self) -> str:
        pre = "-" if self.sign < 0 else ""
        return f"RootValue({pre}sqrt({self.square!r}))"


def exact_cmp(a, b) -> int:
    """Exact three-way comparison of any two supported exact values."""
    return RootValue.from_value(a)._cmp(b)


def as_surd(x) -> SurdValue:
    """Flatten an exact value into a SurdValue (p + q*sqrt(k)).

    RootValue inputs must have rational squares; sqrt(num/den) is rewritten
    as sqrt(num*den)/den so the radicand canonicalizes to a squarefree int.
    """
    if isinstance(x, (int, Fraction)):
        return SurdValue(x)
    if isinstance(x, SurdValue):
        return x
    if isinstance(x, RootValue):
        if x.sign == 0:
            return SurdValue(0)
        sq = x.square
        if isinstance(sq, SurdValue):
            if not sq.is_rational:
                raise InvalidParams("cannot flatten a nested root to a SurdValue")
            sq = sq.p
        s, k = squarefree_decompose(sq.numerator * sq.denominator)
        return SurdValue(0, Fraction(x.sign * s, sq.denominator), k)
    raise InvalidParams(f"cannot interpret {x!r} as a SurdValue")


def root_min(a: RootValue, b: RootValue) -> RootValue:
    return a if a._cmp(b) <= 0 else b


def root_max(a: RootValue, b: RootValue) -> RootValue:
    return a if a._cmp(b) >= 0 else b
