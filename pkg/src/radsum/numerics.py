"""Rigorous scalar numerics: enclosed integration, Gaussian CDF, theta root.

RigorousValue carries a midpoint and an error radius and rounds every
operation outward by a small ulp-based slack, so that the represented
interval always contains the true value.  The midpoint Riemann rule with
a first-derivative bound B encloses an integral within B(b-a)^2/(4N);
that radius, plus accumulated rounding slack, is what the rigorous
pipelines budget against their margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from .errors import InvalidBounds, InvalidParams

__all__ = [
    "RigorousValue",
    "rigorous_integrate",
    "gauss_cdf",
    "theta_root",
    "THETA",
]

# Outward slack added per elementary operation, in units in the last place
# of the midpoint.  Generous relative to 0.5-ulp IEEE rounding.
_ULPS = 4


def _slack(x: float) -> float:
    if x == 0.0:
        return _ULPS * math.ulp(0.0)
    return _ULPS * math.ulp(abs(x))


@dataclass(frozen=True)
class RigorousValue:
    """Interval [mid - rad, mid + rad] with outward-conservative arithmetic."""

    mid: float
    rad: float

    def __post_init__(self):
        if not math.isfinite(self.mid) or not math.isfinite(self.rad):
            raise InvalidParams("RigorousValue components must be finite")
        if self.rad < 0:
            raise InvalidParams("radius must be nonnegative")

    @classmethod
    def exact(cls, x: Union[int, float]) -> "RigorousValue":
        return cls(float(x), 0.0)

    @property
    def lo(self) -> float:
        return self.mid - self.rad

    @property
    def hi(self) -> float:
        return self.mid + self.rad

    def __add__(self, other) -> "RigorousValue":
        o = _coerce(other)
        mid = self.mid + o.mid
        return RigorousValue(mid, self.rad + o.rad + _slack(mid))

    __radd__ = __add__

    def __neg__(self) -> "RigorousValue":
        return RigorousValue(-self.mid, self.rad)

    def __sub__(self, other) -> "RigorousValue":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RigorousValue":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "RigorousValue":
        o = _coerce(other)
        mid = self.mid * o.mid
        rad = (
            abs(self.mid) * o.rad
            + abs(o.mid) * self.rad
            + self.rad * o.rad
            + _slack(mid)
        )
        return RigorousValue(mid, rad)

    __rmul__ = __mul__

    def scale(self, c: float) -> "RigorousValue":
        mid = self.mid * c
        return RigorousValue(mid, self.rad * abs(c) + _slack(mid))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __le__(self, bound: float) -> bool:
        """Certainly at most: the whole interval lies at or below bound."""
        return self.hi <= bound

    def __lt__(self, bound: float) -> bool:
        return self.hi < bound

    def __repr__(self) -> str:
        return f"RigorousValue({self.mid!r} +- {self.rad!r})"


def _coerce(x) -> RigorousValue:
    if isinstance(x, RigorousValue):
        return x
    if isinstance(x, (int, float)):
        return RigorousValue.exact(x)
    raise InvalidParams(f"cannot coerce {x!r} to RigorousValue")


def rigorous_integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    B: float,
    N: int,
) -> RigorousValue:
    """Enclose the integral of f over [a, b] by N midpoint panels.

    Requires |f'| <= B on (a, b).  The enclosure radius is B(b-a)^2/(4N)
    plus rounding slack proportional to the number of evaluations; the
    caller chooses N to meet its error target.
    """
    if b < a:
        raise InvalidBounds("need a <= b")
    if B < 0:
        raise InvalidBounds("derivative bound must be nonnegative")
    if N < 1:
        raise InvalidParams("need at least one panel")
    if a == b:
        return RigorousValue(0.0, 0.0)
    length = b - a
    h = length / N
    total = math.fsum(f(a + (k + 0.5) * h) for k in range(N))
    mid = total * h
    rad = B * length * length / (4.0 * N)
    # rounding slack: _ULPS relative units per evaluation, plus the final
    # products; fsum itself is exactly rounded
    eps = math.ulp(1.0)
    slack = _ULPS * eps * N * abs(mid) + 2 * _slack(mid)
    return RigorousValue(mid, rad + slack)


_SQRT_HALF = math.sqrt(0.5)


def gauss_cdf(x: float) -> float:
    """Standard normal CDF, absolute error well below 1e-12."""
    if not math.isfinite(x):
        raise InvalidParams("gauss_cdf needs finite x")
    return 0.5 * math.erfc(-x * _SQRT_HALF)


def _theta_fn(y: float) -> float:
    return math.exp(-y * y / 2.0) + math.cos(y)


def theta_root(tol: float = 1e-10) -> float:
    """Unique root of exp(-y^2/2) + cos(y) in [0, pi], by bisection."""
    lo, hi = 0.0, math.pi
    if not (_theta_fn(lo) > 0 > _theta_fn(hi)):
        raise ArithmeticError("bracketing failed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _theta_fn(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


THETA = 1.7780882886686339  # theta_root() to double precision
