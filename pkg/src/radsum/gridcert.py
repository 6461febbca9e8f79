"""Lipschitz-grid certification of global bounds over box domains.

A ``GridSpec`` bundles an axis-aligned box, a finite covering net, a
Lipschitz constant ``C``, and two bounds.  If every net point evaluates
to at most ``pointwise_bound`` and the net's covering radius ``r``
satisfies ``pointwise_bound + C*r <= target_bound``, then the function
is at most ``target_bound`` everywhere on the box.  Both invariants are
checked in exact rational arithmetic before any evaluation happens.
"""

from __future__ import annotations

import csv
import functools
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Tuple

import mpmath

from .errors import InvalidParams, InvalidPoint, NetTooCoarse, PointwiseViolated
from .numerics import gauss_cdf

__all__ = [
    "AxisNet",
    "GridPoint",
    "GridReport",
    "GridSpec",
    "GradBoundReport",
    "default_grid_spec",
    "f_31a3s",
    "grad_bound_check",
    "grid_verify",
]

GridPoint = Tuple[float, ...]

# Fixed nets stay auditable; anything past 3-D is out of scope here.
_MAX_DIM = 3


@dataclass(frozen=True)
class AxisNet:
    """Arithmetic progression ``start + step*l`` for ``0 <= l < count``."""

    start: Fraction
    step: Fraction
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise InvalidParams("axis net needs at least one point")
        if self.count > 1 and self.step <= 0:
            raise InvalidParams("axis net step must be positive")

    @property
    def last(self) -> Fraction:
        return self.start + self.step * (self.count - 1)

    def points(self) -> Iterator[Fraction]:
        for ell in range(self.count):
            yield self.start + self.step * ell


@dataclass(frozen=True)
class GridSpec:
    """A box domain, a covering net, and the bound chain to certify."""

    domain: Tuple[Tuple[Fraction, Fraction], ...]
    net: Tuple[AxisNet, ...]
    spacing: Fraction
    lipschitz: float
    pointwise_bound: float
    target_bound: float

    @property
    def dim(self) -> int:
        return len(self.domain)

    def covering_radius(self) -> float:
        """Euclidean covering radius spacing*sqrt(dim)/2 (spacing/sqrt(2) in 2-D)."""
        return math.sqrt(self.dim * float(self.spacing) ** 2) / 2.0

    def validate(self) -> None:
        """Check the covering and margin invariants in exact arithmetic."""
        if not 1 <= self.dim <= _MAX_DIM:
            raise InvalidParams(f"grid dimension must be between 1 and {_MAX_DIM}")
        if len(self.net) != self.dim:
            raise InvalidParams("net must supply one axis per domain axis")
        if self.spacing <= 0:
            raise InvalidParams("spacing must be positive")
        half = Fraction(self.spacing) / 2
        for (lo, hi), axis in zip(self.domain, self.net):
            if lo > hi:
                raise InvalidParams("domain axis has lo > hi")
            if axis.count > 1 and axis.step > self.spacing:
                raise NetTooCoarse(
                    f"axis step {axis.step} exceeds declared spacing {self.spacing}"
                )
            if axis.start > lo + half or axis.last < hi - half:
                raise NetTooCoarse(
                    "net does not cover the domain axis to within spacing/2"
                )
        # Need pointwise + C*spacing*sqrt(dim)/2 <= target; compare squares
        # so the sqrt never enters the arithmetic.
        margin = Fraction(self.target_bound) - Fraction(self.pointwise_bound)
        radius_sq = Fraction(self.spacing) ** 2 * self.dim / 4
        if margin < 0 or Fraction(self.lipschitz) ** 2 * radius_sq > margin**2:
            raise NetTooCoarse(
                "pointwise bound plus Lipschitz slack exceeds the target bound"
            )


@dataclass(frozen=True)
class GridReport:
    """Outcome of a full net evaluation that stayed under the pointwise bound."""

    max_value: float
    argmax: GridPoint
    points_checked: int
    covering_radius: float
    pointwise_bound: float
    target_bound: float
    row_maxima: Tuple[Tuple[float, float], ...]

    def to_csv(self, path) -> None:
        """Write one (first coordinate, slice maximum) row per net slice."""
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["axis0", "row_max"])
            for coord, value in self.row_maxima:
                writer.writerow([repr(coord), repr(value)])


def _row_max(
    f: Callable[..., float], g: GridSpec, i0: int
) -> Tuple[float, GridPoint, int]:
    """Maximum of f over the net slice with first-axis index i0."""
    x0 = float(g.net[0].start + g.net[0].step * i0)
    rest = [tuple(float(x) for x in axis.points()) for axis in g.net[1:]]
    best = -math.inf
    arg: GridPoint = ()
    count = 0
    for tail in itertools.product(*rest):
        point = (x0, *tail)
        value = f(*point)
        count += 1
        if value > best:
            best, arg = value, point
    return best, arg, count


def grid_verify(f: Callable[..., float], g: GridSpec, jobs: int = 1) -> GridReport:
    """Evaluate f at every net point and certify the pointwise bound.

    Raises NetTooCoarse if the spec's covering or margin invariant fails,
    and PointwiseViolated (with the witnessing point) if any net value
    exceeds g.pointwise_bound.  Ties in the maximum resolve to the first
    net point in row-major order, so reports are deterministic.
    """
    g.validate()
    rows = range(g.net[0].count)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            row_results = list(pool.map(functools.partial(_row_max, f, g), rows))
    else:
        row_results = [_row_max(f, g, i0) for i0 in rows]
    best = -math.inf
    arg: GridPoint = ()
    total = 0
    row_maxima: List[Tuple[float, float]] = []
    for i0, (value, point, count) in zip(rows, row_results):
        total += count
        row_maxima.append((float(g.net[0].start + g.net[0].step * i0), value))
        if value > best:
            best, arg = value, point
    if best > g.pointwise_bound:
        raise PointwiseViolated(arg, best)
    return GridReport(
        max_value=best,
        argmax=arg,
        points_checked=total,
        covering_radius=g.covering_radius(),
        pointwise_bound=g.pointwise_bound,
        target_bound=g.target_bound,
        row_maxima=tuple(row_maxima),
    )


def f_31a3s(a1: float, a2: float) -> float:
    """Sum of the four Gaussian tails Pr[Z > (1 +- a1 +- a2)/sigma].

    Here sigma^2 = 1 - a1^2 - a2^2 is the residual variance once the two
    leading weights are conditioned on, so the point must satisfy
    a1^2 + a2^2 < 1.
    """
    ss = a1 * a1 + a2 * a2
    if not ss < 1.0:
        raise InvalidPoint(f"need a1^2 + a2^2 < 1, got {ss}")
    sigma = math.sqrt(1.0 - ss)
    total = 0.0
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            total += 1.0 - gauss_cdf((1.0 + s1 * a1 + s2 * a2) / sigma)
    return total


def default_grid_spec() -> GridSpec:
    """The 211-points-per-axis net certifying f_31a3s <= 0.664 on [0.19, 0.5]^2."""
    step = Fraction(15, 10_000)
    axis = AxisNet(start=Fraction(185, 1_000), step=step, count=211)
    box = (Fraction(19, 100), Fraction(1, 2))
    return GridSpec(
        domain=(box, box),
        net=(axis, axis),
        spacing=step,
        lipschitz=4.0,
        pointwise_bound=0.6597,
        target_bound=0.664,
    )


@dataclass(frozen=True)
class GradBoundReport:
    """Certified pieces of the Lipschitz bound for f_31a3s."""

    inner_argmax: float
    inner_max: float
    partial_bound: float
    gradient_bound: float
    fd_max: float
    ok: bool


def grad_bound_check(probes: int = 9) -> GradBoundReport:
    """Certify the Lipschitz constant 4 used by default_grid_spec.

    Chain of bounds: each |df/da_i| is at most (4/sqrt(2*pi)) times the
    maximum of h(T) = exp(-T^2/2) * (T + sqrt(2)).  Since h'(T) has the
    sign of 1 - T^2 - sqrt(2)*T, a downward parabola with a single
    positive root, h peaks exactly at T* = (sqrt(6) - sqrt(2))/2; the
    peak is below 1.69, hence |df/da_i| < 2.7 and the Euclidean gradient
    norm is below sqrt(2) * 2.7 < 4.  Finite-difference probes on the
    domain must stay below the analytic per-coordinate bound.
    """
    if probes < 2:
        raise InvalidParams("need at least two probe coordinates per axis")
    with mpmath.workdps(60):
        t_star = (mpmath.sqrt(6) - mpmath.sqrt(2)) / 2
        residual = abs(1 - t_star * t_star - mpmath.sqrt(2) * t_star)
        if residual > mpmath.mpf("1e-50"):
            raise ArithmeticError("stationary point residual too large")
        peak = mpmath.exp(-t_star * t_star / 2) * (t_star + mpmath.sqrt(2))
        for k in range(-500, 1001):
            t = mpmath.mpf(k) / 100
            value = mpmath.exp(-t * t / 2) * (t + mpmath.sqrt(2))
            if value > peak + mpmath.mpf("1e-40"):
                raise ArithmeticError(f"scan beats the stationary value at T={t}")
        inner_argmax = float(t_star)
        inner_max = float(peak)
        partial_bound = float(4 / mpmath.sqrt(2 * mpmath.pi) * peak)
    gradient_bound = math.sqrt(2.0) * 2.7
    ok = inner_max < 1.69 and partial_bound < 2.7 and gradient_bound < 4.0

    lo, hi = 0.19, 0.5
    h = 1e-6
    coords = [lo + (hi - lo) * k / (probes - 1) for k in range(probes)]
    fd_max = 0.0
    for a1 in coords:
        for a2 in coords:
            d1 = abs(f_31a3s(a1 + h, a2) - f_31a3s(a1 - h, a2)) / (2 * h)
            d2 = abs(f_31a3s(a1, a2 + h) - f_31a3s(a1, a2 - h)) / (2 * h)
            fd_max = max(fd_max, d1, d2)
    ok = ok and fd_max <= partial_bound
    return GradBoundReport(
        inner_argmax=inner_argmax,
        inner_max=inner_max,
        partial_bound=partial_bound,
        gradient_bound=gradient_bound,
        fd_max=fd_max,
        ok=ok,
    )
