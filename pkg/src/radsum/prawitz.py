"""Rigorous Gaussian-comparison bounds for normalized Rademacher sums.

Let X = sum(a_i x_i) with unit variance and largest weight a1, and let Z
be standard normal.  For any T > 0 and q in [0, 1],

    Pr[Z < x] - Pr[X < x]  <=  S1 + S2 + S3 + S4,

where, writing k(u) for the smoothing kernel and g, h for envelopes of
the characteristic function of X,

    S1 = integral_0^q |k(u)| g(Tu) du,
    S2 = integral_q^1 |k(u)| h(Tu) du,
    S3 = integral_0^q k(u) exp(-(Tu)^2 / 2) du   (signed),
    S4 = Phi(x) - 1/2.

Every integral is enclosed by midpoint panels plus a derivative-based
remainder (``numerics.rigorous_integrate`` semantics, with the panel
loop delegated to the compiled backend), so ``prawitz_bound`` returns a
``RigorousValue`` whose upper edge is a mathematically valid bound up to
floating-point slack that is folded into the radius.

The module also packages three standing verifications used by the case
analysis: the bound at (a1, x, T, q) = (0.31, 1, 10, 0.4), a 94-point
grid of x values whose consecutive Gaussian gaps stay under a fixed
threshold, and the piecewise argument for a1 = 0.22.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

from . import _backend
from ._surd import frac
from .core import WeightVector
from .errors import InvalidParams, MarginViolated, NonpositiveT
from .numerics import THETA, RigorousValue, _slack, gauss_cdf

__all__ = [
    "PrawitzParams",
    "CheckItem",
    "VerificationReport",
    "SequenceReport",
    "SEQUENCE_X",
    "phi_X",
    "prawitz_kernel",
    "g_envelope",
    "h_envelope",
    "kernel_bound",
    "prawitz_bound",
    "prawitz_terms",
    "verify_prop_031",
    "verify_prop_022",
    "verify_sequence_93",
]

_TARGET = 1e-6


@dataclass(frozen=True)
class PrawitzParams:
    """Parameters of the comparison bound.

    ``a1`` is the largest normalized weight (rational, in (0, 1)); ``x``
    is the evaluation point; ``T`` the cutoff frequency; ``q`` the split
    point of the frequency range.  ``target`` is the enclosure-radius
    budget per integral; ``n1``/``n2``/``n3`` override the automatic
    panel counts of S1/S2/S3 when set (spread across the branch pieces).
    """

    a1: Fraction
    x: float
    T: float
    q: float
    target: float = _TARGET
    n1: Optional[int] = None
    n2: Optional[int] = None
    n3: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "a1", frac(self.a1))
        if not (0 < self.a1 < 1):
            raise InvalidParams(f"a1 must lie in (0, 1), got {self.a1}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise NonpositiveT(f"T must be positive, got {self.T}")
        if not (math.isfinite(self.x) and self.x >= 0):
            raise InvalidParams(f"x must be finite and >= 0, got {self.x}")
        if not (0.0 <= self.q <= 1.0):
            raise InvalidParams(f"q must lie in [0, 1], got {self.q}")
        if not (math.isfinite(self.target) and self.target > 0):
            raise InvalidParams(f"target must be positive, got {self.target}")
        for n in (self.n1, self.n2, self.n3):
            if n is not None and n < 1:
                raise InvalidParams("panel overrides must be >= 1")

    @property
    def a1_float(self) -> float:
        return self.a1.numerator / self.a1.denominator


def phi_X(w: Union[WeightVector, Sequence], t: float) -> float:
    """Characteristic function of the normalized sum: prod cos(a_i t / sqrt(V))."""
    if not isinstance(w, WeightVector):
        w = WeightVector(w)
    root_v = math.sqrt(float(w.variance))
    out = 1.0
    for a in w.weights:
        out *= math.cos(float(a) / root_v * t)
    return out


def prawitz_kernel(u: float, x: float, T: float) -> float:
    """Smoothing kernel k(u) = (1-u) sin(pi u - Tux)/sin(pi u) - sin(Tux)/pi.

    Defined on [0, 1] with continuous limits k(0) = 1 - Tx/pi and
    k(1) = 0 (the first term tends to sin(Tx)/pi as u -> 1).
    """
    if not (0.0 <= u <= 1.0):
        raise InvalidParams(f"u must lie in [0, 1], got {u}")
    if u == 0.0:
        return 1.0 - T * x / math.pi
    if u == 1.0:
        return 0.0
    s = math.sin(math.pi * min(u, 1.0 - u))
    return (1.0 - u) * math.sin(math.pi * u - T * u * x) / s - math.sin(T * u * x) / math.pi


def kernel_bound(x: float, T: float) -> float:
    """Uniform bound on |k(u)| over [0, 1]: 1 + 2Tx/pi."""
    return 1.0 + 2.0 * T * x / math.pi


def _kernel_slope_bound(x: float, T: float) -> float:
    # |dk/du| <= (Tx)^2/(2 pi) + pi on [0, 1]
    return (T * x) ** 2 / (2.0 * math.pi) + math.pi


def g_envelope(v: float, a1: float) -> float:
    """Envelope of |phi_X(v) - exp(-v^2/2)| for largest weight a1, at v >= 0."""
    if v < 0:
        raise InvalidParams("v must be >= 0")
    gauss = math.exp(-0.5 * v * v)
    if a1 * v <= math.pi / 2.0:
        return gauss - math.cos(a1 * v) ** (1.0 / (a1 * a1))
    return gauss + 1.0


def h_envelope(v: float, a1: float) -> float:
    """Envelope of |phi_X(v)| for largest weight a1, at v >= 0."""
    if v < 0:
        raise InvalidParams("v must be >= 0")
    y = a1 * v
    if y <= THETA:
        return math.exp(-0.5 * v * v)
    if y <= math.pi:
        return (-math.cos(y)) ** (1.0 / (a1 * a1))
    return 1.0


# (envelope sup, envelope slope sup in v) per integrand code, conservative
# over the branch where the code applies; |d exp(-v^2/2)/dv| <= 0.61.
_ENV_BOUNDS = {
    _backend.CODE_KG1: (1.1, 1.0),
    _backend.CODE_KG2: (2.0, 1.0),
    _backend.CODE_KH1: (1.0, 1.0),
    _backend.CODE_KH2: (1.0, 1.0),
    _backend.CODE_KH3: (1.0, 0.0),
    _backend.CODE_KGAUSS: (1.0, 2.0 / 3.0),
}


def _deriv_bound(code: int, x: float, T: float) -> float:
    # |d/du [k(u) env(Tu)]| <= K1 * sup|env| + K0 * T * sup|env'|, padded
    k0 = kernel_bound(x, T)
    k1 = _kernel_slope_bound(x, T)
    env_sup, slope_sup = _ENV_BOUNDS[code]
    return (k1 * env_sup + k0 * T * slope_sup) * 1.01


class _Piece(NamedTuple):
    lo: float
    hi: float
    code: int


def _clip_pieces(lo: float, hi: float, cuts: Sequence[float], codes: Sequence[int]) -> List[_Piece]:
    # split [lo, hi] at the interior cut points; codes has len(cuts) + 1 entries
    out: List[_Piece] = []
    edges = [lo] + [c for c in cuts if lo < c < hi] + [hi]
    idx = 0
    for a, b in zip(edges, edges[1:]):
        while idx < len(cuts) and cuts[idx] <= a:
            idx += 1
        if b > a:
            out.append(_Piece(a, b, codes[idx]))
    return out


def _pieces_s1(q: float, a1T: float) -> List[_Piece]:
    if q <= 0.0:
        return []
    cut = math.pi / (2.0 * a1T)
    return _clip_pieces(0.0, q, [cut], [_backend.CODE_KG1, _backend.CODE_KG2])


def _pieces_s2(q: float, a1T: float) -> List[_Piece]:
    if q >= 1.0:
        return []
    cuts = [THETA / a1T, math.pi / a1T]
    codes = [_backend.CODE_KH1, _backend.CODE_KH2, _backend.CODE_KH3]
    return _clip_pieces(q, 1.0, cuts, codes)


def _pieces_s3(q: float) -> List[_Piece]:
    if q <= 0.0:
        return []
    return [_Piece(0.0, q, _backend.CODE_KGAUSS)]


def _integrate_piece(
    piece: _Piece, params: PrawitzParams, target: float, n_override: Optional[int]
) -> RigorousValue:
    length = piece.hi - piece.lo
    if length <= 0.0:
        return RigorousValue(0.0, 0.0)
    bound = _deriv_bound(piece.code, params.x, params.T)
    if n_override is not None:
        n = n_override
    else:
        n = max(1, math.ceil(bound * length * length / (4.0 * target)))
    h0 = length / n
    if piece.lo + 0.5 * h0 <= piece.lo or piece.hi - 0.5 * h0 >= piece.hi:
        # panel width underflows: enclose by sup|k * env| * length instead
        env_sup = _ENV_BOUNDS[piece.code][0]
        coarse = kernel_bound(params.x, params.T) * env_sup * length * 1.01
        return RigorousValue(0.0, coarse)
    total, total_abs = _backend.panel_sums(
        piece.lo, piece.hi, n, piece.code, params.a1_float, params.x, params.T
    )
    h = length / n
    mid = total * h
    rad = bound * length * length / (4.0 * n)
    eps = math.ulp(1.0)
    slack = 4.0 * eps * total_abs * h + 2.0 * _slack(mid)
    return RigorousValue(mid, rad + slack)


def _integral(pieces: List[_Piece], params: PrawitzParams, n_override: Optional[int]) -> RigorousValue:
    if not pieces:
        return RigorousValue(0.0, 0.0)
    target = params.target / len(pieces)
    per_piece = None
    if n_override is not None:
        per_piece = max(1, n_override // len(pieces))
    out = RigorousValue(0.0, 0.0)
    for piece in pieces:
        out = out + _integrate_piece(piece, params, target, per_piece)
    return out


@functools.lru_cache(maxsize=1024)
def _terms_cached(params: PrawitzParams) -> Tuple[RigorousValue, ...]:
    a1T = params.a1_float * params.T
    s1 = _integral(_pieces_s1(params.q, a1T), params, params.n1)
    s2 = _integral(_pieces_s2(params.q, a1T), params, params.n2)
    s3 = _integral(_pieces_s3(params.q), params, params.n3)
    s4 = RigorousValue(gauss_cdf(params.x) - 0.5, 1e-12)
    return s1, s2, s3, s4


def prawitz_terms(params: PrawitzParams) -> Tuple[RigorousValue, ...]:
    """The four enclosed summands (S1, S2, S3, S4) of the bound."""
    return _terms_cached(params)


def prawitz_bound(params: PrawitzParams, rigorous: bool = True) -> RigorousValue:
    """Enclosure of S1 + S2 + S3 + S4; its ``hi`` bounds Pr[Z < x] - Pr[X < x].

    With ``rigorous=False`` the same midpoint sums are computed but the
    radius is dropped (mid only, radius 0); that mode is for exploration
    and carries no guarantee.
    """
    s1, s2, s3, s4 = _terms_cached(params)
    total = s1 + s2 + s3 + s4
    if rigorous:
        return total
    return RigorousValue(total.mid, 0.0)


class CheckItem(NamedTuple):
    label: str
    ok: bool
    value: float


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one standing verification: named checks with values."""

    name: str
    checks: Tuple[CheckItem, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def summary(self) -> str:
        lines = [f"[{'PASS' if c.ok else 'FAIL'}] {self.name}.{c.label}: {c.value:.8g}" for c in self.checks]
        return "\n".join(lines)


def _params_031(a1: Fraction = Fraction(31, 100)) -> PrawitzParams:
    return PrawitzParams(a1=a1, x=1.0, T=10.0, q=0.4)


def _params_022(x: float) -> PrawitzParams:
    return PrawitzParams(a1=Fraction(22, 100), x=x, T=14.5, q=0.4)


def verify_prop_031() -> VerificationReport:
    """Bound at (0.31, 1, 10, 0.4) and its two probability consequences.

    The enclosure must sit below 0.09115 (reference midpoint 0.09114), so
    any unit-variance sum with largest weight <= 0.31 has
    Pr[X < 1] >= 0.7501 and Pr[|X| < 1] >= 0.5002.  A monotonicity probe
    at a1 = 0.30 confirms the bound only improves for smaller a1.
    """
    bound = prawitz_bound(_params_031())
    p_lt = gauss_cdf(1.0) - bound.hi - 1e-12
    bound_30 = prawitz_bound(_params_031(Fraction(30, 100)))
    checks = (
        CheckItem("bound_hi_le_0.09115", bound.hi <= 0.09115, bound.hi),
        CheckItem("bound_mid_near_0.09114", abs(bound.mid - 0.09114) <= 1e-5, bound.mid),
        CheckItem("pr_lt_1_ge_0.7501", p_lt >= 0.7501, p_lt),
        CheckItem("pr_abs_lt_1_ge_0.5002", 2.0 * p_lt - 1.0 >= 0.5002, 2.0 * p_lt - 1.0),
        CheckItem("monotone_in_a1", bound_30.mid <= bound.mid and bound_30.lo <= bound.hi, bound_30.mid),
    )
    return VerificationReport("prop_031", checks)


# x grid for the a1 = 0.22 argument: consecutive Gaussian gaps plus the
# bound at the left endpoint stay below the threshold on [0.35, 1.65].
SEQUENCE_X: Tuple[float, ...] = (
    0.35, 0.358, 0.366, 0.374, 0.38, 0.386, 0.39, 0.395, 0.399, 0.403,
    0.406, 0.409, 0.412, 0.415, 0.417, 0.419, 0.421, 0.423, 0.425, 0.427,
    0.428, 0.429, 0.43, 0.431, 0.432, 0.433, 0.434, 0.435, 0.436, 0.437,
    0.438, 0.439, 0.44, 0.441, 0.442, 0.443, 0.444, 0.445, 0.446, 0.447,
    0.448, 0.449, 0.45, 0.451, 0.452, 0.453, 0.454, 0.455, 0.456, 0.457,
    0.458, 0.459, 0.46, 0.461, 0.462, 0.463, 0.464, 0.466, 0.468, 0.47,
    0.472, 0.474, 0.476, 0.478, 0.481, 0.484, 0.487, 0.49, 0.494, 0.499,
    0.504, 0.51, 0.517, 0.526, 0.537, 0.55, 0.567, 0.589, 0.61, 0.63,
    0.65, 0.67, 0.69, 0.71, 0.73, 0.76, 0.8, 0.85, 0.91, 0.98,
    1.07, 1.2, 1.38, 1.65,
)


@dataclass(frozen=True)
class SequenceReport:
    """Margins of the pairwise checks over the x grid."""

    threshold: float
    pair_count: int
    min_margin: float
    argmin_index: int
    endpoint_bound_hi: float
    endpoint_tail_margin: float

    @property
    def ok(self) -> bool:
        return self.min_margin >= 0.0 and self.endpoint_tail_margin >= 0.0


def verify_sequence_93(
    threshold: float = 0.084,
    *,
    limit: Optional[int] = None,
    min_margin: float = 2e-5,
    progress: Optional[Callable[[int, int, float], None]] = None,
) -> SequenceReport:
    """Check every consecutive pair of the 94-value x grid.

    For pair (x_i, x_{i+1}) the requirement is

        Phi(x_{i+1}) - Phi(x_i) + PrawitzBound(0.22, x_i, 14.5, 0.4) < threshold

    with margin at least ``min_margin``; a violation raises
    ``MarginViolated`` carrying the failing pair index.  ``limit`` caps
    the number of pairs (smoke testing); the closing tail check at
    x = 1.65 runs only on a full pass.
    """
    n_pairs = len(SEQUENCE_X) - 1
    if limit is not None:
        n_pairs = min(n_pairs, limit)
    best = math.inf
    best_idx = -1
    for i in range(n_pairs):
        xi, xj = SEQUENCE_X[i], SEQUENCE_X[i + 1]
        bound = prawitz_bound(_params_022(xi))
        gap = gauss_cdf(xj) - gauss_cdf(xi) + 2e-12
        margin = threshold - (gap + bound.hi)
        if margin < best:
            best = margin
            best_idx = i
        if progress is not None:
            progress(i, n_pairs, margin)
        if margin < min_margin:
            raise MarginViolated(i, f"pair {i} at x={xi}: margin {margin:.3e} < {min_margin:.1e}")
    endpoint_hi = math.nan
    tail_margin = math.nan
    if limit is None:
        bound_end = prawitz_bound(_params_022(SEQUENCE_X[-1]))
        endpoint_hi = bound_end.hi
        # beyond the last grid point: Phi(x) - Phi(1.65) <= 1 - Phi(1.65),
        # so the deficit is at most the tail mass plus the endpoint bound
        tail_margin = threshold - ((1.0 - gauss_cdf(SEQUENCE_X[-1])) + bound_end.hi + 1e-12)
        if not (endpoint_hi < 0.0314):
            raise MarginViolated(n_pairs, f"endpoint bound {endpoint_hi:.6f} not below 0.0314")
        if tail_margin < 0.0:
            raise MarginViolated(n_pairs, f"tail margin {tail_margin:.3e} negative")
    return SequenceReport(
        threshold=threshold,
        pair_count=n_pairs,
        min_margin=best,
        argmin_index=best_idx,
        endpoint_bound_hi=endpoint_hi,
        endpoint_tail_margin=tail_margin,
    )


def _aux_gap(x: float) -> float:
    # [1/2 + (Phi(2x) - 0.584)/3] - [Phi(x) - 0.084]: nonnegative means the
    # three-point lower bound covers the Gaussian target at x
    return 0.5 + (gauss_cdf(2.0 * x) - 0.584) / 3.0 - (gauss_cdf(x) - 0.084)


def verify_prop_022(x: float) -> VerificationReport:
    """Piecewise check that Pr[X <= x] >= Phi(x) - max(0.084, Phi(0.22) - 1/2).

    Branches: tiny x (probability >= 1/2 already suffices), the window
    [0.2, 0.35] via a three-point inequality that worsens toward 0.35,
    the grid of ``verify_sequence_93`` on [0.35, 1.65), and the Gaussian
    tail beyond 1.65.
    """
    if not (math.isfinite(x) and x >= 0):
        raise InvalidParams(f"x must be finite and >= 0, got {x}")
    checks: List[CheckItem]
    if x <= 0.2:
        checks = [
            CheckItem("phi_le_0.584", gauss_cdf(x) <= 0.584, gauss_cdf(x)),
        ]
        name = "prop_022[x<=0.2]"
    elif x < 0.22:
        slack = (gauss_cdf(0.22) - 0.5) - (gauss_cdf(x) - 0.5)
        checks = [
            CheckItem("below_a1", slack >= 0.0, slack),
        ]
        name = "prop_022[x<a1]"
    elif x <= 0.35:
        worst = min(_aux_gap(0.2 + 0.001 * i) for i in range(151))
        checks = [
            CheckItem("aux_gap_at_x", _aux_gap(x) >= 0.0, _aux_gap(x)),
            CheckItem("aux_gap_at_0.35", _aux_gap(0.35) >= 0.0, _aux_gap(0.35)),
            CheckItem("aux_gap_min_on_window", worst >= 0.0, worst),
        ]
        name = "prop_022[aux]"
    elif x < SEQUENCE_X[-1]:
        idx = 0
        while SEQUENCE_X[idx + 1] <= x:
            idx += 1
        xi, xj = SEQUENCE_X[idx], SEQUENCE_X[idx + 1]
        bound = prawitz_bound(_params_022(xi))
        margin = 0.084 - (gauss_cdf(xj) - gauss_cdf(xi) + 2e-12 + bound.hi)
        checks = [
            CheckItem(f"pair_{idx}_margin", margin >= 2e-5, margin),
        ]
        name = "prop_022[grid]"
    else:
        bound_end = prawitz_bound(_params_022(SEQUENCE_X[-1]))
        tail = (1.0 - gauss_cdf(SEQUENCE_X[-1])) + bound_end.hi + 1e-12
        checks = [
            CheckItem("endpoint_bound_lt_0.0314", bound_end.hi < 0.0314, bound_end.hi),
            CheckItem("tail_le_0.084", tail <= 0.084, tail),
        ]
        name = "prop_022[tail]"
    return VerificationReport(name, tuple(checks))
