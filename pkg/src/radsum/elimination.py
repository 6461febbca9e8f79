"""Variable elimination for Rademacher sums.

Conditioning on the signs of the ``m`` largest weights splits the upper
tail of ``X = sum a_i x_i`` (variance ``V``) into ``2^m`` tail events of
the remaining sum: writing ``N_j`` for the signed head sum under bit
pattern ``j``,

    2^m * Pr[X > sqrt(V)] = sum_j Pr[X_tail > sqrt(V) - N_j].

Thresholds are stored in the scale of the raw tail sum, as elements of
Q[sqrt(V)], so all threshold comparisons stay exact.  The conventional
normalized threshold ``T_j`` is the stored cut point divided by
``sqrt(V')`` where ``V'`` is the residual variance; ``T_j >= c`` is
decided exactly by comparing the cut point against ``c * sqrt(V')``.

Bit convention: bit ``i`` (1-indexed from the largest weight) of pattern
``j`` is ``floor(j / 2^(m-i)) mod 2``; bit 0 contributes ``+a_i`` to
``N_j`` and bit 1 contributes ``-a_i``.  Pattern ``j = 0`` therefore
gives the smallest threshold and ``j = 2^m - 1`` the largest.

The module also provides the two- and three-variable cut-point families
used by the case analysis, the rank-two witness construction behind the
semi-inductive argument, and the exact bound battery for five-variable
elimination on the region ``a_1 <= 0.387``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple, Union

from ._surd import (
    RootValue,
    SurdValue,
    as_surd,
    exact_cmp,
    frac,
    surd_sign,
)
from .core import WeightVector
from .errors import (
    DegenerateInterval,
    IdentityMismatch,
    InvalidParams,
    PreconditionViolated,
    RegionViolation,
    TooFewVariables,
    ZeroResidualVariance,
)

__all__ = [
    "EliminationResult",
    "Elim3Result",
    "LR2",
    "LR3",
    "SemiInductiveWitness",
    "RRCheckResult",
    "T5Check",
    "T5Report",
    "eliminate",
    "eliminate3_LR",
    "scaled_LR2",
    "scaled_LR3",
    "semi_inductive_witness",
    "check_RR",
    "check_T5_bounds",
]

Exact = Union[int, str, Fraction, SurdValue, RootValue]

MAX_ELIMINATE_M = 5


def _bit(j: int, m: int, i: int) -> int:
    """Bit i (1-indexed, big-endian) of pattern j among m bits."""
    return (j >> (m - i)) & 1


def _head_sum(head: Sequence[Fraction], j: int) -> Fraction:
    m = len(head)
    return sum(
        (-head[i - 1] if _bit(j, m, i) else head[i - 1]) for i in range(1, m + 1)
    )


@dataclass(frozen=True)
class EliminationResult:
    """Exact thresholds produced by eliminating the m largest weights."""

    m: int
    sigma_sq: Fraction
    reduced: WeightVector
    thresholds: Tuple[SurdValue, ...]
    variance: Fraction
    residual: Fraction
    head: Tuple[Fraction, ...]

    def threshold_cmp(self, j: int, c: Union[int, str, Fraction]) -> int:
        """Exact sign of T_j - c, with T_j the normalized threshold."""
        c = frac(c)
        tau = self.thresholds[j]
        if c == 0:
            return tau.sign()
        scaled = as_surd(RootValue(1 if c > 0 else -1, c * c * self.residual))
        terms = tau.terms() + [(-coef, rad) for coef, rad in scaled.terms()]
        return surd_sign(terms)

    def normalized_float(self, j: int) -> float:
        return float(self.thresholds[j]) / math.sqrt(float(self.residual))

    @property
    def t_sq(self) -> SurdValue:
        """Exact square of t = (sqrt(V) - a1) / sqrt(V') for m = 1."""
        if self.m != 1:
            raise InvalidParams("t_sq is defined only for m = 1")
        root_v = as_surd(RootValue(1, self.variance))
        return (root_v - self.head[0]) / (root_v + self.head[0])


def eliminate(w: Union[WeightVector, Sequence], m: int) -> EliminationResult:
    """Split off the m largest weights, returning exact tail thresholds.

    The j-th threshold is the cut point sqrt(V) - N_j for the raw
    (unnormalized) tail sum, ordered by bit pattern.
    """
    wv = w if isinstance(w, WeightVector) else WeightVector(w)
    if not 1 <= m <= MAX_ELIMINATE_M:
        raise InvalidParams(f"m must be between 1 and {MAX_ELIMINATE_M}")
    if m >= len(wv):
        raise TooFewVariables(f"need more than {m} weights, got {len(wv)}")
    head = wv.weights[:m]
    variance = wv.variance
    residual = variance - sum(a * a for a in head)
    if residual <= 0:
        raise ZeroResidualVariance("no variance left after elimination")
    root_v = as_surd(RootValue(1, variance))
    thresholds = tuple(root_v - _head_sum(head, j) for j in range(1 << m))
    return EliminationResult(
        m=m,
        sigma_sq=residual / variance,
        reduced=wv.tail(m),
        thresholds=thresholds,
        variance=variance,
        residual=residual,
        head=head,
    )


@dataclass(frozen=True)
class Elim3Result:
    """Cut points L1..L4, R1..R4 for three-variable elimination.

    Values are in the scale of the raw tail sum (elements of Q[sqrt(V)]);
    dividing by sqrt(V') gives the normalized thresholds.
    """

    L: Tuple[SurdValue, SurdValue, SurdValue, SurdValue]
    R: Tuple[SurdValue, SurdValue, SurdValue, SurdValue]
    sigma_sq: Fraction
    variance: Fraction
    residual: Fraction
    reduced: WeightVector

    def normalized_L(self) -> Tuple[float, float, float, float]:
        s = math.sqrt(float(self.residual))
        return tuple(float(x) / s for x in self.L)

    def normalized_R(self) -> Tuple[float, float, float, float]:
        s = math.sqrt(float(self.residual))
        return tuple(float(x) / s for x in self.R)


def eliminate3_LR(w: Union[WeightVector, Sequence]) -> Elim3Result:
    """Cut points for eliminating the three largest weights.

    L4 and R1 absorb the absolute value |a1 - a2 - a3|, so that
    L1 <= L2 <= L3 <= L4 <= R1 <= R2 <= R3 <= R4 whenever the head is
    sorted (which WeightVector guarantees).
    """
    wv = w if isinstance(w, WeightVector) else WeightVector(w)
    if len(wv) < 4:
        raise TooFewVariables("need at least 4 weights")
    a1, a2, a3 = wv.weights[:3]
    variance = wv.variance
    residual = variance - (a1 * a1 + a2 * a2 + a3 * a3)
    if residual <= 0:
        raise ZeroResidualVariance("no variance left after elimination")
    root_v = as_surd(RootValue(1, variance))
    d = abs(a1 - a2 - a3)
    L = (
        root_v - (a1 + a2 + a3),
        root_v - (a1 + a2 - a3),
        root_v - (a1 - a2 + a3),
        root_v - d,
    )
    R = (
        root_v + d,
        root_v + (a1 - a2 + a3),
        root_v + (a1 + a2 - a3),
        root_v + (a1 + a2 + a3),
    )
    return Elim3Result(
        L=L,
        R=R,
        sigma_sq=residual / variance,
        variance=variance,
        residual=residual,
        reduced=wv.tail(3),
    )


@dataclass(frozen=True)
class LR2:
    """Sigma-scaled cut points for two eliminated weights of a unit sum."""

    l1: Fraction
    l2: Fraction
    r1: Fraction
    r2: Fraction
    sigma_sq: Fraction


def scaled_LR2(a1: Union[int, str, Fraction], a2: Union[int, str, Fraction]) -> LR2:
    """Cut points (a1+a2-1, 1-a1+a2, 1+a1-a2, 1+a1+a2) and sigma^2.

    The inputs are the two largest weights of a sum assumed to have unit
    variance; values are the normalized thresholds multiplied by sigma.
    """
    a1, a2 = frac(a1), frac(a2)
    if not 0 < a2 <= a1:
        raise InvalidParams("need 0 < a2 <= a1")
    sigma_sq = 1 - a1 * a1 - a2 * a2
    if sigma_sq <= 0:
        raise ZeroResidualVariance("head variance reaches 1")
    return LR2(a1 + a2 - 1, 1 - a1 + a2, 1 + a1 - a2, 1 + a1 + a2, sigma_sq)


@dataclass(frozen=True)
class LR3:
    """Sigma-scaled cut points for three eliminated weights of a unit sum."""

    l: Tuple[Fraction, Fraction, Fraction, Fraction]
    r: Tuple[Fraction, Fraction, Fraction, Fraction]
    sigma_sq: Fraction


def scaled_LR3(
    a1: Union[int, str, Fraction],
    a2: Union[int, str, Fraction],
    a3: Union[int, str, Fraction],
) -> LR3:
    a1, a2, a3 = frac(a1), frac(a2), frac(a3)
    if not 0 < a3 <= a2 <= a1:
        raise InvalidParams("need 0 < a3 <= a2 <= a1")
    sigma_sq = 1 - a1 * a1 - a2 * a2 - a3 * a3
    if sigma_sq <= 0:
        raise ZeroResidualVariance("head variance reaches 1")
    d = abs(a1 - a2 - a3)
    return LR3(
        (1 - a1 - a2 - a3, 1 - a1 - a2 + a3, 1 - a1 + a2 - a3, 1 - d),
        (1 + d, 1 + a1 - a2 + a3, 1 + a1 + a2 - a3, 1 + a1 + a2 + a3),
        sigma_sq,
    )


@dataclass(frozen=True)
class SemiInductiveWitness:
    """Rank-two witness hitting prescribed normalized cut points.

    Given L1' < L2', the weights b1, b2 of an auxiliary sum
    b1 z1 + b2 z2 + sigma' Z'' satisfy
    (b1 + b2 - 1)/sigma' = L1' and (1 - b1 + b2)/sigma' = L2', with
    sigma' = sqrt(1 - b1^2 - b2^2) > 0.  R1', R2' are the matching upper
    cut points (1 + b1 -+ b2)/sigma'.
    """

    b1: object
    b2: object
    sigma_prime: object
    sigma_prime_sq: object
    Lp1: object
    Lp2: object
    Rp1: object
    Rp2: object


def _exact(x: Exact):
    """Coerce to Fraction or SurdValue for exact field arithmetic."""
    if isinstance(x, (int, str, Fraction)):
        return frac(x)
    if isinstance(x, SurdValue):
        return x.p if x.is_rational else x
    if isinstance(x, RootValue):
        s = as_surd(x)
        return s.p if s.is_rational else s
    raise InvalidParams(f"unsupported exact value {x!r}")


def semi_inductive_witness(L1p: Exact, L2p: Exact) -> SemiInductiveWitness:
    """Construct the rank-two witness for cut points L1' < L2'.

    All arithmetic is exact; irrational inputs must lie in a common
    quadratic field.  The defining identities are re-verified on the
    computed values and an IdentityMismatch is raised if they fail.
    """
    l1, l2 = _exact(L1p), _exact(L2p)
    if exact_cmp(l1, l2) >= 0:
        raise DegenerateInterval("need L1' < L2'")
    if isinstance(l1, Fraction) and isinstance(l2, Fraction):
        one = Fraction(1)
    else:
        l1, l2 = as_surd(l1), as_surd(l2)
        one = SurdValue(1)
    d = l1 * l1 + l2 * l2 + 2
    b1 = (l1 * l2 * 2 + 2) / d
    b2 = (l2 * l2 - l1 * l1) / d
    sp = (l2 - l1) * 2 / d
    sp_sq = one - b1 * b1 - b2 * b2
    if sp * sp != sp_sq:
        raise IdentityMismatch("sigma' identity failed")
    if sp * l1 != b1 + b2 - 1 or sp * l2 != one - b1 + b2:
        raise IdentityMismatch("cut-point identities failed")
    rp1 = (b1 - b2 + 1) / sp
    rp2 = (b1 + b2 + 1) / sp
    return SemiInductiveWitness(
        b1=b1,
        b2=b2,
        sigma_prime=sp,
        sigma_prime_sq=sp_sq,
        Lp1=l1,
        Lp2=l2,
        Rp1=rp1,
        Rp2=rp2,
    )


@dataclass(frozen=True)
class RRCheckResult:
    """Exact verification of the witness upper cut-point inequalities."""

    witness: SemiInductiveWitness
    y_scaled: Fraction
    s_sq_scaled: Fraction
    claim_holds: bool
    rr1_holds: bool
    rr2_holds: bool

    @property
    def holds(self) -> bool:
        return self.claim_holds and self.rr1_holds and self.rr2_holds


def check_RR(
    a1: Union[int, str, Fraction],
    a2: Union[int, str, Fraction],
    tail: Sequence[Union[int, str, Fraction]],
    signs: Sequence[int],
) -> RRCheckResult:
    """Verify the witness inequalities for one stopped prefix.

    a1, a2 are the two largest weights of a unit-variance sum with
    a1 + a2 >= 1; tail holds the next weights (nonincreasing), and signs
    the corresponding +-1 assignment.  The prefix must be exactly the one
    the stopping rule accepts: its sigma-scaled sum reaches a1 + a2 - 1
    for the first time at the last position.  Checks, all exactly:

    - the residual-variance bound s^2 <= 1 - Y'(Y' - L1),
    - R1' <= (R1 - Y')/s and R2' <= (R2 - Y')/s for the witness built
      from L1' = (L1 - Y')/s and L2' = (L2 - Y')/s.
    """
    lr = scaled_LR2(a1, a2)
    if lr.l1 < 0:
        raise PreconditionViolated("need a1 + a2 >= 1")
    ws = [frac(t) for t in tail]
    if not ws or any(w <= 0 for w in ws):
        raise InvalidParams("tail weights must be positive")
    if any(ws[i] < ws[i + 1] for i in range(len(ws) - 1)):
        raise PreconditionViolated("tail weights must be nonincreasing")
    if len(signs) != len(ws) or any(s not in (-1, 1) for s in signs):
        raise InvalidParams("signs must be +-1 and match the tail length")
    y = Fraction(0)
    for i, (wt, sg) in enumerate(zip(ws, signs)):
        y += wt * sg
        if y >= lr.l1 and i + 1 < len(ws):
            raise PreconditionViolated("prefix passes the stopping bar early")
    if y < lr.l1:
        raise PreconditionViolated("prefix never reaches the stopping bar")
    u = lr.sigma_sq - sum(w * w for w in ws)
    if u <= 0:
        raise ZeroResidualVariance("no variance left after the prefix")
    claim_holds = u <= lr.sigma_sq - y * (y - lr.l1)
    lp1 = RootValue(_sign_of(lr.l1 - y), (lr.l1 - y) ** 2 / u)
    lp2 = RootValue(_sign_of(lr.l2 - y), (lr.l2 - y) ** 2 / u)
    wit = semi_inductive_witness(lp1, lp2)
    rhs1 = as_surd(RootValue(_sign_of(lr.r1 - y), (lr.r1 - y) ** 2 / u))
    rhs2 = as_surd(RootValue(_sign_of(lr.r2 - y), (lr.r2 - y) ** 2 / u))
    rr1 = (rhs1 - wit.Rp1).sign() >= 0
    rr2 = (rhs2 - wit.Rp2).sign() >= 0
    return RRCheckResult(
        witness=wit,
        y_scaled=y,
        s_sq_scaled=u,
        claim_holds=claim_holds,
        rr1_holds=rr1,
        rr2_holds=rr2,
    )


def _sign_of(x: Fraction) -> int:
    return (x > 0) - (x < 0)


A1_MAX = Fraction(387, 1000)

# Battery groups: indices whose normalized threshold must reach the bound.
_T5_GROUPS = (
    ("ge_1", (18, 20, 24), Fraction(1)),
    ("ge_sqrt2", (11, 13, 14), Fraction(2)),
    ("ge_2", (19, 21, 22, 25, 26, 28), Fraction(4)),
    ("ge_sqrt6", (15, 23, 27, 29, 30, 31), Fraction(6)),
)


@dataclass(frozen=True)
class T5Check:
    label: str
    margin: Fraction
    holds: bool


@dataclass(frozen=True)
class T5Report:
    sigma_sq: Fraction
    checks: Tuple[T5Check, ...]
    thresholds_float: Tuple[float, ...]

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)


def check_T5_bounds(a: Sequence[Union[int, str, Fraction]]) -> T5Report:
    """Exact threshold bound battery for five eliminated weights.

    Requires 1 - a2 - a4 <= a5 <= a4 <= a3 <= a2 <= a1 <= 0.387.  Each
    check compares a squared threshold against its bound using only
    rational arithmetic; margins are the exact slack in the squared,
    sigma-scaled form.
    """
    ws = tuple(frac(x) for x in a)
    if len(ws) != 5:
        raise InvalidParams("need exactly five weights")
    a1, a2, a3, a4, a5 = ws
    if not (0 < a5 <= a4 <= a3 <= a2 <= a1 <= A1_MAX):
        raise RegionViolation("weights must satisfy 0 < a5 <= ... <= a1 <= 0.387")
    if a5 < 1 - a2 - a4:
        raise RegionViolation("need a5 >= 1 - a2 - a4")
    sigma_sq = 1 - sum(w * w for w in ws)
    m = 5
    nums = [1 - _head_sum(ws, j) for j in range(1 << m)]
    checks = []

    def bound_check(label: str, num: Fraction, c_sq: Fraction) -> None:
        margin = num * num - c_sq * sigma_sq
        holds = num >= 0 and margin >= 0
        checks.append(T5Check(label=label, margin=margin, holds=holds))

    num12 = nums[12]
    num_max = 1 - min(_head_sum(ws, 10), _head_sum(ws, 17))
    pair_margin = num12 * num_max - sigma_sq
    checks.append(
        T5Check(
            label="T12*max(T10,T17) >= 1",
            margin=pair_margin,
            holds=num12 >= 0 and num_max >= 0 and pair_margin >= 0,
        )
    )
    for _name, indices, c_sq in _T5_GROUPS:
        root = {1: "1", 2: "sqrt(2)", 4: "2", 6: "sqrt(6)"}[int(c_sq)]
        for j in indices:
            bound_check(f"T{j} >= {root}", nums[j], c_sq)
    s = math.sqrt(float(sigma_sq))
    floats = tuple(float(n) / s for n in nums)
    return T5Report(sigma_sq=sigma_sq, checks=tuple(checks), thresholds_float=floats)
