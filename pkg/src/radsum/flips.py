"""Measure-shifting bijections on sign vectors.

Three constructions on {-1,1}^n for weights a_1 >= ... >= a_n > 0, with
M = a_1 and m = a_n:

* prefix flip PF[Q]: for X(v) >= Q/2, negates the minimal prefix whose
  weighted sum reaches Q/2; then X(w) in (X(v)-Q-2M, X(v)-Q] when Q > 0.
  For Q = 0 the left end closes: X(w) in [X(v)-2M, X(v)].  A strict
  variant negates the minimal prefix strictly exceeding Q/2 and yields
  X(w) in [X(v)-Q-2M, X(v)-Q).
* single flip SF: for X(v) > 0, negates the single +1 coordinate at the
  first peak of the unweighted partial sums; X(w) in [X(v)-2M, X(v)-2m].
* recursive flip RF: a total bijection agreeing with SF on {X > 0}; for
  X(v) <= 0 it returns -z for the first iterate z of F^-1 (F = -SF)
  that falls outside Image(F), so either w = -v or X(w) in [X(v)-2M, 0).

Inverses recover the flip index from the image vector alone.  For the
single flip the recovery index is the last i < n at which the partial sum
S_i(w) attains the maximum of all partial sums S_0(w), ..., S_n(w); the
comparison must include S_0 = 0, otherwise genuine image points whose
partial sums are all negative are mis-indexed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .core import WeightVector
from ._surd import RootValue, SurdValue, exact_cmp, frac
from .errors import InvalidParams, NotInImage, PreconditionViolated

SignVector = Tuple[int, ...]

ExactQ = Union[int, str, Fraction, SurdValue, RootValue]

_FLIP_KINDS = ("prefix", "single", "recursive")


def _as_weights(w: Union[WeightVector, Sequence]) -> WeightVector:
    return w if isinstance(w, WeightVector) else WeightVector(w)


def _as_signs(v: Iterable[int], n: int) -> SignVector:
    t = tuple(int(s) for s in v)
    if len(t) != n:
        raise InvalidParams(f"sign vector has length {len(t)}, expected {n}")
    if any(s not in (-1, 1) for s in t):
        raise InvalidParams("sign vector entries must be +-1")
    return t


def weighted_sum(w: Union[WeightVector, Sequence], v: Iterable[int]) -> Fraction:
    """X(v) = sum(a_i v_i), exact."""
    wv = _as_weights(w)
    t = _as_signs(v, len(wv))
    return sum((a * s for a, s in zip(wv.weights, t)), Fraction(0))


def _negate(v: SignVector) -> SignVector:
    return tuple(-s for s in v)


# -- prefix flip -----------------------------------------------------------

def _half_q(Q: ExactQ):
    """Validate Q >= 0 and return Q/2 (Fraction fast path, else exact)."""
    if isinstance(Q, str):
        Q = frac(Q)
    if isinstance(Q, (int, Fraction)):
        Q = Fraction(Q)
        if Q < 0:
            raise InvalidParams("Q must be nonnegative")
        return Q / 2
    if isinstance(Q, SurdValue):
        if Q.sign() < 0:
            raise InvalidParams("Q must be nonnegative")
        return Q / 2
    if isinstance(Q, RootValue):
        if Q.sign < 0:
            raise InvalidParams("Q must be nonnegative")
        return Q.scale(Fraction(1, 2))
    raise InvalidParams(f"cannot interpret {Q!r} as an exact Q")


def _cmp_frac(s: Fraction, bound) -> int:
    """sign(s - bound) for a rational s against an exact bound."""
    if isinstance(bound, Fraction):
        return (s > bound) - (s < bound)
    return exact_cmp(s, bound)


def prefix_flip(
    w: Union[WeightVector, Sequence],
    Q: ExactQ,
    v: Iterable[int],
    strict: bool = False,
) -> SignVector:
    """PF[Q](v): negate the minimal prefix with weighted sum >= Q/2.

    Requires X(v) >= Q/2 (strictly > with ``strict``); the strict variant
    takes the minimal prefix with weighted sum > Q/2.
    """
    wv = _as_weights(w)
    t = _as_signs(v, len(wv))
    half = _half_q(Q)
    x = weighted_sum(wv, t)
    c = _cmp_frac(x, half)
    if (c < 0) if not strict else (c <= 0):
        raise PreconditionViolated(f"X(v) = {x} does not reach Q/2")
    s = Fraction(0)
    for k, (a, sk) in enumerate(zip(wv.weights, t), start=1):
        s += a * sk
        c = _cmp_frac(s, half)
        if (c > 0) if strict else (c >= 0):
            return tuple(-x if i < k else x for i, x in enumerate(t))
    raise AssertionError("unreachable: X(v) reaches Q/2")


def prefix_flip_inverse(
    w: Union[WeightVector, Sequence],
    Q: ExactQ,
    target: Iterable[int],
    strict: bool = False,
) -> SignVector:
    """Preimage of ``target`` under PF[Q] restricted to {X >= Q/2}."""
    wv = _as_weights(w)
    t = _as_signs(target, len(wv))
    half = _half_q(Q)
    neg_half = -half
    s = Fraction(0)
    k = None
    for i, (a, sk) in enumerate(zip(wv.weights, t), start=1):
        s += a * sk
        c = _cmp_frac(s, neg_half)
        if (c < 0) if strict else (c <= 0):
            k = i
            break
    if k is None:
        raise NotInImage("no prefix of the target reaches -Q/2")
    v = tuple(-x if i < k else x for i, x in enumerate(t))
    try:
        if prefix_flip(wv, Q, v, strict=strict) != t:
            raise NotInImage("candidate preimage does not map back to target")
    except PreconditionViolated as exc:
        raise NotInImage("candidate preimage violates the domain condition") from exc
    return v


# -- single flip -----------------------------------------------------------

def _partial_sign_sums(v: SignVector) -> List[int]:
    out = [0]
    acc = 0
    for s in v:
        acc += s
        out.append(acc)
    return out


def single_flip(w: Union[WeightVector, Sequence], v: Iterable[int]) -> SignVector:
    """SF(v): flip the +1 coordinate at the first peak of the sign sums."""
    wv = _as_weights(w)
    t = _as_signs(v, len(wv))
    if weighted_sum(wv, t) <= 0:
        raise PreconditionViolated("single flip requires X(v) > 0")
    sums = _partial_sign_sums(t)
    peak = max(sums[1:])
    k = sums.index(peak, 1)  # minimal k in [n] attaining the peak
    assert t[k - 1] == 1
    return tuple(-x if i == k - 1 else x for i, x in enumerate(t))


def single_flip_inverse(
    w: Union[WeightVector, Sequence], target: Iterable[int]
) -> SignVector:
    """Preimage of ``target`` under SF restricted to {X > 0}."""
    wv = _as_weights(w)
    t = _as_signs(target, len(wv))
    n = len(t)
    sums = _partial_sign_sums(t)
    gmax = max(sums)  # includes S_0 = 0
    k = None
    for i in range(n - 1, -1, -1):
        if sums[i] == gmax:
            k = i + 1
            break
    if k is None:
        # the global maximum is attained only at i = n: nothing to flip back
        raise NotInImage("target has no admissible flip index")
    if t[k - 1] != -1:
        raise NotInImage("recovered flip coordinate is not -1")
    v = tuple(-x if i == k - 1 else x for i, x in enumerate(t))
    if weighted_sum(wv, v) <= 0:
        raise NotInImage("candidate preimage has X <= 0")
    if single_flip(wv, v) != t:
        raise NotInImage("candidate preimage does not map back to target")
    return v


# -- recursive flip --------------------------------------------------------

def _F(wv: WeightVector, v: SignVector) -> SignVector:
    return _negate(single_flip(wv, v))


def _F_inverse(wv: WeightVector, z: SignVector) -> Optional[SignVector]:
    try:
        return single_flip_inverse(wv, _negate(z))
    except NotInImage:
        return None


def recursive_flip(w: Union[WeightVector, Sequence], v: Iterable[int]) -> SignVector:
    """RF(v), defined for every sign vector."""
    wv = _as_weights(w)
    t = _as_signs(v, len(wv))
    if weighted_sum(wv, t) > 0:
        return single_flip(wv, t)
    z = t
    for _ in range(1 << len(wv)):
        p = _F_inverse(wv, z)
        if p is None:
            return _negate(z)
        z = p
    raise AssertionError("recursive flip chain did not terminate")


def recursive_flip_inverse(
    w: Union[WeightVector, Sequence], target: Iterable[int]
) -> SignVector:
    """Preimage of ``target`` under the total bijection RF."""
    wv = _as_weights(w)
    t = _as_signs(target, len(wv))
    try:
        return single_flip_inverse(wv, t)  # branch X(v) > 0 is decisive
    except NotInImage:
        pass
    v = _negate(t)
    for _ in range(1 << len(wv)):
        if weighted_sum(wv, v) <= 0:
            break
        v = _F(wv, v)
    else:
        raise AssertionError("recursive flip inverse chain did not terminate")
    if recursive_flip(wv, v) != t:
        raise AssertionError("recursive flip inverse failed verification")
    return v


def recursive_flip_table(
    w: Union[WeightVector, Sequence]
) -> Dict[SignVector, SignVector]:
    """The full RF bijection as a dict, built in O(2^n)."""
    wv = _as_weights(w)
    n = len(wv)
    if n > 20:
        raise InvalidParams("full flip table supports n <= 20")
    vectors = []
    for mask in range(1 << n):
        vectors.append(tuple(1 if mask & (1 << i) else -1 for i in range(n)))
    table: Dict[SignVector, SignVector] = {}
    f_inv: Dict[SignVector, SignVector] = {}
    negative: List[SignVector] = []
    for v in vectors:
        if weighted_sum(wv, v) > 0:
            sf = single_flip(wv, v)
            table[v] = sf
            f_inv[_negate(sf)] = v
        else:
            negative.append(v)
    for v in negative:
        z = v
        while z in f_inv:
            z = f_inv[z]
        table[v] = _negate(z)
    return table


# -- completion to full bijections ----------------------------------------

def complete_bijection(
    partial: Dict[SignVector, SignVector], n: int
) -> Dict[SignVector, SignVector]:
    """Extend an injection to a bijection on {-1,1}^n.

    Unmatched vectors are paired identity-first (v -> v whenever v is both
    an unused source and an unused target), then in sorted order.
    """
    sources = set(partial)
    targets = set(partial.values())
    if len(targets) != len(partial):
        raise InvalidParams("partial map is not injective")
    all_vs = [tuple(1 if m & (1 << i) else -1 for i in range(n)) for m in range(1 << n)]
    free_src = [v for v in all_vs if v not in sources]
    free_tgt = set(v for v in all_vs if v not in targets)
    out = dict(partial)
    rest_src = []
    for v in free_src:
        if v in free_tgt:
            out[v] = v
            free_tgt.discard(v)
        else:
            rest_src.append(v)
    for v, t in zip(sorted(rest_src), sorted(free_tgt)):
        out[v] = t
    return out


def prefix_flip_table(
    w: Union[WeightVector, Sequence],
    Q: ExactQ,
    strict: bool = False,
) -> Dict[SignVector, SignVector]:
    """PF[Q] on its domain, completed to a full bijection."""
    wv = _as_weights(w)
    n = len(wv)
    if n > 20:
        raise InvalidParams("full flip table supports n <= 20")
    half = _half_q(Q)
    partial: Dict[SignVector, SignVector] = {}
    for mask in range(1 << n):
        v = tuple(1 if mask & (1 << i) else -1 for i in range(n))
        c = _cmp_frac(weighted_sum(wv, v), half)
        if (c > 0) if strict else (c >= 0):
            partial[v] = prefix_flip(wv, Q, v, strict=strict)
    return complete_bijection(partial, n)


def single_flip_table(
    w: Union[WeightVector, Sequence]
) -> Dict[SignVector, SignVector]:
    """SF on {X > 0}, completed to a full bijection."""
    wv = _as_weights(w)
    n = len(wv)
    if n > 20:
        raise InvalidParams("full flip table supports n <= 20")
    partial: Dict[SignVector, SignVector] = {}
    for mask in range(1 << n):
        v = tuple(1 if mask & (1 << i) else -1 for i in range(n))
        if weighted_sum(wv, v) > 0:
            partial[v] = single_flip(wv, v)
    return complete_bijection(partial, n)


def flip_inverse(
    kind: str,
    w: Union[WeightVector, Sequence],
    target: Iterable[int],
    Q: Optional[ExactQ] = None,
    strict: bool = False,
) -> SignVector:
    """Dispatch to the inverse of a named flip construction."""
    if kind not in _FLIP_KINDS:
        raise InvalidParams(f"unknown flip kind {kind!r}; expected {_FLIP_KINDS}")
    if kind == "prefix":
        if Q is None:
            raise InvalidParams("prefix flip inverse requires Q")
        return prefix_flip_inverse(w, Q, target, strict=strict)
    if kind == "single":
        return single_flip_inverse(w, target)
    return recursive_flip_inverse(w, target)
