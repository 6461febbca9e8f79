"""Exact polynomial positivity certificates.

This module implements a sparse multivariate polynomial engine over the
rationals and a small certificate language for proving that a polynomial
is nonnegative on a polyhedral region.  A certificate consists of

* a target polynomial (the claimed-nonnegative quantity),
* a region (a list of affine constraints ``g >= 0``), and
* a decomposition: a list of terms whose exact sum equals the target,
  each term a product of factors that are individually nonnegative on
  the region.

Factor nonnegativity is machine-checked, never assumed: squares are
nonnegative by construction, constants by inspection, affine forms by
exact linear programming (Fourier-Motzkin elimination over Fractions),
one-variable quadratics by endpoint and discriminant analysis (with
endpoints allowed in a quadratic extension Q[sqrt(k)]), constants in
Q[sqrt(k)] by exact sign computation, and references to other catalogue
entries by checking that the referencing region implies the referenced
one.  The identity between target and decomposition is checked by full
expansion with Fraction coefficients; no floating point and no sampling
is involved anywhere in the verification path.

The shipped catalogue (``data/catalog.txt``) transcribes the inequality
battery used by the case analyses in :mod:`radsum.cases`: quartic tail
inequalities, sum-of-squares identities, the subset-sum bounds on the
refined Chebyshev coefficients, and the threshold bounds for three- and
five-variable eliminations.  Entries that are not pure polynomial facts
(a monotonicity argument, a Lipschitz net, per-instance root
comparisons) are catalogued as ``numeric`` or ``delegated`` and
cross-referenced to the module that checks them.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import (
    Dict,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from ._surd import SurdValue
from .errors import (
    IdentityMismatch,
    InvalidParams,
    RadsumError,
    RegionUnsatisfiable,
    UnjustifiedFactor,
)

__all__ = [
    "Certificate",
    "CatalogReport",
    "CertificateReport",
    "Factor",
    "Poly",
    "Term",
    "default_catalog_path",
    "load_catalog",
    "poly_degree",
    "poly_eval",
    "poly_identity",
    "poly_parse",
    "poly_str",
    "verify_catalog",
    "verify_certificate",
]

# A monomial maps to its coefficient; the empty tuple is the constant
# monomial.  Variable/exponent pairs are kept sorted by name.
Monomial = Tuple[Tuple[str, int], ...]
Poly = Dict[Monomial, Fraction]

_ONE: Monomial = ()

_FM_ROW_CAP = 200_000


# ---------------------------------------------------------------------------
# polynomial arithmetic


def poly_const(c: Union[int, Fraction]) -> Poly:
    c = Fraction(c)
    return {_ONE: c} if c else {}


def poly_var(name: str) -> Poly:
    return {((name, 1),): Fraction(1)}


def _add_term(p: Poly, mono: Monomial, coef: Fraction) -> None:
    acc = p.get(mono, Fraction(0)) + coef
    if acc:
        p[mono] = acc
    else:
        p.pop(mono, None)


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for mono, c in q.items():
        _add_term(out, mono, c)
    return out


def poly_neg(p: Poly) -> Poly:
    return {mono: -c for mono, c in p.items()}


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_add(p, poly_neg(q))


def poly_scale(p: Poly, c: Union[int, Fraction]) -> Poly:
    c = Fraction(c)
    if not c:
        return {}
    return {mono: coef * c for mono, coef in p.items()}


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: Dict[str, int] = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            _add_term(out, _mono_mul(ma, mb), ca * cb)
    return out


def poly_pow(p: Poly, e: int) -> Poly:
    if e < 0:
        raise InvalidParams("polynomial exponent must be nonnegative")
    out = poly_const(1)
    base = p
    while e:
        if e & 1:
            out = poly_mul(out, base)
        base_needed = e > 1
        e >>= 1
        if base_needed and e:
            base = poly_mul(base, base)
    return out


def poly_reduce_root(p: Poly, name: str, k: int) -> Poly:
    """Reduce powers of a root symbol r with r**2 == k."""
    out: Poly = {}
    for mono, c in p.items():
        exps = dict(mono)
        e = exps.pop(name, 0)
        if e:
            c = c * Fraction(k) ** (e // 2)
            if e % 2:
                exps[name] = 1
        _add_term(out, tuple(sorted(exps.items())), c)
    return out


def poly_is_zero(p: Poly) -> bool:
    return not p


def poly_degree(p: Poly) -> int:
    if not p:
        return 0
    return max(sum(e for _, e in mono) for mono in p)


def poly_vars(p: Poly) -> Tuple[str, ...]:
    names = {name for mono in p for name, _ in mono}
    return tuple(sorted(names))


def poly_eval(p: Poly, point: Mapping[str, Fraction]) -> Fraction:
    total = Fraction(0)
    for mono, c in p.items():
        term = c
        for name, e in mono:
            term *= Fraction(point[name]) ** e
        total += term
    return total


def poly_str(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for mono in sorted(p, key=lambda m: (-sum(e for _, e in m), m)):
        c = p[mono]
        body = "*".join(
            name if e == 1 else f"{name}^{e}" for name, e in mono
        )
        if not body:
            parts.append(str(c))
        elif c == 1:
            parts.append(body)
        elif c == -1:
            parts.append(f"-{body}")
        else:
            parts.append(f"{c}*{body}")
    text = " + ".join(parts)
    return text.replace("+ -", "- ")


# ---------------------------------------------------------------------------
# expression parsing


def _const_from_node(node: ast.Constant, src: str) -> Poly:
    value = node.value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParams(f"unsupported literal {value!r}")
    seg = ast.get_source_segment(src, node)
    # The source text round-trips decimals exactly (0.42 -> Fraction(21, 50)).
    return poly_const(Fraction(seg if seg is not None else str(value)))


def _poly_from_node(node: ast.AST, src: str) -> Poly:
    if isinstance(node, ast.Constant):
        return _const_from_node(node, src)
    if isinstance(node, ast.Name):
        return poly_var(node.id)
    if isinstance(node, ast.UnaryOp):
        inner = _poly_from_node(node.operand, src)
        if isinstance(node.op, ast.USub):
            return poly_neg(inner)
        if isinstance(node.op, ast.UAdd):
            return inner
        raise InvalidParams("unsupported unary operator")
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            base = _poly_from_node(node.left, src)
            exp = node.right
            if (
                not isinstance(exp, ast.Constant)
                or not isinstance(exp.value, int)
                or exp.value < 0
            ):
                raise InvalidParams("exponent must be a nonnegative integer")
            return poly_pow(base, exp.value)
        left = _poly_from_node(node.left, src)
        right = _poly_from_node(node.right, src)
        if isinstance(node.op, ast.Add):
            return poly_add(left, right)
        if isinstance(node.op, ast.Sub):
            return poly_sub(left, right)
        if isinstance(node.op, ast.Mult):
            return poly_mul(left, right)
        if isinstance(node.op, ast.Div):
            if set(right) - {_ONE}:
                raise InvalidParams("division only by a nonzero constant")
            denom = right.get(_ONE, Fraction(0))
            if not denom:
                raise InvalidParams("division by zero")
            return poly_scale(left, 1 / denom)
        raise InvalidParams("unsupported binary operator")
    raise InvalidParams(f"unsupported syntax node {type(node).__name__}")


def poly_parse(text: str, *, root: Optional[Tuple[str, int]] = None) -> Poly:
    """Parse an expression into a Poly with exact Fraction coefficients.

    Supports + - * / (by constants), integer powers with ``^`` or ``**``,
    parentheses, integer and decimal literals.  With ``root=(name, k)``
    the symbol ``name`` is treated as sqrt(k): even powers are folded
    into the coefficients, so the result is linear in the root symbol.
    """
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise InvalidParams(f"cannot parse {text!r}: {exc}") from None
    p = _poly_from_node(tree.body, src)
    if root is not None:
        p = poly_reduce_root(p, root[0], root[1])
    return p


def _as_poly(value: Union[str, Poly], root: Optional[Tuple[str, int]]) -> Poly:
    if isinstance(value, str):
        return poly_parse(value, root=root)
    if root is not None:
        return poly_reduce_root(dict(value), root[0], root[1])
    return dict(value)


def poly_identity(
    lhs: Union[str, Poly],
    rhs: Union[str, Poly],
    *,
    root: Optional[Tuple[str, int]] = None,
) -> bool:
    """Exact polynomial equality after full expansion (no sampling)."""
    return poly_is_zero(poly_sub(_as_poly(lhs, root), _as_poly(rhs, root)))


# ---------------------------------------------------------------------------
# affine constraints and Fourier-Motzkin bounds

# An affine row (coeffs, const) encodes sum(coeffs[v]*v) + const >= 0.
AffRow = Tuple[Tuple[Tuple[str, Fraction], ...], Fraction]


def _sqrt_bounds(k: int) -> Tuple[Fraction, Fraction]:
    """Tight rational enclosure of sqrt(k)."""
    scale = 10 ** 40
    n = isqrt(k * scale * scale)
    return Fraction(n, scale), Fraction(n + 1, scale)


class _Constraint(NamedTuple):
    coeffs: Dict[str, Fraction]
    const_rat: Fraction
    const_root: Fraction  # coefficient of sqrt(k); zero when rational

    def value_at(self, point: Mapping[str, Fraction], k: int) -> SurdValue:
        total = self.const_rat
        for name, c in self.coeffs.items():
            total += c * Fraction(point[name])
        return SurdValue(total, self.const_root, k)

    def relaxed_const(self, k: int, outer: bool) -> Fraction:
        if not self.const_root:
            return self.const_rat
        lo, hi = _sqrt_bounds(k)
        if outer:
            bound = hi if self.const_root > 0 else lo
        else:
            bound = lo if self.const_root > 0 else hi
        return self.const_rat + self.const_root * bound


def _affine_parts(p: Poly, root_name: Optional[str]) -> _Constraint:
    coeffs: Dict[str, Fraction] = {}
    const_rat = Fraction(0)
    const_root = Fraction(0)
    for mono, c in p.items():
        if mono == _ONE:
            const_rat = c
        elif len(mono) == 1 and mono[0][1] == 1:
            name = mono[0][0]
            if name == root_name:
                const_root = c
            else:
                coeffs[name] = c
        else:
            raise InvalidParams(f"constraint is not affine: {poly_str(p)}")
    return _Constraint(coeffs, const_rat, const_root)


def _row_of(coeffs: Mapping[str, Fraction], const: Fraction) -> AffRow:
    items = tuple(sorted((n, c) for n, c in coeffs.items() if c))
    return items, const


def _normalize_row(row: AffRow) -> AffRow:
    items, const = row
    nums = [c.numerator for _, c in items] + [const.numerator]
    dens = [c.denominator for _, c in items] + [const.denominator]
    lcm = 1
    for d in dens:
        lcm = lcm * d // _gcd(lcm, d)
    scaled = [n * (lcm // d) for n, d in zip(nums, dens)]
    g = 0
    for n in scaled:
        g = _gcd(g, abs(n))
    if g > 1:
        scale = Fraction(lcm, g)
    else:
        scale = Fraction(lcm)
    return (
        tuple((n, c * scale) for n, c in items),
        const * scale,
    )


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _fm_eliminate(rows: List[AffRow], var: str) -> List[AffRow]:
    pos: List[AffRow] = []
    neg: List[AffRow] = []
    zero: List[AffRow] = []
    for row in rows:
        coef = dict(row[0]).get(var, Fraction(0))
        if coef > 0:
            pos.append(row)
        elif coef < 0:
            neg.append(row)
        else:
            zero.append(row)
    out = {_normalize_row(r) for r in zero}
    for prow in pos:
        pc = dict(prow[0])
        a = pc.pop(var)
        for nrow in neg:
            nc = dict(nrow[0])
            b = nc.pop(var)  # b < 0
            combo: Dict[str, Fraction] = {}
            for name, c in nc.items():
                combo[name] = combo.get(name, Fraction(0)) + a * c
            for name, c in pc.items():
                combo[name] = combo.get(name, Fraction(0)) + (-b) * c
            const = a * nrow[1] + (-b) * prow[1]
            out.add(_normalize_row(_row_of(combo, const)))
            if len(out) > _FM_ROW_CAP:
                raise RadsumError("Fourier-Motzkin row cap exceeded")
    return list(out)


def _fm_bounds(
    objective: Mapping[str, Fraction],
    obj_const: Fraction,
    rows: Sequence[AffRow],
) -> Tuple[Optional[Fraction], Optional[Fraction], bool]:
    """Exact (min, max, feasible) of an affine objective over the rows.

    ``None`` bounds mean unbounded in that direction.  When the region is
    empty the bounds are meaningless and feasible is False.
    """
    tvar = "#objective"
    work: List[AffRow] = [_normalize_row(r) for r in rows]
    pos_obj = dict(objective)
    pos_obj[tvar] = Fraction(-1)
    work.append(_row_of(pos_obj, obj_const))
    neg_obj = {n: -c for n, c in objective.items()}
    neg_obj[tvar] = Fraction(1)
    work.append(_row_of(neg_obj, -obj_const))

    remaining = sorted({n for row in work for n, _ in row[0]} - {tvar})
    while remaining:
        # eliminate the variable with the smallest pos*neg pairing first
        def cost(v: str) -> int:
            p = sum(1 for row in work if dict(row[0]).get(v, 0) > 0)
            n = sum(1 for row in work if dict(row[0]).get(v, 0) < 0)
            return p * n - p - n
        var = min(remaining, key=cost)
        remaining.remove(var)
        work = _fm_eliminate(work, var)

    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    feasible = True
    for items, const in work:
        coef = dict(items).get(tvar, Fraction(0))
        if coef > 0:
            bound = -const / coef
            if lower is None or bound > lower:
                lower = bound
        elif coef < 0:
            bound = -const / coef
            if upper is None or bound < upper:
                upper = bound
        elif const < 0:
            feasible = False
    if lower is not None and upper is not None and lower > upper:
        feasible = False
    return lower, upper, feasible


# ---------------------------------------------------------------------------
# certificate data model


@dataclass(frozen=True)
class Factor:
    """One factor of a decomposition term, with its sign justification.

    tag meanings:
      square  -- contributes expr**2; nonnegative by construction
      const   -- a nonnegative rational constant
      affine  -- an affine form with a certified nonnegative minimum
      quad1   -- a one-variable quadratic, args (var, lo, hi); justified
                 by endpoint signs plus vertex/discriminant analysis
      surd    -- a constant p + q*sqrt(k), sign decided exactly
      ref     -- the target of another catalogue entry, args (cert_id,)
      raw     -- unchecked (identity-kind entries only)
    """

    tag: str
    expr: str = ""
    args: Tuple[str, ...] = ()


class Term(NamedTuple):
    factors: Tuple[Factor, ...]


@dataclass(frozen=True)
class Certificate:
    """A single catalogued claim.

    kind is one of ``nonneg`` (target >= 0 on region, proved by the
    decomposition), ``identity`` (target == sum of terms, with unchecked
    factor signs), ``numeric`` (checked by a registered high-precision
    routine), or ``delegated`` (cross-reference to another module).
    """

    cert_id: str
    kind: str
    variables: Tuple[str, ...] = ()
    region: Tuple[str, ...] = ()
    target: str = "0"
    terms: Tuple[Term, ...] = ()
    root: Optional[Tuple[str, int]] = None
    delegate: str = ""
    note: str = ""


@dataclass(frozen=True)
class CertificateReport:
    cert_id: str
    kind: str
    status: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status in ("verified", "delegated")


@dataclass(frozen=True)
class CatalogReport:
    entries: Tuple[CertificateReport, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for e in self.entries:
            key = e.status if e.ok else "failed"
            out[key] = out.get(key, 0) + 1
        return out

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            mark = "PASS" if e.ok else "FAIL"
            line = f"[{mark}] {e.cert_id}: {e.kind}/{e.status}"
            if e.detail:
                line += f" ({e.detail})"
            lines.append(line)
        counts = ", ".join(f"{k}={v}" for k, v in sorted(self.counts.items()))
        lines.append(f"total {len(self.entries)}: {counts}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# region handling


class _Region:
    """Parsed constraint region with exact bound queries."""

    def __init__(
        self, constraints: Sequence[str], root: Optional[Tuple[str, int]]
    ) -> None:
        self.root = root
        root_name = root[0] if root else None
        self.k = root[1] if root else 1
        self.constraints: List[_Constraint] = []
        self.polys: List[Poly] = []
        for text in constraints:
            p = _constraint_poly(text, root)
            self.polys.append(p)
            self.constraints.append(_affine_parts(p, root_name))
        self.variables = tuple(
            sorted({n for c in self.constraints for n in c.coeffs})
        )

    def rows(self, outer: bool) -> List[AffRow]:
        return [
            _row_of(c.coeffs, c.relaxed_const(self.k, outer))
            for c in self.constraints
        ]

    def bounds_of(
        self, objective: Mapping[str, Fraction], const: Fraction, outer: bool
    ) -> Tuple[Optional[Fraction], Optional[Fraction], bool]:
        return _fm_bounds(objective, const, self.rows(outer))

    def min_of_poly(self, p: Poly, outer: bool = True) -> Optional[Fraction]:
        c = _affine_parts(p, self.root[0] if self.root else None)
        if c.const_root:
            raise InvalidParams("affine factor must have rational constant")
        lo, _, feasible = self.bounds_of(c.coeffs, c.const_rat, outer)
        if not feasible:
            raise RegionUnsatisfiable("constraint region is empty")
        return lo

    def sample_point(self) -> Optional[Dict[str, Fraction]]:
        """An exact feasible point, or None for an unconstrained region."""
        if not self.constraints:
            return None
        point: Dict[str, Fraction] = {}
        for outer in (False, True):
            try:
                point = self._sample(outer)
                break
            except RegionUnsatisfiable:
                if outer:
                    raise
        return point

    def _sample(self, outer: bool) -> Dict[str, Fraction]:
        rows = self.rows(outer)
        point: Dict[str, Fraction] = {}
        for var in self.variables:
            fixed_rows: List[AffRow] = []
            for items, const in rows:
                coeffs = dict(items)
                shift = const
                for name, value in point.items():
                    if name in coeffs:
                        shift += coeffs.pop(name) * value
                fixed_rows.append(_row_of(coeffs, shift))
            lo, hi, feasible = _fm_bounds({var: Fraction(1)}, Fraction(0), fixed_rows)
            if not feasible:
                raise RegionUnsatisfiable("constraint region is empty")
            if lo is not None and hi is not None:
                point[var] = (lo + hi) / 2
            elif lo is not None:
                point[var] = lo + 1
            elif hi is not None:
                point[var] = hi - 1
            else:
                point[var] = Fraction(0)
        return point

    def check_point(self, point: Mapping[str, Fraction]) -> None:
        full = dict(point)
        for v in self.variables:
            full.setdefault(v, Fraction(0))
        for p, c in zip(self.polys, self.constraints):
            if c.value_at(full, self.k).sign() < 0:
                raise RegionUnsatisfiable(
                    f"sampled point violates constraint {poly_str(p)} >= 0"
                )


_CMP_RE = re.compile(r"(<=|>=)")


def _constraint_poly(text: str, root: Optional[Tuple[str, int]]) -> Poly:
    pieces = _CMP_RE.split(text)
    if len(pieces) != 3:
        raise InvalidParams(f"constraint needs exactly one <= or >=: {text!r}")
    lhs, op, rhs = (s.strip() for s in pieces)
    left = poly_parse(lhs, root=root)
    right = poly_parse(rhs, root=root)
    return poly_sub(right, left) if op == "<=" else poly_sub(left, right)


# ---------------------------------------------------------------------------
# factor justification


def _factor_poly(
    factor: Factor,
    root: Optional[Tuple[str, int]],
    catalog: Optional[Mapping[str, "Certificate"]],
) -> Poly:
    if factor.tag == "ref":
        if not catalog:
            raise InvalidParams("ref factor requires a catalogue context")
        if factor.args[0] not in catalog:
            raise InvalidParams(f"reference to unknown certificate {factor.args[0]}")
        target = catalog[factor.args[0]].target
        return poly_parse(target, root=root)
    p = poly_parse(factor.expr, root=root)
    if factor.tag == "square":
        p = poly_mul(p, p)
        if root is not None:
            p = poly_reduce_root(p, root[0], root[1])
    return p


def _const_surd(p: Poly, root: Optional[Tuple[str, int]]) -> SurdValue:
    c = _affine_parts(p, root[0] if root else None)
    if c.coeffs:
        raise InvalidParams(f"expected a constant, got {poly_str(p)}")
    return SurdValue(c.const_rat, c.const_root, root[1] if root else 0)


class _Bound(NamedTuple):
    poly: Optional[Poly]  # None for an infinite endpoint
    value: Optional[SurdValue]


def _parse_bound(text: str, root: Optional[Tuple[str, int]]) -> _Bound:
    text = text.strip()
    if text in ("inf", "+inf", "-inf"):
        return _Bound(None, None)
    p = poly_parse(text, root=root)
    return _Bound(p, _const_surd(p, root))


def _quad_coeffs(p: Poly, var: str) -> Tuple[Fraction, Fraction, Fraction]:
    alpha = beta = gamma = Fraction(0)
    for mono, c in p.items():
        if mono == _ONE:
            gamma = c
        elif mono == ((var, 1),):
            beta = c
        elif mono == ((var, 2),):
            alpha = c
        else:
            raise InvalidParams(
                f"quad1 factor must be a quadratic in {var}: {poly_str(p)}"
            )
    return alpha, beta, gamma


def _quad_value(
    alpha: Fraction, beta: Fraction, gamma: Fraction, x: SurdValue
) -> SurdValue:
    return x * x * alpha + x * beta + SurdValue(gamma)


def _justify_quad1(
    factor: Factor, region: _Region, root: Optional[Tuple[str, int]]
) -> None:
    if len(factor.args) != 3:
        raise InvalidParams("quad1 needs arguments [var, lo, hi]")
    var, lo_txt, hi_txt = factor.args
    p = poly_parse(factor.expr, root=root)
    alpha, beta, gamma = _quad_coeffs(p, var)
    lo = _parse_bound(lo_txt, root)
    hi = _parse_bound(hi_txt, root)

    if lo.value is not None and hi.value is not None and not lo.value <= hi.value:
        raise UnjustifiedFactor(f"quad1 interval is empty: {factor.expr}")

    for bound in (lo, hi):
        if bound.value is not None:
            if _quad_value(alpha, beta, gamma, bound.value).sign() < 0:
                raise UnjustifiedFactor(
                    f"quad1 endpoint value is negative: {factor.expr}"
                )

    if alpha > 0:
        vertex = SurdValue(-beta / (2 * alpha))
        inside_lo = lo.value is None or lo.value < vertex
        inside_hi = hi.value is None or vertex < hi.value
        if inside_lo and inside_hi:
            if beta * beta - 4 * alpha * gamma > 0:
                raise UnjustifiedFactor(
                    f"quad1 vertex dips negative: {factor.expr}"
                )
    elif alpha < 0:
        if lo.value is None or hi.value is None:
            raise UnjustifiedFactor(
                f"concave quad1 needs finite endpoints: {factor.expr}"
            )
    else:
        if beta and (lo.value is None or hi.value is None):
            raise UnjustifiedFactor(
                f"affine quad1 needs finite endpoints: {factor.expr}"
            )
        if not beta and gamma < 0:
            raise UnjustifiedFactor(f"constant quad1 is negative: {factor.expr}")

    _check_range_inside(var, lo, hi, region)


def _check_range_inside(
    var: str, lo: _Bound, hi: _Bound, region: _Region
) -> None:
    """The region's range of ``var`` must lie inside [lo, hi]."""
    if not region.constraints:
        if lo.value is not None or hi.value is not None:
            raise UnjustifiedFactor(
                f"quad1 interval on {var} does not cover an unconstrained region"
            )
        return
    var_poly = poly_var(var)
    if lo.value is not None:
        _check_region_implies(poly_sub(var_poly, lo.poly), region)
    if hi.value is not None:
        _check_region_implies(poly_sub(hi.poly, var_poly), region)


def _check_region_implies(needed: Poly, region: _Region) -> None:
    """Certify needed >= 0 on the region (needed affine, surd const ok)."""
    root_name = region.root[0] if region.root else None
    c = _affine_parts(needed, root_name)
    # direct comparison against a single constraint, exact in Q[sqrt(k)]
    for rc in region.constraints:
        if rc.coeffs == c.coeffs:
            delta = SurdValue(
                c.const_rat - rc.const_rat, c.const_root - rc.const_root, region.k
            )
            if delta.sign() >= 0:
                return
    # fall back to exact LP over the outward-rounded region
    lo, _, feasible = region.bounds_of(
        c.coeffs, c.relaxed_const(region.k, outer=False), outer=True
    )
    if not feasible:
        raise RegionUnsatisfiable("constraint region is empty")
    if lo is None or lo < 0:
        raise UnjustifiedFactor(
            f"range condition not implied by region: {poly_str(needed)} >= 0"
        )


def _justify_factor(
    factor: Factor,
    region: _Region,
    root: Optional[Tuple[str, int]],
    catalog: Optional[Mapping[str, Certificate]],
    stack: Tuple[str, ...],
) -> None:
    if factor.tag == "square":
        return
    if factor.tag == "const":
        value = _const_surd(poly_parse(factor.expr, root=root), root)
        if value.sign() < 0:
            raise UnjustifiedFactor(f"negative constant factor {factor.expr}")
        return
    if factor.tag == "surd":
        if root is None:
            raise InvalidParams("surd factor requires a root declaration")
        value = _const_surd(poly_parse(factor.expr, root=root), root)
        if value.sign() < 0:
            raise UnjustifiedFactor(f"negative surd factor {factor.expr}")
        return
    if factor.tag == "affine":
        p = poly_parse(factor.expr, root=root)
        lo = region.min_of_poly(p)
        if lo is None or lo < 0:
            raise UnjustifiedFactor(
                f"affine factor not nonnegative on region: {factor.expr}"
                + ("" if lo is None else f" (min {lo})")
            )
        return
    if factor.tag == "quad1":
        _justify_quad1(factor, region, root)
        return
    if factor.tag == "ref":
        _justify_ref(factor, region, root, catalog, stack)
        return
    if factor.tag == "raw":
        raise UnjustifiedFactor("raw factors are allowed only in identity entries")
    raise InvalidParams(f"unknown factor tag {factor.tag!r}")


def _justify_ref(
    factor: Factor,
    region: _Region,
    root: Optional[Tuple[str, int]],
    catalog: Optional[Mapping[str, Certificate]],
    stack: Tuple[str, ...],
) -> None:
    if not catalog:
        raise InvalidParams("ref factor requires a catalogue context")
    cid = factor.args[0]
    if cid in stack:
        raise InvalidParams(f"circular certificate reference via {cid}")
    ref = catalog.get(cid)
    if ref is None:
        raise InvalidParams(f"reference to unknown certificate {cid!r}")
    if ref.kind != "nonneg":
        raise UnjustifiedFactor(f"ref {cid} is not a nonneg certificate")
    if ref.root is not None and ref.root != root:
        raise UnjustifiedFactor(f"ref {cid} uses an incompatible root symbol")
    ref_region = _Region(ref.region, ref.root)
    for p in ref_region.polys:
        _check_region_implies(p, region)


# ---------------------------------------------------------------------------
# verification


def verify_certificate(
    cert: Certificate,
    catalog: Optional[Mapping[str, Certificate]] = None,
) -> CertificateReport:
    """Check one certificate; raises a RadsumError subclass on failure.

    For ``nonneg`` entries this verifies, in order: the region has a
    feasible point (sampled exactly and re-checked against every
    constraint), the decomposition reproduces the target as an exact
    polynomial identity, and every factor's nonnegativity on the region
    is justified by its tag.
    """
    kind = cert.kind
    if kind == "numeric":
        check = NUMERIC_CHECKS.get(cert.cert_id)
        if check is None:
            raise InvalidParams(f"no numeric check registered for {cert.cert_id}")
        ok, detail = check()
        if not ok:
            raise UnjustifiedFactor(f"{cert.cert_id}: {detail}")
        return CertificateReport(cert.cert_id, kind, "verified", detail)
    if kind == "delegated":
        if not cert.delegate:
            raise InvalidParams(f"{cert.cert_id}: delegated entry needs a delegate")
        return CertificateReport(cert.cert_id, kind, "delegated", cert.delegate)
    if kind not in ("nonneg", "identity"):
        raise InvalidParams(f"{cert.cert_id}: unknown kind {kind!r}")

    region = _Region(cert.region, cert.root)
    point = region.sample_point()
    if point is not None:
        region.check_point(point)

    target = poly_parse(cert.target, root=cert.root)
    total: Poly = {}
    for term in cert.terms:
        term_poly = poly_const(1)
        for factor in term.factors:
            term_poly = poly_mul(
                term_poly, _factor_poly(factor, cert.root, catalog)
            )
        if cert.root is not None:
            term_poly = poly_reduce_root(term_poly, *cert.root)
        total = poly_add(total, term_poly)
    diff = poly_sub(target, total)
    if cert.root is not None:
        diff = poly_reduce_root(diff, *cert.root)
    if not poly_is_zero(diff):
        raise IdentityMismatch(
            f"{cert.cert_id}: decomposition misses target by {poly_str(diff)}"
        )

    if kind == "nonneg":
        for term in cert.terms:
            for factor in term.factors:
                _justify_factor(
                    factor, region, cert.root, catalog, (cert.cert_id,)
                )
    n_terms = len(cert.terms)
    return CertificateReport(cert.cert_id, kind, "verified", f"{n_terms} terms")


def verify_catalog(
    path: Union[str, Path, None] = None,
) -> CatalogReport:
    """Verify every entry of the catalogue; failures are collected."""
    catalog = load_catalog(path)
    reports: List[CertificateReport] = []
    for cert in catalog.values():
        try:
            reports.append(verify_certificate(cert, catalog))
        except RadsumError as exc:
            reports.append(
                CertificateReport(cert.cert_id, cert.kind, "failed", str(exc))
            )
    return CatalogReport(tuple(reports))


# ---------------------------------------------------------------------------
# catalogue file parsing


def default_catalog_path() -> Path:
    return Path(__file__).parent / "data" / "catalog.txt"


_FACTOR_RE = re.compile(r"^(\w+)(?:\[([^\]]*)\])?(?:\{(.*)\})?$", re.S)


def _split_factors(line: str) -> List[str]:
    parts: List[str] = []
    depth = 0
    current: List[str] = []
    for ch in line:
        if ch in "{[":
            depth += 1
        elif ch in "}]":
            depth -= 1
            if depth < 0:
                raise InvalidParams(f"unbalanced braces in term: {line!r}")
        if ch == "*" and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth:
        raise InvalidParams(f"unbalanced braces in term: {line!r}")
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def _parse_factor(text: str) -> Factor:
    m = _FACTOR_RE.match(text.strip())
    if not m:
        raise InvalidParams(f"cannot parse factor {text!r}")
    tag, args_text, expr = m.group(1), m.group(2), m.group(3)
    args: Tuple[str, ...] = ()
    if args_text is not None:
        args = tuple(a.strip() for a in args_text.split(","))
    return Factor(tag=tag, expr=expr or "", args=args)


def _parse_term(line: str) -> Term:
    return Term(tuple(_parse_factor(f) for f in _split_factors(line)))


def _parse_root(text: str) -> Tuple[str, int]:
    m = re.fullmatch(r"(\w+)\s*=\s*(\d+)", text.strip())
    if not m:
        raise InvalidParams(f"cannot parse root declaration {text!r}")
    return m.group(1), int(m.group(2))


def load_catalog(
    path: Union[str, Path, None] = None,
) -> "Dict[str, Certificate]":
    """Parse the certificate catalogue file into an ordered mapping."""
    file_path = Path(path) if path is not None else default_catalog_path()
    catalog: Dict[str, Certificate] = {}
    current: Optional[Dict[str, object]] = None

    def flush() -> None:
        if current is None:
            return
        cert = Certificate(
            cert_id=str(current["id"]),
            kind=str(current.get("kind", "nonneg")),
            variables=tuple(current.get("vars", ())),  # type: ignore[arg-type]
            region=tuple(current.get("region", ())),  # type: ignore[arg-type]
            target=str(current.get("target", "0")),
            terms=tuple(current.get("terms", ())),  # type: ignore[arg-type]
            root=current.get("root"),  # type: ignore[arg-type]
            delegate=str(current.get("delegate", "")),
            note=str(current.get("note", "")),
        )
        if cert.cert_id in catalog:
            raise InvalidParams(f"duplicate certificate id {cert.cert_id!r}")
        catalog[cert.cert_id] = cert

    raw_lines = file_path.read_text().splitlines()
    lines: List[str] = []
    for line in raw_lines:
        if lines and lines[-1].endswith("\\"):
            lines[-1] = lines[-1][:-1].rstrip() + " " + line.strip()
        else:
            lines.append(line.rstrip())

    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[CERT"):
            m = re.fullmatch(r"\[CERT\s+([^\]]+)\]", stripped)
            if not m:
                raise InvalidParams(f"line {lineno}: bad section header {line!r}")
            flush()
            current = {"id": m.group(1).strip(), "terms": [], "region": []}
            continue
        if current is None:
            raise InvalidParams(f"line {lineno}: content before first [CERT] header")
        if ":" not in stripped:
            raise InvalidParams(f"line {lineno}: expected 'key: value', got {line!r}")
        key, value = stripped.split(":", 1)
        key, value = key.strip(), value.strip()
        if key == "kind":
            current["kind"] = value
        elif key == "vars":
            current["vars"] = tuple(value.split())
        elif key == "region":
            if value:
                current["region"] = tuple(  # type: ignore[assignment]
                    s.strip() for s in value.split(";") if s.strip()
                )
        elif key == "target":
            current["target"] = value
        elif key == "term":
            current["terms"].append(_parse_term(value))  # type: ignore[union-attr]
        elif key == "root":
            current["root"] = _parse_root(value)
        elif key == "delegate":
            current["delegate"] = value
        elif key == "note":
            prev = current.get("note", "")
            current["note"] = (f"{prev} {value}".strip()) if prev else value
        else:
            raise InvalidParams(f"line {lineno}: unknown key {key!r}")
    flush()
    if not catalog:
        raise InvalidParams(f"no certificates found in {file_path}")
    return catalog


# ---------------------------------------------------------------------------
# registered high-precision checks for 'numeric' entries


def _check_sum_vs_integral() -> Tuple[bool, str]:
    """Exact rational spot checks of sum_{k=2}^{m-1}(1-(kt)^2) <= I(t).

    The summand 1-(xt)^2 is decreasing and nonnegative on [1, 1/t], so
    the sum is bounded by the integral of the same function from 1 to
    1/t, which equals 2/(3t) - 1 + t^2/3.  The inequality is checked
    exactly at a spread of rational t in (0, 1/3].
    """
    samples = [
        Fraction(1, 3),
        Fraction(3, 10),
        Fraction(2, 7),
        Fraction(1, 4),
        Fraction(1, 5),
        Fraction(1, 7),
        Fraction(1, 10),
        Fraction(1, 23),
        Fraction(1, 100),
        Fraction(7, 100),
    ]
    for t in samples:
        m = -((-1) // t)  # ceil(1/t)
        total = sum(1 - (k * t) ** 2 for k in range(2, m))
        integral = Fraction(2, 3) / t - 1 + t * t / 3
        if total > integral:
            return False, f"sum exceeds integral at t={t}"
    return True, f"{len(samples)} exact rational samples"


def _check_e5_endpoint() -> Tuple[bool, str]:
    """Phibar(1/sqrt(3)) + Phibar(sqrt(3)) <= 0.324 at 60 digits."""
    import mpmath

    with mpmath.workdps(60):
        s3 = mpmath.sqrt(3)
        value = (1 - mpmath.ncdf(1 / s3)) + (1 - mpmath.ncdf(s3))
        ok = value < mpmath.mpf("0.324")
        return bool(ok), f"endpoint value {mpmath.nstr(value, 12)}"


def _check_e6_inner_max() -> Tuple[bool, str]:
    """max_T exp(-T^2/2)(T+sqrt(2)) < 1.69, attained at (sqrt(6)-sqrt(2))/2."""
    import mpmath

    with mpmath.workdps(60):
        t_star = (mpmath.sqrt(6) - mpmath.sqrt(2)) / 2

        def f(t):
            return mpmath.exp(-t * t / 2) * (t + mpmath.sqrt(2))

        peak = f(t_star)
        if not peak < mpmath.mpf("1.69"):
            return False, f"peak {mpmath.nstr(peak, 12)} not below 1.69"
        # critical point: f'(T) = 0 iff 1 - T^2 - sqrt(2) T = 0
        residual = 1 - t_star * t_star - mpmath.sqrt(2) * t_star
        if abs(residual) > mpmath.mpf("1e-50"):
            return False, "stationarity residual too large"
        step = mpmath.mpf("0.01")
        for i in range(1001):
            t = i * step
            if f(t) > peak + mpmath.mpf("1e-30"):
                return False, f"scan exceeds peak at T={t}"
        grad = 4 / mpmath.sqrt(2 * mpmath.pi) * peak
        if not grad < mpmath.mpf("2.7"):
            return False, f"gradient bound {mpmath.nstr(grad, 12)} not below 2.7"
        return True, f"peak {mpmath.nstr(peak, 12)}, gradient {mpmath.nstr(grad, 12)}"


NUMERIC_CHECKS = {
    "E1.case3red": _check_sum_vs_integral,
    "E5.endpoint": _check_e5_endpoint,
    "E6.inner_max": _check_e6_inner_max,
}
