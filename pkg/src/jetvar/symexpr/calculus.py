"""Derivations on expressions: plain and weighted partials, formal and total
derivatives, substitution and exact evaluation."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from ..multiindex import MultiIndex, multiplicity_weight
from . import poly as P
from .core import FUNCTIONS, ONE, ZERO, Atom, Expr, as_expr, atom, atom_by_id

DEFAULT_ORDER_CAP = 10


class OrderCapError(ValueError):
    """A derivative would exceed the caller's jet-order cap."""


Rule = Callable[[Atom], "Expr | None"]


def _poly_derivation(p: dict, images: Mapping[int, Expr]) -> Expr:
    polys: dict = {}
    rest = ZERO
    for k, img in images.items():
        dp = P.diff(p, k)
        if not dp:
            continue
        if img.is_polynomial():
            P.add_into(polys, P.mul(dp, img.num))
        else:
            rest = rest + Expr(dp) * img
    return Expr(polys) + rest if rest else Expr(polys)


def derive(f, rule: Rule) -> Expr:
    """Apply the derivation determined by its values ``rule(atom)`` on atoms.

    Function atoms are handled by the chain rule through their registered
    derivative.  ``rule`` returns None (or zero) for atoms it annihilates.
    """
    f = as_expr(f)
    cache: dict[int, Expr] = {}

    def image(k: int) -> Expr:
        if k not in cache:
            a = atom_by_id(k)
            if a.kind == "f":
                inner = derive(a.arg, rule)
                cache[k] = FUNCTIONS[a.label].derivative(a.arg) * inner if inner else ZERO
            else:
                v = rule(a)
                cache[k] = ZERO if v is None else as_expr(v)
        return cache[k]

    from .core import _factor_info

    num_images = {k: image(k) for k in P.atoms(f.num)}
    d_num = _poly_derivation(f.num, {k: v for k, v in num_images.items() if v})
    if not f.den:
        return d_num
    # quotient rule over the factored denominator
    moving = []
    for fk, e in f.den:
        info = _factor_info(fk)
        imgs = {k: image(k) for k in info.atoms}
        imgs = {k: v for k, v in imgs.items() if v}
        if imgs:
            moving.append((fk, e, Expr(info.poly), _poly_derivation(info.poly, imgs)))
    if not moving:
        return d_num * Expr(ONE.num, f.den) if d_num else ZERO
    base = Expr(ONE.num, f.den)
    total = d_num
    for fk, e, fpoly, dfpoly in moving:
        total = total - Expr(f.num) * e * dfpoly / fpoly
    return total * base


def plain_partial(f, v) -> Expr:
    """Ordinary partial derivative with respect to an atom."""
    target = v if isinstance(v, Atom) else _single_atom(v)
    return derive(f, lambda a: ONE if a == target else None)


def _single_atom(v) -> Atom:
    v = as_expr(v)
    atoms = v.atoms()
    if len(atoms) != 1 or v != Expr.of_atom(atoms[0]):
        raise ValueError(f"{v!r} is not a single variable")
    return atoms[0]


def weighted_partial(f, kind: str, label: int, index: MultiIndex, order_limit: int | None = None) -> Expr:
    """Weighted partial r_1!...r_n!/|I|! * d f / d(kind^label_I)."""
    if order_limit is not None and index.degree > order_limit:
        raise OrderCapError(f"|I| = {index.degree} exceeds chart order {order_limit}")
    w = multiplicity_weight(index)
    d = plain_partial(f, atom(kind, label, index.entries))
    return d * w if w != 1 else d


def jet_order(f) -> int:
    """Largest |I| over jet atoms (x, X, y, xi) of an expression."""
    best = 0
    for a in as_expr(f).atoms():
        if a.kind == "f":
            best = max(best, jet_order(a.arg))
        elif a.kind in ("x", "X", "y", "xi"):
            best = max(best, len(a.index))
    return best


def _check_cap(f: Expr, cap: int) -> None:
    if jet_order(f) + 1 > cap:
        raise OrderCapError(f"derivative would reach order {jet_order(f) + 1} > cap {cap}")


def formal_derivative(f, i: int, n: int | None = None, cap: int = DEFAULT_ORDER_CAP) -> Expr:
    """d_i on homogeneous or mixed charts (order-promoting).

    On the mixed chart d_i y^s_I = x^j_i y^s_{jI}, which needs the base
    arity ``n``.
    """
    f = as_expr(f)
    _check_cap(f, cap)

    def rule(a: Atom):
        if a.kind in ("X", "x", "xi"):
            return Expr.of_atom(atom(a.kind, a.label, a.index + (i,)))
        if a.kind == "y":
            if n is None:
                raise ValueError("base arity n is required on the mixed chart")
            out = ZERO
            for j in range(1, n + 1):
                out = out + Expr.of_atom(atom("x", j, (i,))) * Expr.of_atom(atom("y", a.label, a.index + (j,)))
            return out
        if a.kind in ("a", "p"):
            return None
        raise ValueError(f"formal derivative undefined on {a}")

    return derive(f, rule)


def total_derivative(f, i: int, cap: int = DEFAULT_ORDER_CAP) -> Expr:
    """D_i on the adapted chart (order-promoting)."""
    f = as_expr(f)
    _check_cap(f, cap)

    def rule(a: Atom):
        if a.kind == "x":
            if a.index:
                raise ValueError("total derivative is defined on the adapted chart only")
            return ONE if a.label == i else None
        if a.kind in ("y", "xi"):
            return Expr.of_atom(atom(a.kind, a.label, a.index + (i,)))
        if a.kind in ("a", "p"):
            return None
        raise ValueError(f"total derivative undefined on {a}")

    return derive(f, rule)


def commutator_check(f, A: int, I: MultiIndex, i: int) -> Expr:
    """[∂^I_A, d_i] f minus S+ over I of δ^{j_1}_i ∂^{j_2..j_k}_A f.

    Zero for every homogeneous-chart f; returned so callers can inspect a
    nonzero residual.
    """
    f = as_expr(f)
    cap = jet_order(f) + 2
    lhs = (weighted_partial(formal_derivative(f, i, cap=cap), "X", A, I)
           - formal_derivative(weighted_partial(f, "X", A, I), i, cap=cap))
    hits = I.entries.count(i)
    if not hits:
        return lhs
    rhs = weighted_partial(f, "X", A, I.remove(i)) * Fraction(hits, I.degree)
    return lhs - rhs


def truncated_total_derivative(f, i: int, r: int) -> Expr:
    """D_i restricted to the order-r chart: drops the y_{iI} terms with |I| = r."""
    f = as_expr(f)

    def rule(a: Atom):
        if a.kind == "x":
            return ONE if a.label == i and not a.index else None
        if a.kind == "y":
            if len(a.index) >= r:
                return None
            return Expr.of_atom(atom("y", a.label, a.index + (i,)))
        return None

    return derive(f, rule)


def substitute(f, mapping: Mapping[Atom, object]) -> Expr:
    """Replace atoms by expressions (function arguments included)."""
    f = as_expr(f)
    images: dict[int, Expr] = {}
    for k in f.atom_ids():
        a = atom_by_id(k)
        if a in mapping:
            images[k] = as_expr(mapping[a])
        elif a.kind == "f":
            from .core import apply_function

            images[k] = apply_function(a.label, substitute(a.arg, mapping))
        else:
            images[k] = Expr.of_atom(a)
    return _eval_ratfunc(f, images)


def _eval_poly_exprs(p: dict, images: Mapping[int, Expr]) -> Expr:
    power_cache: dict = {}

    def pw(k: int, e: int) -> Expr:
        key = (k, e)
        if key not in power_cache:
            power_cache[key] = images[k] ** e
        return power_cache[key]

    if all(images[k].is_polynomial() for k in P.atoms(p)):
        out: dict = {}
        for m, c in p.items():
            t = P.const(c)
            for k, e in m:
                t = P.mul(t, pw(k, e).num)
            P.add_into(out, t)
        return Expr(out)
    total = ZERO
    for m, c in p.items():
        t = Expr.const(c)
        for k, e in m:
            t = t * pw(k, e)
        total = total + t
    return total


def _eval_ratfunc(f: Expr, images: Mapping[int, Expr]) -> Expr:
    from .core import _factor_info

    num = _eval_poly_exprs(f.num, images)
    if not f.den:
        return num
    den = ONE
    for fk, e in f.den:
        den = den * _eval_poly_exprs(_factor_info(fk).poly, images) ** e
    return num / den


def evaluate(f, point: Mapping[Atom, object]):
    """Exact value of f at a point assigning rationals to its atoms."""
    f = as_expr(f)
    from .core import _factor_info

    vals: dict[int, object] = {}
    for k in f.atom_ids():
        a = atom_by_id(k)
        if a.kind == "f":
            arg = evaluate(a.arg, point)
            vals[k] = FUNCTIONS[a.label].evaluate(Fraction(arg))
        elif a in point:
            vals[k] = point[a]
        else:
            raise KeyError(f"no value for {a}")
    num = P.evaluate(f.num, vals)
    den = 1
    for fk, e in f.den:
        den = den * P.evaluate(_factor_info(fk).poly, vals) ** e
    if den == 0:
        raise ZeroDivisionError(f"denominator vanishes while evaluating {f.render()}")
    return P.norm_coeff(Fraction(num) / Fraction(den))


class Evaluator:
    """Evaluate many expressions at one point, caching atom values."""

    def __init__(self, point: Mapping[Atom, object]) -> None:
        self.point = dict(point)

    def __call__(self, f):
        return evaluate(f, self.point)
