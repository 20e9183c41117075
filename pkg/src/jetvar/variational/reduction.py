"""Homogeneous Lagrangians and equations on the velocity chart, and their
reduction to the adapted chart.

Labels on the homogeneous chart are A = 1..n for the base directions and
A = n + s for the fibre direction s.
"""

from __future__ import annotations

from ..grassmann import block_det, compose_with_projection
from ..jetgroup import GroupElement, VelocityJet, act
from ..multiindex import indices_upto
from ..symexpr import X, Expr, as_expr, atom, jet_order, substitute
from ..symexpr.core import ONE, ZERO


class HomogeneityError(ValueError):
    """The input fails the det-scaling (or the pullback) condition."""


def _base_arity_check(f: Expr, N: int) -> None:
    for a in f.atoms():
        if a.kind == "X" and a.label > N:
            raise ValueError(f"variable {a} exceeds N = {N}")
        if a.kind not in ("X", "p", "f"):
            raise ValueError(f"{a} is not a homogeneous-chart variable")


def acted(f, n: int, N: int, r: int, a: GroupElement | None = None) -> Expr:
    """f(x·a) with a symbolic (or given) group element a."""
    f = as_expr(f)
    _base_arity_check(f, N)
    a = a or GroupElement.symbolic(n, r)
    jet = act(VelocityJet.symbolic(N, n, r), a)
    return substitute(f, {atom("X", A, I.entries): as_expr(v) for (A, I), v in jet.items()})


def is_homogeneous(f, n: int, N: int, r: int | None = None) -> bool:
    """f(x·a) = det(a) f(x) for a fully symbolic a."""
    f = as_expr(f)
    r = max(jet_order(f), 1) if r is None else r
    a = GroupElement.symbolic(n, r)
    return acted(f, n, N, r, a) == as_expr(a.det()) * f


def normalized_frame(n: int, m: int, r: int) -> dict:
    """Substitution x^i_j = delta, x^i_I = 0 (|I| >= 2), x^s_I = y^s_I."""
    sub = {}
    for i in range(1, n + 1):
        sub[atom("X", i)] = Expr.of_atom(atom("x", i))
        for I in indices_upto(n, r, 1):
            sub[atom("X", i, I.entries)] = ONE if I.entries == (i,) else ZERO
    for s in range(1, m + 1):
        for I in indices_upto(n, r):
            sub[atom("X", n + s, I.entries)] = Expr.of_atom(atom("y", s, I.entries))
    return sub


def reduce(Lh, n: int, m: int, r: int | None = None, check: bool = True) -> Expr:
    """The adapted Lagrangian L with Lh = det(x) L∘rho."""
    Lh = as_expr(Lh)
    r = max(jet_order(Lh), 1) if r is None else r
    if check and not is_homogeneous(Lh, n, n + m, r):
        raise HomogeneityError("Lagrangian is not homogeneous")
    return substitute(Lh, normalized_frame(n, m, r))


def homogeneous_lagrangian(L, n: int, m: int, r: int | None = None) -> Expr:
    """det(x) L∘rho for an adapted Lagrangian L."""
    L = as_expr(L)
    r = max(jet_order(L), 1) if r is None else r
    return block_det(n) * compose_with_projection(L, n, m, r)


def homogeneous_equation(T, n: int, m: int, s: int | None = None) -> list[Expr]:
    """Components T_i = -det y^s_i T_s∘rho and T_{n+s} = det T_s∘rho."""
    T = [as_expr(t) for t in T]
    if len(T) != m:
        raise ValueError(f"expected {m} components")
    s = max([jet_order(t) for t in T] + [1]) if s is None else s
    det = block_det(n)
    lifted = [det * compose_with_projection(t, n, m, s) for t in T]
    out = []
    for i in range(1, n + 1):
        ys = [compose_with_projection(Expr.of_atom(atom("y", k, (i,))), n, m, s) for k in range(1, m + 1)]
        out.append(-sum((y * t for y, t in zip(ys, lifted)), ZERO))
    return out + lifted


def equation_conditions(Th, n: int, s: int | None = None) -> tuple[bool, bool]:
    """(det-scaling, vanishing pullback sum_A T_A x^A_j) for a homogeneous equation."""
    Th = [as_expr(t) for t in Th]
    N = len(Th)
    s = max([jet_order(t) for t in Th] + [1]) if s is None else s
    a = GroupElement.symbolic(n, s)
    det = as_expr(a.det())
    scaling = all(acted(t, n, N, s, a) == det * t for t in Th)
    pullback = all(sum((t * X(A, (j,)) for A, t in enumerate(Th, 1)), ZERO).is_zero()
                   for j in range(1, n + 1))
    return scaling, pullback


def hom_equation_reduce(Th, n: int, s: int | None = None) -> list[Expr]:
    """Adapted components T_s of a homogeneous equation, cross-checking the
    base components against -det y^s_i T_s∘rho."""
    Th = [as_expr(t) for t in Th]
    N = len(Th)
    m = N - n
    s = max([jet_order(t) for t in Th] + [1]) if s is None else s
    scaling, pullback = equation_conditions(Th, n, s)
    if not scaling:
        raise HomogeneityError("equation does not scale by det(a)")
    if not pullback:
        raise HomogeneityError("equation does not vanish along prolonged immersions")
    frame = normalized_frame(n, m, s)
    T = [substitute(Th[n + k], frame) for k in range(m)]
    if homogeneous_equation(T, n, m, s) != Th:
        raise HomogeneityError("base components do not match the reduced equation")
    return T
