"""Total differential operators, Lie-Euler and Euler-Lagrange expressions,
integration by parts and Helmholtz-Sonin expressions.

Every operator works on either side: on the homogeneous chart the
derivations are the formal d_i and the weighted partials in X^A_I; on the
adapted chart they are the total D_i and the weighted partials in y^s_I.
Sums over J run over ordered index tuples, which is the same as a sum over
canonical J weighted by the number of orderings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Mapping, Sequence

from ..multiindex import MultiIndex, indices, indices_upto, juxtapose, ordered_count
from ..symexpr import Expr, as_expr, atom, formal_derivative, jet_order, total_derivative, weighted_partial
from ..symexpr.calculus import DEFAULT_ORDER_CAP
from ..symexpr.core import ZERO


@dataclass(frozen=True)
class Side:
    """Which chart an operator acts on: ``homogeneous`` (labels A = 1..N on
    X^A_I) or ``adapted`` (labels s = 1..m on y^s_I)."""

    kind: str
    n: int
    labels: int
    cap: int = DEFAULT_ORDER_CAP

    def __post_init__(self) -> None:
        if self.kind not in ("homogeneous", "adapted"):
            raise ValueError(f"unknown side {self.kind!r}")

    @property
    def variable(self) -> str:
        return "X" if self.kind == "homogeneous" else "y"

    def d(self, f, i: int) -> Expr:
        if self.kind == "homogeneous":
            return formal_derivative(f, i, cap=self.cap)
        return total_derivative(f, i, cap=self.cap)

    def d_index(self, f, J: MultiIndex) -> Expr:
        for j in J.entries:
            f = self.d(f, j)
        return as_expr(f)

    def partial(self, f, A: int, I: MultiIndex) -> Expr:
        return weighted_partial(f, self.variable, A, I)

    def empty(self) -> MultiIndex:
        return MultiIndex((), self.n)

    def xi(self, A: int, I: MultiIndex | tuple = ()) -> Expr:
        idx = I.entries if isinstance(I, MultiIndex) else tuple(I)
        return Expr.of_atom(atom("xi", A, idx))


def homogeneous(n: int, N: int, cap: int = DEFAULT_ORDER_CAP) -> Side:
    return Side("homogeneous", n, N, cap)


def adapted(n: int, m: int, cap: int = DEFAULT_ORDER_CAP) -> Side:
    return Side("adapted", n, m, cap)


def _signed_sum(side: Side, r: int, I: MultiIndex, coeff) -> Expr:
    """sum_{|J| <= r-|I|} (-1)^|J| C(|I|+|J|, |I|) d_J coeff(IJ) over ordered J."""
    out = ZERO
    for k in range(r - I.degree + 1):
        scale = (-1) ** k * comb(I.degree + k, I.degree)
        for J in indices(side.n, k):
            c = coeff(juxtapose(I, J))
            if c.is_zero():
                continue
            out = out + side.d_index(c, J) * (scale * ordered_count(J))
    return out


def lie_euler(f, A: int, I: MultiIndex, side: Side, r: int | None = None) -> Expr:
    """The Lie-Euler expression with label A and index I of f (order r)."""
    f = as_expr(f)
    r = jet_order(f) if r is None else r
    if I.degree > r:
        raise ValueError(f"|I| = {I.degree} exceeds the order {r}")
    return _signed_sum(side, r, I, lambda K: side.partial(f, A, K))


def euler_lagrange(L, side: Side, r: int | None = None) -> list[Expr]:
    """Euler-Lagrange expressions, one per label."""
    L = as_expr(L)
    r = jet_order(L) if r is None else r
    return [lie_euler(L, A, side.empty(), side, r) for A in range(1, side.labels + 1)]


# ----------------------------------------------------------- integration by parts

OperatorTable = Mapping[tuple[int, MultiIndex], Expr]


def integrate_by_parts(P: OperatorTable, side: Side, r: int) -> dict[tuple[int, MultiIndex], Expr]:
    """Coefficients Q^I_A with P(xi) = sum_I d_I(xi^A Q^I_A)."""
    Q = {}
    for A in range(1, side.labels + 1):
        for I in indices_upto(side.n, r):
            Q[(A, I)] = _signed_sum(side, r, I, lambda K: as_expr(P.get((A, K), ZERO)))
    return Q


def apply_operator(P: OperatorTable, side: Side) -> Expr:
    """P(xi) = sum over ordered I of (d_I xi^A) P^I_A, in free xi-jet variables."""
    out = ZERO
    for (A, I), c in P.items():
        out = out + side.xi(A, I) * as_expr(c) * ordered_count(I)
    return out


def divergence_form(Q: OperatorTable, side: Side) -> Expr:
    """sum over ordered I of d_I(xi^A Q^I_A)."""
    out = ZERO
    for (A, I), c in Q.items():
        c = as_expr(c)
        if c.is_zero():
            continue
        out = out + side.d_index(side.xi(A) * c, I) * ordered_count(I)
    return out


def lagrangian_operator(L, side: Side, r: int | None = None) -> dict[tuple[int, MultiIndex], Expr]:
    """Coefficients of the operator xi -> variation of L along pr(xi)."""
    L = as_expr(L)
    r = jet_order(L) if r is None else r
    return {(A, I): side.partial(L, A, I) for A in range(1, side.labels + 1) for I in indices_upto(side.n, r)}


def product_rule_residual(f, g, A: int, I: MultiIndex, side: Side, r: int) -> Expr:
    """E^I_A(fg) minus the product-rule expansion; identically zero."""
    f, g = as_expr(f), as_expr(g)
    out = lie_euler(f * g, A, I, side, r)
    for k in range(r - I.degree + 1):
        scale = (-1) ** k * comb(I.degree + k, k)
        for J in indices(side.n, k):
            IJ = juxtapose(I, J)
            term = side.d_index(f, J) * lie_euler(g, A, IJ, side, r) + \
                side.d_index(g, J) * lie_euler(f, A, IJ, side, r)
            out = out - term * (scale * ordered_count(J))
    return out


# ----------------------------------------------------------------- Helmholtz


@dataclass(frozen=True)
class HelmholtzTensor:
    """Components H^J_{AB} keyed by (A, B, J), |J| <= s."""

    side: Side
    order: int
    components: Mapping[tuple[int, int, MultiIndex], Expr] = field(repr=False)

    def __getitem__(self, key: tuple[int, int, MultiIndex]) -> Expr:
        return self.components.get(key, ZERO)

    def nonzero(self) -> list[tuple[tuple[int, int, MultiIndex], Expr]]:
        return [(k, v) for k, v in self.components.items() if not v.is_zero()]

    def is_zero(self) -> bool:
        return not self.nonzero()


def helmholtz(T: Sequence, side: Side, s: int | None = None) -> HelmholtzTensor:
    """H^J_{AB} = d^J_B T_A - (-1)^|J| E^J_A(T_B)."""
    T = [as_expr(t) for t in T]
    if len(T) != side.labels:
        raise ValueError(f"expected {side.labels} components, got {len(T)}")
    s = max((jet_order(t) for t in T), default=0) if s is None else s
    comps = {}
    for A in range(1, side.labels + 1):
        for B in range(1, side.labels + 1):
            for J in indices_upto(side.n, s):
                comps[(A, B, J)] = side.partial(T[A - 1], B, J) - \
                    lie_euler(T[B - 1], A, J, side, s) * (-1) ** J.degree
    return HelmholtzTensor(side, s, comps)


def is_locally_variational(T: Sequence, side: Side, s: int | None = None) -> bool:
    return helmholtz(T, side, s).is_zero()
