"""The differential group of r-jets of origin-preserving diffeomorphisms,
its right action on velocity jets, and jet prolongations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import lcm
from typing import Callable, Mapping, Sequence

from . import linalg
from .multiindex import MultiIndex, indices, indices_upto, partition_blocks
from .symexpr import Expr, X, as_expr, evaluate, formal_derivative, param, plain_partial
from .symexpr.core import Atom, atom
from .symexpr.calculus import DEFAULT_ORDER_CAP, substitute


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagreed."""


def _q(v):
    return Fraction(v) if isinstance(v, int) else v


@dataclass(frozen=True)
class GroupElement:
    """Coordinates a^i_I, 1 <= |I| <= r, of an element of the jet group.

    Values are Fractions or Exprs; missing entries are zero.
    """

    n: int
    r: int
    coeffs: Mapping[tuple[int, MultiIndex], object] = field(repr=False)

    def __getitem__(self, key: tuple[int, MultiIndex]):
        return self.coeffs.get(key, 0)

    @classmethod
    def identity(cls, n: int, r: int) -> "GroupElement":
        return cls(n, r, {(i, MultiIndex((i,), n)): 1 for i in range(1, n + 1)})

    @classmethod
    def symbolic(cls, n: int, r: int) -> "GroupElement":
        """Element whose coordinates are the indeterminates a^i_I."""
        return cls(n, r, {(i, I): Expr.of_atom(atom("a", i, I.entries))
                          for i in range(1, n + 1) for I in indices_upto(n, r, 1)})

    @classmethod
    def from_table(cls, n: int, r: int, table: Mapping) -> "GroupElement":
        coeffs = {}
        for (i, I), v in table.items():
            I = I if isinstance(I, MultiIndex) else MultiIndex(I, n)
            coeffs[(i, I)] = v
        return cls(n, r, coeffs)

    def linear_block(self) -> list[list]:
        n = self.n
        return [[self[(k, MultiIndex((j,), n))] for j in range(1, n + 1)] for k in range(1, n + 1)]

    def det(self):
        return linalg.det(self.linear_block())

    def items(self):
        for i in range(1, self.n + 1):
            for I in indices_upto(self.n, self.r, 1):
                yield (i, I), self[(i, I)]

    def truncate(self, r: int) -> "GroupElement":
        return GroupElement(self.n, r, {k: v for k, v in self.coeffs.items() if k[1].degree <= r})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement) or (self.n, self.r) != (other.n, other.r):
            return NotImplemented
        return all(self[k] == other[k] for k, _ in self.items())

    def __hash__(self) -> int:
        return hash((self.n, self.r))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)


@dataclass(frozen=True)
class VelocityJet:
    """Coordinates x^A_I, 0 <= |I| <= r, of an r-jet of an immersion R^n -> R^N."""

    N: int
    n: int
    r: int
    coeffs: Mapping[tuple[int, MultiIndex], object] = field(repr=False)

    def __getitem__(self, key: tuple[int, MultiIndex]):
        return self.coeffs.get(key, 0)

    @classmethod
    def symbolic(cls, N: int, n: int, r: int) -> "VelocityJet":
        return cls(N, n, r, {(A, I): X(A, I) for A in range(1, N + 1) for I in indices_upto(n, r)})

    @classmethod
    def from_table(cls, N: int, n: int, r: int, table: Mapping) -> "VelocityJet":
        coeffs = {}
        for (A, I), v in table.items():
            I = I if isinstance(I, MultiIndex) else MultiIndex(I, n)
            coeffs[(A, I)] = v
        return cls(N, n, r, coeffs)

    def items(self):
        for A in range(1, self.N + 1):
            for I in indices_upto(self.n, self.r):
                yield (A, I), self[(A, I)]

    def block(self) -> GroupElement:
        """The group element built from the x^i_I with i <= n."""
        return GroupElement(self.n, self.r, {(i, I): v for (i, I), v in self.coeffs.items()
                                             if i <= self.n and I.degree >= 1})

    def first_order_block(self, split: Sequence[int] | None = None) -> list[list]:
        split = split or range(1, self.n + 1)
        return [[self[(k, MultiIndex((j,), self.n))] for j in range(1, self.n + 1)] for k in split]

    def point(self) -> dict[Atom, object]:
        """Assignment of the homogeneous coordinates, for evaluation."""
        return {atom("X", A, I.entries): v for (A, I), v in self.items()}

    def evaluate(self, f) -> object:
        return evaluate(f, self.point())

    def truncate(self, r: int) -> "VelocityJet":
        return VelocityJet(self.N, self.n, r, {k: v for k, v in self.coeffs.items() if k[1].degree <= r})

    def __eq__(self, other) -> bool:
        if not isinstance(other, VelocityJet) or (self.N, self.n, self.r) != (other.N, other.n, other.r):
            return NotImplemented
        return all(self[k] == other[k] for k, _ in self.items())

    def __hash__(self) -> int:
        return hash((self.N, self.n, self.r))


def _faa_sum(I: MultiIndex, inner: Callable[[int, MultiIndex], object],
             outer: Callable[[MultiIndex], object], n: int):
    """Sum over slot partitions (I_1..I_p) and directions j_1..j_p of
    inner(j_1, I_1)...inner(j_p, I_p) * outer({j_1..j_p})."""
    total = 0
    for blocks in partition_blocks(I):
        total = total + _faa_sum_blocks(blocks, inner, outer, n)
    return total


@lru_cache(maxsize=None)
def _faa_plan(n: int, r: int) -> tuple:
    """Slot numbering of the indices I, and per I every (direction, block)
    pairing of every slot partition as flat slots, with the outer slot."""
    order = list(indices_upto(n, r, 1))
    slot = {(i, I): (i - 1) * len(order) + q for q, I in enumerate(order) for i in range(1, n + 1)}
    plan = []
    for q, I in enumerate(order):
        terms = []
        for blocks in partition_blocks(I):
            for js in product(range(1, n + 1), repeat=len(blocks)):
                terms.append((tuple(slot[(j, B)] for j, B in zip(js, blocks)), order.index(MultiIndex(js, n))))
        plan.append((I, tuple(terms)))
    return tuple(order), slot, tuple(plan)


def _all_numeric(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def _faa_numeric(outer: list[Mapping[MultiIndex, object]], inner: GroupElement) -> list[dict]:
    """The partition sum of each outer row against the inner element in
    integer arithmetic: denominators are cleared once, and a p-block term then
    carries D^(p+1)."""
    n, r = inner.n, inner.r
    order, slot, plan = _faa_plan(n, r)
    values = [v for row in outer for v in row.values()] + list(inner.coeffs.values())
    D = lcm(*(Fraction(v).denominator for v in values), 1)
    B = [0] * (n * len(order))
    for key, v in inner.coeffs.items():
        B[slot[key]] = int(v * D)
    position = {I: q for q, I in enumerate(order)}
    rows = []
    for row in outer:
        A = [0] * len(order)
        for I, v in row.items():
            if I.degree:
                A[position[I]] = int(v * D)
        out = {}
        for I, terms in plan:
            by_size = [0] * (r + 1)
            for pairs, q in terms:
                val = A[q]
                if not val:
                    continue
                for s in pairs:
                    c = B[s]
                    if not c:
                        break
                    val *= c
                else:
                    by_size[len(pairs)] += val
            v = sum((Fraction(t, D ** (p + 1)) for p, t in enumerate(by_size) if t), Fraction(0))
            if v:
                out[I] = v
        rows.append(out)
    return rows


def _rows(coeffs: Mapping, count: int) -> list[dict]:
    rows: list[dict] = [{} for _ in range(count)]
    for (i, I), v in coeffs.items():
        rows[i - 1][I] = v
    return rows


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Jet of alpha∘beta where a = jet(alpha) is the outer map."""
    if (a.n, a.r) != (b.n, b.r):
        raise ValueError("shape mismatch in compose")
    if _all_numeric(a.coeffs.values()) and _all_numeric(b.coeffs.values()):
        rows = _faa_numeric(_rows(a.coeffs, a.n), b)
        return GroupElement(a.n, a.r, {(k, I): v for k, row in enumerate(rows, 1) for I, v in row.items()})
    n, r = a.n, a.r
    coeffs = {}
    for k in range(1, n + 1):
        for I in indices_upto(n, r, 1):
            v = _faa_sum(I, lambda j, B: b[(j, B)], lambda J: a[(k, J)], n)
            if v != 0:
                coeffs[(k, I)] = v
    return GroupElement(n, r, coeffs)


def inverse(a: GroupElement) -> GroupElement:
    """Order-by-order solve of a·b = e."""
    n, r = a.n, a.r
    block = [[_q(v) for v in row] for row in a.linear_block()]
    if linalg.det(block) == 0:
        raise ZeroDivisionError("singular linear block")
    inv = linalg.inverse(block)
    coeffs: dict = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if inv[i - 1][j - 1] != 0:
                coeffs[(i, MultiIndex((j,), n))] = inv[i - 1][j - 1]
    b = GroupElement(n, r, coeffs)
    for deg in range(2, r + 1):
        # b has no degree-deg entries yet, so (a b)_I is every term but the unknown a_1 b_I one
        ab = compose(a, b)
        rest = {(k, I): ab[(k, I)] for I in indices(n, deg) for k in range(1, n + 1)}
        for I in indices(n, deg):
            for j in range(1, n + 1):
                v = 0
                for k in range(1, n + 1):
                    c = inv[j - 1][k - 1]
                    if c != 0 and rest[(k, I)] != 0:
                        v = v - c * rest[(k, I)]
                if v != 0:
                    coeffs[(j, I)] = v
        b = GroupElement(n, r, coeffs)
    return b


def _faa_sum_blocks(blocks, inner, outer, n):
    partial = [((), 1)]
    for B in blocks:
        nxt = []
        for js, val in partial:
            for j in range(1, n + 1):
                c = inner(j, B)
                if c != 0:
                    nxt.append((js + (j,), val * c))
        partial = nxt
    total = 0
    for js, val in partial:
        o = outer(MultiIndex(js, n))
        if o != 0:
            total = total + val * o
    return total


def act(x: VelocityJet, a: GroupElement) -> VelocityJet:
    """Right action x·a: the jet of gamma∘alpha."""
    if (x.n, x.r) != (a.n, a.r):
        raise ValueError("shape mismatch in act")
    n = x.n
    coeffs = {}
    if _all_numeric(x.coeffs.values()) and _all_numeric(a.coeffs.values()):
        rows = _faa_numeric(_rows(x.coeffs, x.N), a)
        for A, row in enumerate(rows, 1):
            coeffs[(A, MultiIndex((), n))] = x[(A, MultiIndex((), n))]
            coeffs.update({(A, I): v for I, v in row.items()})
        return VelocityJet(x.N, n, x.r, coeffs)
    for A in range(1, x.N + 1):
        coeffs[(A, MultiIndex((), n))] = x[(A, MultiIndex((), n))]
        for I in indices_upto(n, x.r, 1):
            v = _faa_sum(I, lambda j, B: a[(j, B)], lambda J: x[(A, J)], n)
            if v != 0:
                coeffs[(A, I)] = v
    return VelocityJet(x.N, n, x.r, coeffs)


# ------------------------------------------------------------ prolongations


def _base_partial(f: Expr, B: int) -> Expr:
    return plain_partial(f, atom("X", B))


def prolong_chart_map(F: Sequence, n: int, r: int, verify: bool = True) -> dict[tuple[int, MultiIndex], Expr]:
    """Components F^A_I, |I| <= r, of the prolongation of a chart map.

    ``F`` lists the components as expressions in the base variables X^B.
    The closed partition formula is cross-checked against the recurrence
    F^A_{jI} = d_j F^A_I.
    """
    F = [as_expr(f) for f in F]
    N = len(F)
    derivs: dict[tuple[int, tuple[int, ...]], Expr] = {}

    def dF(A: int, Bs: tuple[int, ...]) -> Expr:
        key = (A, tuple(sorted(Bs)))
        if key not in derivs:
            if not Bs:
                derivs[key] = F[A - 1]
            else:
                derivs[key] = _base_partial(dF(A, key[1][1:]), key[1][0])
        return derivs[key]

    table = {}
    for A in range(1, N + 1):
        table[(A, MultiIndex((), n))] = F[A - 1]
        for I in indices_upto(n, r, 1):
            total = Expr.const(0)
            for blocks in partition_blocks(I):
                for Bs in product(range(1, N + 1), repeat=len(blocks)):
                    d = dF(A, Bs)
                    if d.is_zero():
                        continue
                    term = d
                    for B, blk in zip(Bs, blocks):
                        term = term * X(B, blk)
                    total = total + term
            table[(A, I)] = total
    if verify:
        for A in range(1, N + 1):
            for I in indices_upto(n, r, 1):
                j, rest = I.entries[0], MultiIndex(I.entries[1:], n)
                rec = formal_derivative(table[(A, rest)], j, cap=max(r, DEFAULT_ORDER_CAP))
                if rec != table[(A, I)]:
                    raise ConsistencyError(f"chart prolongation mismatch at F^{A}_{I}")
    return table


def apply_chart_map(table: Mapping[tuple[int, MultiIndex], Expr], f) -> Expr:
    """Compose f (over barred homogeneous coordinates) with a prolonged chart map."""
    return substitute(f, {atom("X", A, I.entries): v for (A, I), v in table.items()})


def curve_parameters(n: int) -> list[Expr]:
    """The parameters t1..tn (just ``t`` when n = 1)."""
    return [param("t")] if n == 1 else [param(f"t{i}") for i in range(1, n + 1)]


def prolong_immersion(gamma: Sequence, r: int, t0: Sequence | None = None,
                      params: Sequence[Expr] | None = None) -> VelocityJet:
    """r-jet of a polynomial map gamma: R^n -> R^N at t0 (symbolic in t if t0 is None)."""
    gamma = [as_expr(g) for g in gamma]
    if params is None:
        n = max(1, len({a for g in gamma for a in g.atoms() if a.kind == "p"}))
        params = curve_parameters(n)
    n = len(params)
    patoms = [p.atoms()[0] for p in params]
    derivs: dict = {}
    coeffs = {}
    for A, g in enumerate(gamma, start=1):
        derivs[(A, ())] = g
        for I in indices_upto(n, r):
            if I.degree:
                prev = derivs[(A, I.entries[1:])]
                derivs[(A, I.entries)] = plain_partial(prev, patoms[I.entries[0] - 1])
            v = derivs[(A, I.entries)]
            if t0 is not None:
                v = evaluate(v, dict(zip(patoms, t0)))
            coeffs[(A, I)] = v
    return VelocityJet(len(gamma), n, r, coeffs)


@dataclass(frozen=True)
class Evolution:
    """A vector field xi^A ∂_A on the total space, components over base variables X^B."""

    components: tuple

    def __post_init__(self) -> None:
        comps = tuple(as_expr(c) for c in self.components)
        for c in comps:
            for a in c.atoms():
                if a.kind == "X" and a.index:
                    raise ValueError("evolution components must depend on base variables only")
        object.__setattr__(self, "components", comps)


def prolong_evolution(xi: Evolution, s: int, n: int, cap: int = DEFAULT_ORDER_CAP) -> Callable[[Expr], Expr]:
    """The operator f -> sum_{|J| <= s} (d_J xi^A) ∂f/∂X^A_J on order-s functions."""
    if s + 1 > cap:
        raise ValueError("order cap exceeded")
    coeffs: dict = {}
    for A, c in enumerate(xi.components, start=1):
        coeffs[(A, ())] = c
        for J in indices_upto(n, s, 1):
            coeffs[(A, J.entries)] = formal_derivative(coeffs[(A, J.entries[1:])], J.entries[0], cap=cap)

    def apply(f) -> Expr:
        f = as_expr(f)
        total = Expr.const(0)
        for (A, J), c in coeffs.items():
            if c.is_zero():
                continue
            d = plain_partial(f, atom("X", A, J))
            if not d.is_zero():
                total = total + c * d
        return total

    return apply
