"""Regular velocities, their invariants y^s_I and adapted charts on the
Grassmann bundle, chart transitions, and related consistency checks."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from . import linalg
from .jetgroup import (
    ConsistencyError,
    GroupElement,
    VelocityJet,
    _faa_sum,
    act,
    apply_chart_map,
    compose,
    inverse,
    prolong_chart_map,
    prolong_immersion,
)
from .multiindex import MultiIndex, indices_upto
from .symexpr import Expr, X, as_expr, evaluate, formal_derivative, total_derivative
from .symexpr.calculus import plain_partial, substitute
from .symexpr.core import Atom, atom


class RegularityError(ValueError):
    """The first-order block of a velocity is singular."""


@dataclass(frozen=True)
class AdaptedPoint:
    """Adapted coordinates (x^i, y^s_I) of a point of the Grassmann bundle."""

    n: int
    m: int
    r: int
    x: tuple
    y: Mapping[tuple[int, MultiIndex], object] = field(repr=False)

    def __getitem__(self, key: tuple[int, MultiIndex]):
        return self.y.get(key, 0)

    def coordinate_count(self) -> int:
        return len(self.x) + sum(1 for _ in self.items())

    def items(self):
        for s in range(1, self.m + 1):
            for I in indices_upto(self.n, self.r):
                yield (s, I), self[(s, I)]

    def point(self) -> dict[Atom, object]:
        pt = {atom("x", i): v for i, v in enumerate(self.x, start=1)}
        pt.update({atom("y", s, I.entries): v for (s, I), v in self.items()})
        return pt

    def evaluate(self, f):
        return evaluate(f, self.point())

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdaptedPoint):
            return NotImplemented
        return (self.n, self.m, self.r) == (other.n, other.m, other.r) and \
            all(a == b for a, b in zip(self.x, other.x)) and \
            all(self[k] == other[k] for k, _ in self.items())

    def __hash__(self) -> int:
        return hash((self.n, self.m, self.r))


def regularity_condition(jet: VelocityJet, split: Sequence[int] | None = None):
    """Determinant of the first-order block selected by ``split``."""
    split = tuple(split or range(1, jet.n + 1))
    if len(split) != jet.n:
        raise ValueError("split must select n rows")
    return linalg.det(jet.first_order_block(split))


def is_regular(jet: VelocityJet, split: Sequence[int] | None = None) -> bool:
    return regularity_condition(jet, split) != 0


# ------------------------------------------------------------- symbolic tables


@lru_cache(maxsize=None)
def symbolic_z(n: int, r: int) -> GroupElement:
    """z = inverse of the symbolic block, verified against z^i_{jI} = z^p_j d_p z^i_I."""
    z = inverse(VelocityJet.symbolic(n, n, r).block())
    for i in range(1, n + 1):
        for I in indices_upto(n, r, 2):
            j, rest = I.entries[0], MultiIndex(I.entries[1:], n)
            rec = sum((z[(p, MultiIndex((j,), n))] * formal_derivative(z[(i, rest)], p)
                       for p in range(1, n + 1)), Expr.const(0))
            if rec != z[(i, I)]:
                raise ConsistencyError(f"z recurrence fails at z^{i}_{I}")
    return z


@lru_cache(maxsize=None)
def symbolic_invariants(n: int, m: int, r: int) -> dict[tuple[int, MultiIndex], Expr]:
    """y^s_I as functions of the homogeneous coordinates.

    Built by the recurrence y^s_{iI} = z^j_i d_j y^s_I and checked against the
    action route y = x·z at the symbolic level.
    """
    z = symbolic_z(n, r)
    table: dict = {}
    for s in range(1, m + 1):
        table[(s, MultiIndex((), n))] = X(n + s)
        for I in indices_upto(n, r, 1):
            i, rest = I.entries[0], MultiIndex(I.entries[1:], n)
            table[(s, I)] = sum((z[(j, MultiIndex((i,), n))] * formal_derivative(table[(s, rest)], j)
                                 for j in range(1, n + 1)), Expr.const(0))
    acted = act(VelocityJet.symbolic(n + m, n, r), z)
    for (s, I), v in table.items():
        if I.degree and acted[(n + s, I)] != v:
            raise ConsistencyError(f"invariant y^{s}_{I}: recurrence and action disagree")
    return table


def rho_substitution(n: int, m: int, r: int) -> dict[Atom, Expr]:
    """Adapted coordinates expressed in homogeneous ones (the projection)."""
    sub = {atom("x", i): X(i) for i in range(1, n + 1)}
    for (s, I), v in symbolic_invariants(n, m, r).items():
        sub[atom("y", s, I.entries)] = v
    return sub


def compose_with_projection(f, n: int, m: int, r: int) -> Expr:
    """f∘rho: an adapted-chart function pulled back to the homogeneous chart."""
    return substitute(f, rho_substitution(n, m, r))


def block_det(n: int) -> Expr:
    """det(x^i_j) in homogeneous coordinates."""
    return linalg.det([[X(i, (j,)) for j in range(1, n + 1)] for i in range(1, n + 1)])


# ------------------------------------------------------------------ operations


def z_element(jet: VelocityJet, verify: bool = True) -> GroupElement:
    """The group element z inverse to the block of a regular velocity."""
    if not is_regular(jet):
        raise RegularityError("velocity is not regular for the split (1..n)")
    if verify:
        symbolic_z(jet.n, jet.r)
    return inverse(jet.block())


def invariants(jet: VelocityJet, verify: bool = True) -> AdaptedPoint:
    """Adapted coordinates of the contact element of a regular velocity."""
    n, m = jet.n, jet.N - jet.n
    z = z_element(jet, verify=verify)
    if verify:
        symbolic_invariants(n, m, jet.r)
    acted = act(jet, z)
    ys = {(s, I): acted[(n + s, I)] for s in range(1, m + 1) for I in indices_upto(n, jet.r)}
    xs = tuple(jet[(i, MultiIndex((), n))] for i in range(1, n + 1))
    return AdaptedPoint(n, m, jet.r, xs, ys)


def reconstruct(point: AdaptedPoint, xblock: GroupElement) -> VelocityJet:
    """The velocity with block ``xblock`` over the adapted point: x^s_I = (y·x)^s_I."""
    n, m, r = point.n, point.m, point.r
    if (xblock.n, xblock.r) != (n, r):
        raise ValueError("shape mismatch in reconstruct")
    coeffs = {}
    e = MultiIndex((), n)
    for i in range(1, n + 1):
        coeffs[(i, e)] = point.x[i - 1]
        for I in indices_upto(n, r, 1):
            coeffs[(i, I)] = xblock[(i, I)]
    for s in range(1, m + 1):
        coeffs[(n + s, e)] = point[(s, e)]
        for I in indices_upto(n, r, 1):
            coeffs[(n + s, I)] = _faa_sum(I, lambda j, B: xblock[(j, B)], lambda J: point[(s, J)], n)
    return VelocityJet(n + m, n, r, coeffs)


def weyl_witness(x1: VelocityJet, x2: VelocityJet) -> GroupElement | None:
    """A group element a with x2 = x1·a, or None when none exists."""
    a = compose(inverse(x1.block()), x2.block())
    return a if act(x1, a) == x2 else None


def phi_criterion(x1: VelocityJet, x2: VelocityJet) -> dict:
    """Phi^s_I = ((y2 - y1)·x2-block)^s_I; all vanish iff the invariants agree."""
    p1, p2 = invariants(x1), invariants(x2)
    n, r = x1.n, x1.r
    blk = x2.block()
    out = {}
    for s in range(1, p1.m + 1):
        for I in indices_upto(n, r, 1):
            out[(s, I)] = _faa_sum(I, lambda j, B: blk[(j, B)],
                                   lambda J: p2[(s, J)] - p1[(s, J)], n)
        out[(s, MultiIndex((), n))] = p2[(s, MultiIndex((), n))] - p1[(s, MultiIndex((), n))]
    return out


# ------------------------------------------------------------------ transitions


@dataclass(frozen=True)
class TransitionData:
    """Adapted chart change: the map F, Q^l_p = D_p xbar^l, P = Q^-1, J = det Q,
    the contact matrix P^s_v and the table of ybar^s_I in unbarred coordinates."""

    n: int
    m: int
    r: int
    F: tuple
    Q: list = field(repr=False)
    P: list = field(repr=False)
    J: Expr = field(repr=False)
    contact: list = field(repr=False)
    ybar: Mapping[tuple[int, MultiIndex], Expr] = field(repr=False)

    def substitution(self) -> dict[Atom, Expr]:
        sub = {atom("x", i): self.F[i - 1] for i in range(1, self.n + 1)}
        for (s, I), v in self.ybar.items():
            sub[atom("y", s, I.entries)] = v
        return sub

    def pullback(self, fbar) -> Expr:
        """Express a function of barred coordinates in unbarred ones."""
        return substitute(fbar, self.substitution())

    def barred_total_derivative(self, f, i: int) -> Expr:
        """Dbar_i = P^j_i D_j acting on functions of the unbarred coordinates."""
        return sum((self.P[j][i - 1] * total_derivative(f, j + 1) for j in range(self.n)), Expr.const(0))


def transition(F: Sequence, n: int, m: int, r: int, verify: bool = True) -> TransitionData:
    """Chart change xbar^i = F^i(x, y), ybar^s = F^{n+s}(x, y) prolonged to order r."""
    F = tuple(as_expr(f) for f in F)
    if len(F) != n + m:
        raise ValueError("F must have n + m components")
    Q = [[total_derivative(F[l], p) for p in range(1, n + 1)] for l in range(n)]
    J = linalg.det(Q)
    if as_expr(J).is_zero():
        raise ZeroDivisionError("Q is singular")
    P = linalg.inverse(Q)
    ybar: dict = {}
    e = MultiIndex((), n)
    for s in range(1, m + 1):
        ybar[(s, e)] = F[n + s - 1]
        for I in indices_upto(n, r, 1):
            i, rest = I.entries[0], MultiIndex(I.entries[1:], n)
            ybar[(s, I)] = sum((P[j - 1][i - 1] * total_derivative(ybar[(s, rest)], j)
                                for j in range(1, n + 1)), Expr.const(0))
    if verify:
        for s in range(1, m + 1):
            for I in indices_upto(n, r, 2):
                for pos in set(I.entries[1:]):
                    rest = I.remove(pos)
                    alt = sum((P[j - 1][pos - 1] * total_derivative(ybar[(s, rest)], j)
                               for j in range(1, n + 1)), Expr.const(0))
                    if alt != ybar[(s, I)]:
                        raise ConsistencyError(f"ybar^{s}_{I} is not symmetric")
    contact = [[plain_partial(F[n + s], atom("y", v))
                - sum((ybar[(s + 1, MultiIndex((i,), n))] * plain_partial(F[i - 1], atom("y", v))
                       for i in range(1, n + 1)), Expr.const(0))
                for v in range(1, m + 1)] for s in range(m)] if r >= 1 else []
    return TransitionData(n, m, r, F, Q, P, as_expr(J), contact, ybar)


# ----------------------------------------------------------------- oracles


def _random_polynomial(atoms: Sequence[Atom], rng: random.Random, terms: int = 4, degree: int = 2) -> Expr:
    out = Expr.const(rng.randint(-3, 3))
    for _ in range(terms):
        t = Expr.const(Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)))
        for _ in range(rng.randint(1, degree)):
            t = t * Expr.of_atom(rng.choice(atoms))
        out = out + t
    return out


def dd_relation_check(gamma: Sequence, F: Sequence, n: int, r: int = 2,
                      samples: int = 3, seed: int = 0) -> bool:
    """Check d̄_i = d_i under the chart map F and d_i(f∘rho) = x^j_i (D_j f)∘rho
    for random polynomials f, evaluating along the prolonged immersion gamma."""
    rng = random.Random(seed)
    gamma = [as_expr(g) for g in gamma]
    N = len(gamma)
    m = N - n
    table = prolong_chart_map(F, n, r)
    ok = True
    hom_atoms = [atom("X", A, I.entries) for A in range(1, N + 1) for I in indices_upto(n, r - 1)]
    ad_atoms = [atom("x", i) for i in range(1, n + 1)] + \
        [atom("y", s, I.entries) for s in range(1, m + 1) for I in indices_upto(n, r - 1)]
    sub = rho_substitution(n, m, r)
    for _ in range(samples):
        t0 = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)]
        jet = prolong_immersion(gamma, r, t0)
        if not is_regular(jet):
            continue
        fbar = _random_polynomial(hom_atoms, rng)
        f = _random_polynomial(ad_atoms, rng)
        frho = substitute(f, sub)
        for i in range(1, n + 1):
            lhs = apply_chart_map(table, formal_derivative(fbar, i))
            rhs = formal_derivative(apply_chart_map(table, fbar), i)
            if jet.evaluate(lhs) != jet.evaluate(rhs):
                ok = False
            lhs2 = formal_derivative(frho, i)
            rhs2 = sum((X(j, (i,)) * substitute(total_derivative(f, j), sub) for j in range(1, n + 1)),
                       Expr.const(0))
            if jet.evaluate(lhs2) != jet.evaluate(rhs2):
                ok = False
    return ok
