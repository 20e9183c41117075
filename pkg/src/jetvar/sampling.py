"""Random exact test data: rationals, group elements, jets and polynomials."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from . import linalg
from .jetgroup import GroupElement, VelocityJet
from .multiindex import MultiIndex, indices_upto
from .symexpr import Atom, Expr, atom

MIN_BLOCK_DET = Fraction(1, 4)


def rational(rng: random.Random, bound: int = 4, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, den))


def nonzero_rational(rng: random.Random, bound: int = 4, den: int = 3) -> Fraction:
    while True:
        v = rational(rng, bound, den)
        if v:
            return v


def _regular_block(rng: random.Random, n: int) -> list[list[Fraction]]:
    while True:
        block = [[rational(rng) for _ in range(n)] for _ in range(n)]
        if abs(linalg.det(block)) >= MIN_BLOCK_DET:
            return block


def group_element(rng: random.Random, n: int, r: int) -> GroupElement:
    """Random invertible element with |det| >= 1/4 in its linear block."""
    block = _regular_block(rng, n)
    coeffs = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            coeffs[(i, MultiIndex((j,), n))] = block[i - 1][j - 1]
        for I in indices_upto(n, r, 2):
            coeffs[(i, I)] = rational(rng)
    return GroupElement(n, r, coeffs)


def regular_jet(rng: random.Random, N: int, n: int, r: int) -> VelocityJet:
    """Random velocity whose first n rows form a block with |det| >= 1/4."""
    block = _regular_block(rng, n)
    coeffs = {}
    for A in range(1, N + 1):
        for I in indices_upto(n, r):
            if A <= n and I.degree == 1:
                coeffs[(A, I)] = block[A - 1][I.entries[0] - 1]
            else:
                coeffs[(A, I)] = rational(rng)
    return VelocityJet(N, n, r, coeffs)


def adapted_atoms(n: int, m: int, r: int) -> list[Atom]:
    out = [atom("x", i) for i in range(1, n + 1)]
    out += [atom("y", s, I.entries) for s in range(1, m + 1) for I in indices_upto(n, r)]
    return out


def homogeneous_atoms(N: int, n: int, r: int) -> list[Atom]:
    return [atom("X", A, I.entries) for A in range(1, N + 1) for I in indices_upto(n, r)]


def polynomial(rng: random.Random, atoms: Sequence[Atom], terms: int = 4, degree: int = 2,
               require: Sequence[Atom] = ()) -> Expr:
    """Random polynomial; every atom in ``require`` appears in some term."""
    out = Expr.const(rng.randint(-3, 3))
    for k in range(terms + len(require)):
        t = Expr.const(Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)))
        factors = [rng.choice(atoms) for _ in range(rng.randint(1, degree))]
        if k < len(require):
            factors[0] = require[k]
        for f in factors:
            t = t * Expr.of_atom(f)
        out = out + t
    return out
