"""Chart descriptions and constructors for jet variables."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator

from ..multiindex import MultiIndex, indices_upto
from .core import Atom, Expr, atom

SIDES = ("homogeneous", "adapted", "mixed")


@dataclass(frozen=True)
class ChartSpec:
    """Shape of a coordinate chart: base arity n, fibre arity m, order r.

    The base directions of a velocity chart are labels 1..n; labels
    n+1..n+m are the fibre directions.
    """

    n: int
    m: int
    r: int
    side: str = "adapted"

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1 or self.r < 0:
            raise ValueError("need n >= 1, m >= 1, r >= 0")
        if self.side not in SIDES:
            raise ValueError(f"unknown chart side {self.side!r}")

    @property
    def N(self) -> int:
        return self.n + self.m

    def with_order(self, r: int) -> "ChartSpec":
        return ChartSpec(self.n, self.m, r, self.side)

    def variables(self) -> Iterator[Atom]:
        n = self.n
        if self.side == "homogeneous":
            for A in range(1, self.N + 1):
                for I in indices_upto(n, self.r):
                    yield atom("X", A, I.entries)
            return
        for i in range(1, n + 1):
            yield atom("x", i)
            if self.side == "mixed":
                for I in indices_upto(n, self.r, 1):
                    yield atom("x", i, I.entries)
        for s in range(1, self.m + 1):
            for I in indices_upto(n, self.r):
                yield atom("y", s, I.entries)

    def dimension(self) -> int:
        if self.side == "adapted":
            return self.m * comb(self.n + self.r, self.n) + self.n
        return sum(1 for _ in self.variables())

    def contains(self, a: Atom) -> bool:
        if a.kind == "p":
            return True
        if a.kind == "f":
            return all(self.contains(b) for b in a.arg.atoms())
        if len(a.index) > self.r or any(not 1 <= e <= self.n for e in a.index):
            return False
        if self.side == "homogeneous":
            return a.kind == "X" and 1 <= a.label <= self.N
        if a.kind == "y":
            return 1 <= a.label <= self.m
        if a.kind == "x":
            return 1 <= a.label <= self.n and (not a.index or self.side == "mixed")
        return False


def adapted_dimension(n: int, m: int, r: int) -> int:
    return m * comb(n + r, n) + n


def _entries(index) -> tuple[int, ...]:
    if isinstance(index, MultiIndex):
        return index.entries
    return tuple(index)


def X(A: int, index=()) -> Expr:
    """Homogeneous velocity coordinate x^A_I."""
    return Expr.of_atom(atom("X", A, _entries(index)))


def x(i: int, index=()) -> Expr:
    """Base coordinate x^i, or the mixed-chart coordinate x^i_I."""
    return Expr.of_atom(atom("x", i, _entries(index)))


def y(s: int, index=()) -> Expr:
    """Fibre jet coordinate y^s_I."""
    return Expr.of_atom(atom("y", s, _entries(index)))


def xi(A: int, index=()) -> Expr:
    """Free jet d_I xi^A of a vector-field component."""
    return Expr.of_atom(atom("xi", A, _entries(index)))


def a(i: int, index) -> Expr:
    """Jet-group coordinate a^i_I."""
    return Expr.of_atom(atom("a", i, _entries(index)))


def param(name: str) -> Expr:
    return Expr.of_atom(atom("p", name))
