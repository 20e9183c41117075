"""Multi-indices over the directions 1..n, symmetrizers and slot partitions.

A multi-index is stored canonically as a sorted tuple, so ``(1, 2)`` and
``(2, 1)`` are the same object.  Formulas written over ordered index tuples
are evaluated by summing over canonical indices and multiplying by
:func:`ordered_count` (the number of ordered tuples with that content).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from math import factorial
from typing import Callable, Iterator, Sequence


@dataclass(frozen=True, order=True)
class MultiIndex:
    entries: tuple[int, ...]
    n: int

    def __init__(self, entries: Sequence[int] = (), n: int = 1) -> None:
        ent = tuple(sorted(int(e) for e in entries))
        if n < 1:
            raise ValueError("ambient arity must be >= 1")
        for e in ent:
            if not 1 <= e <= n:
                raise ValueError(f"direction {e} outside 1..{n}")
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "n", n)

    @property
    def degree(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def multiplicities(self) -> tuple[int, ...]:
        c = Counter(self.entries)
        return tuple(c.get(k, 0) for k in range(1, self.n + 1))

    def add(self, *directions: int) -> MultiIndex:
        return MultiIndex(self.entries + tuple(directions), self.n)

    def remove(self, direction: int) -> MultiIndex:
        ent = list(self.entries)
        ent.remove(direction)
        return MultiIndex(ent, self.n)

    def label(self) -> str:
        if self.n <= 9:
            return "".join(str(e) for e in self.entries)
        return "[" + ",".join(str(e) for e in self.entries) + "]"

    def __repr__(self) -> str:
        return "{" + ",".join(str(e) for e in self.entries) + "}"


def empty(n: int) -> MultiIndex:
    return MultiIndex((), n)


def juxtapose(i: MultiIndex, j: MultiIndex) -> MultiIndex:
    if i.n != j.n:
        raise ValueError(f"ambient arity mismatch: {i.n} vs {j.n}")
    return MultiIndex(i.entries + j.entries, i.n)


def multiplicity_weight(i: MultiIndex) -> Fraction:
    """r_1!...r_n! / |I|!"""
    num = 1
    for r in i.multiplicities():
        num *= factorial(r)
    return Fraction(num, factorial(i.degree))


def ordered_count(i: MultiIndex) -> int:
    """Number of ordered tuples whose sorted content is ``i``."""
    return int(1 / multiplicity_weight(i))


def indices(n: int, degree: int) -> Iterator[MultiIndex]:
    """Canonical multi-indices of one degree, in lexicographic order."""
    for c in combinations_with_replacement(range(1, n + 1), degree):
        yield MultiIndex(c, n)


def indices_upto(n: int, max_degree: int, min_degree: int = 0) -> Iterator[MultiIndex]:
    for k in range(min_degree, max_degree + 1):
        yield from indices(n, k)


def ordered_tuples(n: int, degree: int) -> Iterator[tuple[int, ...]]:
    return product(range(1, n + 1), repeat=degree)


@dataclass(frozen=True)
class SlotPartition:
    """A set partition of the positions 0..k-1 of a parent multi-index."""

    parent: MultiIndex
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        seen = sorted(p for b in self.blocks for p in b)
        if seen != list(range(self.parent.degree)) or any(not b for b in self.blocks):
            raise ValueError("blocks must partition the positions of the parent")
        object.__setattr__(
            self, "blocks", tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        )

    def __len__(self) -> int:
        return len(self.blocks)

    def sub_indices(self) -> tuple[MultiIndex, ...]:
        ent = self.parent.entries
        return tuple(MultiIndex([ent[p] for p in b], self.parent.n) for b in self.blocks)


def _set_partitions(k: int) -> Iterator[list[list[int]]]:
    # restricted growth strings give each set partition once; blocks come
    # out ordered by their smallest position
    if k == 0:
        return
    def rec(pos: int, blocks: list[list[int]]) -> Iterator[list[list[int]]]:
        if pos == k:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(pos)
            yield from rec(pos + 1, blocks)
            b.pop()
        blocks.append([pos])
        yield from rec(pos + 1, blocks)
        blocks.pop()
    yield from rec(0, [])


_PARTITION_CACHE: dict[int, tuple[tuple[tuple[int, ...], ...], ...]] = {}


def position_partitions(k: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    if k not in _PARTITION_CACHE:
        _PARTITION_CACHE[k] = tuple(
            tuple(tuple(b) for b in p) for p in _set_partitions(k)
        )
    return _PARTITION_CACHE[k]


def partitions(i: MultiIndex, blocks: int | None = None) -> Iterator[SlotPartition]:
    """Every partition of the slots of ``i``; optionally only those with ``blocks`` blocks."""
    for p in position_partitions(i.degree):
        if blocks is None or len(p) == blocks:
            yield SlotPartition(i, p)


def partition_blocks(i: MultiIndex) -> Iterator[tuple[MultiIndex, ...]]:
    """Sub-index tuples of every slot partition (fast path for inner loops)."""
    ent = i.entries
    for p in position_partitions(i.degree):
        yield tuple(MultiIndex([ent[q] for q in b], i.n) for b in p)


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    p = list(p)
    for a in range(len(p)):
        while p[a] != a:
            b = p[a]
            p[a], p[b] = p[b], p[a]
            sign = -sign
    return sign


def symmetrize(k: int, sign: int, tensor: Callable[[tuple], object]) -> Callable[[tuple], object]:
    """(1/k!) sum over permutations P of eps(P) * tensor(indices permuted by P).

    ``sign`` is +1 for the symmetrizer and -1 for the antisymmetrizer.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    perms = [(p, _perm_sign(p) if sign < 0 else 1) for p in permutations(range(k))]
    scale = Fraction(1, factorial(k))

    def projected(idx: tuple) -> object:
        idx = tuple(idx)
        if len(idx) != k:
            raise ValueError(f"expected {k} indices")
        total = 0
        for p, eps in perms:
            val = tensor(tuple(idx[q] for q in p))
            if val != 0:
                total = total + eps * val
        return total * scale

    return projected


def antisymmetric_sign(idx: Sequence[int]) -> int:
    """Sign of the sorting permutation, or 0 when an entry repeats."""
    if len(set(idx)) != len(idx):
        return 0
    order = sorted(range(len(idx)), key=lambda a: idx[a])
    return _perm_sign(order)
