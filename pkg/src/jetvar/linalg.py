"""Small dense linear algebra over any field-like scalars (Fraction or Expr)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def det(m: Sequence[Sequence]) -> object:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def adjugate(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    if n == 1:
        return [[1]]
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            c = det(minor)
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return out


def inverse(m: Sequence[Sequence]) -> Matrix:
    d = det(m)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    if isinstance(d, int):
        d = Fraction(d)
    return [[v / d for v in row] for row in adjugate(m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), 0) for j in range(len(b[0]))]
            for i in range(len(a))]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def solve(a: Sequence[Sequence], b: Sequence) -> list | None:
    """One solution of a x = b by Gauss-Jordan elimination, or None if the
    system is inconsistent.  Free unknowns are set to zero."""
    rows = [list(row) + [rhs] for row, rhs in zip(a, b)]
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / Fraction(rows[r][c]) if isinstance(rows[r][c], int) else 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [u - f * v for u, v in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    x = [0] * ncols
    for k, c in enumerate(pivots):
        x[c] = rows[k][-1]
    return x
