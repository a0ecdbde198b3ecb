"""Small symbolic matrix helpers (determinant, inverse) over scalar trees."""

from __future__ import annotations

from typing import Sequence

from .scalars import ONE, ZERO, Scalar, as_scalar, total


def determinant(m: Sequence[Sequence[Scalar]]) -> Scalar:
    """Laplace expansion along rows, memoized on the remaining column set."""
    rows = [[as_scalar(v) for v in row] for row in m]
    size = len(rows)
    memo: dict[tuple[int, frozenset], Scalar] = {}

    def det(r: int, cols: frozenset) -> Scalar:
        if r == size:
            return ONE
        key = (r, cols)
        if key in memo:
            return memo[key]
        terms = []
        ordered = sorted(cols)
        for pos, c in enumerate(ordered):
            a = rows[r][c]
            if a.is_zero():
                continue
            sub = det(r + 1, cols - {c})
            if sub.is_zero():
                continue
            t = a * sub
            terms.append(t if pos % 2 == 0 else -t)
        out = total(terms)
        memo[key] = out
        return out

    return det(0, frozenset(range(size)))


def _minor(m, i: int, j: int):
    return [[v for c, v in enumerate(row) if c != j] for r, row in enumerate(m) if r != i]


def inverse(m: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    """Adjugate over determinant; the caller guarantees a nonvanishing determinant."""
    rows = [[as_scalar(v) for v in row] for row in m]
    size = len(rows)
    if any(len(r) != size for r in rows):
        raise ValueError("inverse needs a square matrix")
    if size == 1:
        return [[ONE / rows[0][0]]]
    det = determinant(rows)
    out = [[ZERO] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            cof = determinant(_minor(rows, j, i))
            if (i + j) % 2:
                cof = -cof
            out[i][j] = cof / det
    return out


def matvec(m: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> list[Scalar]:
    return [total(a * b for a, b in zip(row, v)) for row in m]
