"""Pointwise rank, nullspace and span comparisons at a fixed tolerance.

Rank decisions use singular values: a direction counts when its singular
value exceeds ``tol * max(1, largest singular value)``.
"""

from __future__ import annotations

import numpy as np


def _threshold(s: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(s[0]) if s.size else 0.0)


def rank(a: np.ndarray, tol: float = 1e-9) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > _threshold(s, tol)))


def nullspace(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the right nullspace."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols)
    _, s, vt = np.linalg.svd(a)
    r = int(np.sum(s > _threshold(s, tol))) if s.size else 0
    return vt[r:].T.copy()


def column_basis(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the column space."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a)
    r = int(np.sum(s > _threshold(s, tol))) if s.size else 0
    return u[:, :r].copy()


def row_complement(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal coefficient vectors spanning the complement of ``ker a``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return np.zeros((a.shape[1], 0))
    _, s, vt = np.linalg.svd(a)
    r = int(np.sum(s > _threshold(s, tol))) if s.size else 0
    return vt[:r].T.copy()


def same_span(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    ra, rb = rank(a, tol), rank(b, tol)
    return ra == rb == rank(np.hstack([a, b]), tol)


def contains(a: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    v = np.asarray(v, dtype=float).reshape(a.shape[0], -1)
    return rank(np.hstack([a, v]), tol) == rank(a, tol)


def intersection(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Basis of ``span(a) & span(b)`` as columns."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    ker = nullspace(np.hstack([a, -b]), tol)
    return column_basis(a @ ker[: a.shape[1]], tol)


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solution of ``a x = b``."""
    return np.linalg.lstsq(a, b, rcond=None)[0]


def pivoted_elimination(a: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with partial pivoting; returns (rref, pivot columns)."""
    m = np.array(a, dtype=float)
    rows, cols = m.shape
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        k = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[k, c]) <= tol * scale:
            continue
        m[[r, k]] = m[[k, r]]
        m[r] /= m[r, c]
        for i in range(rows):
            if i != r:
                m[i] -= m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots
