"""Small dense numerical linear algebra used by the dual-space methods.

Thresholded kernels come from the SVD, column selection from a pivoted
Gram-Schmidt sweep (largest remaining norm first, ties to the smallest
index), eigenvalue signatures from a symmetric eigensolver, and inverses
from partially pivoted elimination with an explicit singularity check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError

DEFAULT_TOL = 1e-8

#: relative pivot size below which elimination reports singularity
SINGULAR_PIVOT_TOL = 1e-13


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal basis of a thresholded null space, one vector per row."""

    vectors: np.ndarray
    tol: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __iter__(self):
        return iter(self.vectors)


def numerical_kernel(matrix, tol: float = DEFAULT_TOL) -> KernelBasis:
    """Right kernel at relative threshold ``tol``.

    Keeps the right-singular vectors whose singular values satisfy
    sigma <= tol * sigma_max, with sigma_max taken as 1 when all
    singular values vanish (e.g. the zero matrix).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    rows, cols = m.shape
    if cols == 0 or (rows == 0 and cols == 0):
        raise ValueError("empty matrix")
    if rows == 0:
        return KernelBasis(np.eye(cols), tol)
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size and s[0] > 0.0 else 1.0
    rank = int(np.sum(s > tol * smax))
    return KernelBasis(vh[rank:].copy(), tol)


def pivot_columns(matrix, tol: float = DEFAULT_TOL) -> list:
    """Indices of numerical-rank many well-conditioned columns.

    Pivoted Gram-Schmidt: repeatedly pick the column with the largest
    residual norm (ties broken by smallest index), orthogonalize the
    rest against it, and stop once the best residual drops to
    tol * (largest initial column norm).  Deterministic for fixed input.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.atleast_2d(np.asarray(matrix, dtype=float)).copy()
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return []
    norms = np.linalg.norm(m, axis=0)
    scale = norms.max()
    if scale == 0.0:
        return []
    selected: list = []
    remaining = list(range(cols))
    while remaining:
        res = np.linalg.norm(m[:, remaining], axis=0)
        best = int(np.argmax(res))
        if res[best] <= tol * scale:
            break
        j = remaining.pop(best)
        selected.append(j)
        q = m[:, j] / np.linalg.norm(m[:, j])
        for k in remaining:
            m[:, k] -= q @ m[:, k] * q
            m[:, k] -= q @ m[:, k] * q  # second sweep for stability
    return selected


def signature(sym, tol: float = DEFAULT_TOL) -> tuple:
    """(n_pos, n_neg, n_zero) eigenvalue counts of a symmetric matrix.

    Counts eigenvalues above tol * max|eig|, below the negative of that,
    and in between.  Rejects input that is not symmetric within
    tol * norm.
    """
    s = np.atleast_2d(np.asarray(sym, dtype=float))
    if s.shape[0] != s.shape[1]:
        raise ValueError("signature needs a square matrix")
    scale = np.abs(s).max() if s.size else 0.0
    if scale and np.abs(s - s.T).max() > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    w = np.linalg.eigvalsh(0.5 * (s + s.T))
    wscale = np.abs(w).max() if w.size else 0.0
    if wscale == 0.0:
        return (0, 0, s.shape[0])
    n_pos = int(np.sum(w > tol * wscale))
    n_neg = int(np.sum(w < -tol * wscale))
    return (n_pos, n_neg, s.shape[0] - n_pos - n_neg)


def approx_inverse(matrix) -> tuple:
    """Floating-point inverse by pivoted elimination.

    Returns ``(inverse, residual)`` with residual = ||M M^-1 - I||_inf.
    Raises :class:`SingularMatrixError` when a pivot falls below
    SINGULAR_PIVOT_TOL * ||M||_inf.
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise ValueError("approx_inverse needs a square matrix")
    norm = np.abs(m).sum(axis=1).max() if m.size else 0.0
    a = np.hstack([m.copy(), np.eye(n)])
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < SINGULAR_PIVOT_TOL * max(norm, 1e-300):
            raise SingularMatrixError(
                f"pivot {abs(a[p, k]):.3e} below threshold at column {k}")
        if p != k:
            a[[k, p]] = a[[p, k]]
        a[k] /= a[k, k]
        for r in range(n):
            if r != k and a[r, k] != 0.0:
                a[r] -= a[r, k] * a[k]
    inv = a[:, n:]
    residual = float(np.abs(m @ inv - np.eye(n)).sum(axis=1).max())
    return inv, residual
