"""Dense factor-space geometry.

A "factor" is a tall n x r array U (r <= n) representing the PSD matrix
U @ U.T. Two factors describe the same PSD matrix exactly when they differ
by a right multiplication with an orthonormal r x r matrix, so factors are
compared modulo that rotation:

    dist(U, V) = min over orthonormal R of ||U - V R||_F

with the minimizer given in closed form by the orthogonal Procrustes
solution. Everything in this module is a pure function of its inputs;
matrices with NaN or Inf entries are rejected at the boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatchError, ZeroMatrixError

__all__ = [
    "as_matrix",
    "as_factor",
    "require_same_shape",
    "frobenius_norm",
    "spectral_norm",
    "singular_values",
    "sigma_min_positive",
    "column_space_projector",
    "procrustes_align",
    "dist",
    "orthonormality_defect",
]

# Absolute floor below which a singular value never counts as positive,
# regardless of matrix scale.
_SIGMA_FLOOR = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float array, rejecting NaN/Inf and empty axes."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got ndim={m.ndim}")
    if min(m.shape) < 1:
        raise ValueError(f"matrix must be non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def as_factor(a) -> np.ndarray:
    """Coerce to a valid factor: 2-d, finite, and tall (r <= n)."""
    u = as_matrix(a)
    n, r = u.shape
    if r > n:
        raise ValueError(f"factor matrices are tall (cols <= rows), got shape {u.shape}")
    return u


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")


def frobenius_norm(m) -> float:
    """sqrt of the sum of squared entries."""
    return float(np.linalg.norm(as_matrix(m)))


def spectral_norm(m) -> float:
    """Largest singular value, computed from a full SVD."""
    return float(singular_values(m)[0])


def singular_values(m) -> np.ndarray:
    """All min(rows, cols) singular values, in descending order."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def _positive_tol(shape: tuple[int, int], sigma: np.ndarray) -> float:
    # standard numerical-rank convention, with an absolute floor
    return max(max(shape) * np.finfo(float).eps * float(sigma[0]), _SIGMA_FLOOR)


def sigma_min_positive(m) -> float:
    """Smallest singular value that counts as strictly positive.

    Raises ZeroMatrixError when every singular value sits below the rank
    tolerance (max(rows, cols) * sigma_1 * machine epsilon, floored at 1e-12).
    """
    m = as_matrix(m)
    sigma = np.linalg.svd(m, compute_uv=False)
    positive = sigma[sigma > _positive_tol(m.shape, sigma)]
    if positive.size == 0:
        raise ZeroMatrixError("matrix has no strictly positive singular values")
    return float(positive[-1])


def _column_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of col(U), one column per positive singular value."""
    left, sigma, _ = np.linalg.svd(u, full_matrices=False)
    keep = sigma > _positive_tol(u.shape, sigma)
    if not np.any(keep):
        raise ZeroMatrixError("the zero matrix has no column space basis")
    return left[:, keep]


def column_space_projector(u) -> np.ndarray:
    """Orthogonal projector Q Q^T onto the column space of a nonzero factor."""
    q = _column_basis(as_factor(u))
    return q @ q.T


def procrustes_align(u, v) -> np.ndarray:
    """Orthonormal r x r matrix R minimizing ||U - V R||_F.

    Closed form: with the SVD V.T @ U = P S Q^T the minimizer is R = P Q^T,
    the classical maximizer of tr(R^T V^T U). When V.T @ U is rank deficient
    the SVD bases are not unique, but every completion attains the same
    residual, so the returned R is always *a* minimizer.
    """
    u = as_factor(u)
    v = as_factor(v)
    require_same_shape(u, v)
    p, _, qt = np.linalg.svd(v.T @ u)
    return p @ qt


def dist(u, v) -> float:
    """Rotation-invariant factor distance min_R ||U - V R||_F.

    Symmetric in its arguments and zero exactly when V equals U times an
    orthonormal matrix.
    """
    u = as_factor(u)
    v = as_factor(v)
    require_same_shape(u, v)
    return float(np.linalg.norm(u - v @ procrustes_align(u, v)))


def orthonormality_defect(r) -> float:
    """Max-abs entry of R^T R - I; zero for an exactly orthonormal R."""
    r = as_matrix(r)
    return float(np.max(np.abs(r.T @ r - np.eye(r.shape[1]))))
