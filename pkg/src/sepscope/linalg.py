"""Minimal dense symmetric linear algebra for the separability measures.

Only what the measures need: Gram accumulation with exact symmetry, a
ridge-regularized SPD solve via Cholesky, and a deterministic power
iteration used as a validation oracle for the rank-1 shortcut in the
measures module.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ConvergenceError, ShapeError, SingularError

SYM_RTOL = 1e-12


def as_sym_matrix(matrix) -> np.ndarray:
    """Validate symmetry (1e-12 relative) and return an exactly symmetric copy."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ShapeError("symmetric matrix has non-finite entries")
    scale = np.abs(m).max()
    if scale > 0 and np.abs(m - m.T).max() > SYM_RTOL * scale:
        raise ShapeError("matrix is not symmetric to 1e-12 relative")
    upper = np.triu(m)
    return upper + np.triu(m, 1).T


def gram_accumulate(x, weight: float, into: np.ndarray) -> np.ndarray:
    """into += weight * X^T X, rows of X treated as points.

    One triangle is computed and mirrored so the result stays exactly
    symmetric under accumulation.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or into.shape != (x.shape[1], x.shape[1]):
        raise ShapeError(
            f"X has {x.shape[1] if x.ndim == 2 else '?'} columns, "
            f"accumulator is {into.shape}"
        )
    if weight != 0.0:
        gram = x.T @ x
        upper = np.triu(gram)
        into += weight * (upper + np.triu(gram, 1).T)
    return into


def solve_spd_ridge(msym, rhs, ridge_rel: float = 0.0) -> np.ndarray:
    """Solve (M + ridge_rel * mean_diag * I) x = rhs by Cholesky.

    ridge_rel is relative to the mean diagonal, so a zero matrix stays
    singular no matter the ridge.
    """
    m = as_sym_matrix(msym)
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape[0] != m.shape[0]:
        raise ShapeError(f"rhs length {rhs.shape[0]} vs order {m.shape[0]}")
    if ridge_rel < 0:
        raise ValueError("ridge_rel must be >= 0")
    n = m.shape[0]
    if ridge_rel > 0:
        mean_diag = np.trace(m) / n
        m = m + (ridge_rel * mean_diag) * np.eye(n)
    try:
        factor = cho_factor(m, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularError(f"Cholesky breakdown: {exc}") from None
    x = cho_solve(factor, rhs, check_finite=False)
    if not np.all(np.isfinite(x)):
        raise SingularError("solve produced non-finite values")
    return x


def power_iter_max_eig(
    msym,
    tol: float = 1e-12,
    max_iter: int = 5000,
    seed: int = 0,
) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and unit eigenvector of a symmetric matrix.

    Iterates on M + cI with a Gershgorin shift c so the dominant eigenvalue
    of the shifted matrix is the algebraic maximum of M.  The start vector
    is seeded for reproducibility.
    """
    m = as_sym_matrix(msym)
    n = m.shape[0]
    shift = float(np.abs(m).sum(axis=1).max())
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = float(v @ m @ v)
    for _ in range(max_iter):
        w = m @ v + shift * v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # v is in the kernel of the shifted matrix; M = -shift*I on v
            return lam, v
        v = w / norm
        lam_new = float(v @ m @ v)
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return lam_new, v
        lam = lam_new
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations"
    )
