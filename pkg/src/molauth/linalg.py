"""Small dense SPD linear algebra: Cholesky with a scale-relative pivot
tolerance, triangular solves, and an inverse built from the factor."""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, SingularMatrixError

PIVOT_RTOL = 1e-12
SYMMETRY_RTOL = 1e-12


def check_symmetric(a: np.ndarray, rtol: float = SYMMETRY_RTOL) -> None:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > rtol * scale:
        raise SingularMatrixError("matrix is not symmetric")


def cholesky(a, rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Lower factor ``G`` with ``G @ G.T == a``.

    A pivot ``<= rtol * max(diag(a))`` raises :class:`SingularMatrixError`.
    """
    a = np.asarray(a, dtype=float)
    check_symmetric(a)
    n = a.shape[0]
    diag_max = float(np.max(np.diag(a))) if n else 0.0
    tol = rtol * diag_max
    if not (diag_max > 0 and math.isfinite(diag_max)):
        raise SingularMatrixError("matrix has no positive diagonal entry")
    g = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - g[j, :j] @ g[j, :j]
        if not pivot > tol:
            raise SingularMatrixError(
                f"pivot {j} = {pivot:.3e} is below tolerance {tol:.3e}; matrix is rank-deficient"
            )
        g[j, j] = math.sqrt(pivot)
        g[j + 1:, j] = (a[j + 1:, j] - g[j + 1:, :j] @ g[j, :j]) / g[j, j]
    return g


def solve_lower(g: np.ndarray, b) -> np.ndarray:
    """Forward substitution ``g y = b``; ``b`` may carry extra trailing columns."""
    b = np.asarray(b, dtype=float)
    n = g.shape[0]
    if b.shape[0] != n:
        raise DimensionError(f"right-hand side has {b.shape[0]} rows, expected {n}")
    y = np.empty_like(b)
    for i in range(n):
        y[i] = (b[i] - g[i, :i] @ y[:i]) / g[i, i]
    return y


def solve_upper(u: np.ndarray, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    n = u.shape[0]
    if b.shape[0] != n:
        raise DimensionError(f"right-hand side has {b.shape[0]} rows, expected {n}")
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - u[i, i + 1:] @ x[i + 1:]) / u[i, i]
    return x


def cho_solve(g: np.ndarray, b) -> np.ndarray:
    """Solve ``(g g^T) x = b`` given the lower factor ``g``."""
    return solve_upper(g.T, solve_lower(g, b))


def cho_inverse(g: np.ndarray) -> np.ndarray:
    """``(g g^T)^{-1}``, symmetrized."""
    w = solve_lower(g, np.eye(g.shape[0]))
    inv = w.T @ w
    return 0.5 * (inv + inv.T)
