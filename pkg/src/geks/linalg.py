"""Dense real linear algebra used by the test statistics.

Matrices are plain ``float64`` numpy arrays stored row-major. Genotypes are
kept as ``n x p`` (one row per individual); call sites transpose explicitly
when they need the ``p x n`` orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as LA

from .errors import DegenerateCovariance, DimensionMismatch, InvalidParameter, NotPositiveDefinite

EPS = np.finfo(np.float64).eps


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float64 array, rejecting NaN and Inf."""
    m = np.array(a, dtype=np.float64, copy=True)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidParameter(f"{name} contains non-finite entries")
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


@dataclass(frozen=True)
class SpdFactor:
    """Lower-triangular Cholesky factor ``L`` with ``m = L @ L.T``."""

    lower: np.ndarray

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=np.float64)
        if b.shape[0] != self.dimension:
            raise DimensionMismatch(f"rhs has {b.shape[0]} rows, factor has dimension {self.dimension}")
        return LA.cho_solve((self.lower, True), b, check_finite=False)

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T


def spd_factor(m: np.ndarray, sym_tol: float = 1e-10) -> SpdFactor:
    """Cholesky-factor a symmetric positive definite matrix.

    Raises NotPositiveDefinite when a pivot ``L[k, k]**2`` falls to or below
    ``dim * eps * max(diag(m))``.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    if dim == 0:
        return SpdFactor(np.zeros((0, 0)))
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > sym_tol * scale:
        raise InvalidParameter("matrix is not symmetric")
    max_diag = float(np.max(np.diag(m)))
    if max_diag <= 0:
        raise NotPositiveDefinite("largest diagonal entry is not positive")
    try:
        lower = LA.cholesky(m, lower=True, check_finite=False)
    except LA.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diag(lower) ** 2
    threshold = dim * EPS * max_diag
    if np.any(~np.isfinite(pivots)) or np.any(pivots <= threshold):
        k = int(np.argmin(pivots))
        raise NotPositiveDefinite(f"pivot {k} is {pivots[k]:.3e}, threshold {threshold:.3e}")
    return SpdFactor(lower)


def spd_solve(factor: SpdFactor, b: np.ndarray) -> np.ndarray:
    return factor.solve(b)


def _pivoted_r(m: np.ndarray):
    r, piv = LA.qr(m, mode="r", pivoting=True, check_finite=False)
    return np.abs(np.diag(r)), piv


def default_rank_tol(m: np.ndarray, rdiag: np.ndarray) -> float:
    if rdiag.size == 0:
        return 0.0
    return max(m.shape) * EPS * float(rdiag[0])


def pivoted_basis(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Column indices selected by column-pivoted QR, truncated at the numerical rank."""
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return np.zeros(0, dtype=int)
    rdiag, piv = _pivoted_r(m)
    if tol is None:
        tol = default_rank_tol(m, rdiag)
    rank = int(np.sum(rdiag > tol))
    return np.sort(piv[:rank])


def numerical_rank(m: np.ndarray, tol: float | None = None) -> int:
    """Rank by column-pivoted QR.

    A diagonal entry of ``R`` counts when its magnitude exceeds ``tol``; the
    default is ``max(rows, cols) * eps * max|R_kk|``.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0
    rdiag, _ = _pivoted_r(m)
    if tol is None:
        tol = default_rank_tol(m, rdiag)
    return int(np.sum(rdiag > tol))


def sym_eig_2x2(m: np.ndarray):
    """Closed-form eigendecomposition of a symmetric 2x2 matrix.

    Returns ``(eigenvalues, V)`` with ``m = V @ diag(eigenvalues) @ V.T``.
    """
    a, b, c = float(m[0, 0]), 0.5 * float(m[0, 1] + m[1, 0]), float(m[1, 1])
    theta = 0.5 * np.arctan2(2.0 * b, a - c)
    cs, sn = np.cos(theta), np.sin(theta)
    lam1 = a * cs * cs + 2.0 * b * sn * cs + c * sn * sn
    lam2 = a * sn * sn - 2.0 * b * sn * cs + c * cs * cs
    v = np.array([[cs, -sn], [sn, cs]])
    return np.array([lam1, lam2]), v


def sym_inv_sqrt_2x2(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Inverse symmetric square root ``V diag(lam**-0.5) V.T`` of a 2x2 SPD matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (2, 2):
        raise DimensionMismatch(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidParameter("matrix contains non-finite entries")
    lam, v = sym_eig_2x2(m)
    lo, hi = float(np.min(lam)), float(np.max(lam))
    if hi <= 0 or lo <= tol * hi:
        raise DegenerateCovariance(f"eigenvalues ({lo:.3e}, {hi:.3e}) fail the ratio tolerance {tol:g}")
    r = (v * lam ** -0.5) @ v.T
    return 0.5 * (r + r.T)


def trace_prod(a: np.ndarray, b: np.ndarray) -> float:
    """``trace(a @ b)`` without forming the product."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0] or b.shape[1] != a.shape[0]:
        raise DimensionMismatch(f"trace of product undefined for {a.shape} and {b.shape}")
    return float(np.einsum("ij,ji->", a, b))
