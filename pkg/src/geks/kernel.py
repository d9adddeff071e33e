"""Kernel-machine variance-component test for genetic main and G x E effects.

The genetic main effect ``h`` and the interaction ``g`` enter the alternative
through kernels ``K`` and ``K~``. At the null only their Gram matrices
matter. The pipeline:

1. ``Q = (r^T K r / 2, r^T sK~ r / 2)`` with ``r = y - mu0`` and
   ``sK~[i, j] = s_i s_j K~[i, j]``.
2. Null mean ``tr(P0 A) / 2`` and covariance ``tr(P0 A P0 B) / 2`` for
   ``A, B`` in ``{K, sK~}``.
3. Decorrelate: ``Q* = I_Q^{-1/2} Q``, ``mu* = I_Q^{-1/2} mu``.
4. Match each ``Q*`` component to ``kappa chi2(nu)`` with
   ``kappa = 1/(2 mu*)`` and ``nu = 2 mu*^2``.
5. ``Q*max = max(Q*_k / kappa_k)`` and
   ``p = 1 - F(Q*max; nu_1) F(Q*max; nu_2)``.

Only ``Q*_tau`` is needed for a main-effect-only test; read it off the result.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import AsymmetricKernel, DimensionMismatch, IndefiniteKernel, NonpositiveMatchedMean
from .linalg import as_matrix, sym_inv_sqrt_2x2, trace_prod
from .null_model import Dataset, NullFit
from .special import chi2_sf

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    kind: Literal["linear", "precomputed"] = "linear"
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("linear", "precomputed"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "linear":
            if self.matrix is not None:
                raise ValueError("a linear kernel takes no matrix")
            return
        if self.matrix is None:
            raise ValueError("a precomputed kernel requires a matrix")
        m = as_matrix(self.matrix, "kernel")
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"kernel must be square, got {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > 1e-8 * scale:
            raise AsymmetricKernel("kernel matrix is not symmetric")
        m = 0.5 * (m + m.T)
        if m.size and float(np.linalg.eigvalsh(m)[0]) < -1e-8 * scale:
            raise IndefiniteKernel("kernel matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    @classmethod
    def precomputed(cls, matrix) -> "KernelSpec":
        return cls("precomputed", matrix)

    def gram(self, Z: np.ndarray) -> np.ndarray:
        if self.kind == "linear":
            return Z @ Z.T
        if self.matrix.shape[0] != Z.shape[0]:
            raise DimensionMismatch(f"kernel is {self.matrix.shape[0]}x{self.matrix.shape[0]}, data has n={Z.shape[0]}")
        return np.array(self.matrix)


@dataclass(frozen=True)
class KernelPair:
    k: np.ndarray
    ktilde: np.ndarray
    s_ktilde: np.ndarray


@dataclass(frozen=True)
class KernelTestResult:
    q_tau: float
    q_tautilde: float
    mu_tau: float
    mu_tautilde: float
    i_q: np.ndarray
    q_star: np.ndarray
    mu_star: np.ndarray
    kappa_star: np.ndarray
    nu_star: np.ndarray
    q_star_max: float
    p_value: float
    warnings: tuple = ()

    def to_dict(self) -> dict:
        return {
            "q_tau": self.q_tau,
            "q_tautilde": self.q_tautilde,
            "mu_tau": self.mu_tau,
            "mu_tautilde": self.mu_tautilde,
            "i_q": self.i_q.tolist(),
            "q_star": self.q_star.tolist(),
            "mu_star": self.mu_star.tolist(),
            "kappa_star": self.kappa_star.tolist(),
            "nu_star": self.nu_star.tolist(),
            "q_star_max": self.q_star_max,
            "p_value": self.p_value,
            "warnings": list(self.warnings),
        }


def build_kernels(data: Dataset, spec_k: KernelSpec, spec_ktilde: KernelSpec) -> KernelPair:
    k = spec_k.gram(data.Z)
    kt = spec_ktilde.gram(data.Z)
    s = data.s
    return KernelPair(k, kt, np.outer(s, s) * kt)


def q_statistics(data: Dataset, fit: NullFit, kp: KernelPair) -> tuple[float, float]:
    r = data.y - fit.mu0
    return 0.5 * float(r @ kp.k @ r), 0.5 * float(r @ kp.s_ktilde @ r)


def q_moments(fit: NullFit, kp: KernelPair) -> tuple[np.ndarray, np.ndarray]:
    """Null mean and covariance of ``Q`` from the trace formulas."""
    p0 = fit.p0
    pk = p0 @ kp.k
    ps = p0 @ kp.s_ktilde
    mean = 0.5 * np.array([trace_prod(p0, kp.k), trace_prod(p0, kp.s_ktilde)])
    off = 0.5 * trace_prod(pk, ps)
    i_q = np.array([[0.5 * trace_prod(pk, pk), off], [off, 0.5 * trace_prod(ps, ps)]])
    return mean, i_q


def standardize_q(q, mean, i_q: np.ndarray, tol: float = DEGENERATE_TOL) -> tuple[np.ndarray, np.ndarray]:
    r = sym_inv_sqrt_2x2(i_q, tol)
    return r @ np.asarray(q, dtype=np.float64), r @ np.asarray(mean, dtype=np.float64)


def moment_match(mu_star) -> tuple[np.ndarray, np.ndarray]:
    """Scaled chi-square ``kappa chi2(nu)`` with mean ``mu*`` and unit variance."""
    mu_star = np.asarray(mu_star, dtype=np.float64)
    if np.any(mu_star <= 0):
        raise NonpositiveMatchedMean(
            f"standardized null mean {mu_star.tolist()} has a nonpositive component; "
            "the scaled chi-square match is undefined")
    return 1.0 / (2.0 * mu_star), 2.0 * mu_star ** 2


def combined_pvalue(q_star, kappa_star, nu_star) -> tuple[float, float, tuple]:
    """Return ``(Q*max, p_value, warnings)``; a negative ``Q*max`` is clamped to zero."""
    ratios = np.asarray(q_star, dtype=np.float64) / np.asarray(kappa_star, dtype=np.float64)
    q_max = float(np.max(ratios))
    warnings = ()
    if q_max < 0:
        msg = f"Q*max = {q_max:.6g} is negative; clamped to 0"
        logger.warning(msg)
        warnings = (msg,)
        q_max = 0.0
    # 1 - F1 F2 written in upper tails to keep precision when both are near 1
    sf1, sf2 = chi2_sf(q_max, nu_star[0]), chi2_sf(q_max, nu_star[1])
    p = sf1 + sf2 - sf1 * sf2
    return q_max, float(min(max(p, 0.0), 1.0)), warnings


def km_test(data: Dataset, fit: NullFit, spec_k: KernelSpec | None = None,
            spec_ktilde: KernelSpec | None = None, tol: float = DEGENERATE_TOL) -> KernelTestResult:
    kp = build_kernels(data, spec_k or KernelSpec.linear(), spec_ktilde or KernelSpec.linear())
    q = np.array(q_statistics(data, fit, kp))
    mean, i_q = q_moments(fit, kp)
    q_star, mu_star = standardize_q(q, mean, i_q, tol)
    kappa, nu = moment_match(mu_star)
    q_max, p, warnings = combined_pvalue(q_star, kappa, nu)
    return KernelTestResult(float(q[0]), float(q[1]), float(mean[0]), float(mean[1]), i_q,
                            q_star, mu_star, kappa, nu, q_max, p, warnings)
