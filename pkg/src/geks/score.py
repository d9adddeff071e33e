"""Parametric score test for genetic main effects and G x E interaction.

The alternative model adds ``a^T z_i + s_i b^T z_i`` to the null linear
predictor. With ``G = [Z, S.Z]`` (the genotypes and their row-wise scaling by
``s``), the score for ``(a, b)`` at the null fit is ``U = G^T (y - mu0)`` and its
efficient information is the Schur complement
``I22 - I21 I11^{-1} I12``.

The information blocks use weights ``p(1-p)``, ``s p(1-p)`` and
``s^2 p(1-p)``; the last one, for the interaction-interaction block, is what
the Fisher information of the model requires.

Under the null, ``SS = U^T I^{22} U`` is referred to a chi-square with
``rank([Z, S.Z])`` degrees of freedom.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTest, DimensionMismatch
from .linalg import numerical_rank, pivoted_basis, spd_factor
from .null_model import Dataset, NullFit
from .special import chi2_sf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InformationBlocks:
    i11: np.ndarray
    i12: np.ndarray
    i22: np.ndarray
    schur: np.ndarray
    schur_rank: int


@dataclass(frozen=True)
class ScoreTestResult:
    ss: float
    dof: int
    p_value: float
    rank_zs: int
    schur_rank: int
    score: np.ndarray = field(repr=False)
    warnings: tuple = ()

    def to_dict(self) -> dict:
        return {
            "ss": self.ss,
            "dof": self.dof,
            "p_value": self.p_value,
            "rank_zs": self.rank_zs,
            "schur_rank": self.schur_rank,
            "score": self.score.tolist(),
            "warnings": list(self.warnings),
        }


def interaction_design(data: Dataset) -> np.ndarray:
    """``[Z, S.Z]``: genotypes followed by genotypes scaled row-wise by ``s``."""
    return np.hstack([data.Z, data.s[:, None] * data.Z])


def information_blocks(data: Dataset, fit: NullFit, rank_tol: float | None = None) -> InformationBlocks:
    X, Z, s = data.X, data.Z, data.s
    d1, d2 = fit.d1, fit.d2
    d3 = s * d2
    i11 = X.T @ (d1[:, None] * X)
    i12 = np.hstack([X.T @ (d1[:, None] * Z), X.T @ (d2[:, None] * Z)])
    zd1z = Z.T @ (d1[:, None] * Z)
    zd2z = Z.T @ (d2[:, None] * Z)
    zd3z = Z.T @ (d3[:, None] * Z)
    i22 = np.block([[zd1z, zd2z], [zd2z.T, zd3z]])
    schur = i22 - i12.T @ spd_factor(i11).solve(i12)
    schur = 0.5 * (schur + schur.T)
    i22 = 0.5 * (i22 + i22.T)
    return InformationBlocks(i11, i12, i22, schur, numerical_rank(schur, rank_tol))


def score_vector(data: Dataset, fit: NullFit) -> np.ndarray:
    r = data.y - fit.mu0
    return np.concatenate([data.Z.T @ r, data.Z.T @ (data.s * r)])


def pinv_quadratic(u: np.ndarray, m: np.ndarray, tol: float | None = None) -> float:
    """``u^T m^+ u`` for symmetric PSD ``m`` restricted to its pivoted non-degenerate columns."""
    keep = pivoted_basis(m, tol)
    if keep.size == 0:
        return 0.0
    sub = m[np.ix_(keep, keep)]
    uk = u[keep]
    return float(uk @ spd_factor(sub).solve(uk))


def ge_score_test(data: Dataset, fit: NullFit, rank_tol: float | None = None) -> ScoreTestResult:
    if data.p < 1:
        raise DimensionMismatch("at least one SNP is required")
    if fit.mu0.shape[0] != data.n:
        raise DimensionMismatch("null fit does not belong to this dataset")
    dof = numerical_rank(interaction_design(data), rank_tol)
    if dof == 0:
        raise DegenerateTest("rank of [Z, S.Z] is zero; nothing to test")
    blocks = information_blocks(data, fit, rank_tol)
    u = score_vector(data, fit)
    ss = max(pinv_quadratic(u, blocks.schur, rank_tol), 0.0)
    warnings = []
    if dof != blocks.schur_rank:
        msg = (f"degrees of freedom {dof} (rank of [Z, S.Z]) differ from the rank "
               f"{blocks.schur_rank} of the efficient information")
        logger.warning(msg)
        warnings.append(msg)
    p_value = chi2_sf(ss, dof)
    return ScoreTestResult(ss, dof, p_value, dof, blocks.schur_rank, u, tuple(warnings))
