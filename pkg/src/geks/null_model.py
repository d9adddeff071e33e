"""Cohort container and the covariates-only logistic fit under the null.

Under the null hypothesis the genetic terms vanish and the model reduces to
``logit(p_i) = X_i^T beta``. :func:`fit_null` estimates ``beta`` by
iteratively reweighted least squares and packages the quantities both tests
consume: fitted means, the weight diagonals ``p(1-p)`` and ``s p(1-p)``, and
the weighted projection ``P0 = W - W X (X^T W X)^{-1} X^T W``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import (
    ConstantOutcome,
    ConvergenceFailure,
    DataError,
    DimensionMismatch,
    PerfectSeparation,
    RankDeficientCovariates,
)
from .linalg import as_matrix, numerical_rank, spd_factor

logger = logging.getLogger(__name__)

PROB_CLAMP = 1e-10
MAX_ABS_COEF = 1e3
MAX_HALVINGS = 20


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Binary outcomes ``y``, covariates ``X`` (``n x q``), environment ``s`` and genotypes ``Z`` (``n x p``).

    Column 0 of ``X`` is the intercept and column ``env_col`` equals ``s``.
    """

    y: np.ndarray
    X: np.ndarray
    s: np.ndarray
    Z: np.ndarray
    env_col: int = -1
    snp_names: tuple = ()
    covariate_names: tuple = ()

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64).ravel().copy()
        X = as_matrix(self.X, "X")
        s = np.asarray(self.s, dtype=np.float64).ravel().copy()
        Z = as_matrix(self.Z, "Z")
        n = y.shape[0]
        for name, rows in (("X", X.shape[0]), ("s", s.shape[0]), ("Z", Z.shape[0])):
            if rows != n:
                raise DimensionMismatch(f"{name} has {rows} rows, y has {n}")
        if not np.all(np.isin(y, (0.0, 1.0))):
            raise DataError("y entries must be 0 or 1")
        if np.all(y == y[0]):
            raise ConstantOutcome("y must contain both cases and controls")
        if not np.all(np.isfinite(s)):
            raise DataError("s contains non-finite entries")
        if not np.all(X[:, 0] == 1.0):
            raise DataError("column 0 of X must be the all-ones intercept")
        env_col = self.env_col
        if env_col < 0:
            matches = [j for j in range(X.shape[1]) if np.array_equal(X[:, j], s)]
            if not matches:
                raise DataError("no column of X equals the environment vector s")
            env_col = matches[-1]
        elif env_col >= X.shape[1] or not np.array_equal(X[:, env_col], s):
            raise DataError(f"column {env_col} of X does not equal s")
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "s", _frozen(s))
        object.__setattr__(self, "Z", _frozen(Z))
        object.__setattr__(self, "env_col", int(env_col))
        if not self.snp_names:
            object.__setattr__(self, "snp_names", tuple(f"snp{j + 1}" for j in range(Z.shape[1])))
        if not self.covariate_names:
            names = ["intercept"] + [f"x{j}" for j in range(1, X.shape[1])]
            names[env_col] = "s"
            object.__setattr__(self, "covariate_names", tuple(names))

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def q(self) -> int:
        return self.X.shape[1]

    @property
    def p(self) -> int:
        return self.Z.shape[1]

    def with_rows(self, order) -> "Dataset":
        order = np.asarray(order)
        return Dataset(self.y[order], self.X[order], self.s[order], self.Z[order], self.env_col,
                       self.snp_names, self.covariate_names)


def make_dataset(y, s, Z, covariates=None) -> Dataset:
    """Assemble ``X = [1, covariates..., s]`` and build a :class:`Dataset`."""
    y = np.asarray(y, dtype=np.float64).ravel()
    s = np.asarray(s, dtype=np.float64).ravel()
    cols = [np.ones(y.shape[0])]
    if covariates is not None:
        cov = as_matrix(covariates, "covariates")
        cols.extend(cov.T)
    cols.append(s)
    X = np.column_stack(cols)
    return Dataset(y, X, s, Z, env_col=X.shape[1] - 1)


def loglik(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    eta = X @ beta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def _pinned(mu: np.ndarray) -> bool:
    return bool(np.any(mu <= PROB_CLAMP) or np.any(mu >= 1.0 - PROB_CLAMP))


@dataclass(frozen=True)
class NullFit:
    beta: np.ndarray
    mu0: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    p0: np.ndarray
    iterations: int
    converged: bool
    loglik_trace: tuple = field(default=(), repr=False)

    @property
    def w0(self) -> np.ndarray:
        return self.d1


def fit_null(data: Dataset, max_iter: int = 100, tol: float = 1e-10) -> NullFit:
    """Maximum-likelihood fit of the covariates-only logistic model by IRLS.

    Newton steps that lower the log-likelihood are halved, up to 20 times.
    The fit has converged when the largest coefficient change is below ``tol``.
    """
    X, y = data.X, data.y
    q = data.q
    if numerical_rank(X) < q:
        raise RankDeficientCovariates(f"X has rank {numerical_rank(X)} < {q} columns")

    beta = np.zeros(q)
    ybar = float(np.mean(y))
    beta[0] = np.log(ybar / (1.0 - ybar))
    ll = loglik(X, y, beta)
    trace = [ll]
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        mu = np.clip(expit(X @ beta), PROB_CLAMP, 1.0 - PROB_CLAMP)
        w = mu * (1.0 - mu)
        step = spd_factor(X.T @ (w[:, None] * X)).solve(X.T @ (y - mu))
        new_beta = beta + step
        new_ll = loglik(X, y, new_beta)
        slack = 1e-13 * (1.0 + abs(ll))
        halvings = 0
        while new_ll < ll - slack and halvings < MAX_HALVINGS:
            step *= 0.5
            new_beta = beta + step
            new_ll = loglik(X, y, new_beta)
            halvings += 1
        if new_ll < ll - slack:
            # no ascent left within rounding; stay put
            new_beta, new_ll = beta, ll
            step = np.zeros(q)
        beta, ll = new_beta, new_ll
        trace.append(ll)
        if float(np.max(np.abs(step))) < tol:
            converged = True
            break
        if not np.all(np.isfinite(beta)) or float(np.max(np.abs(beta))) > MAX_ABS_COEF:
            raise PerfectSeparation(f"coefficients diverging (|beta|max = {np.max(np.abs(beta)):.3g})")
        if _pinned(expit(X @ beta)):
            raise PerfectSeparation(f"fitted probabilities reached the clamp {PROB_CLAMP:g} at iteration {it}")
    if not converged:
        raise ConvergenceFailure(f"IRLS did not converge in {max_iter} iterations")

    mu0 = expit(X @ beta)
    d1 = mu0 * (1.0 - mu0)
    d2 = data.s * d1
    p0 = build_p0(data, mu0, d1)
    logger.debug("null fit converged in %d iterations, loglik %.6f", it, ll)
    return NullFit(_frozen(beta), _frozen(mu0), _frozen(d1), _frozen(d2), _frozen(p0), it, True, tuple(trace))


def build_p0(data: Dataset, mu0: np.ndarray, d1: np.ndarray) -> np.ndarray:
    """Dense ``P0 = W - W X (X^T W X)^{-1} X^T W`` with ``W = diag(d1)``."""
    X = data.X
    d1 = np.asarray(d1, dtype=np.float64)
    wx = d1[:, None] * X
    p0 = -wx @ spd_factor(X.T @ wx).solve(wx.T)
    p0[np.diag_indices_from(p0)] += d1
    return 0.5 * (p0 + p0.T)
