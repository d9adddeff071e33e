"""Replicated null simulation to check type I error of both tests.

Replicate ``i`` is simulated from the Philox stream ``(seed, i)``, so results
are reproducible and independent of how replicates are spread over workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np
from scipy import stats

from .errors import GeksError
from .kernel import km_test
from .null_model import fit_null
from .score import ge_score_test
from .simulate import SimConfig, simulate

logger = logging.getLogger(__name__)

ALPHAS = (0.01, 0.05, 0.1)


def run_replicate(cfg: SimConfig, index: int, tests=("score", "kernel"), rank_tol=None):
    """p-values of one null replicate; a test that fails numerically yields NaN."""
    data = simulate(replace(cfg, stream=index))
    out = {t: np.nan for t in tests}
    try:
        fit = fit_null(data)
    except GeksError as exc:
        logger.debug("replicate %d: null fit failed: %s", index, exc)
        return out
    if "score" in tests:
        try:
            out["score"] = ge_score_test(data, fit, rank_tol).p_value
        except GeksError as exc:
            logger.debug("replicate %d: score test failed: %s", index, exc)
    if "kernel" in tests:
        try:
            out["kernel"] = km_test(data, fit).p_value
        except GeksError as exc:
            logger.debug("replicate %d: kernel test failed: %s", index, exc)
    return out


def _batch(args):
    cfg, indices, tests, rank_tol = args
    return [run_replicate(cfg, i, tests, rank_tol) for i in indices]


def null_pvalues(cfg: SimConfig, reps: int, tests=("score", "kernel"), workers: int = 1,
                 rank_tol=None) -> dict:
    """p-values for replicates ``0..reps-1``, ordered by replicate index."""
    indices = np.arange(reps)
    if workers <= 1:
        rows = _batch((cfg, indices, tests, rank_tol))
    else:
        chunks = np.array_split(indices, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [r for part in pool.map(_batch, [(cfg, c, tests, rank_tol) for c in chunks]) for r in part]
    return {t: np.array([r[t] for r in rows]) for t in tests}


def summarize(pvalues: np.ndarray, alphas=ALPHAS) -> dict:
    ok = pvalues[np.isfinite(pvalues)]
    summary = {
        "n_completed": int(ok.size),
        "n_failed": int(pvalues.size - ok.size),
        "rejection_rates": {f"{a:g}": (float(np.mean(ok < a)) if ok.size else None) for a in alphas},
        "ks_distance": float(stats.kstest(ok, "uniform").statistic) if ok.size else None,
    }
    return summary


def calibrate(cfg: SimConfig, reps: int, tests=("score", "kernel"), workers: int = 1,
              rank_tol=None, alphas=ALPHAS) -> dict:
    """Empirical rejection rates and the KS distance of null p-values from uniform.

    For the score test, the KS distance of its p-values from uniform equals the
    KS distance between the empirical distribution of SS and the chi-square.
    """
    if not cfg.is_null:
        logger.warning("calibrating with nonzero genetic effects; rates are power, not size")
    pv = null_pvalues(cfg, reps, tests, workers, rank_tol)
    return {t: summarize(pv[t], alphas) for t in tests}
