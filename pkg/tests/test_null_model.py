import numpy as np
import pytest

from geks import Dataset, SimConfig, build_p0, fit_null, make_dataset, simulate
from geks.errors import (
    ConstantOutcome,
    ConvergenceFailure,
    DataError,
    DimensionMismatch,
    PerfectSeparation,
    RankDeficientCovariates,
)
from oracles import newton_fit


def intercept_only(y):
    n = len(y)
    return Dataset(np.asarray(y, float), np.ones((n, 1)), np.ones(n), np.ones((n, 1)))


class TestDataset:
    def test_env_column_located(self, worked):
        assert worked.env_col == 1
        np.testing.assert_array_equal(worked.X[:, worked.env_col], worked.s)

    def test_env_column_required(self):
        with pytest.raises(DataError):
            Dataset([0, 1, 1], np.ones((3, 1)), [0.0, 1.0, 2.0], np.ones((3, 1)))

    def test_constant_outcome(self):
        with pytest.raises(ConstantOutcome):
            make_dataset([1, 1, 1], [0.0, 1.0, 2.0], np.ones((3, 1)))

    def test_non_binary_outcome(self):
        with pytest.raises(DataError):
            make_dataset([0, 2, 1], [0.0, 1.0, 2.0], np.ones((3, 1)))

    def test_row_mismatch(self):
        with pytest.raises(DimensionMismatch):
            make_dataset([0, 1, 1], [0.0, 1.0, 2.0], np.ones((2, 1)))

    def test_nonfinite_genotypes(self):
        with pytest.raises(ValueError):
            make_dataset([0, 1, 1], [0.0, 1.0, 2.0], [[1.0], [np.nan], [0.0]])

    def test_arrays_read_only(self, worked):
        with pytest.raises(ValueError):
            worked.Z[0, 0] = 5.0


class TestFitNull:
    def test_balanced_intercept(self):
        fit = fit_null(intercept_only([1, 1, 0, 0]))
        np.testing.assert_allclose(fit.beta, [0.0], atol=1e-14)
        np.testing.assert_allclose(fit.mu0, 0.5, atol=1e-14)

    def test_logit_of_mean(self):
        fit = fit_null(intercept_only([1, 1, 1, 0]))
        np.testing.assert_allclose(fit.beta, [np.log(3.0)], rtol=1e-13)
        np.testing.assert_allclose(fit.mu0, 0.75, rtol=1e-13)

    def test_against_extended_precision_newton(self, rng):
        s = rng.normal(size=10)
        y = np.array([1, 0, 0, 1, 1, 0, 1, 0, 0, 1], dtype=float)
        data = make_dataset(y, s, rng.integers(0, 3, size=(10, 2)))
        ref = np.array([float(b) for b in newton_fit(data.X, data.y)])
        np.testing.assert_allclose(fit_null(data).beta, ref, rtol=0, atol=1e-8)

    def test_score_equations(self, sim200):
        fit = fit_null(sim200)
        assert np.max(np.abs(sim200.X.T @ (sim200.y - fit.mu0))) < 1e-8
        assert fit.converged

    def test_loglik_nondecreasing(self, sim200):
        trace = np.array(fit_null(sim200).loglik_trace)
        assert np.all(np.diff(trace) >= -1e-12 * np.abs(trace[1:]))

    def test_weights(self, sim200):
        fit = fit_null(sim200)
        np.testing.assert_allclose(fit.d1, fit.mu0 * (1 - fit.mu0), rtol=1e-15)
        np.testing.assert_allclose(fit.d2, sim200.s * fit.d1, rtol=1e-15)

    def test_row_permutation(self, sim200, rng):
        fit = fit_null(sim200)
        perm = fit_null(sim200.with_rows(rng.permutation(sim200.n)))
        np.testing.assert_allclose(perm.beta, fit.beta, rtol=0, atol=1e-10)

    def test_rank_deficient(self):
        y = np.array([0, 1, 1, 0, 1.0])
        s = np.array([0.1, 0.5, 0.2, 0.9, 0.4])
        X = np.column_stack([np.ones(5), s, 2 * s])
        with pytest.raises(RankDeficientCovariates):
            fit_null(Dataset(y, X, s, np.ones((5, 1)), env_col=1))

    def test_perfect_separation(self):
        s = np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
        data = make_dataset([0, 0, 0, 1, 1, 1], s, np.ones((6, 1)))
        with pytest.raises(PerfectSeparation):
            fit_null(data)

    def test_iteration_limit(self, sim200):
        with pytest.raises(ConvergenceFailure):
            fit_null(sim200, max_iter=1)


class TestP0:
    def test_two_point_hand_value(self):
        data = intercept_only([1, 0])
        mu0 = np.full(2, 0.5)
        p0 = build_p0(data, mu0, mu0 * (1 - mu0))
        np.testing.assert_allclose(p0, [[0.125, -0.125], [-0.125, 0.125]], atol=1e-16)

    def test_hat_matrix_form(self, rng):
        s = rng.normal(size=6)
        data = make_dataset([1, 0, 1, 1, 0, 0], s, rng.integers(0, 3, size=(6, 1)))
        fit = fit_null(data)
        sq = np.sqrt(fit.d1)
        xt = sq[:, None] * data.X
        hat = xt @ np.linalg.inv(xt.T @ xt) @ xt.T
        alt = sq[:, None] * (np.eye(6) - hat) * sq[None, :]
        assert np.max(np.abs(fit.p0 - alt)) < 1e-10

    @pytest.mark.parametrize("name", ["worked", "sim50", "sim200"])
    def test_projection_identities(self, name, request):
        data = request.getfixturevalue(name)
        fit = fit_null(data)
        p0 = fit.p0
        assert np.max(np.abs(p0 @ data.X)) < 1e-8
        assert np.array_equal(p0, p0.T)
        assert np.max(np.abs(p0 @ (p0 / fit.d1[:, None]) - p0)) < 1e-8

    def test_psd(self, sim200, rng):
        p0 = fit_null(sim200).p0
        v = rng.normal(size=(sim200.n, 500))
        assert np.min(np.einsum("ij,ij->j", v, p0 @ v)) >= -1e-10

    def test_trace_identity(self, sim200):
        fit = fit_null(sim200)
        X, w = sim200.X, fit.d1
        q_eff = np.trace(np.linalg.solve(X.T @ (w[:, None] * X), X.T @ ((w**2)[:, None] * X)))
        assert np.trace(fit.p0) == pytest.approx(np.sum(w) - q_eff, abs=1e-8)


def test_simulated_fit_is_deterministic():
    cfg = SimConfig(n=120, q=3, p=2, seed=9)
    a, b = fit_null(simulate(cfg)), fit_null(simulate(cfg))
    assert np.array_equal(a.beta, b.beta) and np.array_equal(a.p0, b.p0)
