#!/usr/bin/env python3
"""
Tests for least squares, ridge, LASSO and nLASSO point estimators.
"""

import itertools
import sys
from pathlib import Path

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import numpy as np
import pytest
from pydantic import ValidationError

from models.core import (
    Direct, GeneProblem, ParameterError, PointFit, PointMethod, SignConvention,
    SingularDesignError,
)
from models.point_estimators import (
    LassoConfig, fit_lasso, fit_lsr, fit_nlasso, fit_point, fit_ridge,
    lasso_objective, select_by_threshold,
)

TIGHT = LassoConfig(**{"lambda": 0.0, "tol": 1e-13, "max_iters": 200_000})


def make_problem(X, y, gene_id="G"):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    labels = tuple(Direct(f"miR-{j:03d}") for j in range(X.shape[1]))
    return GeneProblem(gene_id, y, X, labels, SignConvention.NEGATED_DESIGN)


def random_problem(n, m, seed):
    rng = np.random.default_rng(seed)
    return make_problem(rng.normal(size=(n, m)), rng.normal(size=n))


def gaussian_elimination(A, b):
    """Dense solve with partial pivoting, independent of numpy.linalg."""
    A = [list(map(float, row)) + [float(v)] for row, v in zip(A, b)]
    n = len(A)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(A[r][col]))
        A[col], A[pivot] = A[pivot], A[col]
        for r in range(col + 1, n):
            factor = A[r][col] / A[col][col]
            for c in range(col, n + 1):
                A[r][c] -= factor * A[col][c]
    x = [0.0] * n
    for r in reversed(range(n)):
        x[r] = (A[r][n] - sum(A[r][c] * x[c] for c in range(r + 1, n))) / A[r][r]
    return np.array(x)


def exact_two_dim_minimum(problem, lam, nonnegative):
    """Minimum of the penalized objective by enumerating sign patterns."""
    G = problem.X.T @ problem.X
    c = problem.X.T @ problem.y
    signs = (0, 1) if nonnegative else (-1, 0, 1)
    best = np.inf
    for pattern in itertools.product(signs, repeat=2):
        s = np.array(pattern, dtype=float)
        active = s != 0
        beta = np.zeros(2)
        if active.any():
            sub = np.ix_(active, active)
            beta[active] = np.linalg.solve(G[sub], c[active] - lam * s[active])
            if np.any(beta[active] * s[active] < 0):
                continue
        best = min(best, lasso_objective(problem, beta, lam))
    return best


def grid_minimum(problem, lam, low, high, step=0.01):
    axis = np.arange(low, high + step / 2, step)
    b1, b2 = np.meshgrid(axis, axis, indexing='ij')
    betas = np.stack([b1.ravel(), b2.ravel()], axis=1)
    residual = problem.y[None, :] - betas @ problem.X.T
    values = 0.5 * np.sum(residual ** 2, axis=1) + lam * np.sum(np.abs(betas), axis=1)
    return float(values.min())


class TestLassoConfig:
    """Tests for LassoConfig validation."""

    def test_defaults(self):
        cfg = LassoConfig()
        assert cfg.tol == 1e-7
        assert cfg.max_iters == 10_000

    def test_alias(self):
        assert LassoConfig(**{"lambda": 0.3}).lambda_ == 0.3

    @pytest.mark.parametrize("kwargs", [{"tol": 0.0}, {"max_iters": 0}, {"lambda": -1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            LassoConfig(**kwargs)


class TestLeastSquares:
    """Tests for fit_lsr."""

    def test_identity_design(self):
        y = np.array([0.3, -1.2, 2.5])
        fit = fit_lsr(make_problem(np.eye(3), y))
        np.testing.assert_allclose(fit.beta, y, atol=1e-12)

    def test_exact_line(self):
        fit = fit_lsr(make_problem([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]))
        np.testing.assert_allclose(fit.beta, [2.0], atol=1e-12)
        assert fit.method is PointMethod.LSR
        assert fit.lambda_ == 0.0

    def test_matches_independent_solver(self):
        problem = random_problem(10, 3, seed=11)
        fit = fit_lsr(problem)
        oracle = gaussian_elimination(problem.X.T @ problem.X, problem.X.T @ problem.y)
        np.testing.assert_allclose(fit.beta, oracle, atol=1e-10)
        residual = problem.X.T @ (problem.y - problem.X @ fit.beta)
        assert np.max(np.abs(residual)) < 1e-10

    def test_more_regressors_than_samples(self):
        with pytest.raises(SingularDesignError, match="not applicable"):
            fit_lsr(random_problem(3, 5, seed=1))

    def test_rank_deficient(self):
        rng = np.random.default_rng(2)
        column = rng.normal(size=8)
        with pytest.raises(SingularDesignError, match="not applicable"):
            fit_lsr(make_problem(np.column_stack([column, column]), rng.normal(size=8)))


class TestRidge:
    """Tests for fit_ridge."""

    def test_small_lambda_approaches_lsr(self):
        problem = random_problem(20, 4, seed=5)
        np.testing.assert_allclose(fit_ridge(problem, 1e-10).beta, fit_lsr(problem).beta, atol=1e-6)

    def test_huge_lambda_shrinks_to_zero(self):
        fit = fit_ridge(random_problem(20, 4, seed=5), 1e10)
        assert np.all(np.abs(fit.beta) < 1e-6)

    def test_wide_problem_matches_oracle(self):
        problem = random_problem(5, 8, seed=9)
        fit = fit_ridge(problem, 1.0)
        oracle = gaussian_elimination(problem.X.T @ problem.X + np.eye(8), problem.X.T @ problem.y)
        assert np.all(np.isfinite(fit.beta))
        np.testing.assert_allclose(fit.beta, oracle, atol=1e-10)

    def test_negative_lambda(self):
        with pytest.raises(ParameterError):
            fit_ridge(random_problem(5, 2, seed=0), -0.1)

    def test_norm_non_increasing_in_lambda(self):
        problem = random_problem(15, 6, seed=21)
        norms = [np.linalg.norm(fit_ridge(problem, lam).beta)
                 for lam in [0.01, 0.1, 0.5, 1, 2, 5, 10, 100, 1000]]
        assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))


class TestLasso:
    """Tests for fit_lasso and fit_nlasso."""

    def test_critical_penalty_gives_zero(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(30, 5))
        X = (X - X.mean(axis=0)) / X.std(axis=0, ddof=1)
        y = rng.normal(size=30)
        y = y - y.mean()
        problem = make_problem(X, y)
        lam = float(np.max(np.abs(X.T @ y)))
        fit = fit_lasso(problem, LassoConfig(**{"lambda": lam}))
        assert np.all(fit.beta == 0.0)
        assert fit.converged

    def test_zero_penalty_matches_lsr(self):
        problem = random_problem(20, 3, seed=8)
        fit = fit_lasso(problem, TIGHT)
        np.testing.assert_allclose(fit.beta, fit_lsr(problem).beta, atol=1e-6)

    @pytest.mark.parametrize("seed", range(25))
    def test_lasso_optimal_on_small_problems(self, seed):
        problem = random_problem(6, 2, seed=100 + seed)
        cfg = TIGHT.model_copy(update={'lambda_': 0.5})
        fit = fit_lasso(problem, cfg)
        achieved = lasso_objective(problem, fit.beta, 0.5)
        assert abs(achieved - exact_two_dim_minimum(problem, 0.5, nonnegative=False)) < 1e-8
        assert achieved <= grid_minimum(problem, 0.5, -3.0, 3.0) + 1e-8

    @pytest.mark.parametrize("seed", range(25))
    def test_nlasso_optimal_on_small_problems(self, seed):
        problem = random_problem(6, 2, seed=200 + seed)
        cfg = TIGHT.model_copy(update={'lambda_': 0.5})
        fit = fit_nlasso(problem, cfg)
        achieved = lasso_objective(problem, fit.beta, 0.5)
        assert np.all(fit.beta >= 0)
        assert abs(achieved - exact_two_dim_minimum(problem, 0.5, nonnegative=True)) < 1e-8
        assert achieved <= grid_minimum(problem, 0.5, 0.0, 3.0) + 1e-8

    def test_nlasso_matches_lasso_when_constraint_inactive(self):
        rng = np.random.default_rng(31)
        X = rng.normal(size=(40, 3))
        y = X @ np.array([2.0, 1.5, 1.0]) + 0.05 * rng.normal(size=40)
        problem = make_problem(X, y)
        cfg = TIGHT.model_copy(update={'lambda_': 0.5})
        lasso = fit_lasso(problem, cfg)
        assert np.all(lasso.beta >= 0)
        np.testing.assert_allclose(fit_nlasso(problem, cfg).beta, lasso.beta, atol=1e-8)

    def test_nlasso_binding_constraint(self):
        x = np.array([1.0, 2.0, 3.0])
        fit = fit_nlasso(make_problem(x, -x), LassoConfig(**{"lambda": 0.1}))
        np.testing.assert_array_equal(fit.beta, [0.0])

    @pytest.mark.parametrize("fitter", [fit_lasso, fit_nlasso])
    def test_objective_monotone_over_sweeps(self, fitter):
        rng = np.random.default_rng(17)
        base = rng.normal(size=(25, 1))
        X = base + 0.3 * rng.normal(size=(25, 6))
        problem = make_problem(X, rng.normal(size=25))
        fit = fitter(problem, LassoConfig(**{"lambda": 0.2, "tol": 1e-10}))
        history = np.array(fit.objective_history)
        assert history.size == fit.n_iter
        assert np.all(np.diff(history) <= 1e-10 * (1 + np.abs(history[:-1])))

    def test_support_nested_on_orthonormal_design(self):
        rng = np.random.default_rng(23)
        Q, _ = np.linalg.qr(rng.normal(size=(30, 8)))
        problem = make_problem(Q, rng.normal(size=30) * 2)
        supports = []
        for lam in [0.01, 0.1, 0.3, 0.6, 1.0, 2.0, 4.0]:
            fit = fit_lasso(problem, LassoConfig(**{"lambda": lam}))
            supports.append(set(np.flatnonzero(fit.beta)))
        assert all(later <= earlier for earlier, later in zip(supports, supports[1:]))

    def test_non_convergence_flag(self):
        problem = random_problem(20, 6, seed=3)
        fit = fit_lasso(problem, LassoConfig(**{"lambda": 0.01, "max_iters": 1, "tol": 1e-15}))
        assert not fit.converged
        assert fit.n_iter == 1

    def test_fit_point_dispatch(self):
        problem = random_problem(20, 3, seed=12)
        assert fit_point(problem, PointMethod.LSR).method is PointMethod.LSR
        assert fit_point(problem, PointMethod.RIDGE, 0.5).lambda_ == 0.5
        fit = fit_point(problem, PointMethod.NLASSO, 0.5)
        assert fit.method is PointMethod.NLASSO
        assert fit.lambda_ == 0.5


class TestSelectByThreshold:
    """Tests for select_by_threshold."""

    def _fit(self, beta):
        labels = tuple(Direct(f"miR-{j}") for j in range(len(beta)))
        return PointFit("G", PointMethod.LASSO, 0.1, beta, labels)

    def test_zero_threshold(self):
        selected = select_by_threshold(self._fit([0.0, 0.2, 0.05]), 0.0)
        assert selected == [("miR-1", 0.2), ("miR-2", 0.05)]

    def test_positive_threshold(self):
        assert select_by_threshold(self._fit([0.0, 0.2, 0.05]), 0.1) == [("miR-1", 0.2)]

    def test_recorded_threshold_is_default(self):
        labels = (Direct("miR-0"), Direct("miR-1"))
        fit = PointFit("G", PointMethod.NLASSO, 0.1, [0.05, 0.2], labels, threshold=0.1)
        assert select_by_threshold(fit) == [("miR-1", 0.2)]
        assert select_by_threshold(fit, 0.0) == [("miR-1", 0.2), ("miR-0", 0.05)]

    def test_ties_keep_index_order(self):
        selected = select_by_threshold(self._fit([0.3, 0.1, 0.3]))
        assert [label for label, _ in selected] == ["miR-0", "miR-2", "miR-1"]

    def test_strong_pair_versus_low_weight_extras(self):
        # two strong and three weak regulators on an orthonormal design
        rng = np.random.default_rng(41)
        Q, _ = np.linalg.qr(rng.normal(size=(40, 10)))
        truth = np.array([2.0, 2.0, 0.3, 0.3, 0.3, 0, 0, 0, 0, 0])
        problem = make_problem(Q, Q @ truth, gene_id="TWIST1")

        lasso = fit_lasso(problem, LassoConfig(**{"lambda": 1.0}))
        nlasso = fit_nlasso(problem, LassoConfig(**{"lambda": 0.1}))

        lasso_labels = {label for label, _ in select_by_threshold(lasso)}
        nlasso_selected = dict(select_by_threshold(nlasso))
        assert lasso_labels == {"miR-000", "miR-001"}
        assert set(nlasso_selected) == {"miR-000", "miR-001", "miR-002", "miR-003", "miR-004"}
        strong = min(nlasso_selected["miR-000"], nlasso_selected["miR-001"])
        extras = [nlasso_selected[f"miR-00{j}"] for j in (2, 3, 4)]
        assert max(extras) < strong / 5
