#!/usr/bin/env python3
"""
Point Estimators for Sparse Interaction Regression

Least squares, ridge regression, LASSO and non-negative LASSO fitted per
gene. The penalized fits minimize

    ½‖y − Xβ‖² + λ Σⱼ |βⱼ|

by cyclic coordinate descent on the Gram matrix. nLASSO adds βⱼ ≥ 0, which
on a negated design means every selected regressor down-regulates the gene.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg

from models.core import (
    GeneProblem,
    ParameterError,
    PointFit,
    PointMethod,
    SingularDesignError,
)

logger = logging.getLogger(__name__)


class LassoConfig(BaseModel):
    """Penalty and stopping rule for coordinate descent."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lambda_: float = Field(0.0, alias="lambda", ge=0)
    max_iters: int = Field(10_000, ge=1)
    tol: float = Field(1e-7, gt=0)


def _check_lambda(lambda_: float):
    if lambda_ < 0 or not np.isfinite(lambda_):
        raise ParameterError(f"lambda must be a nonnegative finite number, got {lambda_}")


def lasso_objective(problem: GeneProblem, beta: np.ndarray, lambda_: float) -> float:
    """½‖y − Xβ‖² + λ‖β‖₁"""
    residual = problem.y - problem.X @ beta
    return float(0.5 * residual @ residual + lambda_ * np.sum(np.abs(beta)))


def fit_lsr(problem: GeneProblem) -> PointFit:
    """
    Ordinary least squares, β̂ = (XᵀX)⁻¹Xᵀy.

    Raises:
        SingularDesignError: N < M or the design is rank-deficient
    """
    n, m = problem.X.shape
    if n < m:
        raise SingularDesignError(
            f"not applicable: singular normal equations ({n} samples < {m} regressors)"
        )
    if np.linalg.matrix_rank(problem.X) < m:
        raise SingularDesignError("not applicable: singular normal equations (rank-deficient design)")

    gram = problem.X.T @ problem.X
    try:
        beta = linalg.solve(gram, problem.X.T @ problem.y, assume_a='pos')
    except linalg.LinAlgError as exc:
        raise SingularDesignError(f"not applicable: singular normal equations ({exc})") from exc

    return PointFit(problem.gene_id, PointMethod.LSR, 0.0, beta, problem.regressor_labels)


def fit_ridge(problem: GeneProblem, lambda_: float) -> PointFit:
    """Ridge regression, β̂ = (XᵀX + λI)⁻¹Xᵀy. Defined for N < M when λ > 0."""
    _check_lambda(lambda_)
    if lambda_ == 0:
        lsr = fit_lsr(problem)
        return PointFit(problem.gene_id, PointMethod.RIDGE, 0.0, lsr.beta, problem.regressor_labels)

    m = problem.n_regressors
    system = problem.X.T @ problem.X + lambda_ * np.eye(m)
    beta = linalg.solve(system, problem.X.T @ problem.y, assume_a='pos')
    return PointFit(problem.gene_id, PointMethod.RIDGE, lambda_, beta, problem.regressor_labels)


def _coordinate_descent(problem: GeneProblem, cfg: LassoConfig, nonnegative: bool):
    X, y = problem.X, problem.y
    lam = cfg.lambda_
    gram = X.T @ X
    xty = X.T @ y
    yty = float(y @ y)
    diag = np.diag(gram)

    beta = np.zeros(problem.n_regressors)
    gram_beta = np.zeros(problem.n_regressors)

    def objective() -> float:
        return 0.5 * yty - xty @ beta + 0.5 * beta @ gram_beta + lam * np.sum(np.abs(beta))

    history: List[float] = []
    converged = False
    sweep = 0
    for sweep in range(1, cfg.max_iters + 1):
        max_change = 0.0
        for j in range(beta.size):
            if diag[j] <= 0:
                # all-zero column: the penalty alone decides
                continue
            old = beta[j]
            rho = xty[j] - gram_beta[j] + diag[j] * old
            if nonnegative:
                new = max(rho - lam, 0.0) / diag[j]
            else:
                new = np.sign(rho) * max(abs(rho) - lam, 0.0) / diag[j]
            if new != old:
                gram_beta += gram[:, j] * (new - old)
                beta[j] = new
                max_change = max(max_change, abs(new - old))
        history.append(float(objective()))
        logger.debug(f"{problem.gene_id}: sweep {sweep}, objective {history[-1]:.10g}")
        if max_change < cfg.tol:
            converged = True
            break

    return beta, converged, sweep, history


def _fit_penalized(problem: GeneProblem, cfg: LassoConfig, method: PointMethod) -> PointFit:
    beta, converged, n_iter, history = _coordinate_descent(
        problem, cfg, nonnegative=method is PointMethod.NLASSO
    )
    if not converged:
        logger.warning(
            f"{method.value} on {problem.gene_id} did not converge within "
            f"{cfg.max_iters} sweeps (lambda={cfg.lambda_:g})"
        )
    return PointFit(
        gene_id=problem.gene_id,
        method=method,
        lambda_=cfg.lambda_,
        beta=beta,
        regressor_labels=problem.regressor_labels,
        converged=converged,
        n_iter=n_iter,
        objective_history=history,
    )


def fit_lasso(problem: GeneProblem, cfg: LassoConfig) -> PointFit:
    """LASSO by cyclic coordinate descent with soft-thresholding."""
    return _fit_penalized(problem, cfg, PointMethod.LASSO)


def fit_nlasso(problem: GeneProblem, cfg: LassoConfig) -> PointFit:
    """
    Non-negative LASSO: the LASSO objective subject to βⱼ ≥ 0.

    Each coordinate update is a one-sided soft-threshold clamped at zero,
    so the returned coefficients are nonnegative at every sweep.
    """
    return _fit_penalized(problem, cfg, PointMethod.NLASSO)


def fit_point(problem: GeneProblem,
              method: PointMethod,
              lambda_: float = 0.0,
              cfg: Optional[LassoConfig] = None) -> PointFit:
    """Dispatch to the estimator for ``method`` at penalty ``lambda_``."""
    if method is PointMethod.LSR:
        return fit_lsr(problem)
    if method is PointMethod.RIDGE:
        return fit_ridge(problem, lambda_)
    _check_lambda(lambda_)
    base = cfg or LassoConfig()
    cfg = base.model_copy(update={'lambda_': lambda_})
    if method is PointMethod.LASSO:
        return fit_lasso(problem, cfg)
    return fit_nlasso(problem, cfg)


def select_by_threshold(fit: PointFit, threshold: Optional[float] = None) -> List[Tuple[str, float]]:
    """
    Regressors whose coefficient is strictly greater than ``threshold``
    (the threshold recorded on the fit when omitted).

    Returned in descending coefficient order; equal coefficients keep
    regressor index order.
    """
    threshold = fit.threshold if threshold is None else threshold
    if threshold < 0:
        raise ParameterError(f"threshold must be nonnegative, got {threshold}")
    chosen = [(label, float(value)) for label, value in zip(fit.labels, fit.beta) if value > threshold]
    return sorted(chosen, key=lambda item: -item[1])
