#!/usr/bin/env python3
"""
K-Fold Cross-Validation of the Penalty λ

Each λ of the grid λ_j = (j/j₀)^c, j = 1..⌊a·j₀⌋, is scored by the mean
held-out error (y_test − X_test β)ᵀ(y_test − X_test β) over K folds; the
smallest λ attaining the minimum is chosen.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from models.core import (
    CrossValidationError,
    GeneProblem,
    NumericalFailure,
    ParameterError,
    PointFit,
    PointMethod,
)
from models.point_estimators import LassoConfig, fit_point

logger = logging.getLogger(__name__)

CV_METHODS = (PointMethod.RIDGE, PointMethod.LASSO, PointMethod.NLASSO)


class LambdaGrid(BaseModel):
    """Penalty grid λ_j = (j/j0)^c for j = 1..⌊a·j0⌋."""
    model_config = ConfigDict(frozen=True)

    j0: float = Field(10.0, gt=0)
    c: int = Field(2, ge=1)
    a: int = Field(10, ge=1)

    @property
    def values(self) -> List[float]:
        count = int(np.floor(self.a * self.j0))
        if count < 1:
            raise ParameterError(f"grid with a={self.a}, j0={self.j0} has no points")
        return [(j / self.j0) ** self.c for j in range(1, count + 1)]


@dataclass(frozen=True)
class CvResult:
    """Mean held-out error per λ and the chosen λ."""
    gene_id: str
    method: PointMethod
    per_lambda_mean_error: Tuple[Tuple[float, float], ...]
    chosen_lambda: float
    fold_assignment_seed: int
    k: int
    fold_sizes: Tuple[int, ...]

    @property
    def lambdas(self) -> List[float]:
        return [lam for lam, _ in self.per_lambda_mean_error]

    @property
    def errors(self) -> List[float]:
        return [err for _, err in self.per_lambda_mean_error]


def make_folds(n: int, k: int, seed: int) -> List[np.ndarray]:
    """
    Partition sample indices 0..n−1 into k folds.

    Indices are shuffled with a seeded generator and split into contiguous
    chunks whose sizes differ by at most one.
    """
    if not 2 <= k <= n:
        raise ParameterError(f"fold count must satisfy 2 <= k <= n, got k={k}, n={n}")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(chunk) for chunk in np.array_split(order, k)]


def cv_select_lambda(problem: GeneProblem,
                     method: PointMethod,
                     grid: LambdaGrid,
                     k: int,
                     seed: int,
                     cfg: Optional[LassoConfig] = None) -> CvResult:
    """
    Choose λ for ``method`` by K-fold cross-validation.

    Raises:
        CrossValidationError: a fit failed on some (fold, λ)
    """
    if method not in CV_METHODS:
        raise ParameterError(f"cross-validation supports ridge, lasso and nlasso, not {method.value}")
    lambdas = grid.values
    folds = make_folds(problem.n_samples, k, seed)
    everything = np.arange(problem.n_samples)

    errors = np.zeros((len(lambdas), k))
    for f, test_rows in enumerate(folds):
        train = problem.subset(np.setdiff1d(everything, test_rows))
        test = problem.subset(test_rows)
        for i, lam in enumerate(lambdas):
            try:
                fit = fit_point(train, method, lam, cfg)
            except NumericalFailure as exc:
                raise CrossValidationError(f, lam, exc) from exc
            residual = test.y - test.X @ fit.beta
            errors[i, f] = residual @ residual

    mean_error = errors.mean(axis=1)
    best = int(np.argmin(mean_error))
    logger.info(f"{problem.gene_id}: {method.value} CV over {len(lambdas)} lambdas, "
                f"K={k}, chose lambda={lambdas[best]:g}")
    return CvResult(
        gene_id=problem.gene_id,
        method=method,
        per_lambda_mean_error=tuple((lam, float(err)) for lam, err in zip(lambdas, mean_error)),
        chosen_lambda=lambdas[best],
        fold_assignment_seed=seed,
        k=k,
        fold_sizes=tuple(len(fold) for fold in folds),
    )


def fit_with_cv(problem: GeneProblem,
                method: PointMethod,
                grid: LambdaGrid,
                k: int,
                seed: int,
                cfg: Optional[LassoConfig] = None) -> Tuple[PointFit, CvResult]:
    """Cross-validate λ, then refit on all samples at the chosen λ."""
    result = cv_select_lambda(problem, method, grid, k, seed, cfg)
    return fit_point(problem, method, result.chosen_lambda, cfg), result
