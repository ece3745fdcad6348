"""
Least squares, ridge, LASSO and non-negative LASSO point estimators.
"""

from .estimators import (
    LassoConfig,
    fit_lsr,
    fit_ridge,
    fit_lasso,
    fit_nlasso,
    fit_point,
    lasso_objective,
    select_by_threshold,
)

__all__ = [
    'LassoConfig',
    'fit_lsr',
    'fit_ridge',
    'fit_lasso',
    'fit_nlasso',
    'fit_point',
    'lasso_objective',
    'select_by_threshold',
]
