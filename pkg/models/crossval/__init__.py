"""
K-fold cross-validation of the penalty for ridge, LASSO and nLASSO.
"""

from .cv import LambdaGrid, CvResult, make_folds, cv_select_lambda, fit_with_cv

__all__ = ['LambdaGrid', 'CvResult', 'make_folds', 'cv_select_lambda', 'fit_with_cv']
