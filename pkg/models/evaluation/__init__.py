"""
ROC evaluation against validated interactions and synthetic benchmarks.
"""

from .roc import (
    ValidatedSet, RocCurve, default_threshold_ladder, default_alpha_ladder,
    rates, partial_auc, point_fit_scores, aci_scores, roc_from_scores, roc_point_estimator,
    roc_bayesian, count_validated_hits, hits_table,
)
from .synthetic import SyntheticSpec, SyntheticDataset, generate_synthetic

__all__ = [
    'ValidatedSet', 'RocCurve', 'default_threshold_ladder', 'default_alpha_ladder',
    'rates', 'partial_auc', 'point_fit_scores', 'aci_scores', 'roc_from_scores', 'roc_point_estimator',
    'roc_bayesian', 'count_validated_hits', 'hits_table',
    'SyntheticSpec', 'SyntheticDataset', 'generate_synthetic',
]
