"""
Active-credible-interval variable selection from posterior chains.
"""

from .aci import (
    AciReport,
    kmeans_1d,
    order_statistic_index,
    compute_aci,
    select_gene,
    selected_pairs,
)

__all__ = [
    'AciReport',
    'kmeans_1d',
    'order_statistic_index',
    'compute_aci',
    'select_gene',
    'selected_pairs',
]
