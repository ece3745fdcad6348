#!/usr/bin/env python3
"""
Active Credible Interval Selection

A coefficient's posterior draws are split into two clusters by 1-D
k-means. Within the higher-mean cluster the order statistics at τ/2 and
1 − τ/2 give a credible interval [a, b]; when a > 0 the interval is
"active" and its statistical significance is the fraction of all draws
that fall inside it. The coefficient is selected when the significance
exceeds α.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.core import InputValidationError, ParameterError
from models.samplers import PosteriorChain

logger = logging.getLogger(__name__)

MIN_DRAWS = 10
INTEGER_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AciReport:
    """Active credible interval, significance and decision for one coefficient."""
    regressor_label: str
    interval: Optional[Tuple[float, float]]
    significance: float
    selected: bool
    cluster_means: Tuple[float, float]
    cluster2_size: int
    alpha: float
    tau: float = 0.05

    def __post_init__(self):
        if self.interval is not None:
            a, b = self.interval
            if not 0 < a <= b:
                raise InputValidationError(f"active interval must satisfy 0 < a <= b, got {self.interval}")
        if not 0.0 <= self.significance <= 1.0:
            raise InputValidationError(f"significance {self.significance} is outside [0, 1]")
        if self.interval is None and self.significance != 0.0:
            raise InputValidationError("significance without an active interval")
        if self.selected != self.selected_at(self.alpha):
            raise InputValidationError("selection flag disagrees with significance and alpha")

    def selected_at(self, alpha: float) -> bool:
        """Decision at another α, without recomputing the interval."""
        return self.interval is not None and self.significance > alpha


def kmeans_1d(draws: np.ndarray) -> Optional[np.ndarray]:
    """
    Two-cluster Lloyd iterations in one dimension.

    Centers start at the sample minimum and maximum; a point equidistant
    from both centers joins the lower cluster.

    Returns:
        Boolean mask of the higher-mean cluster, or None when the
        clustering is degenerate (identical draws or an empty cluster)
    """
    low, high = float(np.min(draws)), float(np.max(draws))
    if low == high:
        return None

    upper = np.abs(draws - high) < np.abs(draws - low)
    while True:
        if upper.all() or not upper.any():
            return None
        low = float(draws[~upper].mean())
        high = float(draws[upper].mean())
        updated = np.abs(draws - high) < np.abs(draws - low)
        if np.array_equal(updated, upper):
            return upper
        upper = updated


def order_statistic_index(t: int, fraction: float) -> int:
    """1-based index [t·fraction] + 1, without the +1 when t·fraction is an integer."""
    x = t * fraction
    nearest = round(x)
    if abs(x - nearest) < INTEGER_TOLERANCE:
        index = int(nearest)
    else:
        index = math.floor(x) + 1
    return min(max(index, 1), t)


def compute_aci(draws: Sequence[float], tau: float = 0.05, alpha: float = 0.05,
                regressor_label: str = "") -> AciReport:
    """
    Active credible interval of one coefficient's draws.

    Args:
        draws: Retained posterior draws (T ≥ 10, finite)
        tau: Credible level parameter; the interval covers 1 − τ of cluster 2
        alpha: Selection threshold on the significance
        regressor_label: Label carried into the report

    Returns:
        AciReport with significance Q/T, Q counting all draws inside [a, b]
    """
    if not 0 < tau < 1:
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 1 or draws.size < MIN_DRAWS:
        raise ParameterError(f"need a vector of at least {MIN_DRAWS} draws, got shape {draws.shape}")
    if not np.all(np.isfinite(draws)):
        raise ParameterError("draws must be finite")

    upper = kmeans_1d(draws)
    if upper is None:
        logger.warning(f"degenerate clustering for {regressor_label or 'coefficient'}: no active interval")
        centre = float(draws.mean())
        return AciReport(regressor_label, None, 0.0, False, (centre, centre), 0, alpha, tau)

    cluster = np.sort(draws[upper])
    means = (float(draws[~upper].mean()), float(cluster.mean()))
    t = cluster.size
    a = float(cluster[order_statistic_index(t, tau / 2) - 1])
    b = float(cluster[order_statistic_index(t, 1 - tau / 2) - 1])

    if a <= 0:
        return AciReport(regressor_label, None, 0.0, False, means, t, alpha, tau)

    q = int(np.count_nonzero((draws >= a) & (draws <= b)))
    significance = q / draws.size
    return AciReport(regressor_label, (a, b), significance, significance > alpha, means, t, alpha, tau)


def select_gene(chain: PosteriorChain, tau: float = 0.05, alpha: float = 0.05) -> List[AciReport]:
    """ACI report for every coefficient of a chain, in regressor order."""
    if chain.n_draws == 0:
        raise ParameterError(f"chain for {chain.gene_id} is empty")
    reports = [
        compute_aci(chain.beta_draws[:, j], tau, alpha, label)
        for j, label in enumerate(chain.labels)
    ]
    logger.info(f"{chain.gene_id}: {sum(r.selected for r in reports)} of {len(reports)} "
                f"regressors selected at alpha={alpha}")
    return reports


def selected_pairs(gene_id: str, reports: Sequence[AciReport]) -> List[Tuple[str, str]]:
    """(gene, regressor) pairs of the selected reports."""
    return [(gene_id, r.regressor_label) for r in reports if r.selected]
