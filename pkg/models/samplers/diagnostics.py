#!/usr/bin/env python3
"""
Chain Diagnostics and Posterior Summaries

Batch-means Monte-Carlo standard errors, effective sample sizes, posterior
summaries, density histograms for plotting and the anti-phase statistic
used to read Argonaute competition off a pair of RISC traces.
"""

import logging
from typing import Dict, List

import numpy as np

from models.core import ParameterError
from .gibbs import PosteriorChain

logger = logging.getLogger(__name__)


def batch_means_mcse(draws: np.ndarray, batch_size: int = None) -> np.ndarray:
    """
    Monte-Carlo standard error of the mean by non-overlapping batch means.

    The default batch size is ⌊√T⌋. Works column-wise on a (T, M) array.
    """
    draws = np.asarray(draws, dtype=float)
    vector = draws.ndim == 1
    chain = draws.reshape(draws.shape[0], -1)
    t = chain.shape[0]
    b = int(np.floor(np.sqrt(t))) if batch_size is None else int(batch_size)
    if b < 1 or t // b < 2:
        raise ParameterError(f"cannot form two batches of size {b} from {t} draws")

    n_batches = t // b
    batches = chain[: n_batches * b].reshape(n_batches, b, -1).mean(axis=1)
    variance = b * np.var(batches, axis=0, ddof=1)
    mcse = np.sqrt(variance / (n_batches * b))
    return mcse[0] if vector else mcse


def effective_sample_size(draws: np.ndarray, batch_size: int = None) -> np.ndarray:
    """Effective sample size var/mcse², capped at the chain length."""
    draws = np.asarray(draws, dtype=float)
    mcse = batch_means_mcse(draws, batch_size)
    variance = np.var(draws, axis=0, ddof=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        ess = np.where(mcse > 0, variance / mcse ** 2, float(draws.shape[0]))
    return np.minimum(ess, draws.shape[0]) if np.ndim(ess) else float(min(ess, draws.shape[0]))


def posterior_summary(chain: PosteriorChain) -> List[Dict]:
    """Per-coefficient mean, sd, 2.5/97.5% quantiles and P(β > 0)."""
    beta = chain.beta_draws
    low, high = np.quantile(beta, [0.025, 0.975], axis=0)
    rows = []
    for j, label in enumerate(chain.labels):
        rows.append({
            'gene': chain.gene_id,
            'regressor': label,
            'mean': float(beta[:, j].mean()),
            'sd': float(beta[:, j].std(ddof=1)) if chain.n_draws > 1 else 0.0,
            'q025': float(low[j]),
            'q975': float(high[j]),
            'prob_positive': float(np.mean(beta[:, j] > 0)),
        })
    return rows


def density_histograms(chain: PosteriorChain, bins: int = 50) -> List[Dict]:
    """Normalized histograms of each coefficient's draws (plot data)."""
    rows = []
    for j, label in enumerate(chain.labels):
        density, edges = np.histogram(chain.beta_draws[:, j], bins=bins, density=True)
        for k in range(bins):
            rows.append({
                'gene': chain.gene_id,
                'regressor': label,
                'bin_low': float(edges[k]),
                'bin_high': float(edges[k + 1]),
                'density': float(density[k]),
            })
    return rows


def anti_phase_fraction(first: np.ndarray, second: np.ndarray) -> float:
    """
    Among iterations where ``first`` exceeds its median, the fraction in
    which ``second`` is below its median.
    """
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    if first.shape != second.shape or first.ndim != 1:
        raise ParameterError("traces must be 1-D and of equal length")
    above = first > np.median(first)
    if not above.any():
        logger.warning("anti-phase fraction undefined: no draw exceeds the median")
        return 0.0
    return float(np.mean(second[above] < np.median(second)))
