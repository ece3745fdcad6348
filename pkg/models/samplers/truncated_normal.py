#!/usr/bin/env python3
"""
Truncated Normal Sampling

The univariate step is a two-uniform slice sampler on the standardized
variable ξ = (z − u)/v:

    Y | ξ ~ U(0, exp(−ξ²/2))
    ξ | Y ~ U(max(c, −√(−2 log Y)), min(d, √(−2 log Y)))

with (c, d) the standardized truncation bounds. The auxiliary draw is kept
in log space, so bounds many standard deviations from the mean do not
underflow.

The multivariate sampler performs one systematic-scan Gibbs sweep, drawing
each coordinate from its univariate conditional given the others.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from models.core import ParameterError, PrecisionFactorizationError, TruncationError

logger = logging.getLogger(__name__)


def slice_truncated_normal(u, v, lower, upper, current, rng: np.random.Generator,
                           coordinate: int = 0) -> np.ndarray:
    """
    One slice step for N(u, v²) truncated to [lower, upper].

    All arguments broadcast; ``current`` fixes the output shape and must lie
    inside the bounds.
    """
    current = np.asarray(current, dtype=float)
    u = np.broadcast_to(np.asarray(u, dtype=float), current.shape)
    v = np.broadcast_to(np.asarray(v, dtype=float), current.shape)

    with np.errstate(invalid='ignore', divide='ignore'):
        c = (lower - u) / v
        d = (upper - u) / v
        xi = (current - u) / v
    if not np.all(c <= d):
        raise TruncationError(coordinate, float(np.min(lower)), float(np.max(upper)))

    u1 = rng.random(current.shape)
    u2 = rng.random(current.shape)

    radius = np.sqrt(xi * xi - 2.0 * np.log1p(-u1))
    lo = np.maximum(c, -radius)
    hi = np.minimum(d, radius)
    # the current point is always inside the slice
    lo = np.minimum(lo, xi)
    hi = np.maximum(hi, xi)

    proposal = u + v * (lo + (hi - lo) * u2)
    return np.clip(proposal, lower, upper)


def conditional_moments(mu: np.ndarray, precision: np.ndarray,
                        state: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Conditional mean and sd of every coordinate given the others.

    uᵢ = μᵢ + (1/ωᵢᵢ) Σ_{j≠i} (μⱼ − zⱼ) ωᵢⱼ and vᵢ = 1/√ωᵢᵢ, evaluated at
    a fixed state (no sequential update).
    """
    mu = np.asarray(mu, dtype=float)
    precision = np.asarray(precision, dtype=float)
    diagonal = np.diag(precision)
    off_diagonal = precision - np.diag(diagonal)
    deviation = mu - np.asarray(state, dtype=float)
    u = mu + (deviation @ off_diagonal.T) / diagonal
    return u, 1.0 / np.sqrt(diagonal)


def _precision_from_covariance(sigma: np.ndarray) -> np.ndarray:
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise PrecisionFactorizationError(f"covariance must be square, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-12):
        raise PrecisionFactorizationError("precision factorization failed: covariance is not symmetric")
    try:
        factor = linalg.cho_factor(sigma, lower=True)
    except linalg.LinAlgError as exc:
        raise PrecisionFactorizationError(f"precision factorization failed: {exc}") from exc
    precision = linalg.cho_solve(factor, np.eye(sigma.shape[0]))
    return 0.5 * (precision + precision.T)


def truncated_mvn_sweep(mu: np.ndarray,
                        precision: np.ndarray,
                        lower: np.ndarray,
                        upper: np.ndarray,
                        current: np.ndarray,
                        rng: np.random.Generator) -> np.ndarray:
    """One Gibbs sweep over coordinates 0..M−1 given the precision matrix."""
    state = np.array(current, dtype=float)
    m = mu.shape[0]
    for i in range(m):
        row = precision[i].copy()
        w_ii = row[i]
        row[i] = 0.0
        u_i = mu[i] + ((mu - state) @ row) / w_ii
        v_i = 1.0 / np.sqrt(w_ii)
        state[..., i] = slice_truncated_normal(
            u_i, v_i, lower[i], upper[i], state[..., i], rng, coordinate=i
        )
    return state


def sample_truncated_mvn(mu,
                         sigma,
                         lower,
                         upper,
                         current,
                         rng: np.random.Generator) -> np.ndarray:
    """
    One full Gibbs sweep for N(μ, Σ) truncated to the box [lower, upper].

    Args:
        mu: Mean vector (M,)
        sigma: Symmetric positive definite covariance (M, M)
        lower: Lower bounds (M,), may be −inf
        upper: Upper bounds (M,), may be +inf
        current: Current state, shape (M,) or a batch (B, M)
        rng: Random generator owned by the caller

    Returns:
        The new state, same shape as ``current``
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    lower = np.broadcast_to(np.asarray(lower, dtype=float), mu.shape)
    upper = np.broadcast_to(np.asarray(upper, dtype=float), mu.shape)
    current = np.asarray(current, dtype=float)

    if current.shape[-1] != mu.shape[0]:
        raise ParameterError(f"state has {current.shape[-1]} coordinates, mean has {mu.shape[0]}")
    for i in range(mu.shape[0]):
        if not lower[i] < upper[i]:
            raise TruncationError(i, float(lower[i]), float(upper[i]))
    if np.any(current < lower) or np.any(current > upper):
        raise ParameterError("current state lies outside the truncation bounds")

    precision = _precision_from_covariance(sigma)
    return truncated_mvn_sweep(mu, precision, lower, upper, current, rng)


def sample_truncated_normal(u: float,
                            v: float,
                            lower: float,
                            upper: float,
                            size: int,
                            n_sweeps: int = 50,
                            rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Draw ``size`` values from N(u, v²) truncated to [lower, upper].

    Runs ``size`` parallel slice chains from clip(u, lower, upper) for
    ``n_sweeps`` steps and returns their final states.
    """
    if v <= 0:
        raise ParameterError(f"standard deviation must be positive, got {v}")
    if not lower < upper:
        raise TruncationError(0, lower, upper)
    rng = rng if rng is not None else np.random.default_rng()
    state = np.full(size, float(np.clip(u, lower, upper)))
    for _ in range(n_sweeps):
        state = slice_truncated_normal(u, v, lower, upper, state, rng)
    return state
