#!/usr/bin/env python3
"""
Gibbs Samplers for Bayesian and Non-negative Bayesian LASSO

nBLASSO places an exponential prior with per-coefficient rate λ_m/(2σ²) on
each βₘ ≥ 0, Gamma(α⁰, β⁰) priors on the λ_m and a noninformative prior on
σ². Working on the stored design X̃ (−X under the negated convention) the
full conditionals are

    β | σ², λ   ~ N₊(Σ_X(X̃ᵀy − ½λ), σ²Σ_X),   Σ_X = (X̃ᵀX̃)⁻¹
    σ⁻² | β, λ  ~ Gamma(N/2 + M + 2, [½‖y − X̃β‖² + ½Σλₘβₘ]⁻¹)
    λₘ | β, σ²  ~ Gamma(α⁰ + 1, [1/β⁰ + βₘ/(2σ²)]⁻¹)

with every Gamma in shape–scale form. BLASSO is the scale-mixture
construction with latent 1/τ²ⱼ drawn from inverse-Gaussian conditionals
and a single global λ².
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg

from models.core import (
    Descriptor,
    GeneProblem,
    InputValidationError,
    NonFiniteDrawError,
    ParameterError,
    PrecisionFactorizationError,
    SingularPrecisionError,
)
from .truncated_normal import sample_truncated_mvn

logger = logging.getLogger(__name__)

NBLASSO_BETA_START = 1e-3
INVTAU2_BOUNDS = (1e-10, 1e10)


class BayesMethod(Enum):
    """Bayesian samplers."""
    BLASSO = "blasso"
    NBLASSO = "nblasso"


class SamplerConfig(BaseModel):
    """Chain length, hyperpriors and seed for the Gibbs samplers."""
    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(5000, ge=1)
    burn_in: int = Field(2000, ge=0)
    thin: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    alpha_lambda0: float = Field(1e-6, gt=0)
    beta_lambda0: float = Field(1e6, gt=0)
    n_chains: int = Field(1, ge=1)
    fixed_sigma2: Optional[float] = Field(None, gt=0)
    fixed_lambda: Optional[float] = Field(None, gt=0)

    @model_validator(mode='after')
    def _retains_draws(self):
        if self.n_samples < self.thin:
            raise ValueError(f"n_samples ({self.n_samples}) must be at least thin ({self.thin})")
        return self

    @property
    def n_retained(self) -> int:
        return self.n_samples // self.thin


@dataclass(frozen=True, eq=False)
class PosteriorChain:
    """Retained Gibbs draws of (β, σ², λ) for one gene."""
    gene_id: str
    method: BayesMethod
    beta_draws: np.ndarray
    sigma2_draws: np.ndarray
    lambda_draws: np.ndarray
    seed: int
    regressor_labels: Tuple[Descriptor, ...]

    def __post_init__(self):
        for name, ndim in (('beta_draws', 2), ('sigma2_draws', 1), ('lambda_draws', 2)):
            array = np.array(getattr(self, name), dtype=float)
            if array.ndim != ndim:
                raise InputValidationError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        object.__setattr__(self, 'regressor_labels', tuple(self.regressor_labels))

        t, m = self.beta_draws.shape
        if self.sigma2_draws.shape != (t,) or self.lambda_draws.shape != (t, m):
            raise InputValidationError("chain draws have inconsistent shapes")
        if m != len(self.regressor_labels):
            raise InputValidationError(f"chain has {m} coefficients but {len(self.regressor_labels)} labels")
        if not (np.all(self.sigma2_draws > 0) and np.all(self.lambda_draws > 0)):
            raise InputValidationError("sigma2 and lambda draws must be strictly positive")
        if self.method is BayesMethod.NBLASSO and np.any(self.beta_draws < 0):
            raise InputValidationError("nBLASSO coefficient draws must be nonnegative")

    @property
    def n_draws(self) -> int:
        return self.beta_draws.shape[0]

    @property
    def n_regressors(self) -> int:
        return self.beta_draws.shape[1]

    @property
    def labels(self) -> List[str]:
        return [d.label for d in self.regressor_labels]


class _DrawRecorder:
    """Discards burn-in and keeps every ``thin``-th post-burn-in iteration."""

    def __init__(self, cfg: SamplerConfig, m: int):
        self.burn_in = cfg.burn_in
        self.thin = cfg.thin
        t = cfg.n_retained
        self.beta = np.empty((t, m))
        self.sigma2 = np.empty(t)
        self.lam = np.empty((t, m))
        self.count = 0

    def offer(self, iteration: int, beta, sigma2, lam):
        k = iteration - self.burn_in
        if k < 0 or (k + 1) % self.thin != 0 or self.count == self.beta.shape[0]:
            return
        self.beta[self.count] = beta
        self.sigma2[self.count] = sigma2
        self.lam[self.count] = lam
        self.count += 1


def _check_finite(iteration: int, **quantities):
    for name, value in quantities.items():
        if not np.all(np.isfinite(value)):
            raise NonFiniteDrawError(iteration, name)


def _initial_sigma2(y: np.ndarray, cfg: SamplerConfig) -> float:
    if cfg.fixed_sigma2 is not None:
        return cfg.fixed_sigma2
    variance = float(np.var(y, ddof=1)) if y.size > 1 else 0.0
    return variance if variance > 0 else 1.0


def sample_nblasso(problem: GeneProblem, cfg: SamplerConfig, seed: Optional[int] = None) -> PosteriorChain:
    """
    Non-negative Bayesian LASSO by Gibbs sampling.

    Each outer iteration draws β with one sweep of the truncated-normal
    subsampler, then σ², then every λₘ.

    Raises:
        SingularPrecisionError: XᵀX is not invertible
        NonFiniteDrawError: a draw overflowed
    """
    seed = cfg.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    X, y = problem.X, problem.y
    n, m = X.shape

    gram = X.T @ X
    if n < m or np.linalg.matrix_rank(X) < m:
        raise SingularPrecisionError(
            f"singular precision for {problem.gene_id}: XᵀX is not invertible "
            f"({n} samples, {m} regressors); reduce the candidate set"
        )
    try:
        factor = linalg.cho_factor(gram, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularPrecisionError(
            f"singular precision for {problem.gene_id}: {exc}; reduce the candidate set"
        ) from exc
    sigma_x = linalg.cho_solve(factor, np.eye(m))
    sigma_x = 0.5 * (sigma_x + sigma_x.T)
    xty = X.T @ y

    beta = np.full(m, NBLASSO_BETA_START)
    sigma2 = _initial_sigma2(y, cfg)
    lam = np.full(m, cfg.fixed_lambda if cfg.fixed_lambda is not None else 1.0)
    lower = np.zeros(m)
    upper = np.full(m, np.inf)
    sigma_shape = n / 2.0 + m + 2.0
    lambda_shape = cfg.alpha_lambda0 + 1.0

    logger.info(f"nBLASSO {problem.gene_id}: {m} regressors, "
                f"{cfg.burn_in} burn-in + {cfg.n_samples} iterations, seed {seed}")
    recorder = _DrawRecorder(cfg, m)
    for iteration in range(cfg.burn_in + cfg.n_samples):
        mu = sigma_x @ (xty - 0.5 * lam)
        beta = sample_truncated_mvn(mu, sigma2 * sigma_x, lower, upper, beta, rng)

        if cfg.fixed_sigma2 is None:
            residual = y - X @ beta
            rate = 0.5 * residual @ residual + 0.5 * np.sum(lam * beta)
            sigma2 = 1.0 / rng.gamma(sigma_shape, 1.0 / rate)

        if cfg.fixed_lambda is None:
            lam = rng.gamma(lambda_shape, 1.0 / (1.0 / cfg.beta_lambda0 + beta / (2.0 * sigma2)))

        _check_finite(iteration, beta=beta, sigma2=sigma2, **{"lambda": lam})
        recorder.offer(iteration, beta, sigma2, lam)

    logger.debug(f"nBLASSO {problem.gene_id}: retained {recorder.count} draws")
    return PosteriorChain(problem.gene_id, BayesMethod.NBLASSO, recorder.beta,
                          recorder.sigma2, recorder.lam, seed, problem.regressor_labels)


def sample_blasso(problem: GeneProblem, cfg: SamplerConfig, seed: Optional[int] = None) -> PosteriorChain:
    """
    Bayesian LASSO by Gibbs sampling (sign-unconstrained).

    β | rest ~ N(A⁻¹X̃ᵀy, σ²A⁻¹) with A = X̃ᵀX̃ + diag(1/τ²), 1/τ²ⱼ from
    inverse-Gaussian conditionals, σ² inverse-Gamma and λ² Gamma with the
    configured hyperprior. ``lambda_draws`` holds λ² in every column.
    """
    seed = cfg.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    X, y = problem.X, problem.y
    n, m = X.shape
    if n < 2:
        raise ParameterError("BLASSO needs at least 2 samples")

    gram = X.T @ X
    xty = X.T @ y

    beta = linalg.solve(gram + np.eye(m), xty, assume_a='pos')
    sigma2 = _initial_sigma2(y, cfg)
    lambda2 = cfg.fixed_lambda ** 2 if cfg.fixed_lambda is not None else 1.0
    invtau2 = np.ones(m)
    sigma_shape = (n + m) / 2.0
    lambda_shape = m + cfg.alpha_lambda0

    logger.info(f"BLASSO {problem.gene_id}: {m} regressors, "
                f"{cfg.burn_in} burn-in + {cfg.n_samples} iterations, seed {seed}")
    recorder = _DrawRecorder(cfg, m)
    for iteration in range(cfg.burn_in + cfg.n_samples):
        try:
            chol = linalg.cholesky(gram + np.diag(invtau2), lower=True)
        except linalg.LinAlgError as exc:
            raise PrecisionFactorizationError(
                f"precision factorization failed for {problem.gene_id} at iteration {iteration}: {exc}"
            ) from exc
        mean = linalg.cho_solve((chol, True), xty)
        noise = linalg.solve_triangular(chol.T, rng.standard_normal(m), lower=False)
        beta = mean + np.sqrt(sigma2) * noise

        if cfg.fixed_sigma2 is None:
            residual = y - X @ beta
            rate = 0.5 * residual @ residual + 0.5 * np.sum(invtau2 * beta * beta)
            sigma2 = 1.0 / rng.gamma(sigma_shape, 1.0 / rate)

        magnitude = np.maximum(np.abs(beta), 1e-12)
        invtau2 = rng.wald(np.sqrt(lambda2 * sigma2) / magnitude, lambda2)
        invtau2 = np.clip(invtau2, *INVTAU2_BOUNDS)

        if cfg.fixed_lambda is None:
            lambda2 = rng.gamma(lambda_shape, 1.0 / (0.5 * np.sum(1.0 / invtau2) + 1.0 / cfg.beta_lambda0))

        _check_finite(iteration, beta=beta, sigma2=sigma2, **{"lambda": lambda2})
        recorder.offer(iteration, beta, sigma2, lambda2)

    logger.debug(f"BLASSO {problem.gene_id}: retained {recorder.count} draws")
    return PosteriorChain(problem.gene_id, BayesMethod.BLASSO, recorder.beta,
                          recorder.sigma2, recorder.lam, seed, problem.regressor_labels)


SAMPLERS = {
    BayesMethod.BLASSO: sample_blasso,
    BayesMethod.NBLASSO: sample_nblasso,
}


def chain_seeds(cfg: SamplerConfig) -> List[int]:
    """Seed of each replicate chain; chain 0 uses ``cfg.seed`` itself."""
    seeds = [cfg.seed]
    for k in range(1, cfg.n_chains):
        state = np.random.SeedSequence([cfg.seed, k]).generate_state(1, dtype=np.uint64)
        seeds.append(int(state[0]))
    return seeds


def run_chains(problem: GeneProblem, cfg: SamplerConfig, method: BayesMethod) -> List[PosteriorChain]:
    """Run ``cfg.n_chains`` independent chains of ``method``."""
    sampler = SAMPLERS[method]
    return [sampler(problem, cfg, seed=seed) for seed in chain_seeds(cfg)]


def pool_chains(chains: Sequence[PosteriorChain]) -> PosteriorChain:
    """Concatenate replicate chains of the same gene and method."""
    if not chains:
        raise ParameterError("no chains to pool")
    first = chains[0]
    if len(chains) == 1:
        return first
    for chain in chains[1:]:
        if (chain.gene_id, chain.method, chain.regressor_labels) != \
                (first.gene_id, first.method, first.regressor_labels):
            raise ParameterError("only chains of the same gene, method and regressors can be pooled")
    return PosteriorChain(
        gene_id=first.gene_id,
        method=first.method,
        beta_draws=np.concatenate([c.beta_draws for c in chains]),
        sigma2_draws=np.concatenate([c.sigma2_draws for c in chains]),
        lambda_draws=np.concatenate([c.lambda_draws for c in chains]),
        seed=first.seed,
        regressor_labels=first.regressor_labels,
    )
