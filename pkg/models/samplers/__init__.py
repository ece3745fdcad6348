"""
Gibbs samplers for BLASSO and nBLASSO, the truncated-normal subsampler and
chain diagnostics.
"""

from .truncated_normal import (
    slice_truncated_normal,
    sample_truncated_mvn,
    sample_truncated_normal,
    truncated_mvn_sweep,
    conditional_moments,
)
from .gibbs import (
    BayesMethod,
    SamplerConfig,
    PosteriorChain,
    sample_nblasso,
    sample_blasso,
    chain_seeds,
    run_chains,
    pool_chains,
)
from .diagnostics import (
    batch_means_mcse,
    effective_sample_size,
    posterior_summary,
    density_histograms,
    anti_phase_fraction,
)

__all__ = [
    'slice_truncated_normal', 'sample_truncated_mvn', 'sample_truncated_normal',
    'truncated_mvn_sweep', 'conditional_moments',
    'BayesMethod', 'SamplerConfig', 'PosteriorChain', 'sample_nblasso',
    'sample_blasso', 'chain_seeds', 'run_chains', 'pool_chains',
    'batch_means_mcse', 'effective_sample_size', 'posterior_summary',
    'density_histograms', 'anti_phase_fraction',
]
