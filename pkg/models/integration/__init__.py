"""
End-to-end benchmark of the estimators on synthetic data with planted regulators.
"""

from .benchmark import (
    MethodBenchmark, compare_replicates, BENCHMARK_SAMPLER, BENCHMARK_GRID, LOW_SIGNAL_SPEC,
)

__all__ = ['MethodBenchmark', 'compare_replicates', 'BENCHMARK_SAMPLER', 'BENCHMARK_GRID',
           'LOW_SIGNAL_SPEC']
