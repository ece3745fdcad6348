"""
Core domain types and design-matrix construction.
"""

from .errors import (
    SparseRegError, InputValidationError, NumericalFailure, ParameterError,
    UnknownFeatureError, SampleAlignmentError, DegenerateRegressorError,
    InputFormatError, UnknownValidatedPairError, SingularDesignError,
    SingularPrecisionError, PrecisionFactorizationError, TruncationError,
    NonFiniteDrawError, CrossValidationError, GeneStageError,
)
from .expression import (
    SignConvention, InteractionModel, AgoGroup, PointMethod,
    Direct, RiscProduct, Descriptor, parse_descriptor,
    ExpressionMatrix, CandidateMap, GeneProblem, PointFit,
)
from .design import build_problem, build_problems, standardize, check_alignment

__all__ = [
    'SparseRegError', 'InputValidationError', 'NumericalFailure', 'ParameterError',
    'UnknownFeatureError', 'SampleAlignmentError', 'DegenerateRegressorError',
    'InputFormatError', 'UnknownValidatedPairError', 'SingularDesignError',
    'SingularPrecisionError', 'PrecisionFactorizationError', 'TruncationError',
    'NonFiniteDrawError', 'CrossValidationError', 'GeneStageError',
    'SignConvention', 'InteractionModel', 'AgoGroup', 'PointMethod',
    'Direct', 'RiscProduct', 'Descriptor', 'parse_descriptor',
    'ExpressionMatrix', 'CandidateMap', 'GeneProblem', 'PointFit',
    'build_problem', 'build_problems', 'standardize', 'check_alignment',
]
