"""Exception hierarchy shared by every SparseReg model package."""


class SparseRegError(Exception):
    """Base class for all SparseReg errors."""


class InputValidationError(SparseRegError):
    """Inputs or parameters violate a documented precondition."""


class NumericalFailure(SparseRegError):
    """A computation failed for numerical reasons."""


class ParameterError(InputValidationError, ValueError):
    """A parameter is outside its admissible range."""


class UnknownFeatureError(InputValidationError, KeyError):
    """A gene, miRNA or Argonaute feature is missing from a matrix."""

    def __init__(self, feature_id: str, matrix: str):
        self.feature_id = feature_id
        self.matrix = matrix
        super().__init__(f"unknown feature '{feature_id}' in {matrix} matrix")

    def __str__(self) -> str:
        return self.args[0]


class SampleAlignmentError(InputValidationError):
    """Paired matrices do not share identical, identically ordered samples."""


class DegenerateRegressorError(InputValidationError):
    """A design column has zero variance and cannot be scaled."""


class InputFormatError(InputValidationError):
    """A file could not be parsed; carries the file and line when known."""

    def __init__(self, message: str, path: str = None, line: int = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class UnknownValidatedPairError(InputValidationError):
    """Validated interactions fall outside the candidate universe."""

    def __init__(self, offenders):
        self.offenders = sorted(offenders)
        listed = ", ".join(f"{gene}/{mirna}" for gene, mirna in self.offenders)
        super().__init__(f"validated pairs outside the candidate universe: {listed}")


class SingularDesignError(NumericalFailure):
    """Normal equations are singular (N < M or rank-deficient design)."""


class SingularPrecisionError(NumericalFailure):
    """XᵀX is not invertible, so the sampler covariance does not exist."""


class PrecisionFactorizationError(NumericalFailure):
    """A covariance matrix is not symmetric positive definite."""


class TruncationError(NumericalFailure):
    """The truncation interval of a coordinate is empty after standardization."""

    def __init__(self, coordinate: int, lower: float, upper: float):
        self.coordinate = coordinate
        super().__init__(
            f"empty truncation interval for coordinate {coordinate}: ({lower}, {upper})"
        )


class NonFiniteDrawError(NumericalFailure):
    """A sampler produced an infinite or NaN draw."""

    def __init__(self, iteration: int, quantity: str):
        self.iteration = iteration
        self.quantity = quantity
        super().__init__(f"non-finite {quantity} draw at iteration {iteration}")


class CrossValidationError(NumericalFailure):
    """A fit inside cross-validation failed."""

    def __init__(self, fold: int, lambda_: float, cause: Exception):
        self.fold = fold
        self.lambda_ = lambda_
        super().__init__(f"fit failed on fold {fold} at lambda={lambda_:g}: {cause}")


class GeneStageError(NumericalFailure):
    """Wraps a numerical failure with the gene and pipeline stage it hit."""

    def __init__(self, gene_id: str, stage: str, cause: Exception):
        self.gene_id = gene_id
        self.stage = stage
        self.cause = cause
        super().__init__(f"gene {gene_id}, stage {stage}: {cause}")
