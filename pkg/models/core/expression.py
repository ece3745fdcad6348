#!/usr/bin/env python3
"""
Domain Types for Paired Expression Data

This module holds the immutable data carriers shared by every model:
expression matrices, candidate regressor maps, per-gene regression problems
and point fits.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InputValidationError, ParameterError, UnknownFeatureError

logger = logging.getLogger(__name__)


class SignConvention(Enum):
    """How raw regressor expression enters the stored design."""
    NEGATED_DESIGN = "negated"
    PLAIN_DESIGN = "plain"


class InteractionModel(Enum):
    """Model (A) uses miRNA expression directly; model (B) uses RISC products."""
    DIRECT_A = "direct"
    RISC_B = "risc"


class AgoGroup(Enum):
    """Argonaute groups competing to form the RISC."""
    AGO2 = "Ago2"
    AGO134 = "Ago134"


class PointMethod(Enum):
    """Point estimators."""
    LSR = "lsr"
    RIDGE = "ridge"
    LASSO = "lasso"
    NLASSO = "nlasso"


@dataclass(frozen=True)
class Direct:
    """A candidate regressor entering the design as the miRNA itself."""
    mirna_id: str

    @property
    def label(self) -> str:
        return self.mirna_id


@dataclass(frozen=True)
class RiscProduct:
    """A candidate regressor formed as miRNA × Argonaute expression."""
    mirna_id: str
    ago_group: AgoGroup

    @property
    def label(self) -> str:
        return f"{self.mirna_id}:{self.ago_group.value}"


Descriptor = Union[Direct, RiscProduct]


def parse_descriptor(label: str) -> Descriptor:
    """Invert ``Descriptor.label``."""
    mirna_id, sep, group = label.rpartition(":")
    if sep and group in {g.value for g in AgoGroup}:
        return RiscProduct(mirna_id, AgoGroup(group))
    return Direct(label)


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise InputValidationError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ExpressionMatrix:
    """Named samples × features matrix of pre-normalized expression values."""
    sample_ids: Tuple[str, ...]
    feature_ids: Tuple[str, ...]
    values: np.ndarray
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'sample_ids', tuple(str(s) for s in self.sample_ids))
        object.__setattr__(self, 'feature_ids', tuple(str(f) for f in self.feature_ids))
        values = _frozen_array(self.values, 2, "values")
        object.__setattr__(self, 'values', values)

        if values.shape != (len(self.sample_ids), len(self.feature_ids)):
            raise InputValidationError(
                f"values shape {values.shape} does not match "
                f"{len(self.sample_ids)} samples × {len(self.feature_ids)} features"
            )
        for name, ids in (('sample_ids', self.sample_ids), ('feature_ids', self.feature_ids)):
            if len(set(ids)) != len(ids):
                duplicates = sorted({i for i in ids if ids.count(i) > 1})
                raise InputValidationError(f"duplicate {name}: {duplicates}")
        if not np.all(np.isfinite(values)):
            row, col = np.argwhere(~np.isfinite(values))[0]
            raise InputValidationError(
                f"non-finite value at sample '{self.sample_ids[row]}', "
                f"feature '{self.feature_ids[col]}'"
            )

        object.__setattr__(self, '_index', {f: i for i, f in enumerate(self.feature_ids)})

    @property
    def n_samples(self) -> int:
        return len(self.sample_ids)

    @property
    def n_features(self) -> int:
        return len(self.feature_ids)

    def has_feature(self, feature_id: str) -> bool:
        return feature_id in self._index

    def column(self, feature_id: str, matrix: str = "expression") -> np.ndarray:
        """Return one feature's values; ``matrix`` names the source in errors."""
        try:
            return self.values[:, self._index[feature_id]]
        except KeyError:
            raise UnknownFeatureError(feature_id, matrix) from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpressionMatrix):
            return NotImplemented
        return (self.sample_ids == other.sample_ids
                and self.feature_ids == other.feature_ids
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class CandidateMap:
    """Per-gene ordered, duplicate-free lists of candidate regressors."""
    entries: Dict[str, Tuple[Descriptor, ...]]

    def __post_init__(self):
        frozen = {}
        for gene_id, descriptors in self.entries.items():
            descriptors = tuple(descriptors)
            if not descriptors:
                raise InputValidationError(f"gene '{gene_id}' has no candidate regressors")
            if len(set(descriptors)) != len(descriptors):
                raise InputValidationError(f"gene '{gene_id}' lists a candidate regressor twice")
            frozen[str(gene_id)] = descriptors
        object.__setattr__(self, 'entries', frozen)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, str]]) -> 'CandidateMap':
        """Build from (gene_id, regressor label) rows, keeping first-seen order."""
        entries: Dict[str, List[Descriptor]] = {}
        for gene_id, label in pairs:
            entries.setdefault(str(gene_id), []).append(parse_descriptor(str(label)))
        return cls(entries)

    @property
    def gene_ids(self) -> Tuple[str, ...]:
        return tuple(self.entries)

    def candidates(self, gene_id: str) -> Tuple[Descriptor, ...]:
        try:
            return self.entries[gene_id]
        except KeyError:
            raise UnknownFeatureError(gene_id, "candidate map") from None

    def universe(self) -> List[Tuple[str, str]]:
        """All (gene, miRNA) interaction pairs, in map order."""
        seen = {}
        for gene_id, descriptors in self.entries.items():
            for descriptor in descriptors:
                seen.setdefault((gene_id, descriptor.mirna_id), None)
        return list(seen)

    def validate_against(self, mrna: ExpressionMatrix, mirna: ExpressionMatrix):
        """Check every referenced gene and miRNA exists in the matrices."""
        for gene_id, descriptors in self.entries.items():
            if not mrna.has_feature(gene_id):
                raise UnknownFeatureError(gene_id, "mRNA")
            for descriptor in descriptors:
                if not mirna.has_feature(descriptor.mirna_id):
                    raise UnknownFeatureError(descriptor.mirna_id, "miRNA")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class GeneProblem:
    """One gene's response and candidate-regressor design."""
    gene_id: str
    y: np.ndarray
    X: np.ndarray
    regressor_labels: Tuple[Descriptor, ...]
    sign_convention: SignConvention
    y_offset: float = 0.0
    x_offsets: Optional[np.ndarray] = None
    x_scales: Optional[np.ndarray] = None

    def __post_init__(self):
        y = _frozen_array(self.y, 1, "y")
        X = _frozen_array(self.X, 2, "X")
        object.__setattr__(self, 'y', y)
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'regressor_labels', tuple(self.regressor_labels))
        if X.shape[0] != y.shape[0]:
            raise InputValidationError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if X.shape[1] != len(self.regressor_labels):
            raise InputValidationError(
                f"X has {X.shape[1]} columns but {len(self.regressor_labels)} regressor labels"
            )
        for name in ('x_offsets', 'x_scales'):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _frozen_array(value, 1, name))

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_regressors(self) -> int:
        return self.X.shape[1]

    @property
    def labels(self) -> List[str]:
        return [d.label for d in self.regressor_labels]

    def subset(self, rows: Sequence[int]) -> 'GeneProblem':
        """Restrict to the given sample rows (transformation record kept)."""
        rows = np.asarray(rows, dtype=int)
        return GeneProblem(
            gene_id=self.gene_id,
            y=self.y[rows],
            X=self.X[rows],
            regressor_labels=self.regressor_labels,
            sign_convention=self.sign_convention,
            y_offset=self.y_offset,
            x_offsets=self.x_offsets,
            x_scales=self.x_scales,
        )

    def coefficients_on_original_scale(self, beta: np.ndarray) -> np.ndarray:
        """Undo column scaling applied by ``standardize``."""
        beta = np.asarray(beta, dtype=float)
        if self.x_scales is None:
            return beta.copy()
        return beta / self.x_scales


@dataclass(frozen=True, eq=False)
class PointFit:
    """A coefficient vector with the method and penalty that produced it."""
    gene_id: str
    method: PointMethod
    lambda_: float
    beta: np.ndarray
    regressor_labels: Tuple[Descriptor, ...]
    threshold: float = 0.0
    converged: bool = True
    n_iter: int = 0
    objective_history: Tuple[float, ...] = ()

    def __post_init__(self):
        beta = _frozen_array(self.beta, 1, "beta")
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'regressor_labels', tuple(self.regressor_labels))
        object.__setattr__(self, 'objective_history', tuple(self.objective_history))
        if self.lambda_ < 0:
            raise ParameterError(f"lambda must be nonnegative, got {self.lambda_}")
        if self.threshold < 0:
            raise ParameterError(f"threshold must be nonnegative, got {self.threshold}")
        if beta.shape[0] != len(self.regressor_labels):
            raise InputValidationError(
                f"beta has {beta.shape[0]} entries but {len(self.regressor_labels)} regressors"
            )
        if self.method is PointMethod.NLASSO and np.any(beta < 0):
            raise InputValidationError("nLASSO coefficients must be nonnegative")

    @property
    def labels(self) -> List[str]:
        return [d.label for d in self.regressor_labels]
