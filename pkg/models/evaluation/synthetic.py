#!/usr/bin/env python3
"""
Synthetic Paired Expression Data With Planted Regulators

Generates miRNA (and optionally Argonaute) expression, a candidate map and
gene expression in which a known subset of candidates down-regulates each
gene. The planted pairs form the ground-truth validated set.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.core import (
    AgoGroup,
    CandidateMap,
    Direct,
    ExpressionMatrix,
    InteractionModel,
    ParameterError,
    RiscProduct,
)
from models.core.design import expand_candidates

from .roc import ValidatedSet

logger = logging.getLogger(__name__)


class SyntheticSpec(BaseModel):
    """Shape, signal and noise of a synthetic benchmark."""
    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(60, ge=2)
    n_genes: int = Field(40, ge=1)
    n_mirnas: int = Field(30, ge=1)
    candidates_per_gene: int = Field(8, ge=1)
    active_per_gene: int = Field(2, ge=0)
    effect_size: float = Field(1.0, ge=0)
    noise_sd: float = Field(0.5, ge=0)
    model: InteractionModel = InteractionModel.DIRECT_A
    seed: int = Field(0, ge=0, lt=2 ** 64)
    ago_level: float = Field(4.0, gt=0)
    ago_correlation: float = Field(-0.8, ge=-1, le=1)
    ago_sd: float = Field(1.0, gt=0)
    shared_risc: bool = False

    @model_validator(mode='after')
    def _feasible(self):
        if self.candidates_per_gene > self.n_mirnas:
            raise ParameterError(
                f"candidates_per_gene ({self.candidates_per_gene}) exceeds n_mirnas ({self.n_mirnas})"
            )
        if self.active_per_gene > self.candidates_per_gene:
            raise ParameterError(
                f"active_per_gene ({self.active_per_gene}) exceeds "
                f"candidates_per_gene ({self.candidates_per_gene})"
            )
        return self


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    """Generated matrices, candidates and the planted truth."""
    spec: SyntheticSpec
    mrna: ExpressionMatrix
    mirna: ExpressionMatrix
    ago: Optional[ExpressionMatrix]
    candidates: CandidateMap
    truth: ValidatedSet
    coefficients: Dict[str, np.ndarray]

    def true_coefficients(self, gene_id: str) -> np.ndarray:
        """Planted β of one gene, aligned with its design columns."""
        return self.coefficients[gene_id]


def _ids(prefix: str, count: int) -> List[str]:
    width = max(3, len(str(count)))
    return [f"{prefix}{i:0{width}d}" for i in range(1, count + 1)]


def generate_synthetic(spec: SyntheticSpec) -> SyntheticDataset:
    """
    Draw one synthetic benchmark.

    miRNA expression is i.i.d. standard normal. Each gene gets a random
    candidate subset and a random active subset of it; its expression is
    y = −X_active·β + ε with β = effect_size and ε ~ N(0, noise_sd²). Under
    the RISC model the active coefficient sits on one randomly chosen
    Argonaute group, or is split evenly over both when ``shared_risc``.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_samples
    samples = _ids("S", n)
    mirna_ids = _ids("miR-", spec.n_mirnas)
    gene_ids = _ids("GENE", spec.n_genes)

    mirna_values = rng.standard_normal((n, spec.n_mirnas))
    ago = None
    if spec.model is InteractionModel.RISC_B:
        e1, e2 = rng.standard_normal((2, n))
        rho = spec.ago_correlation
        ago2 = spec.ago_level + spec.ago_sd * e1
        ago134 = spec.ago_level + spec.ago_sd * (rho * e1 + np.sqrt(1.0 - rho ** 2) * e2)
        ago = ExpressionMatrix(samples, [g.value for g in AgoGroup], np.column_stack([ago2, ago134]))
        ago_columns = {AgoGroup.AGO2: ago2, AgoGroup.AGO134: ago134}

    active_count = spec.active_per_gene if spec.effect_size > 0 else 0
    entries = {}
    truth = []
    coefficients = {}
    mrna_values = np.empty((n, spec.n_genes))
    for g, gene_id in enumerate(gene_ids):
        chosen = rng.choice(spec.n_mirnas, size=spec.candidates_per_gene, replace=False)
        active = set(rng.choice(spec.candidates_per_gene, size=active_count, replace=False).tolist())
        descriptors = [Direct(mirna_ids[j]) for j in chosen]
        columns = expand_candidates(descriptors, spec.model)
        beta = np.zeros(len(columns))

        for position in sorted(active):
            mirna_id = descriptors[position].mirna_id
            truth.append((gene_id, mirna_id))
            if spec.model is InteractionModel.DIRECT_A:
                beta[position] = spec.effect_size
            elif spec.shared_risc:
                beta[2 * position] = beta[2 * position + 1] = spec.effect_size / 2
            else:
                beta[2 * position + int(rng.integers(2))] = spec.effect_size

        raw = np.empty((n, len(columns)))
        for j, column in enumerate(columns):
            raw[:, j] = mirna_values[:, mirna_ids.index(column.mirna_id)]
            if isinstance(column, RiscProduct):
                raw[:, j] *= ago_columns[column.ago_group]

        mrna_values[:, g] = -raw @ beta + spec.noise_sd * rng.standard_normal(n)
        entries[gene_id] = tuple(descriptors)
        coefficients[gene_id] = beta

    candidates = CandidateMap(entries)
    dataset = SyntheticDataset(
        spec=spec,
        mrna=ExpressionMatrix(samples, gene_ids, mrna_values),
        mirna=ExpressionMatrix(samples, mirna_ids, mirna_values),
        ago=ago,
        candidates=candidates,
        truth=ValidatedSet.from_candidates(truth, candidates),
        coefficients=coefficients,
    )
    logger.info(f"Generated synthetic data: {n} samples, {spec.n_genes} genes, "
                f"{spec.n_mirnas} miRNAs, {len(truth)} planted pairs (seed {spec.seed})")
    return dataset
