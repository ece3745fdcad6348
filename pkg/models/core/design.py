#!/usr/bin/env python3
"""
Design-Matrix Construction for Interaction Models

Model (A) regresses a gene's expression on the expression of its candidate
miRNAs. Model (B) replaces each candidate by two RISC regressors, the
elementwise products miRNA × Ago2 and miRNA × Ago1,3&4, so that the two
Argonaute groups compete for the same miRNA. Under the negated-design sign
convention the stored design is the negation of the raw regressors and a
nonnegative coefficient encodes down-regulation.
"""

import logging
from typing import List, Optional

import numpy as np

from .errors import (
    DegenerateRegressorError,
    InputValidationError,
    ParameterError,
    SampleAlignmentError,
)
from .expression import (
    AgoGroup,
    CandidateMap,
    Descriptor,
    Direct,
    ExpressionMatrix,
    GeneProblem,
    InteractionModel,
    RiscProduct,
    SignConvention,
)

logger = logging.getLogger(__name__)


def check_alignment(reference: ExpressionMatrix, other: ExpressionMatrix, name: str):
    """Require identical sample ids in identical order."""
    if reference.sample_ids == other.sample_ids:
        return
    if len(reference.sample_ids) != len(other.sample_ids):
        raise SampleAlignmentError(
            f"sample alignment: mRNA has {reference.n_samples} samples, "
            f"{name} has {other.n_samples}"
        )
    for position, (a, b) in enumerate(zip(reference.sample_ids, other.sample_ids)):
        if a != b:
            raise SampleAlignmentError(
                f"sample alignment: position {position} is '{a}' in mRNA but '{b}' in {name}"
            )


def expand_candidates(descriptors, model: InteractionModel) -> List[Descriptor]:
    """Expand a gene's candidates into design columns for the chosen model."""
    columns: List[Descriptor] = []
    for descriptor in descriptors:
        if model is InteractionModel.DIRECT_A:
            if isinstance(descriptor, RiscProduct):
                raise ParameterError(
                    f"RISC regressor '{descriptor.label}' cannot enter the direct model"
                )
            columns.append(descriptor)
        elif isinstance(descriptor, Direct):
            columns.append(RiscProduct(descriptor.mirna_id, AgoGroup.AGO2))
            columns.append(RiscProduct(descriptor.mirna_id, AgoGroup.AGO134))
        else:
            columns.append(descriptor)
    if len(set(columns)) != len(columns):
        raise InputValidationError("candidate expansion produced a duplicate regressor")
    return columns


def build_problem(mrna: ExpressionMatrix,
                  mirna: ExpressionMatrix,
                  ago: Optional[ExpressionMatrix],
                  candidates: CandidateMap,
                  gene_id: str,
                  model: InteractionModel = InteractionModel.DIRECT_A,
                  sign: SignConvention = SignConvention.NEGATED_DESIGN) -> GeneProblem:
    """
    Assemble one gene's regression problem.

    Args:
        mrna: Response matrix (samples × genes)
        mirna: Regressor matrix (samples × miRNAs)
        ago: Argonaute matrix with features "Ago2" and "Ago134" (model B only)
        candidates: Candidate regressors per gene
        gene_id: Gene to assemble
        model: Direct model (A) or RISC model (B)
        sign: Whether the stored design is negated

    Returns:
        The assembled GeneProblem
    """
    check_alignment(mrna, mirna, "miRNA")
    y = mrna.column(gene_id, "mRNA")
    columns = expand_candidates(candidates.candidates(gene_id), model)

    if model is InteractionModel.RISC_B:
        if ago is None:
            raise ParameterError("the RISC model requires an Argonaute expression matrix")
        check_alignment(mrna, ago, "Argonaute")
        ago_columns = {group: ago.column(group.value, "Argonaute") for group in AgoGroup}

    design = np.empty((mrna.n_samples, len(columns)))
    for j, descriptor in enumerate(columns):
        column = mirna.column(descriptor.mirna_id, "miRNA")
        if isinstance(descriptor, RiscProduct):
            column = column * ago_columns[descriptor.ago_group]
        design[:, j] = column

    if sign is SignConvention.NEGATED_DESIGN:
        design = -design

    logger.debug(f"Built problem for {gene_id}: {design.shape[0]} samples × {design.shape[1]} regressors")
    return GeneProblem(
        gene_id=gene_id,
        y=y,
        X=design,
        regressor_labels=tuple(columns),
        sign_convention=sign,
    )


def build_problems(mrna: ExpressionMatrix,
                   mirna: ExpressionMatrix,
                   ago: Optional[ExpressionMatrix],
                   candidates: CandidateMap,
                   model: InteractionModel = InteractionModel.DIRECT_A,
                   sign: SignConvention = SignConvention.NEGATED_DESIGN) -> List[GeneProblem]:
    """Build every gene of the candidate map, in map order."""
    candidates.validate_against(mrna, mirna)
    return [
        build_problem(mrna, mirna, ago, candidates, gene_id, model, sign)
        for gene_id in candidates.gene_ids
    ]


def standardize(problem: GeneProblem, center_y: bool = True, scale_x: bool = True) -> GeneProblem:
    """
    Center the response and/or scale design columns to mean 0, unit sd.

    The offsets and scales are recorded on the returned problem so that
    coefficients can be mapped back to the original scale.
    """
    if problem.n_samples < 2:
        raise ParameterError("standardization needs at least 2 samples")

    y = problem.y
    y_offset = problem.y_offset
    if center_y:
        mean = float(np.mean(y))
        y = y - mean
        y_offset += mean

    X = problem.X
    x_offsets, x_scales = problem.x_offsets, problem.x_scales
    if scale_x:
        for j, label in enumerate(problem.labels):
            if np.all(X[:, j] == X[0, j]):
                raise DegenerateRegressorError(f"degenerate regressor '{label}': zero variance")
        x_offsets = X.mean(axis=0)
        x_scales = X.std(axis=0, ddof=1)
        X = (X - x_offsets) / x_scales

    return GeneProblem(
        gene_id=problem.gene_id,
        y=y,
        X=X,
        regressor_labels=problem.regressor_labels,
        sign_convention=problem.sign_convention,
        y_offset=y_offset,
        x_offsets=x_offsets,
        x_scales=x_scales,
    )
