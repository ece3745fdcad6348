#!/usr/bin/env python3
"""
Tests for core domain types and design-matrix construction.
"""

import sys
from pathlib import Path

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import numpy as np
import pytest

from models.core import (
    AgoGroup, CandidateMap, DegenerateRegressorError, Direct, ExpressionMatrix,
    GeneProblem, InputValidationError, InteractionModel, ParameterError,
    PointFit, PointMethod, RiscProduct, SampleAlignmentError, SignConvention,
    UnknownFeatureError, build_problem, build_problems, parse_descriptor,
    standardize,
)


def _matrix(values, features, samples=None):
    values = np.asarray(values, dtype=float)
    if samples is None:
        samples = [f"S{i}" for i in range(values.shape[0])]
    return ExpressionMatrix(samples, features, values)


@pytest.fixture
def paired_data():
    rng = np.random.default_rng(7)
    n = 6
    mrna = _matrix(rng.normal(size=(n, 2)), ["NOTCH1", "ACAA2"])
    mirna = _matrix(rng.normal(size=(n, 3)), ["miR-124", "miR-34a", "miR-24"])
    ago = _matrix(rng.uniform(1, 5, size=(n, 2)), ["Ago2", "Ago134"])
    candidates = CandidateMap.from_pairs([
        ("NOTCH1", "miR-34a"), ("NOTCH1", "miR-24"), ("ACAA2", "miR-124"),
    ])
    return mrna, mirna, ago, candidates


class TestExpressionMatrix:
    """Tests for ExpressionMatrix invariants."""

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InputValidationError):
            ExpressionMatrix(["a", "b"], ["f"], np.zeros((3, 1)))

    def test_duplicate_features_rejected(self):
        with pytest.raises(InputValidationError, match="duplicate"):
            ExpressionMatrix(["a"], ["f", "f"], np.zeros((1, 2)))

    def test_non_finite_rejected(self):
        with pytest.raises(InputValidationError, match="non-finite"):
            ExpressionMatrix(["a", "b"], ["f"], np.array([[1.0], [np.nan]]))

    def test_values_are_read_only(self):
        matrix = _matrix([[1.0, 2.0]], ["f", "g"])
        with pytest.raises(ValueError):
            matrix.values[0, 0] = 5.0

    def test_unknown_column(self):
        matrix = _matrix([[1.0]], ["f"])
        with pytest.raises(UnknownFeatureError, match="unknown feature 'g'"):
            matrix.column("g", "miRNA")


class TestDescriptors:
    """Tests for regressor descriptors."""

    def test_labels_round_trip(self):
        for descriptor in (Direct("miR-200c"), RiscProduct("miR-124", AgoGroup.AGO134)):
            assert parse_descriptor(descriptor.label) == descriptor

    def test_candidate_map_rejects_duplicates(self):
        with pytest.raises(InputValidationError):
            CandidateMap.from_pairs([("G", "miR-1"), ("G", "miR-1")])

    def test_universe_is_gene_mirna_pairs(self, paired_data):
        _, _, _, candidates = paired_data
        assert candidates.universe() == [
            ("NOTCH1", "miR-34a"), ("NOTCH1", "miR-24"), ("ACAA2", "miR-124"),
        ]


class TestBuildProblem:
    """Tests for build_problem."""

    def test_direct_single_candidate_is_negated_column(self):
        mrna = _matrix([[1.0], [2.0], [3.0]], ["G"])
        mirna = _matrix([[0.5], [-1.0], [2.0]], ["miR-1"])
        candidates = CandidateMap.from_pairs([("G", "miR-1")])
        problem = build_problem(mrna, mirna, None, candidates, "G")
        assert problem.X.shape == (3, 1)
        np.testing.assert_array_equal(problem.X[:, 0], -mirna.values[:, 0])
        np.testing.assert_array_equal(problem.y, [1.0, 2.0, 3.0])

    def test_negated_equals_plain_on_negated_input(self, paired_data):
        mrna, mirna, _, candidates = paired_data
        negated = build_problem(mrna, mirna, None, candidates, "NOTCH1",
                                sign=SignConvention.NEGATED_DESIGN)
        flipped = ExpressionMatrix(mirna.sample_ids, mirna.feature_ids, -mirna.values)
        plain = build_problem(mrna, flipped, None, candidates, "NOTCH1",
                              sign=SignConvention.PLAIN_DESIGN)
        np.testing.assert_array_equal(negated.X, plain.X)

    def test_risc_single_mirna_expands_to_two_columns(self, paired_data):
        mrna, mirna, ago, candidates = paired_data
        problem = build_problem(mrna, mirna, ago, candidates, "ACAA2", InteractionModel.RISC_B)
        assert problem.labels == ["miR-124:Ago2", "miR-124:Ago134"]
        expected = -(mirna.column("miR-124")[:, None] * ago.values)
        np.testing.assert_array_equal(problem.X, expected)

    def test_risc_twelve_candidates_give_twenty_four_columns(self):
        rng = np.random.default_rng(3)
        mirna_ids = [f"miR-{i}" for i in range(12)]
        mrna = _matrix(rng.normal(size=(30, 1)), ["NOTCH1"])
        mirna = _matrix(rng.normal(size=(30, 12)), mirna_ids)
        ago = _matrix(rng.uniform(1, 3, size=(30, 2)), ["Ago2", "Ago134"])
        candidates = CandidateMap.from_pairs([("NOTCH1", m) for m in mirna_ids])
        problem = build_problem(mrna, mirna, ago, candidates, "NOTCH1", InteractionModel.RISC_B)
        assert problem.n_regressors == 24
        # Ago2 column directly precedes the Ago134 column of the same miRNA
        for j in range(0, 24, 2):
            assert problem.regressor_labels[j].ago_group is AgoGroup.AGO2
            assert problem.regressor_labels[j + 1].ago_group is AgoGroup.AGO134
            assert problem.regressor_labels[j].mirna_id == problem.regressor_labels[j + 1].mirna_id

    def test_deterministic(self, paired_data):
        mrna, mirna, ago, candidates = paired_data
        first = build_problem(mrna, mirna, ago, candidates, "NOTCH1", InteractionModel.RISC_B)
        second = build_problem(mrna, mirna, ago, candidates, "NOTCH1", InteractionModel.RISC_B)
        assert first.X.tobytes() == second.X.tobytes()
        assert first.y.tobytes() == second.y.tobytes()
        assert first.regressor_labels == second.regressor_labels

    def test_unknown_gene(self, paired_data):
        mrna, mirna, _, _ = paired_data
        candidates = CandidateMap.from_pairs([("TWIST1", "miR-124")])
        with pytest.raises(UnknownFeatureError, match="unknown feature 'TWIST1'"):
            build_problem(mrna, mirna, None, candidates, "TWIST1")

    def test_unknown_mirna(self, paired_data):
        mrna, mirna, _, _ = paired_data
        candidates = CandidateMap.from_pairs([("NOTCH1", "miR-999")])
        with pytest.raises(UnknownFeatureError, match="miR-999"):
            build_problem(mrna, mirna, None, candidates, "NOTCH1")

    def test_missing_ago_feature(self, paired_data):
        mrna, mirna, _, candidates = paired_data
        ago = _matrix(np.ones((6, 1)), ["Ago2"])
        with pytest.raises(UnknownFeatureError, match="Ago134"):
            build_problem(mrna, mirna, ago, candidates, "ACAA2", InteractionModel.RISC_B)

    def test_risc_without_ago(self, paired_data):
        mrna, mirna, _, candidates = paired_data
        with pytest.raises(ParameterError):
            build_problem(mrna, mirna, None, candidates, "ACAA2", InteractionModel.RISC_B)

    def test_sample_misalignment(self, paired_data):
        mrna, mirna, _, candidates = paired_data
        shuffled = ExpressionMatrix(tuple(reversed(mirna.sample_ids)), mirna.feature_ids, mirna.values)
        with pytest.raises(SampleAlignmentError, match="sample alignment"):
            build_problem(mrna, shuffled, None, candidates, "NOTCH1")

    def test_build_problems_in_map_order(self, paired_data):
        mrna, mirna, ago, candidates = paired_data
        problems = build_problems(mrna, mirna, ago, candidates, InteractionModel.RISC_B)
        assert [p.gene_id for p in problems] == ["NOTCH1", "ACAA2"]
        assert [p.n_regressors for p in problems] == [4, 2]


class TestStandardize:
    """Tests for standardize."""

    def _problem(self, y, X):
        X = np.asarray(X, dtype=float)
        labels = tuple(Direct(f"miR-{j}") for j in range(X.shape[1]))
        return GeneProblem("G", y, X, labels, SignConvention.PLAIN_DESIGN)

    def test_center_y(self):
        problem = standardize(self._problem([1, 2, 3], [[0], [1], [3]]), center_y=True, scale_x=False)
        np.testing.assert_allclose(problem.y, [-1, 0, 1])
        assert problem.y_offset == 2.0

    def test_scale_x(self):
        problem = standardize(self._problem([1, 2, 3], [[0], [1], [2]]), center_y=False, scale_x=True)
        np.testing.assert_allclose(problem.X[:, 0], [-1, 0, 1])

    def test_degenerate_column(self):
        with pytest.raises(DegenerateRegressorError, match="miR-1"):
            standardize(self._problem([1, 2, 3], [[0, 2], [1, 2], [2, 2]]), scale_x=True)

    def test_original_scale_coefficients(self):
        problem = standardize(self._problem([1, 2, 3], [[0], [2], [4]]), center_y=True, scale_x=True)
        np.testing.assert_allclose(problem.coefficients_on_original_scale([2.0]), [1.0])

    def test_too_few_samples(self):
        with pytest.raises(ParameterError):
            standardize(self._problem([1], [[1]]))


class TestPointFit:
    """Tests for PointFit invariants."""

    def test_nlasso_rejects_negative(self):
        with pytest.raises(InputValidationError):
            PointFit("G", PointMethod.NLASSO, 0.5, [0.1, -0.2], (Direct("a"), Direct("b")))

    def test_beta_length_matches_labels(self):
        with pytest.raises(InputValidationError):
            PointFit("G", PointMethod.LASSO, 0.5, [0.1], (Direct("a"), Direct("b")))
