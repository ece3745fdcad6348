#!/usr/bin/env python3
"""
Tests for ROC construction, partial AUC and validated-hit counting.
"""

import sys
from pathlib import Path

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import numpy as np
import pytest

from models.core import (
    AgoGroup, CandidateMap, Direct, InputValidationError, ParameterError,
    PointFit, PointMethod, RiscProduct, UnknownValidatedPairError,
)
from models.evaluation import (
    ValidatedSet, count_validated_hits, default_alpha_ladder,
    default_threshold_ladder, hits_table, partial_auc, roc_bayesian,
    roc_point_estimator,
)
from models.selection import AciReport


@pytest.fixture
def toy_candidates():
    """Three genes, ten candidate pairs."""
    pairs = [("A", f"miR-{j}") for j in range(1, 5)]
    pairs += [("B", f"miR-{j}") for j in range(1, 4)]
    pairs += [("C", f"miR-{j}") for j in range(1, 4)]
    return CandidateMap.from_pairs(pairs)


@pytest.fixture
def toy_validated(toy_candidates):
    return ValidatedSet.from_candidates(
        [("A", "miR-1"), ("A", "miR-2"), ("B", "miR-1"), ("C", "miR-3")], toy_candidates
    )


def fits_from(candidates, betas, method=PointMethod.LASSO):
    return [PointFit(gene_id, method, 0.1, betas[gene_id], candidates.candidates(gene_id))
            for gene_id in candidates.gene_ids]


def report(label, significance, alpha=0.05):
    interval = (0.1, 0.2) if significance > 0 else None
    return AciReport(label, interval, significance, interval is not None and significance > alpha,
                     (0.0, 0.15), 100, alpha)


class TestValidatedSet:
    """Tests for ValidatedSet."""

    def test_rejects_pairs_outside_universe(self, toy_candidates):
        with pytest.raises(UnknownValidatedPairError) as info:
            ValidatedSet.from_candidates([("A", "miR-1"), ("D", "miR-9")], toy_candidates)
        assert "D" in str(info.value)

    def test_negatives(self, toy_validated):
        assert len(toy_validated) == 4
        assert len(toy_validated.negatives) == 6


class TestPartialAuc:
    """Tests for partial_auc."""

    def test_step_to_limit(self):
        assert partial_auc([(0.0, 0.0), (0.1, 1.0)]) == 0.05

    def test_perfect_curve(self):
        assert partial_auc([(0.0, 1.0), (1.0, 1.0)]) == pytest.approx(0.1)

    def test_empty_curve(self):
        assert partial_auc([(0.0, 0.0)]) == 0.0

    def test_interpolates_at_boundary(self):
        assert partial_auc([(0.2, 1.0)]) == pytest.approx(0.5 * 0.1 * 0.5)

    def test_flat_extension(self):
        area = partial_auc([(0.0, 0.2), (0.05, 0.6)])
        assert area == pytest.approx(0.05 * (0.2 + 0.6) / 2 + 0.05 * 0.6)

    def test_duplicate_fpr_keeps_best_tpr(self):
        assert partial_auc([(0.0, 0.3), (0.0, 0.7)]) == pytest.approx(0.07)


class TestLadders:
    """Tests for the default ladders."""

    def test_threshold_ladder(self):
        ladder = default_threshold_ladder()
        assert ladder[:3] == [0.0, 1e-8, 1e-7]
        assert 2e-3 in ladder and 9e-1 in ladder
        assert ladder[-1] == 1.0
        assert all(b > a for a, b in zip(ladder, ladder[1:]))

    def test_alpha_ladder(self):
        ladder = default_alpha_ladder()
        assert len(ladder) == 90
        assert ladder[0] == 0.01 and ladder[-1] == 0.9


class TestRocPointEstimator:
    """Tests for roc_point_estimator."""

    def test_toy_universe_matches_hand_computation(self, toy_candidates, toy_validated):
        betas = {
            "A": [0.9, 0.05, 0.5, 0.0],
            "B": [0.3, 0.0, 0.02],
            "C": [0.0, 0.001, 0.2],
        }
        curve = roc_point_estimator(fits_from(toy_candidates, betas), toy_validated,
                                    thresholds=[0.0, 0.01, 0.1, 0.4, 1.0])
        expected = {
            0.0: (3 / 6, 1.0),
            0.01: (2 / 6, 1.0),
            0.1: (1 / 6, 0.75),
            0.4: (1 / 6, 0.25),
            1.0: (0.0, 0.0),
        }
        for value, (fpr, tpr) in zip(curve.ladder, curve.points):
            assert fpr == pytest.approx(expected[value][0])
            assert tpr == pytest.approx(expected[value][1])
        # first segment (0, 0) -> (1/6, 0.75) cut at FPR 0.1
        assert curve.partial_auc == pytest.approx(0.5 * 0.1 * 0.45)
        assert [p[0] for p in curve.points] == sorted(p[0] for p in curve.points)

    def test_perfect_predictions(self, toy_candidates, toy_validated):
        betas = {gene: [1.0 if (gene, d.mirna_id) in toy_validated.pairs else 0.0
                        for d in toy_candidates.candidates(gene)]
                 for gene in toy_candidates.gene_ids}
        curve = roc_point_estimator(fits_from(toy_candidates, betas), toy_validated)
        assert (0.0, 1.0) in curve.points
        assert curve.partial_auc == pytest.approx(0.1)

    def test_all_zero_coefficients(self, toy_candidates, toy_validated):
        betas = {gene: [0.0] * len(toy_candidates.candidates(gene)) for gene in toy_candidates.gene_ids}
        curve = roc_point_estimator(fits_from(toy_candidates, betas), toy_validated,
                                    thresholds=[1e-3, 0.1])
        assert set(curve.points) == {(0.0, 0.0)}
        assert curve.partial_auc == 0.0

    def test_risc_columns_score_the_interaction(self):
        candidates = CandidateMap.from_pairs([("G", "miR-1"), ("G", "miR-2")])
        validated = ValidatedSet.from_candidates([("G", "miR-1")], candidates)
        labels = (RiscProduct("miR-1", AgoGroup.AGO2), RiscProduct("miR-1", AgoGroup.AGO134),
                  RiscProduct("miR-2", AgoGroup.AGO2), RiscProduct("miR-2", AgoGroup.AGO134))
        fit = PointFit("G", PointMethod.NLASSO, 0.1, [0.0, 0.4, 0.0, 0.0], labels)
        curve = roc_point_estimator([fit], validated, thresholds=[0.0])
        assert curve.points == ((0.0, 1.0),)

    def test_empty_validated_set(self, toy_candidates):
        validated = ValidatedSet.from_candidates([], toy_candidates)
        betas = {gene: [0.0] * len(toy_candidates.candidates(gene)) for gene in toy_candidates.gene_ids}
        with pytest.raises(ParameterError):
            roc_point_estimator(fits_from(toy_candidates, betas), validated)

    def test_fit_outside_universe(self, toy_validated):
        fit = PointFit("Z", PointMethod.LASSO, 0.1, [1.0], (Direct("miR-1"),))
        with pytest.raises(InputValidationError):
            roc_point_estimator([fit], toy_validated)


class TestRocBayesian:
    """Tests for roc_bayesian."""

    def make_reports(self, toy_candidates, significances):
        return {gene: [report(d.label, s) for d, s in zip(toy_candidates.candidates(gene), significances[gene])]
                for gene in toy_candidates.gene_ids}

    def test_alpha_above_every_significance(self, toy_candidates, toy_validated):
        reports = self.make_reports(toy_candidates, {"A": [0.3, 0.2, 0.1, 0.0],
                                                     "B": [0.4, 0.0, 0.0], "C": [0.0, 0.0, 0.25]})
        curve = roc_bayesian(reports, toy_validated, alphas=[0.5])
        assert curve.points == ((0.0, 0.0),)

    def test_rates_monotone_in_alpha(self, toy_candidates, toy_validated):
        rng = np.random.default_rng(0)
        reports = self.make_reports(toy_candidates, {
            gene: [float(s) for s in rng.uniform(0, 0.9, len(toy_candidates.candidates(gene)))]
            for gene in toy_candidates.gene_ids
        })
        curve = roc_bayesian(reports, toy_validated)
        by_alpha = sorted(zip(curve.ladder, curve.points))
        for (_, (f1, t1)), (_, (f2, t2)) in zip(by_alpha, by_alpha[1:]):
            assert f2 <= f1 and t2 <= t1
        assert 0.0 <= curve.partial_auc <= 0.1


class TestHits:
    """Tests for count_validated_hits and hits_table."""

    def test_counts(self, toy_validated):
        assert count_validated_hits(set(toy_validated.pairs), toy_validated) == 4
        assert count_validated_hits({("A", "miR-3"), ("B", "miR-2")}, toy_validated) == 0
        assert count_validated_hits({("A", "miR-1:Ago2"), ("A", "miR-1:Ago134")}, toy_validated) == 1

    def test_bounded_by_both_sets(self, toy_validated):
        selected = {("A", "miR-1"), ("A", "miR-3"), ("C", "miR-3")}
        hits = count_validated_hits(selected, toy_validated)
        assert hits <= min(len(selected), len(toy_validated))
        assert hits == 2

    def test_hits_table(self, toy_candidates, toy_validated):
        betas = {"A": [0.9, 0.05, 0.5, 0.0], "B": [0.3, 0.0, 0.02], "C": [0.0, 0.001, 0.2]}
        reports = {"A": [report("miR-1", 0.6), report("miR-3", 0.2)], "B": [report("miR-2", 0.01)]}
        rows = hits_table(
            toy_validated,
            point_fits={"nlasso": fits_from(toy_candidates, betas, PointMethod.NLASSO)},
            aci_reports={"nblasso": reports},
            thresholds=[0.0, 0.1],
        )
        assert rows == [
            {'method': 'nlasso', 'rule': 'threshold', 'setting': 0.0, 'selected': 7, 'hits': 4},
            {'method': 'nlasso', 'rule': 'threshold', 'setting': 0.1, 'selected': 4, 'hits': 3},
            {'method': 'nblasso', 'rule': 'alpha', 'setting': 0.05, 'selected': 2, 'hits': 1},
        ]
