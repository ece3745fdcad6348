#!/usr/bin/env python3
"""
ROC Curves and Partial AUC Against Validated Interactions

Predictions are scored at the interaction level, a (gene, miRNA) pair. Under
the RISC model a pair is predicted when any of its RISC regressors passes.
Rates are computed over the candidate universe: TPR counts validated pairs,
FPR counts candidate pairs that are not validated.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from models.core import (
    InputValidationError,
    ParameterError,
    PointFit,
    UnknownValidatedPairError,
    parse_descriptor,
)
from models.selection import AciReport

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]

FPR_LIMIT = 0.1


@dataclass(frozen=True)
class ValidatedSet:
    """Experimentally validated (gene, miRNA) pairs inside a candidate universe."""
    pairs: FrozenSet[Pair]
    universe: FrozenSet[Pair]

    def __post_init__(self):
        pairs = frozenset((str(g), str(m)) for g, m in self.pairs)
        universe = frozenset((str(g), str(m)) for g, m in self.universe)
        offenders = sorted(pairs - universe)
        if offenders:
            raise UnknownValidatedPairError(offenders)
        object.__setattr__(self, 'pairs', pairs)
        object.__setattr__(self, 'universe', universe)

    @classmethod
    def from_candidates(cls, pairs: Iterable[Pair], candidates) -> 'ValidatedSet':
        """Validated pairs checked against ``candidates.universe()``."""
        return cls(frozenset(pairs), frozenset(candidates.universe()))

    @property
    def negatives(self) -> FrozenSet[Pair]:
        return self.universe - self.pairs

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class RocCurve:
    """
    Operating points of a ladder of decision rules.

    ``points`` are (FPR, TPR) sorted by FPR then TPR; ``ladder`` holds the
    threshold or α that produced each point, in the same order.
    """
    points: Tuple[Tuple[float, float], ...]
    ladder: Tuple[float, ...]
    partial_auc: float

    def __post_init__(self):
        if len(self.points) != len(self.ladder):
            raise InputValidationError("one ladder value is needed per ROC point")
        for fpr, tpr in self.points:
            if not (0.0 <= fpr <= 1.0 and 0.0 <= tpr <= 1.0):
                raise InputValidationError(f"ROC point ({fpr}, {tpr}) is outside the unit square")
        if not 0.0 <= self.partial_auc <= FPR_LIMIT:
            raise InputValidationError(f"partial AUC {self.partial_auc} is outside [0, {FPR_LIMIT}]")

    def rows(self) -> List[Dict[str, float]]:
        """Plot-ready rows (ladder value, FPR, TPR)."""
        return [{'ladder': value, 'fpr': fpr, 'tpr': tpr}
                for value, (fpr, tpr) in zip(self.ladder, self.points)]


def default_threshold_ladder() -> List[float]:
    """{0} ∪ {1e-8 .. 1e-4} ∪ {k·1e-3, k·1e-2, k·1e-1 : k = 1..9} ∪ {1}."""
    ladder = [0.0]
    ladder += [1e-8, 1e-7, 1e-6, 1e-5, 1e-4]
    for scale in (1e-3, 1e-2, 1e-1):
        ladder += [round(k * scale, 12) for k in range(1, 10)]
    ladder.append(1.0)
    return ladder


def default_alpha_ladder() -> List[float]:
    """α = 0.01, 0.02, ..., 0.90."""
    return [round(0.01 * k, 2) for k in range(1, 91)]


def rates(predicted: Set[Pair], validated: ValidatedSet) -> Tuple[float, float]:
    """(FPR, TPR) of a predicted pair set."""
    if not validated.pairs:
        raise ParameterError("validated set is empty: true positive rate is undefined")
    negatives = validated.negatives
    if not negatives:
        raise ParameterError("every candidate pair is validated: false positive rate is undefined")
    tpr = len(predicted & validated.pairs) / len(validated.pairs)
    fpr = len(predicted & negatives) / len(negatives)
    return fpr, tpr


def partial_auc(points: Sequence[Tuple[float, float]], fpr_limit: float = FPR_LIMIT) -> float:
    """
    Trapezoid area under an ROC curve for FPR in [0, fpr_limit].

    The curve is anchored at (0, 0), duplicate FPRs keep their largest TPR,
    the boundary value is interpolated linearly and a curve ending before
    the limit is continued flat at its last TPR.
    """
    best: Dict[float, float] = {0.0: 0.0}
    for fpr, tpr in points:
        best[float(fpr)] = max(best.get(float(fpr), 0.0), float(tpr))
    fpr = np.array(sorted(best))
    tpr = np.array([best[f] for f in fpr])

    inside = fpr < fpr_limit
    x = np.append(fpr[inside], fpr_limit)
    y = np.append(tpr[inside], np.interp(fpr_limit, fpr, tpr))
    area = float(np.trapz(y, x))
    return min(max(area, 0.0), fpr_limit)


def _pair_scores(scored: Iterable[Tuple[str, str, float]], validated: ValidatedSet) -> Dict[Pair, float]:
    """Max score per (gene, miRNA) over that pair's regressors."""
    scores: Dict[Pair, float] = {}
    for gene_id, label, value in scored:
        pair = (gene_id, parse_descriptor(label).mirna_id)
        if pair not in validated.universe:
            raise InputValidationError(f"scored pair {pair} is not in the candidate universe")
        scores[pair] = max(scores.get(pair, -np.inf), float(value))
    return scores


def roc_from_scores(scored: Iterable[Tuple[str, str, float]],
                    validated: ValidatedSet,
                    ladder: Sequence[float]) -> RocCurve:
    """
    ROC of the rule score > ladder value for (gene, regressor, score) triples.

    A pair's score is the largest over its regressors.
    """
    scores = _pair_scores(scored, validated)
    rows = []
    for value in ladder:
        predicted = {pair for pair, score in scores.items() if score > value}
        fpr, tpr = rates(predicted, validated)
        rows.append(((fpr, tpr), float(value)))
    rows.sort(key=lambda row: row[0])
    points = tuple(point for point, _ in rows)
    area = partial_auc(points)
    return RocCurve(points, tuple(value for _, value in rows), area)


def point_fit_scores(fits: Iterable[PointFit]) -> List[Tuple[str, str, float]]:
    """(gene, regressor, β) triples of point fits."""
    return [(fit.gene_id, label, beta) for fit in fits for label, beta in zip(fit.labels, fit.beta)]


def aci_scores(reports: Mapping[str, Sequence[AciReport]]) -> List[Tuple[str, str, float]]:
    """(gene, regressor, significance) triples; coefficients without an active interval score 0."""
    return [(gene_id, r.regressor_label, r.significance if r.interval is not None else 0.0)
            for gene_id, gene_reports in reports.items() for r in gene_reports]


def roc_point_estimator(fits: Iterable[PointFit],
                        validated: ValidatedSet,
                        thresholds: Optional[Sequence[float]] = None) -> RocCurve:
    """ROC of the rule β > threshold over a threshold ladder."""
    thresholds = default_threshold_ladder() if thresholds is None else list(thresholds)
    curve = roc_from_scores(point_fit_scores(fits), validated, thresholds)
    logger.info(f"point-estimator ROC over {len(thresholds)} thresholds, "
                f"partial AUC {curve.partial_auc:.4f}")
    return curve


def roc_bayesian(reports: Mapping[str, Sequence[AciReport]],
                 validated: ValidatedSet,
                 alphas: Optional[Sequence[float]] = None) -> RocCurve:
    """ROC of the rule significance > α over an α ladder, without resampling."""
    alphas = default_alpha_ladder() if alphas is None else list(alphas)
    curve = roc_from_scores(aci_scores(reports), validated, alphas)
    logger.info(f"Bayesian ROC over {len(alphas)} alpha values, "
                f"partial AUC {curve.partial_auc:.4f}")
    return curve


def _interaction_pairs(selected: Iterable[Pair]) -> Set[Pair]:
    return {(str(gene_id), parse_descriptor(str(label)).mirna_id) for gene_id, label in selected}


def count_validated_hits(selected: Iterable[Pair], validated: ValidatedSet) -> int:
    """Number of selected (gene, regressor) pairs whose interaction is validated."""
    return len(_interaction_pairs(selected) & validated.pairs)


def hits_table(validated: ValidatedSet,
               point_fits: Optional[Mapping[str, Sequence[PointFit]]] = None,
               aci_reports: Optional[Mapping[str, Mapping[str, Sequence[AciReport]]]] = None,
               thresholds: Sequence[float] = (0.0,),
               alpha: float = 0.05) -> List[Dict[str, object]]:
    """
    Validated-hit counts per method.

    Point methods are counted at every threshold, Bayesian methods at α.

    Returns:
        Rows with method, rule, setting, selected and hits
    """
    rows: List[Dict[str, object]] = []
    for method, fits in (point_fits or {}).items():
        for threshold in thresholds:
            selected = {(fit.gene_id, label)
                        for fit in fits for label, beta in zip(fit.labels, fit.beta) if beta > threshold}
            rows.append({'method': method, 'rule': 'threshold', 'setting': float(threshold),
                         'selected': len(_interaction_pairs(selected)),
                         'hits': count_validated_hits(selected, validated)})
    for method, reports in (aci_reports or {}).items():
        selected = {(gene_id, r.regressor_label)
                    for gene_id, gene_reports in reports.items() for r in gene_reports if r.selected_at(alpha)}
        rows.append({'method': method, 'rule': 'alpha', 'setting': float(alpha),
                     'selected': len(_interaction_pairs(selected)),
                     'hits': count_validated_hits(selected, validated)})
    return rows
