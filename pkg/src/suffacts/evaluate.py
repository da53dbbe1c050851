"""Scoring and analysis: macro-F1, insufficiency detection rates,
model-agreement cross-tabulation, per-omission-type breakdowns, and
claim-evidence overlap statistics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .corpus import (
    Dataset,
    DiagnosticInstance,
    HumanAnnotation,
    OmissionType,
    TokenizerConfig,
    VeracityLabel,
    label_space,
)
from .augment import PredictionRecord

logger = logging.getLogger(__name__)


class EvalError(ValueError):
    """Inputs do not satisfy a scoring precondition."""


# ---------------------------------------------------------------------------
# Classification scores
# ---------------------------------------------------------------------------


def _indices(labels: Sequence[VeracityLabel], m: int, name: str) -> list:
    out = []
    for label in labels:
        if label.family_size != m:
            raise EvalError(f"{name} label {label.value} is not from an m={m} space")
        out.append(label.family_index)
    return out


def macro_f1(
    golds: Sequence[VeracityLabel], preds: Sequence[VeracityLabel], m: int
) -> float:
    """Unweighted mean of per-class F1 over all m classes.

    Classes absent from both gold and predictions contribute F1 = 0; this is
    logged since it deflates the mean.
    """
    if len(golds) != len(preds):
        raise EvalError(f"length mismatch: {len(golds)} golds vs {len(preds)} preds")
    if not golds:
        raise EvalError("cannot score an empty input")
    gold_idx = _indices(golds, m, "gold")
    pred_idx = _indices(preds, m, "pred")

    f1s = []
    absent = []
    for cls in range(m):
        tp = sum(1 for g, p in zip(gold_idx, pred_idx) if g == cls and p == cls)
        fp = sum(1 for g, p in zip(gold_idx, pred_idx) if g != cls and p == cls)
        fn = sum(1 for g, p in zip(gold_idx, pred_idx) if g == cls and p != cls)
        if tp == 0 and fp == 0 and fn == 0:
            absent.append(cls)
            f1s.append(0.0)
            continue
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * precision * recall / (precision + recall) if precision + recall else 0.0)
    if absent:
        logger.warning(
            "macro_f1: classes %s absent from gold and predictions count as F1=0", absent
        )
    return sum(f1s) / m


def nei_accuracy(preds: Sequence[VeracityLabel], dataset: Dataset) -> float:
    """Fraction of predictions that are the insufficient-evidence class."""
    if not preds:
        raise EvalError("cannot score an empty input")
    space = label_space(dataset)
    for label in preds:
        if label not in space:
            raise EvalError(f"label {label.value} is illegal for {dataset.value}")
    return sum(1 for label in preds if label.is_insufficient) / len(preds)


# ---------------------------------------------------------------------------
# Model-agreement cross-tabulation
# ---------------------------------------------------------------------------


class ModelAgreement(str, Enum):
    EI_AGREE = "EI_AGREE"
    NEI_AGREE = "NEI_AGREE"
    DISAGREE = "DISAGREE"


AGREEMENT_ROWS = (ModelAgreement.EI_AGREE, ModelAgreement.NEI_AGREE, ModelAgreement.DISAGREE)
ANNOTATION_COLS = (
    HumanAnnotation.EI_IRRELEVANT,
    HumanAnnotation.EI_REPEATED,
    HumanAnnotation.NEI,
)


def agreement_row(predictions: Sequence[PredictionRecord]) -> ModelAgreement:
    """Classify three model predictions as EI-agree, NEI-agree, or disagree."""
    if len(predictions) != 3:
        raise EvalError(f"expected 3 model predictions, got {len(predictions)}")
    flags = [record.predicted.is_insufficient for record in predictions]
    if all(flags):
        return ModelAgreement.NEI_AGREE
    if not any(flags):
        return ModelAgreement.EI_AGREE
    return ModelAgreement.DISAGREE


@dataclass
class AgreementTable:
    """3x3 counts: model agreement rows vs human annotation columns."""

    counts: dict = field(
        default_factory=lambda: {
            (row, col): 0 for row in AGREEMENT_ROWS for col in ANNOTATION_COLS
        }
    )

    def add(self, row: ModelAgreement, col: HumanAnnotation, n: int = 1) -> None:
        self.counts[(row, col)] += n

    def cell(self, row: ModelAgreement, col: HumanAnnotation) -> int:
        return self.counts[(row, col)]

    def column_totals(self) -> dict:
        return {
            col: sum(self.counts[(row, col)] for row in AGREEMENT_ROWS)
            for col in ANNOTATION_COLS
        }

    def total(self) -> int:
        return sum(self.counts.values())

    def merge(self, other: "AgreementTable") -> "AgreementTable":
        merged = AgreementTable()
        for key in merged.counts:
            merged.counts[key] = self.counts[key] + other.counts[key]
        return merged

    def to_json(self) -> dict:
        payload = {
            row.value: {col.value: self.counts[(row, col)] for col in ANNOTATION_COLS}
            for row in AGREEMENT_ROWS
        }
        payload["total"] = {
            col.value: n for col, n in ((c, self.column_totals()[c]) for c in ANNOTATION_COLS)
        }
        return payload


def agreement_table(
    records: Iterable[Tuple[Sequence[PredictionRecord], HumanAnnotation]]
) -> AgreementTable:
    """Cross-tabulate three-model agreement against human annotations."""
    table = AgreementTable()
    for predictions, annotation in records:
        table.add(agreement_row(predictions), annotation)
    return table


# ---------------------------------------------------------------------------
# Per-omission-type breakdown
# ---------------------------------------------------------------------------


@dataclass
class TypeBreakdown:
    nei_total: int = 0
    nei_hits: int = 0
    ei_total: int = 0
    ei_hits: int = 0

    @property
    def nei_correct(self) -> Optional[float]:
        return self.nei_hits / self.nei_total if self.nei_total else None

    @property
    def ei_correct(self) -> Optional[float]:
        return self.ei_hits / self.ei_total if self.ei_total else None

    def to_json(self) -> dict:
        return {
            "nei_correct": self.nei_correct,
            "ei_correct": self.ei_correct,
            "nei_total": self.nei_total,
            "ei_total": self.ei_total,
        }


def per_type_accuracy(
    diagnostics: Sequence[DiagnosticInstance], preds: Dict[str, VeracityLabel]
) -> Dict[OmissionType, TypeBreakdown]:
    """Detection rates per omission type.

    For each type: the fraction of human-insufficient instances predicted
    insufficient, and the fraction of human-sufficient instances predicted
    sufficient.  Every diagnostic must have a prediction keyed by base_id.
    """
    out: Dict[OmissionType, TypeBreakdown] = {}
    for diag in diagnostics:
        if diag.base_id not in preds:
            raise EvalError(f"missing prediction for diagnostic {diag.base_id}")
        predicted = preds[diag.base_id]
        if diag.annotation is not None:
            human_insufficient = diag.annotation is HumanAnnotation.NEI
        else:
            human_insufficient = diag.new_label.is_insufficient
        breakdown = out.setdefault(diag.omission_type, TypeBreakdown())
        if human_insufficient:
            breakdown.nei_total += 1
            breakdown.nei_hits += int(predicted.is_insufficient)
        else:
            breakdown.ei_total += 1
            breakdown.ei_hits += int(not predicted.is_insufficient)
    return out


# ---------------------------------------------------------------------------
# Claim-evidence overlap
# ---------------------------------------------------------------------------


@dataclass
class OverlapStats:
    mean_overlap: Optional[float]
    used: int
    skipped: int

    def to_json(self) -> dict:
        return {"mean_overlap": self.mean_overlap, "used": self.used, "skipped": self.skipped}


def overlap_stats(
    pairs: Iterable[Tuple[str, str]], stopwords: frozenset = frozenset()
) -> OverlapStats:
    """Mean of |claim tokens shared with evidence| / |claim tokens|.

    Tokens are case-folded types with stop words and title markers removed;
    claims left with no content tokens are skipped and counted.
    """
    tokenizer = TokenizerConfig()
    total = 0.0
    used = 0
    skipped = 0
    for claim, evidence in pairs:
        claim_tokens = tokenizer.token_set(claim) - stopwords
        if not claim_tokens:
            skipped += 1
            continue
        evidence_tokens = tokenizer.token_set(evidence) - stopwords
        total += len(claim_tokens & evidence_tokens) / len(claim_tokens)
        used += 1
    return OverlapStats(
        mean_overlap=(total / used) if used else None, used=used, skipped=skipped
    )
