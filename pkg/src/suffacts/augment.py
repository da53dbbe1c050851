"""Contrastive group construction and counterfactual data augmentation.

Builds anchor/positive/negative groups from omission candidates that passed
the two-model agreement filter, mines claim-similar distractor sentences, and
re-labels the result for counterfactual training data.  Also implements the
three-model majority-vote ensemble.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

from .corpus import (
    CorpusError,
    Dataset,
    EvidenceSentence,
    Instance,
    TokenizerConfig,
    VeracityLabel,
    iter_jsonl,
    label_space,
    nei_label,
    parse_label,
    render_evidence,
)
from .omission import OmissionCandidate


class AugmentError(ValueError):
    """Group construction or ensemble voting hit a contract violation."""


@dataclass
class PredictionRecord:
    """One model's label distribution for one instance or candidate."""

    instance_id: str
    model_id: str
    probs: list
    predicted: VeracityLabel

    def validate(self, dataset: Optional[Dataset] = None) -> None:
        m = self.predicted.family_size
        if len(self.probs) != m:
            raise CorpusError(
                f"prediction {self.instance_id}/{self.model_id}: {len(self.probs)} "
                f"probabilities for a {m}-class label"
            )
        if any(p < 0 for p in self.probs):
            raise CorpusError(
                f"prediction {self.instance_id}/{self.model_id}: negative probability"
            )
        if abs(sum(self.probs) - 1.0) > 1e-6:
            raise CorpusError(
                f"prediction {self.instance_id}/{self.model_id}: probabilities sum to "
                f"{sum(self.probs):.8f}"
            )
        best = max(range(m), key=lambda j: (self.probs[j], -j))
        if best != self.predicted.family_index:
            raise CorpusError(
                f"prediction {self.instance_id}/{self.model_id}: predicted label "
                f"{self.predicted.value} is not the argmax"
            )
        if dataset is not None and self.predicted not in label_space(dataset):
            raise CorpusError(
                f"prediction {self.instance_id}/{self.model_id}: label "
                f"{self.predicted.value} is illegal for {dataset.value}"
            )

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "model_id": self.model_id,
            "probs": list(self.probs),
            "predicted": self.predicted.value,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "PredictionRecord":
        try:
            record = cls(
                instance_id=str(payload["instance_id"]),
                model_id=str(payload["model_id"]),
                probs=[float(p) for p in payload["probs"]],
                predicted=parse_label(payload["predicted"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"bad prediction record: {exc}") from None
        record.validate()
        return record


def read_predictions(path, dataset: Optional[Dataset] = None) -> Iterator[PredictionRecord]:
    for line_no, payload in iter_jsonl(path):
        try:
            record = PredictionRecord.from_json(payload)
            if dataset is not None:
                record.validate(dataset)
        except CorpusError as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None
        yield record


def predictions_by_instance(records: Iterable[PredictionRecord]) -> Dict[str, list]:
    grouped: Dict[str, list] = {}
    for record in records:
        grouped.setdefault(record.instance_id, []).append(record)
    for group in grouped.values():
        group.sort(key=lambda r: r.model_id)
    return grouped


@dataclass(frozen=True)
class TextPair:
    claim: str
    evidence: str

    def to_json(self) -> dict:
        return {"claim": self.claim, "evidence": self.evidence}

    @classmethod
    def from_json(cls, payload: dict) -> "TextPair":
        return cls(claim=str(payload["claim"]), evidence=str(payload["evidence"]))


@dataclass
class ContrastiveGroup:
    """Anchor with one positive and K negatives, ready for loss or CAD emission."""

    anchor_id: str
    label: VeracityLabel
    anchor: TextPair
    positive: TextPair
    negatives: list
    distractor_sentence: str

    @property
    def k_neg(self) -> int:
        return len(self.negatives)

    def to_json(self) -> dict:
        return {
            "anchor_id": self.anchor_id,
            "label": self.label.value,
            "anchor": self.anchor.to_json(),
            "positive": self.positive.to_json(),
            "negatives": [pair.to_json() for pair in self.negatives],
            "distractor": self.distractor_sentence,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ContrastiveGroup":
        try:
            return cls(
                anchor_id=str(payload["anchor_id"]),
                label=parse_label(payload["label"]),
                anchor=TextPair.from_json(payload["anchor"]),
                positive=TextPair.from_json(payload["positive"]),
                negatives=[TextPair.from_json(p) for p in payload["negatives"]],
                distractor_sentence=str(payload["distractor"]),
            )
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"bad group record: {exc}") from None


def read_groups(path) -> Iterator[ContrastiveGroup]:
    for line_no, payload in iter_jsonl(path):
        try:
            yield ContrastiveGroup.from_json(payload)
        except CorpusError as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None


# ---------------------------------------------------------------------------
# Distractor mining
# ---------------------------------------------------------------------------


def mine_distractor(
    instance: Instance,
    document_sentences: Sequence[str],
    tokenizer: Optional[TokenizerConfig] = None,
) -> str:
    """The non-gold document sentence most similar to the claim by word overlap.

    Ties are broken by document order.  Raises when every document sentence is
    gold evidence; callers skip such instances.
    """
    tokenizer = tokenizer or TokenizerConfig()
    gold = {sent.text.strip() for sent in instance.evidence}
    claim_tokens = tokenizer.token_set(instance.claim)
    best = None
    best_overlap = -1
    for sentence in document_sentences:
        if sentence.strip() in gold:
            continue
        overlap = len(claim_tokens & tokenizer.token_set(sentence))
        if overlap > best_overlap:
            best_overlap = overlap
            best = sentence
    if best is None:
        raise AugmentError(f"instance {instance.id}: no non-gold sentence available")
    return best


# ---------------------------------------------------------------------------
# Agreement filtering
# ---------------------------------------------------------------------------


def filter_negatives(
    candidates: Sequence[OmissionCandidate],
    predictions: Dict[str, Sequence[PredictionRecord]],
    dataset: Dataset,
) -> list:
    """Keep a candidate only when every supervising model calls it insufficient.

    Expects the two models other than the one being trained; a candidate with
    fewer than two prediction records is a missing-input error.
    """
    target = nei_label(dataset)
    kept = []
    for cand in candidates:
        records = predictions.get(cand.candidate_id)
        if records is None or len(records) < 2:
            raise AugmentError(
                f"candidate {cand.candidate_id}: expected 2 prediction records, "
                f"found {0 if records is None else len(records)}"
            )
        if all(record.predicted is target for record in records):
            kept.append(cand)
    return kept


# ---------------------------------------------------------------------------
# Group assembly and CAD emission
# ---------------------------------------------------------------------------


def assemble_group(
    instance: Instance,
    negatives: Sequence[OmissionCandidate],
    distractor: str,
    cap: int = 4,
) -> ContrastiveGroup:
    """Build the contrastive group for one anchor instance.

    The positive appends the distractor to the original evidence; negatives
    are up to `cap` agreement-passing omission variants plus the
    distractor-only negative, which is always present.
    """
    if instance.label.is_insufficient:
        raise AugmentError(
            f"instance {instance.id}: cannot anchor a contrastive group on an "
            f"insufficient-evidence label"
        )
    anchor_evidence = render_evidence(instance.evidence)
    pairs = [TextPair(instance.claim, cand.reduced_evidence) for cand in negatives[:cap]]
    pairs.append(TextPair(instance.claim, distractor))
    return ContrastiveGroup(
        anchor_id=instance.id,
        label=instance.label,
        anchor=TextPair(instance.claim, anchor_evidence),
        positive=TextPair(instance.claim, anchor_evidence + " " + distractor),
        negatives=pairs,
        distractor_sentence=distractor,
    )


def emit_cad(groups: Sequence[ContrastiveGroup], dataset: Dataset) -> list:
    """Flatten groups into training instances.

    Anchor and positive keep the gold label; every negative gets the dataset's
    insufficient-evidence label.  Output order per group: anchor, positive,
    negatives.
    """
    insufficient = nei_label(dataset)
    out = []
    for group in groups:
        if group.label not in label_space(dataset):
            raise AugmentError(
                f"group {group.anchor_id}: label {group.label.value} is illegal "
                f"for {dataset.value}"
            )

        def _instance(suffix: str, pair: TextPair, label: VeracityLabel) -> Instance:
            return Instance(
                id=f"{group.anchor_id}::{suffix}",
                dataset=dataset,
                claim=pair.claim,
                evidence=[EvidenceSentence(doc_title="", text=pair.evidence, sent_index=0)],
                label=label,
            )

        out.append(_instance("anchor", group.anchor, group.label))
        out.append(_instance("positive", group.positive, group.label))
        for k, pair in enumerate(group.negatives):
            out.append(_instance(f"neg{k}", pair, insufficient))
    return out


# ---------------------------------------------------------------------------
# Majority-vote ensemble
# ---------------------------------------------------------------------------


def majority_vote(records: Sequence[PredictionRecord]) -> VeracityLabel:
    """Most common predicted label of three models.

    When all three disagree, the label whose single predicted probability is
    highest across the records wins; a probability tie goes to the lowest
    label index.
    """
    if len(records) != 3:
        raise AugmentError(f"majority vote needs exactly 3 records, got {len(records)}")
    sizes = {len(record.probs) for record in records}
    if len(sizes) != 1:
        raise AugmentError("majority vote records disagree on label space size")
    families = {record.predicted.family_size for record in records}
    if families != {sizes.pop()}:
        raise AugmentError("majority vote records mix label spaces")

    counts = Counter(record.predicted for record in records)
    label, count = counts.most_common(1)[0]
    if count >= 2:
        return label
    best = None
    best_prob = -1.0
    for record in records:
        prob = record.probs[record.predicted.family_index]
        if prob > best_prob or (
            prob == best_prob and record.predicted.family_index < best.family_index
        ):
            best_prob = prob
            best = record.predicted
    return best
