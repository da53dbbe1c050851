"""Canonical data model and JSONL I/O for fact-checking corpora.

Instances are claim/evidence/label records from one of three datasets, each
with its own label space.  This module also owns tokenization conventions
shared across the toolkit and the incorrect-evidence stress-set builder.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Iterator, Optional, Sequence


class CorpusError(ValueError):
    """A record violated a schema or a dataset contract."""


class JsonlError(CorpusError):
    """A line of a JSONL file could not be decoded."""

    def __init__(self, message: str, path: str = "", line_no: int = 0):
        super().__init__(message)
        self.path = path
        self.line_no = line_no


class WriteError(OSError):
    """An output file could not be written completely."""

    def __init__(self, message: str, written: int = 0):
        super().__init__(message)
        self.written = written


class Dataset(str, Enum):
    FEVER = "fever"
    VITAMINC = "vitaminc"
    HOVER = "hover"

    @classmethod
    def parse(cls, text: str) -> "Dataset":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise CorpusError(f"unknown dataset {text!r}") from None


class VeracityLabel(str, Enum):
    SUPPORTS = "SUPPORTS"
    REFUTES = "REFUTES"
    NEI = "NEI"
    SUPPORTING = "SUPPORTING"
    NOT_SUPPORTING = "NOT_SUPPORTING"

    @property
    def is_insufficient(self) -> bool:
        """True for the labels that signal insufficient evidence."""
        return self in (VeracityLabel.NEI, VeracityLabel.NOT_SUPPORTING)

    @property
    def family_index(self) -> int:
        """Index of this label within its own label space."""
        space = THREE_CLASS if self in THREE_CLASS else TWO_CLASS
        return space.index(self)

    @property
    def family_size(self) -> int:
        return 3 if self in THREE_CLASS else 2


THREE_CLASS = (VeracityLabel.SUPPORTS, VeracityLabel.REFUTES, VeracityLabel.NEI)
TWO_CLASS = (VeracityLabel.SUPPORTING, VeracityLabel.NOT_SUPPORTING)

LABEL_SPACES = {
    Dataset.FEVER: THREE_CLASS,
    Dataset.VITAMINC: THREE_CLASS,
    Dataset.HOVER: TWO_CLASS,
}

# Accepted spellings seen in the wild for the canonical labels.
_LABEL_ALIASES = {
    "SUPPORTS": VeracityLabel.SUPPORTS,
    "SUPPORTED": VeracityLabel.SUPPORTS,
    "REFUTES": VeracityLabel.REFUTES,
    "REFUTED": VeracityLabel.REFUTES,
    "NEI": VeracityLabel.NEI,
    "NOT_ENOUGH_INFO": VeracityLabel.NEI,
    "NOT_ENOUGH_INFORMATION": VeracityLabel.NEI,
    "SUPPORTING": VeracityLabel.SUPPORTING,
    "NOT_SUPPORTING": VeracityLabel.NOT_SUPPORTING,
    "NOT_SUPPORTED": VeracityLabel.NOT_SUPPORTING,
}


def label_space(dataset: Dataset) -> tuple:
    return LABEL_SPACES[dataset]


def label_space_size(dataset: Dataset) -> int:
    return len(LABEL_SPACES[dataset])


def nei_label(dataset: Dataset) -> VeracityLabel:
    """The insufficient-evidence label of a dataset's label space."""
    return LABEL_SPACES[dataset][-1]


def label_index(dataset: Dataset, label: VeracityLabel) -> int:
    space = LABEL_SPACES[dataset]
    if label not in space:
        raise CorpusError(f"label {label.value} is illegal for dataset {dataset.value}")
    return space.index(label)


def parse_label(text: str, dataset: Optional[Dataset] = None) -> VeracityLabel:
    key = text.strip().upper().replace(" ", "_").replace("-", "_")
    label = _LABEL_ALIASES.get(key)
    if label is None:
        raise CorpusError(f"unknown label {text!r}")
    if dataset is not None and label not in LABEL_SPACES[dataset]:
        raise CorpusError(f"label {label.value} is illegal for dataset {dataset.value}")
    return label


class OmissionType(str, Enum):
    SENT = "SENT"
    PP = "PP"
    NOUNM = "NOUNM"
    ADJM = "ADJM"
    ADVM = "ADVM"
    NUMM = "NUMM"
    DATEM = "DATEM"
    SBAR = "SBAR"

    @classmethod
    def parse(cls, text: str) -> "OmissionType":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise CorpusError(f"unknown omission type {text!r}") from None


class HumanAnnotation(str, Enum):
    NEI = "NEI"
    EI_IRRELEVANT = "EI_IRRELEVANT"
    EI_REPEATED = "EI_REPEATED"

    @classmethod
    def parse(cls, text: str) -> "HumanAnnotation":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise CorpusError(f"unknown annotation {text!r}") from None


# ---------------------------------------------------------------------------
# Tokenization conventions
# ---------------------------------------------------------------------------

_WORD_RE = re.compile(r"\w+")
_SURFACE_RE = re.compile(r"\w+|[^\w\s]")
_TITLE_RE = re.compile(r"\[[^\[\]]*\]")


@dataclass(frozen=True)
class TokenizerConfig:
    """Tokenization used for word-overlap computations.

    Case-folded word tokens split at whitespace and punctuation boundaries.
    Title markers like "[Colombiana]" are metadata, not evidence content,
    and are stripped before counting.
    """

    casefold: bool = True
    strip_titles: bool = True

    def tokens(self, text: str) -> list:
        if self.strip_titles:
            text = _TITLE_RE.sub(" ", text)
        if self.casefold:
            text = text.casefold()
        return _WORD_RE.findall(text)

    def token_set(self, text: str) -> frozenset:
        return frozenset(self.tokens(text))


def surface_tokens(text: str) -> list:
    """Case-preserving tokens with punctuation kept as separate tokens.

    This is the token stream used for subsequence checks, so "1935." counts
    as the two tokens "1935" and ".".
    """
    return _SURFACE_RE.findall(text)


def is_token_subsequence(sub: Sequence[str], seq: Sequence[str]) -> bool:
    pos = 0
    for tok in sub:
        while pos < len(seq) and seq[pos] != tok:
            pos += 1
        if pos == len(seq):
            return False
        pos += 1
    return True


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvidenceSentence:
    doc_title: str
    text: str
    sent_index: int

    def to_json(self) -> dict:
        return {"title": self.doc_title, "text": self.text, "sent_index": self.sent_index}

    @classmethod
    def from_json(cls, payload: dict) -> "EvidenceSentence":
        try:
            return cls(
                doc_title=str(payload["title"]),
                text=str(payload["text"]),
                sent_index=int(payload["sent_index"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"bad evidence sentence record: {exc}") from None


def render_evidence(evidence: Sequence[EvidenceSentence], include_titles: bool = True) -> str:
    """Render evidence sentences as a single string, titles prefixed in brackets."""
    parts = []
    for sent in evidence:
        if include_titles and sent.doc_title:
            parts.append(f"[{sent.doc_title}] {sent.text}")
        else:
            parts.append(sent.text)
    return " ".join(parts)


@dataclass
class Instance:
    id: str
    dataset: Dataset
    claim: str
    evidence: list
    label: VeracityLabel

    def validate(self) -> None:
        if not self.id:
            raise CorpusError("instance id must be non-empty")
        if self.label not in LABEL_SPACES[self.dataset]:
            raise CorpusError(
                f"instance {self.id}: label {self.label.value} is illegal for "
                f"dataset {self.dataset.value}"
            )
        if not self.evidence and not self.label.is_insufficient:
            raise CorpusError(f"instance {self.id}: evidence empty for a sufficient label")
        seen = set()
        for sent in self.evidence:
            if sent.sent_index < 0:
                raise CorpusError(f"instance {self.id}: negative sent_index")
            if not sent.text:
                raise CorpusError(f"instance {self.id}: empty evidence sentence")
            key = (sent.doc_title, sent.sent_index)
            if key in seen:
                raise CorpusError(f"instance {self.id}: duplicate sent_index {key}")
            seen.add(key)

    def evidence_text(self, include_titles: bool = True) -> str:
        return render_evidence(self.evidence, include_titles=include_titles)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.dataset.value,
            "claim": self.claim,
            "evidence": [sent.to_json() for sent in self.evidence],
            "label": self.label.value,
        }

    @classmethod
    def from_json(cls, payload: dict, dataset: Optional[Dataset] = None) -> "Instance":
        try:
            rec_dataset = Dataset.parse(payload["dataset"])
        except KeyError:
            raise CorpusError("instance record missing 'dataset'") from None
        if dataset is not None and rec_dataset is not dataset:
            raise CorpusError(
                f"instance {payload.get('id')!r}: dataset {rec_dataset.value} does not "
                f"match expected {dataset.value}"
            )
        try:
            inst = cls(
                id=str(payload["id"]),
                dataset=rec_dataset,
                claim=str(payload["claim"]),
                evidence=[EvidenceSentence.from_json(s) for s in payload["evidence"]],
                label=parse_label(payload["label"]),
            )
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"bad instance record: missing {exc}") from None
        inst.validate()
        return inst


@dataclass
class DiagnosticInstance:
    """One evidence-reduced test instance with its re-annotated label."""

    base_id: str
    claim: str
    reduced_evidence: str
    new_label: VeracityLabel
    omission_type: OmissionType
    removed_span: str
    annotation: Optional[HumanAnnotation] = None
    split: Optional[str] = None

    def validate(self) -> None:
        if not self.base_id:
            raise CorpusError("diagnostic base_id must be non-empty")
        if self.annotation is not None:
            want_nei = self.annotation is HumanAnnotation.NEI
            if want_nei != self.new_label.is_insufficient:
                raise CorpusError(
                    f"diagnostic {self.base_id}: label {self.new_label.value} is "
                    f"inconsistent with annotation {self.annotation.value}"
                )

    def to_json(self) -> dict:
        payload = {
            "base_id": self.base_id,
            "claim": self.claim,
            "evidence_reduced": self.reduced_evidence,
            "label_new": self.new_label.value,
            "omission_type": self.omission_type.value,
            "removed_span": self.removed_span,
            "annotation": self.annotation.value if self.annotation else None,
        }
        if self.split is not None:
            payload["split"] = self.split
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> "DiagnosticInstance":
        try:
            annotation = payload.get("annotation")
            diag = cls(
                base_id=str(payload["base_id"]),
                claim=str(payload["claim"]),
                reduced_evidence=str(payload["evidence_reduced"]),
                new_label=parse_label(payload["label_new"]),
                omission_type=OmissionType.parse(payload["omission_type"]),
                removed_span=str(payload["removed_span"]),
                annotation=HumanAnnotation.parse(annotation) if annotation else None,
                split=payload.get("split"),
            )
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"bad diagnostic record: missing {exc}") from None
        diag.validate()
        return diag


# ---------------------------------------------------------------------------
# Streaming JSONL I/O
# ---------------------------------------------------------------------------


def iter_jsonl(path) -> Iterator[tuple]:
    """Yield (line_no, payload) pairs; malformed lines raise with the line number."""
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise JsonlError(
                    f"{path}:{line_no}: malformed JSON ({exc.msg})",
                    path=str(path),
                    line_no=line_no,
                ) from None
            if not isinstance(payload, dict):
                raise JsonlError(
                    f"{path}:{line_no}: expected an object", path=str(path), line_no=line_no
                )
            yield line_no, payload


def read_instances(path, dataset: Optional[Dataset] = None) -> Iterator[Instance]:
    """Stream instances from a JSONL file, validating labels against the dataset."""
    seen_ids = set()
    for line_no, payload in iter_jsonl(path):
        try:
            inst = Instance.from_json(payload, dataset=dataset)
        except CorpusError as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None
        if inst.id in seen_ids:
            raise CorpusError(f"{path}:{line_no}: duplicate instance id {inst.id!r}")
        seen_ids.add(inst.id)
        yield inst


def read_diagnostics(path) -> Iterator[DiagnosticInstance]:
    for line_no, payload in iter_jsonl(path):
        try:
            yield DiagnosticInstance.from_json(payload)
        except CorpusError as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None


def write_jsonl(records: Iterable, path) -> int:
    """Write records (dicts or objects with to_json) one per line; returns count."""
    written = 0
    try:
        with open(path, "w", encoding="utf-8") as handle:
            for record in records:
                payload = record.to_json() if hasattr(record, "to_json") else record
                handle.write(json.dumps(payload, ensure_ascii=False))
                handle.write("\n")
                written += 1
    except OSError as exc:
        raise WriteError(f"write to {path} failed after {written} records: {exc}", written) from exc
    return written


# ---------------------------------------------------------------------------
# Incorrect-evidence stress set
# ---------------------------------------------------------------------------


def build_incorrect_evidence_set(
    instances: Sequence[Instance], tokenizer: Optional[TokenizerConfig] = None
) -> list:
    """Swap every instance's evidence for the most claim-similar other evidence.

    Each instance keeps its claim, receives the evidence of the donor instance
    whose evidence has maximal token overlap with the claim (self excluded,
    ties broken by smallest donor index), and is relabeled to the dataset's
    insufficient-evidence label.  Output size always equals input size.
    """
    if len(instances) < 2:
        raise CorpusError("need at least two instances to swap evidence")
    tokenizer = tokenizer or TokenizerConfig()
    claim_tokens = [tokenizer.token_set(inst.claim) for inst in instances]
    evidence_tokens = [
        tokenizer.token_set(inst.evidence_text(include_titles=False)) for inst in instances
    ]
    out = []
    for i, inst in enumerate(instances):
        best_j = -1
        best_overlap = -1
        for j in range(len(instances)):
            if j == i:
                continue
            overlap = len(claim_tokens[i] & evidence_tokens[j])
            if overlap > best_overlap:
                best_overlap = overlap
                best_j = j
        donor = instances[best_j]
        out.append(
            replace(
                inst,
                evidence=list(donor.evidence),
                label=nei_label(inst.dataset),
            )
        )
    return out
