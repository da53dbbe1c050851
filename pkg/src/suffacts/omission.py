"""Evidence-omission candidate generation.

Each candidate removes exactly one unit from the evidence: a whole sentence,
an optional constituent (prepositional phrase, modifier, subordinate clause),
or part of a day/month/year date expression.  The reduced evidence always
keeps its remaining tokens in the original order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .corpus import (
    CorpusError,
    Dataset,
    Instance,
    OmissionType,
    iter_jsonl,
    render_evidence,
)
from .syntax import (
    ConstNode,
    ConstTree,
    all_of,
    child_of_root_sentence,
    find_nodes,
    label_is,
    not_dominated_by,
    remove_span,
)


class OmissionError(ValueError):
    """Candidate generation could not proceed for an instance."""


CONSTITUENT_TYPES = frozenset(
    {
        OmissionType.PP,
        OmissionType.NOUNM,
        OmissionType.ADJM,
        OmissionType.ADVM,
        OmissionType.NUMM,
        OmissionType.SBAR,
    }
)

NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
COMMON_NOUN_TAGS = frozenset({"NN", "NNS"})
ADJ_TAGS = frozenset({"JJ", "JJR", "JJS"})
ADV_TAGS = frozenset({"RB", "RBR", "RBS"})
NP_LABELS = frozenset({"NP", "NML", "NX", "WHNP"})
# Removing a negation adverb flips the stance of the sentence, which the
# omission construction must never do.
NEGATION_ADVERBS = frozenset({"not", "n't", "never"})


@dataclass(frozen=True)
class OmissionCandidate:
    base_id: str
    omission_type: OmissionType
    removed_span: str
    removed_char_span: tuple
    sentence_index: int
    reduced_evidence: str

    @property
    def candidate_id(self) -> str:
        start, end = self.removed_char_span
        return (
            f"{self.base_id}#{self.omission_type.value}#{self.sentence_index}"
            f"#{start}-{end}"
        )

    def to_json(self) -> dict:
        return {
            "base_id": self.base_id,
            "type": self.omission_type.value,
            "removed": self.removed_span,
            "span": list(self.removed_char_span),
            "sent_index": self.sentence_index,
            "evidence_reduced": self.reduced_evidence,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "OmissionCandidate":
        try:
            return cls(
                base_id=str(payload["base_id"]),
                omission_type=OmissionType.parse(payload["type"]),
                removed_span=str(payload["removed"]),
                removed_char_span=(int(payload["span"][0]), int(payload["span"][1])),
                sentence_index=int(payload["sent_index"]),
                reduced_evidence=str(payload["evidence_reduced"]),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise CorpusError(f"bad candidate record: {exc}") from None


def read_candidates(path) -> Iterator[OmissionCandidate]:
    for line_no, payload in iter_jsonl(path):
        try:
            yield OmissionCandidate.from_json(payload)
        except CorpusError as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None


def _unit(sentence) -> str:
    if sentence.doc_title:
        return f"[{sentence.doc_title}] {sentence.text}"
    return sentence.text


def _render_with(instance: Instance, sent_index: int, new_text: str) -> str:
    parts = []
    for k, sent in enumerate(instance.evidence):
        text = new_text if k == sent_index else sent.text
        if not text:
            continue
        if sent.doc_title:
            parts.append(f"[{sent.doc_title}] {text}")
        else:
            parts.append(text)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Sentence-level omission
# ---------------------------------------------------------------------------


def omit_sentences(instance: Instance) -> list:
    """One candidate per evidence sentence, each deleting exactly that sentence.

    Single-sentence evidence yields no candidates, and single-sentence
    datasets never take part in sentence-level omission.
    """
    if instance.dataset is Dataset.VITAMINC:
        return []
    if len(instance.evidence) < 2:
        return []
    parts = [_unit(sent) for sent in instance.evidence]
    starts = []
    offset = 0
    for part in parts:
        starts.append(offset)
        offset += len(part) + 1
    out = []
    for k, part in enumerate(parts):
        reduced = " ".join(parts[:k] + parts[k + 1:])
        out.append(
            OmissionCandidate(
                base_id=instance.id,
                omission_type=OmissionType.SENT,
                removed_span=part,
                removed_char_span=(starts[k], starts[k] + len(part)),
                sentence_index=k,
                reduced_evidence=reduced,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Date templates
# ---------------------------------------------------------------------------

_MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June", "July",
    "August", "September", "October", "November", "December",
    "Jan", "Feb", "Mar", "Apr", "Jun", "Jul", "Aug", "Sep", "Sept",
    "Oct", "Nov", "Dec",
)
_MONTH = "|".join(sorted(_MONTH_NAMES, key=len, reverse=True))
_DAY = r"(?:3[01]|[12]\d|0?[1-9])(?:st|nd|rd|th)?"
_YEAR = r"[12]\d{3}"

# The two Wikipedia-style templates: <day month year> and <month day, year>.
_DMY_RE = re.compile(
    rf"\b(?P<day>{_DAY})\s+(?P<month>{_MONTH})(?P<sep>\s*,)?\s+(?P<year>{_YEAR})\b",
    re.IGNORECASE,
)
_MDY_RE = re.compile(
    rf"\b(?P<month>{_MONTH})\s+(?P<day>{_DAY})(?P<sep>\s*,)?\s+(?P<year>{_YEAR})\b",
    re.IGNORECASE,
)


def _date_matches(text: str) -> list:
    matches = []
    for pattern in (_DMY_RE, _MDY_RE):
        matches.extend(pattern.finditer(text))
    matches.sort(key=lambda m: (m.start(), -m.end()))
    chosen = []
    covered_until = -1
    for match in matches:
        if match.start() <= covered_until:
            continue
        chosen.append(match)
        covered_until = match.end() - 1
    return chosen


def date_template_spans(text: str) -> list:
    """Full spans of every matched date template in the text."""
    return [match.span() for match in _date_matches(text)]


def _date_removals(match) -> list:
    """The four coherence-preserving removals of a matched date template.

    Removals: the day, the year, the leading two tokens, and the trailing two
    tokens of the template.  A separator comma after the middle token is
    absorbed by removals ending there.
    """
    day = match.span("day")
    year = match.span("year")
    month = match.span("month")
    first, mid, _last = sorted((day, month, year))
    sep = match.span("sep") if match.group("sep") else None

    def absorb(span):
        if sep is not None and span[1] == mid[1]:
            return (span[0], sep[1])
        return span

    year_span = (sep[0], year[1]) if sep is not None else year
    removals = [absorb(day), year_span, absorb((first[0], mid[1])), (mid[0], year[1])]
    unique = []
    for span in removals:
        if span not in unique:
            unique.append(span)
    return unique


def omit_dates(instance: Instance) -> list:
    """Date-expression reductions for every matched day/month/year template."""
    out = []
    for k, sent in enumerate(instance.evidence):
        for match in _date_matches(sent.text):
            for start, end in _date_removals(match):
                reduced_sent = remove_span(sent.text, start, end)
                if not reduced_sent:
                    continue
                out.append(
                    OmissionCandidate(
                        base_id=instance.id,
                        omission_type=OmissionType.DATEM,
                        removed_span=sent.text[start:end],
                        removed_char_span=(start, end),
                        sentence_index=k,
                        reduced_evidence=_render_with(instance, k, reduced_sent),
                    )
                )
    return out


# ---------------------------------------------------------------------------
# Constituent-level omission
# ---------------------------------------------------------------------------


def _pp_spans(tree: ConstTree) -> Iterator[tuple]:
    predicate = all_of(label_is("PP"), child_of_root_sentence(), not_dominated_by("VP"))
    for node in find_nodes(tree, predicate):
        yield node.span


def _sbar_spans(tree: ConstTree) -> Iterator[tuple]:
    for node in find_nodes(tree, label_is("SBAR")):
        yield node.span


def _noun_modifier_spans(tree: ConstTree) -> Iterator[tuple]:
    # A common noun is a modifier when a later noun in the same phrase is the
    # head (rightmost-noun-as-head convention).
    for parent in tree.nodes():
        if parent.label not in NP_LABELS:
            continue
        kids = parent.children
        for i, kid in enumerate(kids):
            if not (kid.is_leaf and kid.label in COMMON_NOUN_TAGS):
                continue
            if any(later.is_leaf and later.label in NOUN_TAGS for later in kids[i + 1:]):
                yield kid.span


def _adjective_modifier_spans(tree: ConstTree) -> Iterator[tuple]:
    seen = set()
    for leaf in tree.leaves:
        if leaf.label not in ADJ_TAGS:
            continue
        node = leaf
        parent = tree.parent(leaf)
        if parent is not None and parent.label == "ADJP":
            node, parent = parent, tree.parent(parent)
        if parent is None or parent.label not in NP_LABELS:
            continue
        has_later_noun = any(
            l.label in NOUN_TAGS and l.span[0] >= node.span[1]
            for l in parent.iter_leaves()
        )
        if has_later_noun and node.span not in seen:
            seen.add(node.span)
            yield node.span


def _adverb_spans(tree: ConstTree) -> Iterator[tuple]:
    for node in tree.nodes():
        if node.label == "ADVP":
            parent = tree.parent(node)
            if parent is not None and parent.label == "ADVP":
                continue
            leaves = list(node.iter_leaves())
            if not any(l.label in ADV_TAGS for l in leaves):
                continue
            if any(l.token.lower() in NEGATION_ADVERBS for l in leaves):
                continue
            yield node.span
    for leaf in tree.leaves:
        if leaf.label not in ADV_TAGS:
            continue
        if leaf.token.lower() in NEGATION_ADVERBS:
            continue
        if any(anc.label == "ADVP" for anc in tree.ancestors(leaf)):
            continue
        yield leaf.span


def _all_cd(node: ConstNode) -> bool:
    return all(leaf.label == "CD" for leaf in node.iter_leaves())


def _number_spans(tree: ConstTree, blocked_spans: Sequence[tuple]) -> Iterator[tuple]:
    # Maximal all-number nodes (single CD leaves, or QP/NP groups of them),
    # skipping anything inside a matched date template.
    for node in tree.nodes():
        if not _all_cd(node):
            continue
        parent = tree.parent(node)
        if parent is not None and _all_cd(parent):
            continue
        in_np = node.label in NP_LABELS | {"QP", "CD"} and (
            node.label != "CD"
            or any(anc.label in NP_LABELS | {"QP"} for anc in tree.ancestors(node))
        )
        if not in_np:
            continue
        start, end = node.span
        if any(start < b_end and b_start < end for b_start, b_end in blocked_spans):
            continue
        yield node.span


_SPAN_FINDERS = {
    OmissionType.PP: _pp_spans,
    OmissionType.SBAR: _sbar_spans,
    OmissionType.NOUNM: _noun_modifier_spans,
    OmissionType.ADJM: _adjective_modifier_spans,
    OmissionType.ADVM: _adverb_spans,
}


def omit_constituents(
    instance: Instance,
    parses: Sequence[Optional[ConstTree]],
    types: Optional[Iterable[OmissionType]] = None,
) -> list:
    """Constituent-level candidates located through the parse trees.

    Requires one parse per evidence sentence, each aligned to the sentence
    text.  Accepted types: PP, NOUNM, ADJM, ADVM, NUMM, SBAR.
    """
    wanted = CONSTITUENT_TYPES if types is None else frozenset(types)
    if not wanted <= CONSTITUENT_TYPES:
        extra = ", ".join(sorted(t.value for t in wanted - CONSTITUENT_TYPES))
        raise OmissionError(f"not constituent omission types: {extra}")
    out = []
    for k, sent in enumerate(instance.evidence):
        tree = parses[k] if k < len(parses) else None
        if tree is None:
            raise OmissionError(f"instance {instance.id}: missing parse for sentence {k}")
        if tree.surface != sent.text:
            raise OmissionError(
                f"instance {instance.id}: parse surface differs from sentence {k}"
            )
        blocked = date_template_spans(sent.text)
        for omission_type in OmissionType:
            if omission_type not in wanted:
                continue
            if omission_type is OmissionType.NUMM:
                spans = _number_spans(tree, blocked)
            else:
                spans = _SPAN_FINDERS[omission_type](tree)
            for start, end in spans:
                reduced_sent = remove_span(tree.surface, start, end)
                if not reduced_sent:
                    continue
                reduced = _render_with(instance, k, reduced_sent)
                if not reduced:
                    continue
                out.append(
                    OmissionCandidate(
                        base_id=instance.id,
                        omission_type=omission_type,
                        removed_span=tree.surface[start:end],
                        removed_char_span=(start, end),
                        sentence_index=k,
                        reduced_evidence=reduced,
                    )
                )
    return out


# ---------------------------------------------------------------------------
# Combined generation
# ---------------------------------------------------------------------------

_TYPE_RANK = {omission_type: i for i, omission_type in enumerate(OmissionType)}


def generate_all(
    instance: Instance,
    parses: Optional[Sequence[Optional[ConstTree]]] = None,
    types: Optional[Iterable[OmissionType]] = None,
) -> list:
    """All omission candidates for an instance, deduplicated and stably ordered.

    Candidates are ordered by sentence, then span start, then type; duplicate
    spans produced by different rules are kept once.
    """
    wanted = frozenset(OmissionType) if types is None else frozenset(types)
    out = []
    if OmissionType.SENT in wanted:
        out.extend(omit_sentences(instance))
    const_wanted = wanted & CONSTITUENT_TYPES
    if const_wanted:
        if parses is None:
            raise OmissionError(
                f"instance {instance.id}: parses required for constituent omission"
            )
        out.extend(omit_constituents(instance, parses, const_wanted))
    if OmissionType.DATEM in wanted:
        out.extend(omit_dates(instance))

    out.sort(
        key=lambda c: (
            c.sentence_index,
            c.omission_type is not OmissionType.SENT,
            c.removed_char_span,
            _TYPE_RANK[c.omission_type],
        )
    )
    seen = set()
    result = []
    for cand in out:
        key = (
            cand.omission_type is OmissionType.SENT,
            cand.sentence_index,
            cand.removed_char_span,
        )
        if key in seen:
            continue
        seen.add(key)
        result.append(cand)
    return result
