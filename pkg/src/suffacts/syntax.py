"""Bracketed constituency trees aligned to surface strings.

Trees come in as bracketed text (e.g. from a phrase-structure parser) together
with the raw sentence they describe.  Every node carries a character span into
that sentence, so constituent deletions can be performed on the original
string, whitespace and all.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from .corpus import CorpusError, iter_jsonl


class ParseError(ValueError):
    """Bracketed text could not be parsed; offset points at the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class AlignmentError(ValueError):
    """Leaf tokens do not line up with the surface string."""


class SpanError(ValueError):
    """A span does not correspond to a removable unit."""


_PTB_UNESCAPE = {
    "-LRB-": "(",
    "-RRB-": ")",
    "-LSB-": "[",
    "-RSB-": "]",
    "-LCB-": "{",
    "-RCB-": "}",
}
_PTB_ESCAPE = {v: k for k, v in _PTB_UNESCAPE.items()}


@dataclass
class ConstNode:
    label: str
    children: list = field(default_factory=list)
    span: tuple = (0, 0)
    token: Optional[str] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def pos_tag(self) -> str:
        return self.label

    def iter_nodes(self) -> Iterator["ConstNode"]:
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def iter_leaves(self) -> Iterator["ConstNode"]:
        if self.is_leaf:
            yield self
        else:
            for child in self.children:
                yield from child.iter_leaves()


class ConstTree:
    """Immutable parse tree plus the surface sentence it spans."""

    def __init__(self, root: ConstNode, surface: str):
        self.root = root
        self.surface = surface
        self.leaves = list(root.iter_leaves())
        self._parents = {}
        for node in root.iter_nodes():
            for child in node.children:
                self._parents[id(child)] = node

    def __reduce__(self):
        # The parent index is keyed by object identity, so rebuild it on
        # unpickling rather than shipping stale ids across processes.
        return (ConstTree, (self.root, self.surface))

    def nodes(self) -> Iterator[ConstNode]:
        return self.root.iter_nodes()

    def parent(self, node: ConstNode) -> Optional[ConstNode]:
        return self._parents.get(id(node))

    def ancestors(self, node: ConstNode) -> Iterator[ConstNode]:
        current = self.parent(node)
        while current is not None:
            yield current
            current = self.parent(current)

    def sentence_root(self) -> ConstNode:
        """The top content node, skipping TOP/ROOT wrappers."""
        node = self.root
        while node.label in ("TOP", "ROOT", "") and len(node.children) == 1:
            node = node.children[0]
        return node

    def span_text(self, span: Sequence[int]) -> str:
        return self.surface[span[0]:span[1]]


# ---------------------------------------------------------------------------
# Parsing and alignment
# ---------------------------------------------------------------------------

_ATOM_RE = re.compile(r"[^\s()]+")


def _lex(text: str) -> list:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        else:
            match = _ATOM_RE.match(text, i)
            tokens.append((match.group(), i))
            i = match.end()
    return tokens


def parse_bracketed(tree_text: str, surface: str) -> ConstTree:
    """Parse bracketed text and align its leaves to the surface string.

    Leaf tokens must match the surface characters in order, with only
    whitespace between them; PTB bracket escapes (-LRB- etc.) are unescaped
    before matching.
    """
    tokens = _lex(tree_text)
    eof = len(tree_text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, eof)

    def parse_node() -> ConstNode:
        nonlocal pos
        tok, off = peek()
        if tok != "(":
            raise ParseError(f"expected '(' but found {tok!r}", off)
        pos += 1
        tok, off = peek()
        if tok is None or tok in "()":
            raise ParseError("expected a node label", off)
        label = tok
        pos += 1
        children = []
        words = []
        while True:
            tok, off = peek()
            if tok is None:
                raise ParseError("unbalanced brackets: unexpected end of input", off)
            if tok == ")":
                pos += 1
                break
            if tok == "(":
                children.append(parse_node())
            else:
                words.append(tok)
                pos += 1
        if children and words:
            raise ParseError(f"node {label} mixes tokens and subtrees", off)
        if words:
            if len(words) > 1:
                raise ParseError(f"leaf {label} has multiple tokens", off)
            return ConstNode(label=label, token=words[0])
        if not children:
            raise ParseError(f"node {label} is empty", off)
        return ConstNode(label=label, children=children)

    root = parse_node()
    if pos < len(tokens):
        raise ParseError("trailing content after the root node", tokens[pos][1])

    # Align leaves to the surface left to right, skipping whitespace.
    cursor = 0
    for leaf in root.iter_leaves():
        token = _PTB_UNESCAPE.get(leaf.token, leaf.token)
        while cursor < len(surface) and surface[cursor].isspace():
            cursor += 1
        if not surface.startswith(token, cursor):
            raise AlignmentError(
                f"leaf token {token!r} does not match surface at char {cursor} "
                f"({surface[cursor:cursor + 20]!r}...)"
            )
        leaf.token = token
        leaf.span = (cursor, cursor + len(token))
        cursor += len(token)
    if surface[cursor:].strip():
        raise AlignmentError(f"surface text {surface[cursor:]!r} not covered by any leaf")

    _assign_spans(root)
    return ConstTree(root, surface)


def _assign_spans(node: ConstNode) -> tuple:
    if node.is_leaf:
        return node.span
    first = None
    last = None
    for child in node.children:
        span = _assign_spans(child)
        if first is None:
            first = span[0]
        last = span[1]
    node.span = (first, last)
    return node.span


def tree_to_bracketed(node: ConstNode) -> str:
    if node.is_leaf:
        token = _PTB_ESCAPE.get(node.token, node.token)
        return f"({node.label} {token})"
    inner = " ".join(tree_to_bracketed(child) for child in node.children)
    return f"({node.label} {inner})"


# ---------------------------------------------------------------------------
# Node queries
# ---------------------------------------------------------------------------

Predicate = Callable[[ConstTree, ConstNode], bool]


def label_is(*labels: str) -> Predicate:
    wanted = set(labels)
    return lambda tree, node: node.label in wanted


def child_of_root_sentence() -> Predicate:
    return lambda tree, node: tree.parent(node) is tree.sentence_root()


def not_dominated_by(*labels: str) -> Predicate:
    banned = set(labels)
    return lambda tree, node: all(anc.label not in banned for anc in tree.ancestors(node))


def leaf_pos_in(*tags: str) -> Predicate:
    wanted = set(tags)
    return lambda tree, node: node.is_leaf and node.label in wanted


def all_of(*predicates: Predicate) -> Predicate:
    return lambda tree, node: all(pred(tree, node) for pred in predicates)


def find_nodes(tree: ConstTree, predicate: Predicate) -> list:
    """All nodes satisfying the predicate, in left-to-right span order."""
    found = [node for node in tree.nodes() if predicate(tree, node)]
    found.sort(key=lambda node: (node.span[0], -node.span[1]))
    return found


# ---------------------------------------------------------------------------
# Span removal with fluency repair
# ---------------------------------------------------------------------------


def remove_span(surface: str, start: int, end: int) -> str:
    """Delete surface[start:end] and repair the junction.

    Repairs are local to the cut: a comma stranded against following
    punctuation is dropped, a separator stranded at the sentence start is
    dropped, doubled spaces are collapsed, and a space left hanging before
    closing punctuation is removed.  The surviving tokens are always a
    subsequence of the original tokens.
    """
    if not (0 <= start < end <= len(surface)):
        raise SpanError(f"span [{start},{end}) out of bounds for length {len(surface)}")
    prefix = surface[:start]
    suffix = surface[end:]
    if re.search(r",\s*$", prefix) and re.match(r"\s*[,.;:]", suffix):
        prefix = re.sub(r"\s*,\s*$", "", prefix)
    if not prefix.strip():
        suffix = re.sub(r"^\s*,\s*", "", suffix, count=1)
    collapsed = prefix.endswith(" ") and suffix.startswith(" ")
    if collapsed:
        suffix = suffix.lstrip(" ")
    # A space is stranded only when the cut glued it straight onto
    # punctuation; spaced-punctuation corpora keep their own style.
    if not collapsed and prefix.endswith(" ") and re.match(r"[.,;:!?]", suffix):
        prefix = prefix.rstrip(" ")
    return (prefix + suffix).strip()


def excise_span(tree: ConstTree, span: Sequence[int]) -> str:
    """Remove a node-aligned span from the tree's surface with fluency repair."""
    span = (span[0], span[1])
    if not any(node.span == span for node in tree.nodes()):
        raise SpanError(f"span {span} does not match any constituent")
    return remove_span(tree.surface, *span)


# ---------------------------------------------------------------------------
# Parse JSONL I/O
# ---------------------------------------------------------------------------


def tree_to_record(instance_id: str, sent_index: int, tree: ConstTree) -> dict:
    return {
        "id": instance_id,
        "sent_index": sent_index,
        "surface": tree.surface,
        "tree": tree_to_bracketed(tree.root),
        "pos": [leaf.label for leaf in tree.leaves],
    }


def read_parses(path) -> dict:
    """Load a parse file into a {(instance_id, sent_index): ConstTree} map."""
    parses = {}
    for line_no, payload in iter_jsonl(path):
        try:
            key = (str(payload["id"]), int(payload["sent_index"]))
            tree = parse_bracketed(str(payload["tree"]), str(payload["surface"]))
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"{path}:{line_no}: bad parse record: {exc}") from None
        except (ParseError, AlignmentError) as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None
        pos = payload.get("pos")
        if pos is not None:
            tags = [leaf.label for leaf in tree.leaves]
            if list(pos) != tags:
                raise CorpusError(
                    f"{path}:{line_no}: pos field disagrees with tree leaves"
                )
        if key in parses:
            raise CorpusError(f"{path}:{line_no}: duplicate parse for {key}")
        parses[key] = tree
    return parses
