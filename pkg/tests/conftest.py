"""Shared fixtures: deterministic synthetic corpora with aligned parses."""

import json
import pathlib
import random

import pytest

from suffacts.corpus import Dataset, EvidenceSentence, Instance, VeracityLabel
from suffacts.syntax import parse_bracketed

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

NOUNS = [
    "album", "band", "film", "city", "state", "novel", "engineer", "prison",
    "teacher", "studio", "series", "station", "river", "party", "election",
    "bridge", "company", "author", "song", "treaty",
]
PROPER = [
    "Arden", "Bellwood", "Corvina", "Dalton", "Everley", "Fenwick", "Galway",
    "Harmon", "Idris", "Jasper", "Korhal", "Lumen", "Marlow", "Norwood",
]
ADJS = [
    "large", "original", "federal", "independent", "modern", "historic",
    "industrial", "rural", "popular", "narrow",
]
ADVS = ["heavily", "quickly", "widely", "rarely", "openly", "quietly"]
PREPS = ["in", "by", "at", "from", "near"]
PARTICIPLES = ["revised", "founded", "discovered", "released", "built", "signed"]
MONTHS = ["January", "March", "April", "June", "August", "October", "December"]


def _leaf(pos, token):
    return f"({pos} {token})", [token]


def _np(rng, allow_number=True):
    brackets = []
    tokens = []
    for piece in [("DT", rng.choice(["the", "a"]))]:
        b, t = _leaf(*piece)
        brackets.append(b)
        tokens.extend(t)
    if allow_number and rng.random() < 0.35:
        b, t = _leaf("CD", str(rng.randint(2, 99)))
        brackets.append(b)
        tokens.extend(t)
    if rng.random() < 0.5:
        b, t = _leaf("JJ", rng.choice(ADJS))
        brackets.append(b)
        tokens.extend(t)
    if rng.random() < 0.4:
        b, t = _leaf("NN", rng.choice(NOUNS))
        brackets.append(b)
        tokens.extend(t)
    b, t = _leaf("NN", rng.choice(NOUNS))
    brackets.append(b)
    tokens.extend(t)
    return "(NP " + " ".join(brackets) + ")", tokens


def _date_np(rng):
    day = str(rng.randint(1, 28))
    month = rng.choice(MONTHS)
    year = str(rng.randint(1900, 2020))
    if rng.random() < 0.5:
        text = f"(NP (CD {day}) (NNP {month}) (CD {year}))"
        tokens = [day, month, year]
    else:
        text = f"(NP (NNP {month}) (CD {day}) (, ,) (CD {year}))"
        tokens = [month, day, ",", year]
    return text, tokens


def _pp(rng, with_date=False):
    prep = rng.choice(PREPS)
    if with_date:
        np, tokens = _date_np(rng)
    else:
        np, tokens = _np(rng)
    return f"(PP (IN {prep}) {np})", [prep] + tokens


def _sbar(rng):
    pp, pp_tokens = _pp(rng)
    verb = rng.choice(PARTICIPLES)
    bracket = f"(SBAR (WHNP (WDT which)) (S (VP (VBD was) (VP (VBN {verb}) {pp}))))"
    return bracket, ["which", "was", verb] + pp_tokens


def synthetic_sentence(rng):
    """A random parsed sentence exercising every constituent omission type."""
    subj, subj_tokens = _np(rng)
    vp_parts = []
    vp_tokens = ["was"]
    if rng.random() < 0.5:
        adv = rng.choice(ADVS)
        vp_parts.append(f"(ADVP (RB {adv}))")
        vp_tokens.append(adv)
    verb = rng.choice(PARTICIPLES)
    vp_parts.append(f"(VBN {verb})")
    vp_tokens.append(verb)
    if rng.random() < 0.5:
        obj, obj_tokens = _np(rng)
        vp_parts.append(obj)
        vp_tokens.extend(obj_tokens)
    s_children = [subj, f"(VP (VBD was) (VP {' '.join(vp_parts)}))"]
    tokens = subj_tokens + vp_tokens
    for _ in range(rng.randint(0, 2)):
        pp, pp_tokens = _pp(rng, with_date=rng.random() < 0.3)
        s_children.append(pp)
        tokens.extend(pp_tokens)
    if rng.random() < 0.35:
        sbar, sbar_tokens = _sbar(rng)
        s_children.append(sbar)
        tokens.extend(sbar_tokens)
    s_children.append("(. .)")
    tokens.append(".")
    bracketed = "(S " + " ".join(s_children) + ")"
    surface = " ".join(tokens)
    return bracketed, surface


def synthetic_instance(rng, index, dataset=None):
    """An instance plus aligned parse trees, for property tests."""
    if dataset is None:
        dataset = rng.choice([Dataset.FEVER, Dataset.HOVER, Dataset.VITAMINC])
    n_sentences = 1 if dataset is Dataset.VITAMINC else rng.randint(1, 3)
    evidence = []
    trees = []
    for k in range(n_sentences):
        bracketed, surface = synthetic_sentence(rng)
        title = rng.choice(PROPER) if rng.random() < 0.8 else ""
        evidence.append(EvidenceSentence(doc_title=title, text=surface, sent_index=k))
        trees.append(parse_bracketed(bracketed, surface))
    label = (
        rng.choice([VeracityLabel.SUPPORTS, VeracityLabel.REFUTES])
        if dataset is not Dataset.HOVER
        else VeracityLabel.SUPPORTING
    )
    claim = " ".join(rng.choice(NOUNS) for _ in range(rng.randint(3, 7))) + " ."
    inst = Instance(
        id=f"syn-{index:05d}", dataset=dataset, claim=claim, evidence=evidence, label=label
    )
    inst.validate()
    return inst, trees


def overlap_instance(rng, index, vocabulary, dataset=Dataset.FEVER):
    """An instance with random word-soup claim and evidence, for donor tests."""
    claim = " ".join(rng.sample(vocabulary, rng.randint(4, 8)))
    text = " ".join(rng.sample(vocabulary, rng.randint(8, 15))) + " ."
    inst = Instance(
        id=f"ov-{index:05d}",
        dataset=dataset,
        claim=claim,
        evidence=[EvidenceSentence(doc_title="", text=text, sent_index=0)],
        label=rng.choice(
            [VeracityLabel.SUPPORTS, VeracityLabel.REFUTES]
            if dataset is not Dataset.HOVER
            else [VeracityLabel.SUPPORTING]
        ),
    )
    inst.validate()
    return inst


@pytest.fixture(scope="session")
def word_vocabulary():
    rng = random.Random(7)
    return [f"w{rng.randrange(10**6):06d}" for _ in range(200)]


def write_jsonl_file(path, rows):
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            payload = row.to_json() if hasattr(row, "to_json") else row
            handle.write(json.dumps(payload, ensure_ascii=False) + "\n")
    return path
