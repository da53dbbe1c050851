"""Candidate generation: sentence deletions, constituents, date templates."""

import random

import pytest

from suffacts.corpus import (
    Dataset,
    EvidenceSentence,
    Instance,
    OmissionType,
    VeracityLabel,
    is_token_subsequence,
    read_instances,
    surface_tokens,
)
from suffacts.omission import (
    OmissionError,
    date_template_spans,
    generate_all,
    omit_constituents,
    omit_dates,
    omit_sentences,
    read_candidates,
)
from suffacts.syntax import parse_bracketed, read_parses
from suffacts.corpus import write_jsonl
from conftest import FIXTURES, synthetic_instance


def one_sentence_instance(text, tree_text=None, dataset=Dataset.FEVER, title="Doc"):
    inst = Instance(
        id="t0",
        dataset=dataset,
        claim="some claim .",
        evidence=[EvidenceSentence(doc_title=title, text=text, sent_index=0)],
        label=VeracityLabel.SUPPORTS if dataset is not Dataset.HOVER else VeracityLabel.SUPPORTING,
    )
    trees = [parse_bracketed(tree_text, text)] if tree_text else None
    return inst, trees


class TestSentences:
    def test_four_sentence_instance_yields_four(self):
        inst = next(iter(read_instances(FIXTURES / "multihop_instance.jsonl", Dataset.HOVER)))
        candidates = omit_sentences(inst)
        assert len(candidates) == 4
        assert all(c.omission_type is OmissionType.SENT for c in candidates)
        for k, cand in enumerate(candidates):
            unit = f"[{inst.evidence[k].doc_title}] {inst.evidence[k].text}"
            assert cand.removed_span == unit
            assert unit not in cand.reduced_evidence

    def test_single_sentence_yields_nothing(self):
        inst, _ = one_sentence_instance("Paris is big .")
        assert omit_sentences(inst) == []

    def test_two_sentence_complement(self):
        inst = Instance(
            id="two",
            dataset=Dataset.FEVER,
            claim="c",
            evidence=[
                EvidenceSentence("A", "First sentence .", 0),
                EvidenceSentence("B", "Second sentence .", 1),
            ],
            label=VeracityLabel.SUPPORTS,
        )
        first, second = omit_sentences(inst)
        assert first.reduced_evidence == "[B] Second sentence ."
        assert second.reduced_evidence == "[A] First sentence ."

    def test_vitaminc_never_gets_sentence_candidates(self):
        inst = Instance(
            id="vc",
            dataset=Dataset.VITAMINC,
            claim="c",
            evidence=[
                EvidenceSentence("A", "First sentence .", 0),
                EvidenceSentence("B", "Second sentence .", 1),
            ],
            label=VeracityLabel.SUPPORTS,
        )
        assert omit_sentences(inst) == []


class TestConstituents:
    def test_noun_modifier_from_flat_np(self):
        inst, trees = one_sentence_instance(
            "Vedam is a 2010 Indian drama film .",
            "(S (NP (NNP Vedam)) (VP (VBZ is) (NP (DT a) (CD 2010) (JJ Indian) "
            "(NN drama) (NN film))) (. .))",
        )
        candidates = omit_constituents(inst, trees, {OmissionType.NOUNM})
        assert [c.removed_span for c in candidates] == ["drama"]
        assert candidates[0].reduced_evidence == "[Doc] Vedam is a 2010 Indian film ."

    def test_head_noun_not_a_modifier(self):
        inst, trees = one_sentence_instance(
            "The film ends .",
            "(S (NP (DT The) (NN film)) (VP (VBZ ends)) (. .))",
        )
        assert omit_constituents(inst, trees, {OmissionType.NOUNM}) == []

    def test_adverb_modifier(self):
        inst, trees = one_sentence_instance(
            "The screenplay was heavily revised .",
            "(S (NP (DT The) (NN screenplay)) (VP (VBD was) (VP (ADVP (RB heavily)) "
            "(VBN revised))) (. .))",
        )
        candidates = omit_constituents(inst, trees, {OmissionType.ADVM})
        assert [c.removed_span for c in candidates] == ["heavily"]
        assert candidates[0].reduced_evidence == "[Doc] The screenplay was revised ."

    def test_negation_adverb_skipped(self):
        inst, trees = one_sentence_instance(
            "The film was not revised .",
            "(S (NP (DT The) (NN film)) (VP (VBD was) (RB not) (VP (VBN revised))) (. .))",
        )
        assert omit_constituents(inst, trees, {OmissionType.ADVM}) == []

    def test_sbar_candidate(self):
        inst, trees = one_sentence_instance(
            "It was a state which existed from 1945 to 1976 .",
            "(S (NP (PRP It)) (VP (VBD was) (NP (NP (DT a) (NN state)) (SBAR (WHNP (WDT which)) "
            "(S (VP (VBD existed) (PP (IN from) (NP (CD 1945))) (PP (TO to) (NP (CD 1976)))))))) (. .))",
        )
        candidates = omit_constituents(inst, trees, {OmissionType.SBAR})
        assert [c.removed_span for c in candidates] == ["which existed from 1945 to 1976"]
        assert candidates[0].reduced_evidence == "[Doc] It was a state ."

    def test_predicative_adjective_is_not_a_modifier(self):
        inst, trees = one_sentence_instance(
            "Paris is big .",
            "(S (NP (NNP Paris)) (VP (VBZ is) (ADJP (JJ big))) (. .))",
        )
        assert omit_constituents(inst, trees, {OmissionType.ADJM}) == []

    def test_vp_internal_pp_not_a_candidate(self):
        inst, trees = one_sentence_instance(
            "It was discovered in 1935 by Arthur Jeffrey Dempster.",
            "(S (NP (PRP It)) (VP (VBD was) (VP (VBN discovered) (PP (IN in) (NP (CD 1935))))) "
            "(PP (IN by) (NP (NNP Arthur) (NNP Jeffrey) (NNP Dempster))) (. .))",
        )
        candidates = omit_constituents(inst, trees, {OmissionType.PP})
        assert [c.removed_span for c in candidates] == ["by Arthur Jeffrey Dempster"]

    def test_number_group_is_single_candidate(self):
        inst, trees = one_sentence_instance(
            "Sales reached 24 million units .",
            "(S (NP (NNS Sales)) (VP (VBD reached) (NP (QP (CD 24) (CD million)) (NNS units))) (. .))",
        )
        candidates = omit_constituents(inst, trees, {OmissionType.NUMM})
        assert [c.removed_span for c in candidates] == ["24 million"]

    def test_adjective_phrase_removed_as_a_group(self):
        inst, trees = one_sentence_instance(
            "It was a large red album .",
            "(S (NP (PRP It)) (VP (VBD was) (NP (DT a) (ADJP (JJ large) (JJ red)) (NN album))) (. .))",
        )
        candidates = omit_constituents(inst, trees, {OmissionType.ADJM})
        assert [c.removed_span for c in candidates] == ["large red"]

    def test_cd_outside_noun_phrase_not_a_number_modifier(self):
        inst, trees = one_sentence_instance(
            "Chapter 4 ends .",
            "(S (ADVP (CD Chapter) (CD 4)) (VP (VBZ ends)) (. .))",
        )
        assert omit_constituents(inst, trees, {OmissionType.NUMM}) == []

    def test_missing_parse_names_sentence(self):
        inst = Instance(
            id="twob",
            dataset=Dataset.FEVER,
            claim="c",
            evidence=[
                EvidenceSentence("A", "First sentence .", 0),
                EvidenceSentence("B", "Second sentence .", 1),
            ],
            label=VeracityLabel.SUPPORTS,
        )
        tree = parse_bracketed(
            "(S (NP (JJ First) (NN sentence)) (. .))", "First sentence ."
        )
        with pytest.raises(OmissionError, match="sentence 1"):
            omit_constituents(inst, [tree], {OmissionType.NOUNM})

    def test_sentence_types_rejected(self):
        inst, trees = one_sentence_instance(
            "Paris is big .", "(S (NP (NNP Paris)) (VP (VBZ is) (ADJP (JJ big))) (. .))"
        )
        with pytest.raises(OmissionError):
            omit_constituents(inst, trees, {OmissionType.SENT})


class TestDates:
    def test_day_month_year_template(self):
        inst, _ = one_sentence_instance(
            "Colombiana is a French action film from 1st October 2011 .", title="Colombiana"
        )
        candidates = omit_dates(inst)
        removed = {c.removed_span for c in candidates}
        assert removed == {"1st", "2011", "1st October", "October 2011"}
        by_removed = {c.removed_span: c for c in candidates}
        assert (
            by_removed["1st October"].reduced_evidence
            == "[Colombiana] Colombiana is a French action film from 2011 ."
        )

    def test_year_only_is_not_a_template(self):
        inst, _ = one_sentence_instance("The film is from 2011 .")
        assert omit_dates(inst) == []

    def test_month_day_comma_year_template(self):
        inst, _ = one_sentence_instance("It premiered on October 1, 2011 in France .")
        candidates = omit_dates(inst)
        reduced = {c.reduced_evidence.split("] ", 1)[1] for c in candidates}
        assert "It premiered on October 2011 in France ." in reduced
        assert "It premiered on October 1 in France ." in reduced
        assert "It premiered on 2011 in France ." in reduced
        assert "It premiered on October in France ." in reduced

    def test_four_reductions_enumerated(self):
        inst, _ = one_sentence_instance(
            "The album was originally released on 2 April 1990.", title=""
        )
        candidates = omit_dates(inst)
        assert [c.reduced_evidence for c in candidates] == [
            "The album was originally released on April 1990.",
            "The album was originally released on 2 April.",
            "The album was originally released on 1990.",
            "The album was originally released on 2.",
        ]

    def test_template_spans_reported(self):
        spans = date_template_spans("Born 2 April 1990 in Arden, died October 1, 2045 .")
        assert len(spans) == 2

    def test_abbreviated_month(self):
        inst, _ = one_sentence_instance("The single charted on 5 Oct 2011 .", title="")
        removed = {c.removed_span for c in omit_dates(inst)}
        assert removed == {"5", "2011", "5 Oct", "Oct 2011"}

    def test_ordinal_day_in_month_first_template(self):
        inst, _ = one_sentence_instance("It aired on October 23rd, 1998 .", title="")
        reduced = {c.reduced_evidence for c in omit_dates(inst)}
        assert "It aired on October 1998 ." in reduced
        assert "It aired on October 23rd ." in reduced

    def test_no_match_across_sentence_boundary(self):
        inst = Instance(
            id="b0",
            dataset=Dataset.FEVER,
            claim="c",
            evidence=[
                EvidenceSentence("A", "It happened on 12 March .", 0),
                EvidenceSentence("B", "1999 was a quiet year .", 1),
            ],
            label=VeracityLabel.SUPPORTS,
        )
        assert omit_dates(inst) == []


class TestGenerateAll:
    def test_no_optional_constructs(self):
        inst, trees = one_sentence_instance(
            "Paris grew .", "(S (NP (NNP Paris)) (VP (VBD grew)) (. .))"
        )
        assert generate_all(inst, trees) == []

    def test_uranium_rows(self):
        instances = {
            i.id: i for i in read_instances(FIXTURES / "omission_rows_instances.jsonl")
        }
        parses = read_parses(FIXTURES / "omission_rows_parses.jsonl")
        inst = instances["row-pp"]
        candidates = generate_all(inst, [parses[("row-pp", 0)]])
        by_type = {}
        for cand in candidates:
            by_type.setdefault(cand.omission_type, []).append(cand.removed_span)
        assert by_type[OmissionType.PP] == ["by Arthur Jeffrey Dempster"]
        assert by_type[OmissionType.NUMM] == ["1935"]
        assert OmissionType.DATEM not in by_type

    def test_datem_preempts_numm(self):
        inst, trees = one_sentence_instance(
            "The film is from 1st October 2011 .",
            "(S (NP (DT The) (NN film)) (VP (VBZ is) (PP (IN from) (NP (CD 1st) "
            "(NNP October) (CD 2011)))) (. .))",
        )
        candidates = generate_all(inst, trees)
        numm = [c for c in candidates if c.omission_type is OmissionType.NUMM]
        assert numm == []
        assert any(c.omission_type is OmissionType.DATEM for c in candidates)

    def test_duplicate_spans_deduplicated(self):
        # The whole-NP number and the QP inside it resolve to the same span.
        inst, trees = one_sentence_instance(
            "Attendance fell in 1935 .",
            "(S (NP (NN Attendance)) (VP (VBD fell) (PP (IN in) (NP (QP (CD 1935))))) (. .))",
        )
        candidates = generate_all(inst, trees)
        spans = [(c.sentence_index, c.removed_char_span) for c in candidates]
        assert len(spans) == len(set(spans))

    def test_order_is_stable(self):
        rng = random.Random(5)
        inst, trees = synthetic_instance(rng, 0, dataset=Dataset.FEVER)
        first = generate_all(inst, trees)
        second = generate_all(inst, trees)
        assert first == second
        keys = [(c.sentence_index, c.omission_type is not OmissionType.SENT, c.removed_char_span) for c in first]
        assert keys == sorted(keys)

    def test_parses_required_for_constituents(self):
        inst, _ = one_sentence_instance("Paris is big .")
        with pytest.raises(OmissionError, match="parses required"):
            generate_all(inst, None, {OmissionType.PP})
        assert generate_all(inst, None, {OmissionType.DATEM}) == []

    def test_candidate_round_trip(self, tmp_path):
        inst, trees = one_sentence_instance(
            "Vedam is a 2010 Indian drama film .",
            "(S (NP (NNP Vedam)) (VP (VBZ is) (NP (DT a) (CD 2010) (JJ Indian) "
            "(NN drama) (NN film))) (. .))",
        )
        candidates = generate_all(inst, trees)
        path = tmp_path / "c.jsonl"
        write_jsonl(candidates, path)
        assert list(read_candidates(path)) == candidates

    def test_candidate_ids_are_unique(self):
        rng = random.Random(17)
        inst, trees = synthetic_instance(rng, 1, dataset=Dataset.FEVER)
        candidates = generate_all(inst, trees)
        ids = [c.candidate_id for c in candidates]
        assert len(ids) == len(set(ids))


class TestInvariants:
    def test_subsequence_and_one_removal_on_synthetic_corpus(self):
        rng = random.Random(99)
        checked = 0
        for index in range(150):
            inst, trees = synthetic_instance(rng, index)
            original = surface_tokens(inst.evidence_text())
            for cand in generate_all(inst, trees):
                reduced = surface_tokens(cand.reduced_evidence)
                assert is_token_subsequence(reduced, original), cand
                assert len(reduced) < len(original)
                prefix = 0
                while (
                    prefix < len(reduced) and reduced[prefix] == original[prefix]
                ):
                    prefix += 1
                suffix = 0
                while (
                    suffix < len(reduced) - prefix
                    and reduced[-1 - suffix] == original[-1 - suffix]
                ):
                    suffix += 1
                assert prefix + suffix == len(reduced), (cand, reduced, original)
                checked += 1
        assert checked > 500

    def test_numm_never_intersects_date_template(self):
        rng = random.Random(123)
        for index in range(80):
            inst, trees = synthetic_instance(rng, index)
            for cand in generate_all(inst, trees):
                if cand.omission_type is not OmissionType.NUMM:
                    continue
                text = inst.evidence[cand.sentence_index].text
                start, end = cand.removed_char_span
                for b_start, b_end in date_template_spans(text):
                    assert not (start < b_end and b_start < end)

    def test_removed_span_category_matches_type(self):
        # Every candidate's span must be the kind of unit its type claims.
        rng = random.Random(321)
        for index in range(80):
            inst, trees = synthetic_instance(rng, index)
            for cand in generate_all(inst, trees):
                span = cand.removed_char_span
                if cand.omission_type is OmissionType.SENT:
                    units = []
                    offset = 0
                    for s in inst.evidence:
                        unit = f"[{s.doc_title}] {s.text}" if s.doc_title else s.text
                        units.append((offset, offset + len(unit)))
                        offset += len(unit) + 1
                    assert span in units
                    continue
                tree = trees[cand.sentence_index]
                text = inst.evidence[cand.sentence_index].text
                if cand.omission_type is OmissionType.DATEM:
                    assert any(
                        b_start <= span[0] and span[1] <= b_end
                        for b_start, b_end in date_template_spans(text)
                    ), cand
                    continue
                nodes = [n for n in tree.nodes() if n.span == span]
                assert nodes, cand
                labels = {n.label for n in nodes}
                if cand.omission_type is OmissionType.PP:
                    assert "PP" in labels
                elif cand.omission_type is OmissionType.SBAR:
                    assert "SBAR" in labels
                elif cand.omission_type is OmissionType.NOUNM:
                    assert labels & {"NN", "NNS"}
                elif cand.omission_type is OmissionType.ADJM:
                    assert labels & {"JJ", "JJR", "JJS", "ADJP"}
                elif cand.omission_type is OmissionType.ADVM:
                    assert labels & {"RB", "RBR", "RBS", "ADVP"}
                elif cand.omission_type is OmissionType.NUMM:
                    assert any(
                        all(l.label == "CD" for l in n.iter_leaves()) for n in nodes
                    )
