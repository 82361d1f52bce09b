"""Tag mapping, tense assignment and pronoun morphology rules."""

import pytest

from poslens.tags import (
    PTB_TAGS,
    UPOS_TAGS,
    Number,
    Person,
    Tense,
    analyze_morphology,
    assign_tense,
    pronoun_morph,
    ptb_to_upos,
)


class TestPtbToUpos:
    def test_core_mappings(self):
        assert ptb_to_upos("NN") == "NOUN"
        assert ptb_to_upos("NNS") == "NOUN"
        assert ptb_to_upos("NNP") == "PROPN"
        assert ptb_to_upos("MD") == "AUX"
        assert ptb_to_upos("JJR") == "ADJ"
        assert ptb_to_upos("WRB") == "ADV"
        assert ptb_to_upos("IN") == "ADP"
        assert ptb_to_upos("PRP$") == "PRON"
        assert ptb_to_upos("TO") == "PART"
        assert ptb_to_upos("CD") == "NUM"
        assert ptb_to_upos("UH") == "INTJ"
        assert ptb_to_upos(",") == "PUNCT"
        assert ptb_to_upos("FW") == "X"
        assert ptb_to_upos("SYM") == "SYM"
        for tag in ("VB", "VBD", "VBG", "VBN", "VBP", "VBZ"):
            assert ptb_to_upos(tag) == "VERB"

    def test_unknown_tag_is_an_error(self):
        with pytest.raises(ValueError, match="ZZZ"):
            ptb_to_upos("ZZZ")

    def test_total_over_tagset_and_pure(self):
        for tag in PTB_TAGS:
            first = ptb_to_upos(tag)
            assert first in UPOS_TAGS
            assert ptb_to_upos(tag) == first


class TestAssignTense:
    def test_modal_before_base_verb_is_future(self):
        assert assign_tense(["PRP", "MD", "VB"]) == [None, None, Tense.FUTURE]

    def test_past_tags(self):
        assert assign_tense(["PRP", "VBD"]) == [None, Tense.PAST]
        assert assign_tense(["VBN"]) == [Tense.PAST]

    def test_present_tags(self):
        assert assign_tense(["VBG", "VBZ", "VBP"]) == [
            Tense.PRESENT, Tense.PRESENT, Tense.PRESENT,
        ]

    def test_modal_skips_adverbs(self):
        # "I will never go"
        assert assign_tense(["PRP", "MD", "RB", "VB"]) == [
            None, None, None, Tense.FUTURE,
        ]
        assert assign_tense(["MD", "RB", "RBR", "VB"]) == [
            None, None, None, Tense.FUTURE,
        ]

    def test_strict_adjacency_flag(self):
        tags = ["PRP", "MD", "RB", "VB"]
        strict = assign_tense(tags, strict_md_adjacency=True)
        assert strict[-1] is Tense.PRESENT
        adjacent = assign_tense(["MD", "VB"], strict_md_adjacency=True)
        assert adjacent == [None, Tense.FUTURE]

    def test_bare_base_verb_defaults_to_present(self):
        assert assign_tense(["TO", "VB"]) == [None, Tense.PRESENT]
        assert assign_tense(["VB"]) == [Tense.PRESENT]

    def test_non_verbs_have_no_tense(self):
        assert assign_tense(["DT", "NN", ".", "PRP$"]) == [None] * 4

    def test_intervening_non_adverb_blocks_future(self):
        # Modal followed by a noun then a base verb: not future.
        assert assign_tense(["MD", "NN", "VB"]) == [None, None, Tense.PRESENT]


class TestPronounMorph:
    def test_first_singular(self):
        assert pronoun_morph("I", "PRP") == (Person.FIRST, Number.SINGULAR)
        assert pronoun_morph("my", "PRP$") == (Person.FIRST, Number.SINGULAR)

    def test_first_plural_reflexive(self):
        assert pronoun_morph("ourselves", "PRP") == (Person.FIRST, Number.PLURAL)

    def test_non_pronoun_token(self):
        assert pronoun_morph("cat", "NN") is None

    def test_second_person_number_only_when_clear(self):
        assert pronoun_morph("you", "PRP") == (Person.SECOND, None)
        assert pronoun_morph("yourself", "PRP") == (Person.SECOND, Number.SINGULAR)
        assert pronoun_morph("yourselves", "PRP") == (Person.SECOND, Number.PLURAL)

    def test_third_person(self):
        assert pronoun_morph("she", "PRP") == (Person.THIRD, Number.SINGULAR)
        assert pronoun_morph("their", "PRP$") == (Person.THIRD, Number.PLURAL)

    def test_case_insensitive(self):
        assert pronoun_morph("ME", "PRP") == (Person.FIRST, Number.SINGULAR)

    def test_out_of_lexicon_personal_tag(self):
        assert pronoun_morph("thee", "PRP") is None

    def test_wh_pronouns_are_not_personal(self):
        assert pronoun_morph("who", "WP") is None


class TestAnalyzeMorphology:
    def test_tense_only_on_verbal_tokens(self):
        tokens = analyze_morphology(
            ["I", "will", "never", "go", "."],
            ["PRP", "MD", "RB", "VB", "."],
        )
        for token in tokens:
            if token.tense is not None:
                assert token.upos in ("VERB", "AUX")
        assert tokens[3].tense is Tense.FUTURE

    def test_pronoun_fields_only_on_pronouns(self):
        tokens = analyze_morphology(["the", "dog"], ["DT", "NN"])
        assert all(t.person is None and t.number is None for t in tokens)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            analyze_morphology(["a"], ["DT", "NN"])
