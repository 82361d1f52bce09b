"""Penn Treebank tag handling: UPOS mapping, tense and pronoun morphology."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

__all__ = [
    "Tense",
    "Person",
    "Number",
    "TaggedToken",
    "UPOS_TAGS",
    "TRACKED_UPOS",
    "PTB_TAGS",
    "ptb_to_upos",
    "assign_tense",
    "pronoun_morph",
    "analyze_morphology",
]


class Tense(Enum):
    PAST = "past"
    PRESENT = "present"
    FUTURE = "future"


class Person(Enum):
    FIRST = "first"
    SECOND = "second"
    THIRD = "third"


class Number(Enum):
    SINGULAR = "singular"
    PLURAL = "plural"


@dataclass(frozen=True)
class TaggedToken:
    """One token with its fine-grained tag, universal tag and morphology."""

    form: str
    ptb: str
    upos: str
    tense: Optional[Tense] = None
    person: Optional[Person] = None
    number: Optional[Number] = None
    lemma: Optional[str] = None


UPOS_TAGS = frozenset(
    {
        "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
        "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
    }
)

# The 12 universal tags tracked as per-post frequency features.
TRACKED_UPOS = (
    "ADJ", "ADV", "NOUN", "PROPN", "VERB", "ADP",
    "CCONJ", "DET", "PART", "SCONJ", "AUX", "PRON",
)

# IN always maps to ADP: without a parse the ADP/SCONJ split is guesswork,
# so SCONJ counts only ever come from pre-tagged input.
_PTB_TO_UPOS = {
    "NN": "NOUN", "NNS": "NOUN",
    "NNP": "PROPN", "NNPS": "PROPN",
    "VB": "VERB", "VBD": "VERB", "VBG": "VERB", "VBN": "VERB",
    "VBP": "VERB", "VBZ": "VERB",
    "MD": "AUX",
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ", "AFX": "ADJ",
    "RB": "ADV", "RBR": "ADV", "RBS": "ADV", "WRB": "ADV",
    "IN": "ADP",
    "DT": "DET", "PDT": "DET", "WDT": "DET",
    "CC": "CCONJ",
    "PRP": "PRON", "PRP$": "PRON", "WP": "PRON", "WP$": "PRON", "EX": "PRON",
    "RP": "PART", "TO": "PART", "POS": "PART",
    "UH": "INTJ",
    "CD": "NUM",
    ".": "PUNCT", ",": "PUNCT", ":": "PUNCT", "``": "PUNCT", "''": "PUNCT",
    "-LRB-": "PUNCT", "-RRB-": "PUNCT", "HYPH": "PUNCT", "NFP": "PUNCT",
    "FW": "X", "LS": "X", "XX": "X", "ADD": "X", "GW": "X",
    "SYM": "SYM", "$": "SYM", "#": "SYM",
}

PTB_TAGS = frozenset(_PTB_TO_UPOS)

_ADVERB_TAGS = frozenset({"RB", "RBR", "RBS"})

_PERSONAL_PRONOUN_PTB = frozenset({"PRP", "PRP$"})

# Personal-pronoun lexicon; possessives included because morphological
# extraction covers every pronoun form.
_PRONOUN_LEXICON = {
    "i": (Person.FIRST, Number.SINGULAR),
    "me": (Person.FIRST, Number.SINGULAR),
    "my": (Person.FIRST, Number.SINGULAR),
    "mine": (Person.FIRST, Number.SINGULAR),
    "myself": (Person.FIRST, Number.SINGULAR),
    "we": (Person.FIRST, Number.PLURAL),
    "us": (Person.FIRST, Number.PLURAL),
    "our": (Person.FIRST, Number.PLURAL),
    "ours": (Person.FIRST, Number.PLURAL),
    "ourselves": (Person.FIRST, Number.PLURAL),
    # Second person: number only where the form itself fixes it.
    "you": (Person.SECOND, None),
    "your": (Person.SECOND, None),
    "yours": (Person.SECOND, None),
    "yourself": (Person.SECOND, Number.SINGULAR),
    "yourselves": (Person.SECOND, Number.PLURAL),
    "he": (Person.THIRD, Number.SINGULAR),
    "him": (Person.THIRD, Number.SINGULAR),
    "his": (Person.THIRD, Number.SINGULAR),
    "himself": (Person.THIRD, Number.SINGULAR),
    "she": (Person.THIRD, Number.SINGULAR),
    "her": (Person.THIRD, Number.SINGULAR),
    "hers": (Person.THIRD, Number.SINGULAR),
    "herself": (Person.THIRD, Number.SINGULAR),
    "it": (Person.THIRD, Number.SINGULAR),
    "its": (Person.THIRD, Number.SINGULAR),
    "itself": (Person.THIRD, Number.SINGULAR),
    "they": (Person.THIRD, Number.PLURAL),
    "them": (Person.THIRD, Number.PLURAL),
    "their": (Person.THIRD, Number.PLURAL),
    "theirs": (Person.THIRD, Number.PLURAL),
    "themselves": (Person.THIRD, Number.PLURAL),
    # Singular-they reflexive: person is clear, number left open.
    "themself": (Person.THIRD, None),
}


def ptb_to_upos(ptb: str) -> str:
    """Map a Penn Treebank tag to its universal POS tag."""
    try:
        return _PTB_TO_UPOS[ptb]
    except KeyError:
        raise ValueError(f"unknown PTB tag: {ptb!r}") from None


def assign_tense(
    ptb_sequence: Sequence[str], strict_md_adjacency: bool = False
) -> list[Optional[Tense]]:
    """Derive a tense for each tag of one sentence, None for non-verbs.

    VBD/VBN are past, VBG/VBZ/VBP present.  A bare VB is future when the
    nearest preceding non-adverb tag is a modal (or the immediately
    preceding tag, with strict_md_adjacency), otherwise present so that
    every verb token carries a tense.
    """
    tenses: list[Optional[Tense]] = []
    for i, tag in enumerate(ptb_sequence):
        if tag in ("VBD", "VBN"):
            tenses.append(Tense.PAST)
        elif tag in ("VBG", "VBZ", "VBP"):
            tenses.append(Tense.PRESENT)
        elif tag == "VB":
            if strict_md_adjacency:
                is_future = i > 0 and ptb_sequence[i - 1] == "MD"
            else:
                j = i - 1
                while j >= 0 and ptb_sequence[j] in _ADVERB_TAGS:
                    j -= 1
                is_future = j >= 0 and ptb_sequence[j] == "MD"
            tenses.append(Tense.FUTURE if is_future else Tense.PRESENT)
        else:
            tenses.append(None)
    return tenses


def pronoun_morph(form: str, ptb: str):
    """Person and number of a personal pronoun, or None when not one.

    Returns a (Person, Number or None) pair for PRP/PRP$ forms found in
    the lexicon; anything else yields None.
    """
    if ptb not in _PERSONAL_PRONOUN_PTB:
        return None
    return _PRONOUN_LEXICON.get(form.lower())


def analyze_morphology(
    forms: Sequence[str],
    ptb_tags: Sequence[str],
    strict_md_adjacency: bool = False,
    lemmas: Optional[Sequence[Optional[str]]] = None,
    upos_tags: Optional[Sequence[str]] = None,
) -> list[TaggedToken]:
    """Build TaggedTokens for one sentence from forms and PTB tags.

    UPOS comes from the mapping table unless pre-tagged values are given
    (the CoNLL-U bypass); tense and pronoun morphology are always derived
    here so both input paths agree.
    """
    if len(forms) != len(ptb_tags):
        raise ValueError("forms and tags must have equal length")
    if upos_tags is None:
        upos_tags = [ptb_to_upos(t) for t in ptb_tags]
    tenses = assign_tense(ptb_tags, strict_md_adjacency=strict_md_adjacency)
    tokens = []
    for i, (form, ptb) in enumerate(zip(forms, ptb_tags)):
        upos = upos_tags[i]
        tense = tenses[i] if upos in ("VERB", "AUX") else None
        morph = pronoun_morph(form, ptb) if upos == "PRON" else None
        person, number = morph if morph is not None else (None, None)
        tokens.append(
            TaggedToken(
                form=form,
                ptb=ptb,
                upos=upos,
                tense=tense,
                person=person,
                number=number,
                lemma=lemmas[i] if lemmas is not None else None,
            )
        )
    return tokens
