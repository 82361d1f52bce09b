"""Seeded synthetic two-group corpora with controllable tag profiles.

Posts are built from small subject-verb-object sentence frames whose
nominal slots draw first-person-singular pronouns, proper nouns, other
pronouns or common noun phrases at configurable per-group rates.  Verb
slots follow a per-group tense mix.  Because every emitted token carries
its intended tag, the generator doubles as a gold treebank source for
tagger training, and the manifest records exactly what was planted.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import asdict, dataclass, field

from .corpus import Corpus, Document, Label, TaggedDocument
from .tags import analyze_morphology

__all__ = ["GroupProfile", "SynthConfig", "generate_corpus", "generate_treebank"]

_NOUNS = (
    "day", "house", "friend", "problem", "game", "story", "dog", "music",
    "job", "school", "idea", "coffee", "night", "movie", "town", "book",
    "road", "garden", "doctor", "letter", "window", "kitchen", "meeting",
    "weather", "ticket", "river", "train", "photo", "lesson", "dinner",
)
_PLURAL_NOUNS = (
    "days", "friends", "problems", "games", "stories", "dogs", "ideas",
    "nights", "books", "letters", "photos", "lessons", "tickets", "movies",
)
_PROPER_NOUNS = (
    "Alice", "Marcus", "Emma", "London", "Paris", "Reddit", "Monday",
    "Diana", "Tokyo", "Oliver", "Canada", "Berlin", "Sofia", "Madrid",
    "Felix", "Norway",
)
# (base/plural-present, past, third-singular-present)
_VERBS = (
    ("walk", "walked", "walks"),
    ("play", "played", "plays"),
    ("work", "worked", "works"),
    ("talk", "talked", "talks"),
    ("watch", "watched", "watches"),
    ("visit", "visited", "visits"),
    ("finish", "finished", "finishes"),
    ("start", "started", "starts"),
    ("love", "loved", "loves"),
    ("call", "called", "calls"),
    ("help", "helped", "helps"),
    ("miss", "missed", "misses"),
    ("remember", "remembered", "remembers"),
    ("need", "needed", "needs"),
    ("want", "wanted", "wants"),
    ("clean", "cleaned", "cleans"),
    ("open", "opened", "opens"),
    ("close", "closed", "closes"),
)
_ADJECTIVES = (
    "happy", "quiet", "small", "bright", "dark", "heavy", "gentle",
    "strange", "warm", "cold", "tired", "busy", "green", "soft", "plain",
    "narrow",
)
_ADVERBS = (
    "really", "often", "never", "quietly", "slowly", "almost", "always",
    "gently", "badly", "usually", "rarely", "suddenly",
)
_PREPOSITIONS = ("in", "on", "at", "with", "about", "from", "near", "after", "before", "under")
_MODALS = ("will", "would", "can", "could", "might", "should")
_INTERJECTIONS = ("oh", "wow", "hey", "yeah", "ah")
_CONJUNCTIONS = ("and", "but", "or")
# (subject form, object form, possessive form, is third singular, be-person key)
_OTHER_PRONOUNS = (
    ("we", "us", "our", False, "plural"),
    ("you", "you", "your", False, "plural"),
    ("they", "them", "their", False, "plural"),
    ("he", "him", "his", True, "sg3"),
    ("she", "her", "her", True, "sg3"),
)
_BE_FORMS = {
    "1sg": {"past": ("was", "VBD"), "present": ("am", "VBP")},
    "sg3": {"past": ("was", "VBD"), "present": ("is", "VBZ")},
    "plural": {"past": ("were", "VBD"), "present": ("are", "VBP")},
}


@dataclass(frozen=True)
class GroupProfile:
    """Per-group emission rates; nominal rates apply per nominal slot."""

    pron_first_singular_rate: float = 0.08
    propn_rate: float = 0.06
    other_pronoun_rate: float = 0.20
    tense_mix: tuple[float, float, float] = (0.30, 0.50, 0.20)
    interjection_rate: float = 0.05
    adjective_rate: float = 0.30
    adverb_rate: float = 0.20

    def __post_init__(self):
        total = self.pron_first_singular_rate + self.propn_rate + self.other_pronoun_rate
        if not 0.0 <= total <= 1.0:
            raise ValueError("nominal slot rates must sum to at most 1")
        if abs(sum(self.tense_mix) - 1.0) > 1e-9:
            raise ValueError("tense_mix must sum to 1")


TARGET_DEFAULT = GroupProfile(
    pron_first_singular_rate=0.15,
    propn_rate=0.02,
    other_pronoun_rate=0.28,
    tense_mix=(0.40, 0.50, 0.10),
)
CONTROL_DEFAULT = GroupProfile(
    pron_first_singular_rate=0.08,
    propn_rate=0.06,
    other_pronoun_rate=0.12,
    tense_mix=(0.28, 0.50, 0.22),
)


@dataclass(frozen=True)
class SynthConfig:
    posts_per_group: int = 2000
    sentences_per_post: int = 16
    posts_per_user: int = 10
    title_rate: float = 0.3
    seed: int = 0
    target: GroupProfile = field(default_factory=lambda: TARGET_DEFAULT)
    control: GroupProfile = field(default_factory=lambda: CONTROL_DEFAULT)


class _SentenceBuilder:
    def __init__(self, rng: random.Random, profile: GroupProfile):
        self.rng = rng
        self.profile = profile

    def _nominal(self, role: str):
        """One nominal slot: ([(form, tag), ...], third_singular, be_key)."""
        rng = self.rng
        p = self.profile
        u = rng.random()
        if u < p.pron_first_singular_rate:
            if role == "subject":
                return [("I", "PRP")], False, "1sg"
            return [("me", "PRP")], False, "1sg"
        u -= p.pron_first_singular_rate
        if u < p.propn_rate:
            return [(rng.choice(_PROPER_NOUNS), "NNP")], True, "sg3"
        u -= p.propn_rate
        if u < p.other_pronoun_rate:
            subj, obj, _, third, be_key = rng.choice(_OTHER_PRONOUNS)
            form = subj if role == "subject" else obj
            return [(form, "PRP")], third, be_key
        return self._noun_phrase()

    def _determiner(self, plural: bool):
        rng = self.rng
        p = self.profile
        u = rng.random()
        if u < p.pron_first_singular_rate:
            return ("my", "PRP$")
        if u < p.pron_first_singular_rate + 0.12:
            return (rng.choice(_OTHER_PRONOUNS)[2], "PRP$")
        if plural:
            return ("the", "DT")
        return (rng.choice(("the", "the", "a")), "DT")

    def _noun_phrase(self):
        rng = self.rng
        plural = rng.random() < 0.25
        tokens = [self._determiner(plural)]
        if rng.random() < self.profile.adjective_rate:
            tokens.append((rng.choice(_ADJECTIVES), "JJ"))
        if plural:
            tokens.append((rng.choice(_PLURAL_NOUNS), "NNS"))
            return tokens, False, "plural"
        tokens.append((rng.choice(_NOUNS), "NN"))
        return tokens, True, "sg3"

    def _tense(self) -> str:
        u = self.rng.random()
        past, present, _ = self.profile.tense_mix
        if u < past:
            return "past"
        if u < past + present:
            return "present"
        return "future"

    def _verb(self, third_singular: bool):
        rng = self.rng
        tense = self._tense()
        base, past, third = rng.choice(_VERBS)
        tokens = []
        if tense == "future":
            tokens.append((rng.choice(_MODALS), "MD"))
        if rng.random() < self.profile.adverb_rate:
            tokens.append((rng.choice(_ADVERBS), "RB"))
        if tense == "future":
            tokens.append((base, "VB"))
        elif tense == "past":
            tokens.append((past, "VBD"))
        else:
            tokens.append((third, "VBZ") if third_singular else (base, "VBP"))
        return tokens

    def _be(self, be_key: str):
        tense = self._tense()
        tokens = []
        if tense == "future":
            tokens.append((self.rng.choice(_MODALS), "MD"))
            tokens.append(("be", "VB"))
        else:
            tokens.append(_BE_FORMS[be_key][tense])
        return tokens

    def _clause(self):
        rng = self.rng
        subject, third, be_key = self._nominal("subject")
        tokens = list(subject)
        frame = rng.random()
        if frame < 0.18:
            # Copula with a predicate adjective.
            tokens.extend(self._be(be_key))
            tokens.append((rng.choice(_ADJECTIVES), "JJ"))
        elif frame < 0.55:
            tokens.extend(self._verb(third))
            obj, _, _ = self._nominal("object")
            tokens.extend(obj)
        elif frame < 0.85:
            tokens.extend(self._verb(third))
            tokens.append((rng.choice(_PREPOSITIONS), "IN"))
            obj, _, _ = self._nominal("object")
            tokens.extend(obj)
        else:
            tokens.extend(self._verb(third))
        return tokens

    def sentence(self):
        """One tagged sentence as parallel (forms, tags) lists."""
        rng = self.rng
        tokens = []
        if rng.random() < self.profile.interjection_rate:
            tokens.append((rng.choice(_INTERJECTIONS), "UH"))
            tokens.append((",", ","))
        tokens.extend(self._clause())
        if rng.random() < 0.15:
            tokens.append((rng.choice(_CONJUNCTIONS), "CC"))
            tokens.extend(self._clause())
        tokens.append(("!" if rng.random() < 0.1 else ".", "."))
        forms = [form for form, _ in tokens]
        forms[0] = forms[0][0].upper() + forms[0][1:]
        return forms, [tag for _, tag in tokens]


def _detokenize(sentences: list[list[str]]) -> str:
    text = " ".join(" ".join(forms) for forms in sentences)
    return re.sub(r" ([.,!?])", r"\1", text)


def _blend(a: GroupProfile, b: GroupProfile) -> GroupProfile:
    mix = tuple((x + y) / 2.0 for x, y in zip(a.tense_mix, b.tense_mix))
    return GroupProfile(
        pron_first_singular_rate=(a.pron_first_singular_rate + b.pron_first_singular_rate) / 2,
        propn_rate=(a.propn_rate + b.propn_rate) / 2,
        other_pronoun_rate=(a.other_pronoun_rate + b.other_pronoun_rate) / 2,
        tense_mix=mix,
        interjection_rate=(a.interjection_rate + b.interjection_rate) / 2,
        adjective_rate=(a.adjective_rate + b.adjective_rate) / 2,
        adverb_rate=(a.adverb_rate + b.adverb_rate) / 2,
    )


def _token_rates(documents: list[TaggedDocument]) -> dict:
    counts: Counter = Counter()
    total = 0
    first_singular = 0
    for doc in documents:
        for token in doc.tokens():
            counts[token.upos] += 1
            total += 1
            if token.person is not None and token.person.value == "first":
                if token.number is not None and token.number.value == "singular":
                    first_singular += 1
    if total == 0:
        return {}
    return {
        "tokens": total,
        "first_singular_per_token": first_singular / total,
        "pron_per_token": counts["PRON"] / total,
        "propn_per_token": counts["PROPN"] / total,
        "noun_per_token": counts["NOUN"] / total,
    }


def generate_corpus(config: SynthConfig):
    """Build the corpus, its gold tagging and the planted-rates manifest.

    Returns (corpus, gold_documents, manifest).  The corpus holds raw text
    for the tagging pipeline; gold_documents carry the generator's own
    tags with morphology derived by the shared rules.
    """
    rng = random.Random(config.seed)
    documents: list[Document] = []
    gold: list[TaggedDocument] = []
    for label, profile, prefix in (
        (Label.TARGET, config.target, "t"),
        (Label.CONTROL, config.control, "c"),
    ):
        builder = _SentenceBuilder(rng, profile)
        for post_index in range(config.posts_per_group):
            user_id = f"{prefix}{post_index // config.posts_per_user:04d}"
            sentences = [builder.sentence() for _ in range(config.sentences_per_post)]
            title_sentences: list = []
            if rng.random() < config.title_rate:
                title_sentences = [sentences[0]]
                sentences = sentences[1:]
            body = _detokenize([forms for forms, _ in sentences])
            title = _detokenize([forms for forms, _ in title_sentences]) or None
            documents.append(
                Document(user_id=user_id, label=label, body=body, title=title)
            )
            gold.append(
                TaggedDocument(
                    user_id=user_id,
                    label=label,
                    sentences=[
                        analyze_morphology(forms, tags)
                        for forms, tags in title_sentences + sentences
                    ],
                )
            )
    corpus = Corpus(documents)
    n_target = config.posts_per_group
    manifest = {
        "generator": "poslens-synth",
        "seed": config.seed,
        "posts_per_group": config.posts_per_group,
        "sentences_per_post": config.sentences_per_post,
        "posts_per_user": config.posts_per_user,
        "rate_semantics": (
            "pron_first_singular_rate/propn_rate/other_pronoun_rate are the "
            "probabilities that a nominal slot emits that category; tense_mix "
            "is the (past, present, future) draw for verb slots"
        ),
        "planted": {
            "target": asdict(config.target),
            "control": asdict(config.control),
        },
        "planted_deltas": {
            "pron_first_singular_rate": config.target.pron_first_singular_rate
            - config.control.pron_first_singular_rate,
            "propn_rate": config.target.propn_rate - config.control.propn_rate,
        },
        "achieved_token_rates": {
            "target": _token_rates(gold[:n_target]),
            "control": _token_rates(gold[n_target:]),
        },
    }
    return corpus, gold, manifest


def generate_treebank(n_sentences: int, seed: int, profile: GroupProfile | None = None):
    """Gold-tagged sentences for tagger training, blended across groups."""
    if profile is None:
        profile = _blend(TARGET_DEFAULT, CONTROL_DEFAULT)
    rng = random.Random(seed)
    builder = _SentenceBuilder(rng, profile)
    return [builder.sentence() for _ in range(n_sentences)]
