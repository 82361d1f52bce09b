"""Per-post feature vectors: tag frequencies, pronoun and formality indices."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import Label, TaggedDocument
from .tags import TRACKED_UPOS, Number, Person, TaggedToken, Tense

__all__ = [
    "FEATURE_NAMES",
    "FeatureVector",
    "GroupSummary",
    "extract_post_features",
    "pronominalisation_index",
    "formality_score",
    "aggregate",
    "extract_features",
    "PostFeatureExtractor",
    "write_feature_csv",
    "read_feature_csv",
]

# Tags left out of the frequency denominator: they are not part of the
# twelve tracked frequencies, so keeping them out makes those frequencies
# comparable across punctuation-heavy posts.
_UNCOUNTED_UPOS = frozenset({"PUNCT", "SYM", "X", "NUM"})

_ARTICLES = frozenset({"a", "an", "the"})

FEATURE_NAMES = tuple(
    [f"upos_{tag.lower()}" for tag in TRACKED_UPOS]
    + ["tense_past", "tense_present", "tense_future"]
    + ["person_first", "person_second", "person_third"]
    + ["first_singular", "first_plural"]
    + ["pi", "formality"]
)

_NAN = float("nan")


@dataclass(frozen=True)
class FeatureVector:
    """The 22 per-post features; NaN marks an undefined ratio."""

    upos_freq: tuple[float, ...]
    tense_freq: tuple[float, float, float]
    person_freq: tuple[float, float, float]
    first_number_freq: tuple[float, float]
    pi: float
    formality: float

    def as_array(self) -> np.ndarray:
        return np.array(
            self.upos_freq
            + self.tense_freq
            + self.person_freq
            + self.first_number_freq
            + (self.pi, self.formality),
            dtype=np.float64,
        )


@dataclass(frozen=True)
class GroupSummary:
    """Mean, sample std and defined-observation count per feature."""

    label: Label
    mean: np.ndarray
    std: np.ndarray
    count: np.ndarray


def pronominalisation_index(tokens: Sequence[TaggedToken]) -> float:
    """Pronouns per noun (common plus proper); NaN when there is no noun."""
    pron = sum(1 for t in tokens if t.upos == "PRON")
    noun = sum(1 for t in tokens if t.upos in ("NOUN", "PROPN"))
    if noun == 0:
        return _NAN
    return pron / noun


def formality_score(tokens: Sequence[TaggedToken]) -> float:
    """Formality F in [0, 100] from tag percentages over all tokens.

    Nominal-side percentages (nouns incl. proper, adjectives, adpositions,
    articles) add, deictic-side percentages (pronouns, verbs, adverbs,
    interjections) subtract; the result is shifted and halved.
    """
    n = len(tokens)
    if n == 0:
        raise ValueError("formality_score requires at least one token")
    pct = lambda count: 100.0 * count / n
    noun = pct(sum(1 for t in tokens if t.upos in ("NOUN", "PROPN")))
    adj = pct(sum(1 for t in tokens if t.upos == "ADJ"))
    prep = pct(sum(1 for t in tokens if t.upos == "ADP"))
    art = pct(sum(1 for t in tokens if t.form.lower() in _ARTICLES))
    pron = pct(sum(1 for t in tokens if t.upos == "PRON"))
    verb = pct(sum(1 for t in tokens if t.upos == "VERB"))
    adv = pct(sum(1 for t in tokens if t.upos == "ADV"))
    intj = pct(sum(1 for t in tokens if t.upos == "INTJ"))
    return (noun + adj + prep + art - pron - verb - adv - intj + 100.0) / 2.0


def extract_post_features(
    tokens: Sequence[TaggedToken], denominator: str = "tracked"
) -> Optional[FeatureVector]:
    """Compute the feature vector of one post; None for an empty post.

    `denominator` selects the universal-tag normalizer: "tracked" divides
    by tokens outside PUNCT/SYM/X/NUM, "all" by every token.
    """
    if len(tokens) == 0:
        return None
    if denominator not in ("tracked", "all"):
        raise ValueError(f"unknown denominator mode: {denominator!r}")

    if denominator == "all":
        upos_total = len(tokens)
    else:
        upos_total = sum(1 for t in tokens if t.upos not in _UNCOUNTED_UPOS)
    if upos_total > 0:
        upos_freq = tuple(
            sum(1 for t in tokens if t.upos == tag) / upos_total for tag in TRACKED_UPOS
        )
    else:
        upos_freq = (_NAN,) * len(TRACKED_UPOS)

    tensed = [t.tense for t in tokens if t.tense is not None]
    if tensed:
        total = len(tensed)
        tense_freq = (
            sum(1 for x in tensed if x is Tense.PAST) / total,
            sum(1 for x in tensed if x is Tense.PRESENT) / total,
            sum(1 for x in tensed if x is Tense.FUTURE) / total,
        )
    else:
        tense_freq = (_NAN, _NAN, _NAN)

    persons = [t.person for t in tokens if t.person is not None]
    if persons:
        total = len(persons)
        person_freq = (
            sum(1 for x in persons if x is Person.FIRST) / total,
            sum(1 for x in persons if x is Person.SECOND) / total,
            sum(1 for x in persons if x is Person.THIRD) / total,
        )
    else:
        person_freq = (_NAN, _NAN, _NAN)

    firsts = [t.number for t in tokens if t.person is Person.FIRST]
    if firsts:
        total = len(firsts)
        first_number_freq = (
            sum(1 for x in firsts if x is Number.SINGULAR) / total,
            sum(1 for x in firsts if x is Number.PLURAL) / total,
        )
    else:
        first_number_freq = (_NAN, _NAN)

    return FeatureVector(
        upos_freq=upos_freq,
        tense_freq=tense_freq,
        person_freq=person_freq,
        first_number_freq=first_number_freq,
        pi=pronominalisation_index(tokens),
        formality=formality_score(tokens),
    )


def aggregate(vectors: Sequence[FeatureVector], label: Label) -> GroupSummary:
    """Group-level mean/std/count per feature, skipping undefined values."""
    n_features = len(FEATURE_NAMES)
    if len(vectors) == 0:
        return GroupSummary(
            label=label,
            mean=np.full(n_features, _NAN),
            std=np.full(n_features, _NAN),
            count=np.zeros(n_features, dtype=np.int64),
        )
    matrix = np.vstack([v.as_array() for v in vectors])
    return summarize_matrix(matrix, label)


def summarize_matrix(matrix: np.ndarray, label: Label) -> GroupSummary:
    n_features = matrix.shape[1]
    mean = np.full(n_features, _NAN)
    std = np.full(n_features, _NAN)
    count = np.zeros(n_features, dtype=np.int64)
    for j in range(n_features):
        col = matrix[:, j]
        defined = col[~np.isnan(col)]
        count[j] = defined.size
        if defined.size:
            mean[j] = defined.mean()
        if defined.size >= 2:
            std[j] = defined.std(ddof=1)
    return GroupSummary(label=label, mean=mean, std=std, count=count)


def extract_features(
    documents: Sequence[TaggedDocument], denominator: str = "tracked"
) -> tuple[np.ndarray, list[int]]:
    """Feature matrix over non-empty documents.

    Returns the (n_kept, 22) matrix and the indices of the documents that
    produced a row; empty documents are skipped.
    """
    rows = []
    kept = []
    for i, doc in enumerate(documents):
        vector = extract_post_features(doc.tokens(), denominator=denominator)
        if vector is None:
            continue
        rows.append(vector.as_array())
        kept.append(i)
    if rows:
        matrix = np.vstack(rows)
    else:
        matrix = np.empty((0, len(FEATURE_NAMES)), dtype=np.float64)
    return matrix, kept


class PostFeatureExtractor(BaseEstimator, TransformerMixin):
    """Transformer facade over extract_features for pipeline composition."""

    def __init__(self, denominator: str = "tracked"):
        self.denominator = denominator

    def fit(self, X, y=None):
        return self

    def transform(self, X: Sequence[TaggedDocument]) -> np.ndarray:
        matrix, _ = extract_features(X, denominator=self.denominator)
        return matrix


def _format_value(x: float) -> str:
    return "NA" if math.isnan(x) else repr(float(x))


def write_feature_csv(
    path,
    documents: Sequence[TaggedDocument],
    matrix: np.ndarray,
    kept: Sequence[int],
) -> None:
    """Write the per-post feature matrix with identity columns."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "post_index", "label", *FEATURE_NAMES])
        for row, doc_index in zip(matrix, kept):
            doc = documents[doc_index]
            writer.writerow(
                [doc.user_id, doc_index, doc.label.value]
                + [_format_value(x) for x in row]
            )


def read_feature_csv(path) -> tuple[np.ndarray, np.ndarray, list[str], list[int]]:
    """Read a feature CSV back: matrix, 0/1 labels, user ids, post indices."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:3] != ["user_id", "post_index", "label"]:
            raise ValueError(f"{path}: not a feature CSV (unexpected header)")
        names = header[3:]
        if tuple(names) != FEATURE_NAMES:
            raise ValueError(f"{path}: unexpected feature columns")
        rows, labels, users, indices = [], [], [], []
        for record in reader:
            users.append(record[0])
            indices.append(int(record[1]))
            labels.append(1 if Label.from_string(record[2]) is Label.TARGET else 0)
            rows.append([_NAN if v == "NA" else float(v) for v in record[3:]])
    matrix = (
        np.array(rows, dtype=np.float64)
        if rows
        else np.empty((0, len(FEATURE_NAMES)), dtype=np.float64)
    )
    return matrix, np.array(labels, dtype=np.int64), users, indices
