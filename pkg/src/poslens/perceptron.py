"""Trainable averaged-perceptron part-of-speech tagger."""

from __future__ import annotations

import json
import random
from collections import defaultdict
from pathlib import Path
from typing import Sequence

from sklearn.base import BaseEstimator

from .corpus import Corpus, TaggedDocument
from .tags import PTB_TAGS, TaggedToken, analyze_morphology
from .tokenizer import tokenize_sentences

__all__ = ["PerceptronTagger", "tag_corpus"]

_START = ("-START-", "-START2-")

_MODEL_FORMAT = "poslens-tagger"
_MODEL_VERSION = 1


def _token_features(i: int, word: str, context: Sequence[str], prev: str, prev2: str) -> list[str]:
    w = word.lower()
    features = [
        "bias",
        "word=" + w,
        "suf1=" + w[-1:],
        "suf2=" + w[-2:],
        "suf3=" + w[-3:],
        "pre1=" + w[:1],
        "ptag=" + prev,
        "p2tags=" + prev2 + "|" + prev,
        "pword=" + (context[i - 1].lower() if i > 0 else _START[0]),
        "nword=" + (context[i + 1].lower() if i + 1 < len(context) else "-END-"),
    ]
    if any(ch.isdigit() for ch in word):
        features.append("has_digit")
    if "-" in word:
        features.append("has_hyphen")
    if word[:1].isupper():
        features.append("init_cap")
    return features


class PerceptronTagger(BaseEstimator):
    """Averaged perceptron over Penn Treebank tags.

    fit() takes token sequences and parallel tag sequences; predict()
    returns tag sequences.  Weights are averaged over every update step,
    so prediction is deterministic and stable.
    """

    def __init__(self, epochs: int = 5, seed: int = 0):
        self.epochs = epochs
        self.seed = seed

    def fit(self, X: Sequence[Sequence[str]], y: Sequence[Sequence[str]]):
        if len(X) == 0:
            raise ValueError("training requires at least one sentence")
        if len(X) != len(y):
            raise ValueError("X and y must have the same number of sentences")
        tag_freq: dict[str, int] = defaultdict(int)
        for forms, tags in zip(X, y):
            if len(forms) != len(tags):
                raise ValueError("every sentence needs one tag per token")
            for tag in tags:
                if tag not in PTB_TAGS:
                    raise ValueError(f"unknown PTB tag in training data: {tag!r}")
                tag_freq[tag] += 1

        weights: dict[str, dict[str, float]] = defaultdict(dict)
        totals: dict[tuple[str, str], float] = defaultdict(float)
        stamps: dict[tuple[str, str], int] = defaultdict(int)
        tags_seen = sorted(tag_freq)
        freq = dict(tag_freq)
        step = 0

        def predict_one(feats: list[str]) -> str:
            scores: dict[str, float] = defaultdict(float)
            for feat in feats:
                for tag, weight in weights.get(feat, {}).items():
                    scores[tag] += weight
            return max(tags_seen, key=lambda t: (scores[t], freq[t], t))

        def bump(feat: str, tag: str, delta: float):
            key = (feat, tag)
            current = weights[feat].get(tag, 0.0)
            totals[key] += (step - stamps[key]) * current
            stamps[key] = step
            weights[feat][tag] = current + delta

        rng = random.Random(self.seed)
        order = list(range(len(X)))
        for _ in range(self.epochs):
            rng.shuffle(order)
            for idx in order:
                forms, gold = X[idx], y[idx]
                prev, prev2 = _START
                for i, word in enumerate(forms):
                    step += 1
                    feats = _token_features(i, word, forms, prev, prev2)
                    guess = predict_one(feats)
                    if guess != gold[i]:
                        for feat in feats:
                            bump(feat, gold[i], 1.0)
                            bump(feat, guess, -1.0)
                    prev2, prev = prev, guess

        averaged: dict[str, dict[str, float]] = {}
        for feat, tag_weights in weights.items():
            kept = {}
            for tag, weight in tag_weights.items():
                key = (feat, tag)
                total = totals[key] + (step - stamps[key]) * weight
                value = total / step if step else 0.0
                if value != 0.0:
                    kept[tag] = value
            if kept:
                averaged[feat] = kept

        self.weights_ = averaged
        self.tags_ = tags_seen
        self.tag_freq_ = freq
        self.n_updates_ = step
        return self

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise RuntimeError("tagger is not fitted; call fit() or load()")

    def _predict_sentence(self, forms: Sequence[str]) -> list[str]:
        self._check_fitted()
        tags = []
        prev, prev2 = _START
        for i, word in enumerate(forms):
            scores: dict[str, float] = defaultdict(float)
            for feat in _token_features(i, word, forms, prev, prev2):
                for tag, weight in self.weights_.get(feat, {}).items():
                    scores[tag] += weight
            best = max(self.tags_, key=lambda t: (scores[t], self.tag_freq_[t], t))
            tags.append(best)
            prev2, prev = prev, best
        return tags

    def predict(self, X: Sequence[Sequence[str]]) -> list[list[str]]:
        return [self._predict_sentence(forms) for forms in X]

    def score(self, X: Sequence[Sequence[str]], y: Sequence[Sequence[str]]) -> float:
        """Token-level tagging accuracy."""
        correct = total = 0
        for forms, gold in zip(X, y):
            for guess, truth in zip(self._predict_sentence(forms), gold):
                correct += guess == truth
                total += 1
        if total == 0:
            raise ValueError("cannot score an empty sample")
        return correct / total

    def tag_tokens(
        self, forms: Sequence[str], strict_md_adjacency: bool = False
    ) -> list[TaggedToken]:
        """Tag one tokenized sentence and derive tense/pronoun morphology."""
        tags = self._predict_sentence(forms)
        return analyze_morphology(forms, tags, strict_md_adjacency=strict_md_adjacency)

    def save(self, path) -> None:
        self._check_fitted()
        payload = {
            "format": _MODEL_FORMAT,
            "version": _MODEL_VERSION,
            "params": {"epochs": self.epochs, "seed": self.seed},
            "tags": self.tags_,
            "tag_freq": self.tag_freq_,
            "n_updates": self.n_updates_,
            "weights": self.weights_,
        }
        Path(path).write_text(
            json.dumps(payload, sort_keys=True, separators=(",", ":")), encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "PerceptronTagger":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != _MODEL_FORMAT:
            raise ValueError(f"{path}: not a tagger model file")
        if payload.get("version") != _MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model version {payload.get('version')}")
        tagger = cls(**payload["params"])
        tagger.weights_ = payload["weights"]
        tagger.tags_ = payload["tags"]
        tagger.tag_freq_ = payload["tag_freq"]
        tagger.n_updates_ = payload["n_updates"]
        return tagger


def tag_corpus(
    corpus: Corpus, tagger: PerceptronTagger, strict_md_adjacency: bool = False
) -> list[TaggedDocument]:
    """Tokenize and tag every document of a corpus.

    Empty documents come back with no sentences; they stay in the output
    so post indices line up with the corpus.
    """
    tagged = []
    for doc in corpus:
        sentences = [
            tagger.tag_tokens(forms, strict_md_adjacency=strict_md_adjacency)
            for forms in tokenize_sentences(doc.text)
        ]
        tagged.append(
            TaggedDocument(user_id=doc.user_id, label=doc.label, sentences=sentences)
        )
    return tagged
