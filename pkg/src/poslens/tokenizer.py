"""Treebank-style tokenizer and sentence segmenter for social media text."""

from __future__ import annotations

import re

__all__ = ["tokenize", "segment_sentences", "tokenize_sentences"]

_URL_RE = re.compile(r"^(?:https?://|www\.)\S+$", re.IGNORECASE)

_OPENING = "([{“‘"
_CLOSING = ")]}”’"
_LEADING_CHARS = set(_OPENING) | {'"', "'", "`"}
_TRAILING_CHARS = set(_CLOSING) | set('.,!?;:"\'`%')

# n't plus the apostrophe clitics ('m, 're, 've, 'll, 'd, 's).
_CONTRACTION_RE = re.compile(
    r"^(?P<stem>.*\w)(?P<clitic>n[’']t|[’'](?:m|re|ve|ll|d|s))$",
    re.IGNORECASE,
)

_WORD_CHAR_RE = re.compile(r"\w")

_SENTENCE_FINAL_RE = re.compile(r"^[.!?]+$")


def _split_contractions(core: str) -> list[str]:
    match = _CONTRACTION_RE.match(core)
    if match is None:
        return [core]
    return _split_contractions(match.group("stem")) + [match.group("clitic")]


def _split_chunk(chunk: str) -> list[str]:
    if _URL_RE.match(chunk):
        return [chunk]
    if not _WORD_CHAR_RE.search(chunk):
        # Pure punctuation ("...", "--", emoticons) stays one token.
        return [chunk]
    leading = []
    while chunk and chunk[0] in _LEADING_CHARS:
        leading.append(chunk[0])
        chunk = chunk[1:]
    trailing = []
    while chunk:
        if chunk.endswith("..."):
            trailing.append("...")
            chunk = chunk[:-3]
        elif chunk[-1] in _TRAILING_CHARS:
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        else:
            break
    core = _split_contractions(chunk) if chunk else []
    return leading + core + list(reversed(trailing))


def tokenize(text: str) -> list[str]:
    """Split text into Treebank-style tokens.

    Whitespace separates candidate chunks; sentence-final punctuation,
    commas, quotes and brackets are peeled off, contractions are split
    ("don't" -> "do", "n't") and URLs survive as single tokens.
    """
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk))
    return tokens


def segment_sentences(tokens: list[str]) -> list[list[str]]:
    """Group a token stream into sentences at final-punctuation tokens."""
    sentences: list[list[str]] = []
    current: list[str] = []
    closing = set(_CLOSING) | {'"', "'"}
    i = 0
    while i < len(tokens):
        current.append(tokens[i])
        if _SENTENCE_FINAL_RE.match(tokens[i]) or tokens[i] == "...":
            while i + 1 < len(tokens) and tokens[i + 1] in closing:
                i += 1
                current.append(tokens[i])
            sentences.append(current)
            current = []
        i += 1
    if current:
        sentences.append(current)
    return sentences


def tokenize_sentences(text: str) -> list[list[str]]:
    """Tokenize text and split the result into sentences."""
    return segment_sentences(tokenize(text))
