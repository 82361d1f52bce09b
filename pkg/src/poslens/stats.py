"""Group comparison statistics: Welch's t-test and G2 keyness ranking."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .corpus import Label, TaggedDocument
from .special import student_t_cdf

__all__ = [
    "TTestResult",
    "KeynessEntry",
    "KeynessResult",
    "welch_t",
    "student_t_cdf",
    "keyness",
    "word_counts",
]


@dataclass(frozen=True)
class TTestResult:
    """Welch's t statistic with Welch-Satterthwaite degrees of freedom."""

    t: float
    df: float
    p_two_sided: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int
    degenerate: bool = False


def _mean_var(sample: Sequence[float]) -> tuple[float, float]:
    n = len(sample)
    mean = sum(sample) / n
    var = sum((x - mean) ** 2 for x in sample) / (n - 1)
    return mean, var


def welch_t(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sample Welch t-test with a two-sided p-value.

    Samples with zero variance on both sides fall back to the degenerate
    convention: p = 1 for equal means, p = 0 otherwise, flagged via the
    `degenerate` field.
    """
    n_a, n_b = len(a), len(b)
    if n_a < 2 or n_b < 2:
        raise ValueError(f"welch_t needs at least 2 values per sample, got {n_a} and {n_b}")
    mean_a, var_a = _mean_var(a)
    mean_b, var_b = _mean_var(b)
    if var_a == 0.0 and var_b == 0.0:
        diff = mean_a - mean_b
        if diff == 0.0:
            t = 0.0
            p = 1.0
        else:
            t = math.copysign(math.inf, diff)
            p = 0.0
        return TTestResult(
            t=t,
            df=float(n_a + n_b - 2),
            p_two_sided=p,
            mean_a=mean_a,
            mean_b=mean_b,
            n_a=n_a,
            n_b=n_b,
            degenerate=True,
        )
    sa = var_a / n_a
    sb = var_b / n_b
    t = (mean_a - mean_b) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (n_a - 1) + sb**2 / (n_b - 1))
    p = 2.0 * (1.0 - student_t_cdf(abs(t), df))
    return TTestResult(
        t=t, df=df, p_two_sided=p, mean_a=mean_a, mean_b=mean_b, n_a=n_a, n_b=n_b
    )


@dataclass(frozen=True)
class KeynessEntry:
    word: str
    count_target: int
    count_reference: int
    total_target: int
    total_reference: int
    g2: float
    overused_in: Label


class KeynessResult(NamedTuple):
    target: list[KeynessEntry]
    reference: list[KeynessEntry]


def _g2(o1: int, o2: int, n1: int, n2: int) -> float:
    expected_scale = (o1 + o2) / (n1 + n2)
    e1 = n1 * expected_scale
    e2 = n2 * expected_scale
    g2 = 0.0
    if o1 > 0:
        g2 += o1 * math.log(o1 / e1)
    if o2 > 0:
        g2 += o2 * math.log(o2 / e2)
    return max(2.0 * g2, 0.0)


def keyness(
    target_counts: Mapping[str, int],
    reference_counts: Mapping[str, int],
    top_k: int = 20,
    min_count: int = 5,
) -> KeynessResult:
    """Log-likelihood-ratio keyness between two word-count tables.

    Words totalling fewer than `min_count` occurrences across both sides
    are ignored as noise.  Each side of the result is ranked by
    descending G2 (ties broken by word) and cut to `top_k`.
    """
    n1 = sum(target_counts.values())
    n2 = sum(reference_counts.values())
    if n1 <= 0 or n2 <= 0:
        raise ValueError("keyness requires positive corpus totals on both sides")
    if top_k <= 0:
        raise ValueError("top_k must be positive")
    overused_target = []
    overused_reference = []
    for word in set(target_counts) | set(reference_counts):
        o1 = target_counts.get(word, 0)
        o2 = reference_counts.get(word, 0)
        if o1 + o2 < min_count:
            continue
        entry_side = Label.TARGET if o1 * n2 > o2 * n1 else Label.CONTROL
        entry = KeynessEntry(
            word=word,
            count_target=o1,
            count_reference=o2,
            total_target=n1,
            total_reference=n2,
            g2=_g2(o1, o2, n1, n2),
            overused_in=entry_side,
        )
        if entry_side is Label.TARGET:
            overused_target.append(entry)
        else:
            overused_reference.append(entry)
    sort_key = lambda e: (-e.g2, e.word)
    overused_target.sort(key=sort_key)
    overused_reference.sort(key=sort_key)
    return KeynessResult(
        target=overused_target[:top_k], reference=overused_reference[:top_k]
    )


def word_counts(
    documents: Sequence[TaggedDocument],
    upos_filter: frozenset | set,
    use_lemmas: bool = False,
) -> Counter:
    """Count lowercased forms (or lemmas when available) for chosen tags."""
    counts: Counter = Counter()
    for doc in documents:
        for token in doc.tokens():
            if token.upos not in upos_filter:
                continue
            if use_lemmas and token.lemma:
                counts[token.lemma.lower()] += 1
            else:
                counts[token.form.lower()] += 1
    return counts
