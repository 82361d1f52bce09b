"""Welch t-test and keyness behaviour."""

import math

import numpy as np
import pytest

from poslens.corpus import Label, TaggedDocument
from poslens.stats import keyness, welch_t, word_counts
from poslens.tags import analyze_morphology


class TestWelch:
    def test_hand_derived_example(self):
        # Closed-form evaluation: means 3 and 6, variances 2.5 and 10.
        # t = -3 / sqrt(0.5 + 2) = -1.8973665961...,
        # df = 6.25 / (0.0625 + 1) = 5.8823529411...
        result = welch_t([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
        assert abs(result.t - (-1.8973665961010275)) <= 1e-12
        assert abs(result.df - 5.882352941176471) <= 1e-12
        assert 0 < result.p_two_sided < 1
        assert result.n_a == 5 and result.n_b == 5

    def test_identical_samples(self):
        result = welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert result.t == 0.0
        assert abs(result.p_two_sided - 1.0) <= 1e-12

    def test_degenerate_equal_constants(self):
        result = welch_t([0.0, 0.0], [0.0, 0.0])
        assert result.t == 0.0
        assert result.p_two_sided == 1.0
        assert result.degenerate

    def test_degenerate_unequal_constants(self):
        result = welch_t([1.0, 1.0], [0.0, 0.0])
        assert result.p_two_sided == 0.0
        assert result.degenerate
        assert result.t > 0

    def test_single_zero_variance_side(self):
        result = welch_t([1.0, 1.0, 1.0], [0.0, 1.0, 2.0])
        assert math.isfinite(result.t)
        assert math.isfinite(result.df)

    def test_too_small_sample(self):
        with pytest.raises(ValueError):
            welch_t([1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            welch_t([1.0, 2.0], [3.0])

    def test_antisymmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = list(rng.normal(size=rng.integers(2, 30)))
            b = list(rng.normal(loc=0.3, size=rng.integers(2, 30)))
            fwd = welch_t(a, b)
            rev = welch_t(b, a)
            assert abs(fwd.t + rev.t) <= 1e-12 * max(1.0, abs(fwd.t))
            assert abs(fwd.p_two_sided - rev.p_two_sided) <= 1e-12

    def test_shift_and_scale_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            a = rng.normal(size=12)
            b = rng.normal(loc=0.5, size=9)
            base = welch_t(list(a), list(b))
            shifted = welch_t(list(a + 7.25), list(b + 7.25))
            scaled = welch_t(list(a * 3.5), list(b * 3.5))
            for other in (shifted, scaled):
                assert abs(base.t - other.t) <= 1e-9 * max(1.0, abs(base.t))
                assert abs(base.df - other.df) <= 1e-9 * base.df
                assert abs(base.p_two_sided - other.p_two_sided) <= 1e-9

    def test_sign_matches_mean_difference(self):
        result = welch_t([5.0, 6.0, 7.0], [1.0, 2.0, 3.0])
        assert result.t > 0
        assert result.df <= 3 + 3 - 2

    def test_against_scipy_reference(self):
        from scipy import stats as scipy_stats

        rng = np.random.default_rng(8)
        for _ in range(60):
            a = rng.normal(size=rng.integers(2, 40))
            b = rng.normal(loc=rng.normal(), scale=1.7, size=rng.integers(2, 40))
            mine = welch_t(list(a), list(b))
            ref = scipy_stats.ttest_ind(a, b, equal_var=False)
            assert abs(mine.t - ref.statistic) <= 1e-10 * max(1.0, abs(ref.statistic))
            assert abs(mine.p_two_sided - ref.pvalue) <= 1e-10
            assert mine.df <= len(a) + len(b) - 2


class TestKeyness:
    def test_hand_derived_g2(self):
        # O1=10/N1=100 vs O2=10/N2=1000: E1 = 20/11, E2 = 200/11,
        # G2 = 2 * (10 ln 5.5 + 10 ln 0.55) = 22.138...
        result = keyness({"w": 10, "x": 90}, {"w": 10, "x": 990}, top_k=5, min_count=1)
        entry = next(e for e in result.target if e.word == "w")
        assert abs(entry.g2 - 22.14) <= 0.01
        assert entry.overused_in is Label.TARGET

    def test_equal_proportions_zero(self):
        result = keyness({"w": 5, "x": 95}, {"w": 50, "x": 950}, top_k=5, min_count=1)
        for entry in result.target + result.reference:
            assert entry.g2 <= 1e-12

    def test_zero_count_side(self):
        result = keyness({"a": 0, "b": 100}, {"a": 7, "b": 93}, top_k=5, min_count=1)
        entry = next(e for e in result.reference if e.word == "a")
        assert entry.g2 > 0
        assert entry.overused_in is Label.CONTROL

    def test_swap_symmetry_random_tables(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            o1 = int(rng.integers(0, 50))
            o2 = int(rng.integers(0, 50))
            if o1 + o2 == 0:
                o1 = 1
            pad1 = int(rng.integers(50, 500))
            pad2 = int(rng.integers(50, 500))
            fwd = keyness({"w": o1, "_": pad1}, {"w": o2, "_": pad2}, top_k=10, min_count=1)
            rev = keyness({"w": o2, "_": pad2}, {"w": o1, "_": pad1}, top_k=10, min_count=1)
            g_fwd = next(e.g2 for e in fwd.target + fwd.reference if e.word == "w")
            g_rev = next(e.g2 for e in rev.target + rev.reference if e.word == "w")
            assert abs(g_fwd - g_rev) <= 1e-10
            assert g_fwd >= 0

    def test_min_count_filter(self):
        result = keyness({"rare": 2, "x": 98}, {"x": 100}, top_k=10, min_count=5)
        words = {e.word for e in result.target + result.reference}
        assert "rare" not in words

    def test_ranking_and_truncation(self):
        target = {"a": 40, "b": 20, "c": 10, "pad": 30}
        reference = {"a": 5, "b": 5, "c": 5, "pad": 85}
        result = keyness(target, reference, top_k=2, min_count=1)
        assert len(result.target) == 2
        assert result.target[0].g2 >= result.target[1].g2

    def test_zero_total_rejected(self):
        with pytest.raises(ValueError):
            keyness({}, {"w": 3}, top_k=5)


class TestWordCounts:
    def _doc(self, forms, tags):
        return TaggedDocument(
            user_id="u1",
            label=Label.TARGET,
            sentences=[analyze_morphology(forms, tags)],
        )

    def test_noun_filter(self):
        doc = self._doc(["dogs", "chase", "dogs"], ["NNS", "VBP", "NNS"])
        assert word_counts([doc], {"NOUN"}) == {"dogs": 2}

    def test_verb_filter(self):
        doc = self._doc(["dogs", "chase", "dogs"], ["NNS", "VBP", "NNS"])
        assert word_counts([doc], {"VERB"}) == {"chase": 1}

    def test_empty_corpus(self):
        assert word_counts([], {"NOUN"}) == {}

    def test_lowercasing(self):
        doc = self._doc(["Dogs", "bark"], ["NNS", "VBP"])
        assert word_counts([doc], {"NOUN"}) == {"dogs": 1}

    def test_lemma_mode(self):
        sentence = analyze_morphology(
            ["dogs", "barked"], ["NNS", "VBD"], lemmas=["dog", "bark"]
        )
        doc = TaggedDocument(user_id="u", label=Label.CONTROL, sentences=[sentence])
        assert word_counts([doc], {"NOUN"}, use_lemmas=True) == {"dog": 1}
        assert word_counts([doc], {"NOUN"}, use_lemmas=False) == {"dogs": 1}
