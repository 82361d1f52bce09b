"""Averaged-perceptron tagger training, prediction and persistence."""

import json

import pytest

from poslens.perceptron import PerceptronTagger, tag_corpus
from poslens.corpus import Corpus, Document, Label
from poslens.synth import generate_treebank
from poslens.tags import Number, Person, Tense


def _treebank(n, seed=0):
    sentences = generate_treebank(n, seed=seed)
    return [forms for forms, _ in sentences], [tags for _, tags in sentences]


class TestTraining:
    def test_memorizes_small_treebank(self):
        X, y = _treebank(50)
        tagger = PerceptronTagger(epochs=5, seed=1).fit(X, y)
        assert tagger.score(X, y) >= 0.99

    def test_zero_epochs_predicts_most_frequent_tag(self):
        X, y = _treebank(30)
        tagger = PerceptronTagger(epochs=0, seed=1).fit(X, y)
        most_frequent = max(tagger.tag_freq_, key=lambda t: (tagger.tag_freq_[t], t))
        for tags in tagger.predict(X[:5]):
            assert all(tag == most_frequent for tag in tags)

    def test_same_seed_same_weights(self):
        X, y = _treebank(40)
        first = PerceptronTagger(epochs=3, seed=7).fit(X, y)
        second = PerceptronTagger(epochs=3, seed=7).fit(X, y)
        assert first.weights_ == second.weights_

    def test_different_seed_may_differ_but_stays_deterministic(self):
        X, y = _treebank(40)
        tagger = PerceptronTagger(epochs=3, seed=8).fit(X, y)
        again = PerceptronTagger(epochs=3, seed=8).fit(X, y)
        assert tagger.predict(X[:10]) == again.predict(X[:10])

    def test_empty_training_set_rejected(self):
        with pytest.raises(ValueError):
            PerceptronTagger().fit([], [])

    def test_unknown_tag_rejected(self):
        with pytest.raises(ValueError, match="BOGUS"):
            PerceptronTagger().fit([["word"]], [["BOGUS"]])

    def test_token_count_preserved(self):
        X, y = _treebank(20)
        tagger = PerceptronTagger(epochs=2, seed=0).fit(X, y)
        for forms, tags in zip(X, tagger.predict(X)):
            assert len(forms) == len(tags)
        assert tagger.predict([[]]) == [[]]


class TestTagging:
    def test_end_to_end_morphology(self):
        X, y = _treebank(200)
        tagger = PerceptronTagger(epochs=5, seed=2).fit(X, y)
        tokens = tagger.tag_tokens(["I", "slept", "."])
        # The treebank has no "slept"; suffix features must still mark a past verb.
        assert tokens[0].person is Person.FIRST
        assert tokens[0].number is Number.SINGULAR
        held = tagger.tag_tokens(["I", "walked", "."])
        assert held[1].tense is Tense.PAST

    def test_determiner_stays_det_in_context(self):
        X, y = _treebank(200)
        tagger = PerceptronTagger(epochs=5, seed=2).fit(X, y)
        tags = tagger.predict([["the", "dog", "slept", "."]])[0]
        assert tags[0] == "DT"
        assert tagger.predict([["the"]]) == [["DT"]]

    def test_unfitted_rejected(self):
        with pytest.raises(RuntimeError):
            PerceptronTagger().predict([["hi"]])


class TestPersistence:
    def test_round_trip(self, tmp_path):
        X, y = _treebank(40)
        tagger = PerceptronTagger(epochs=3, seed=5).fit(X, y)
        path = tmp_path / "tagger.json"
        tagger.save(path)
        loaded = PerceptronTagger.load(path)
        assert loaded.predict(X) == tagger.predict(X)
        assert loaded.weights_ == tagger.weights_

    def test_identical_seed_identical_file_bytes(self, tmp_path):
        X, y = _treebank(40)
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        PerceptronTagger(epochs=3, seed=5).fit(X, y).save(p1)
        PerceptronTagger(epochs=3, seed=5).fit(X, y).save(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_version_header_checked(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"format": "something-else"}))
        with pytest.raises(ValueError):
            PerceptronTagger.load(path)


class TestTagCorpus:
    def test_documents_align_and_empty_posts_kept(self):
        X, y = _treebank(100)
        tagger = PerceptronTagger(epochs=3, seed=0).fit(X, y)
        corpus = Corpus(
            [
                Document(user_id="u1", label=Label.TARGET, body="I walked the dog."),
                Document(user_id="u2", label=Label.CONTROL, body=""),
            ]
        )
        tagged = tag_corpus(corpus, tagger)
        assert len(tagged) == 2
        assert tagged[0].user_id == "u1"
        assert len(tagged[0].tokens()) == 5
        assert tagged[1].sentences == []

    def test_title_prepended(self):
        X, y = _treebank(100)
        tagger = PerceptronTagger(epochs=3, seed=0).fit(X, y)
        corpus = Corpus(
            [
                Document(
                    user_id="u1",
                    label=Label.TARGET,
                    body="The dog slept.",
                    title="A quiet day.",
                )
            ]
        )
        tagged = tag_corpus(corpus, tagger)
        assert len(tagged[0].sentences) == 2
        assert tagged[0].sentences[0][0].form == "A"

    def test_messy_social_media_text_survives(self):
        X, y = _treebank(200)
        tagger = PerceptronTagger(epochs=3, seed=0).fit(X, y)
        corpus = Corpus(
            [
                Document(
                    user_id="u1",
                    label=Label.TARGET,
                    body=(
                        "can't sleep :( ... see https://example.com/post?id=1 "
                        'for more!! "whatever" -- café über & 字'
                    ),
                )
            ]
        )
        tagged = tag_corpus(corpus, tagger)
        tokens = tagged[0].tokens()
        forms = [t.form for t in tokens]
        assert "https://example.com/post?id=1" in forms
        assert "ca" in forms and "n't" in forms
        # Every token carries a valid universal tag.
        from poslens.tags import UPOS_TAGS

        assert all(t.upos in UPOS_TAGS for t in tokens)
