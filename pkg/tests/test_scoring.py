from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from quizminer.question_bank import Question, classify
from quizminer.scoring import (
    ProximityParams,
    Strategy,
    distance_score,
    extract_noun_phrases,
    naive_counts,
    noun_phrase_strategy,
    proximity_strategy,
)
from quizminer.stopwords import STOPWORDS

from conftest import make_index


def reference_distance_score(word_list, q_words, a_words, rad):
    """Straight-line transcription of the proximity pseudocode, 1-based.

    Kept deliberately dumb and separate from the implementation; the two
    must agree exactly.
    """
    score = 0.0
    answer_words = 0
    length = len(word_list)
    for i in range(1, length + 1):
        if word_list[i - 1] in a_words:
            answer_words = answer_words + 1
            for j in range(i - rad, i + rad + 1):
                if j < 1 or j > length or j == i:
                    continue
                if word_list[j - 1] in q_words:
                    score += (rad - abs(i - j)) / rad
    if answer_words == 0:
        return 0.0
    return score / answer_words


FRANCE = Question(
    id="q", text="What is the capital of France?",
    choices=("Paris", "Berlin", "Rome", "Madrid"), correct_index=0, level=1,
)


class TestDistanceScore:
    def test_single_contribution(self):
        words = ["the", "eiffel", "tower", "is", "in", "paris"]
        assert distance_score(words, {"eiffel", "tower"}, {"paris"}, 4) == 0.25

    def test_no_answer_word_returns_zero(self):
        assert distance_score(["only", "question", "words"], {"question"}, {"x"}, 5) == 0.0

    def test_average_over_answer_occurrences(self):
        words = ["paris", "hosts", "the", "tower", "near", "paris"]
        assert distance_score(words, {"tower"}, {"paris"}, 3) == pytest.approx(1 / 6)

    def test_radius_must_be_positive(self):
        with pytest.raises(ValueError):
            distance_score(["a"], {"a"}, {"a"}, 0)

    def test_zero_when_no_question_word_present(self):
        assert distance_score(["paris", "paris"], {"absent"}, {"paris"}, 10) == 0.0

    def test_self_position_never_scores(self):
        # "paris" is both a question word and an answer word.
        assert distance_score(["paris"], {"paris"}, {"paris"}, 5) == 0.0

    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_matches_reference_transcription(self, data):
        vocab = [f"w{i}" for i in range(8)]
        words = data.draw(st.lists(st.sampled_from(vocab), max_size=50))
        q_words = set(data.draw(st.lists(st.sampled_from(vocab), max_size=4)))
        a_words = set(data.draw(st.lists(st.sampled_from(vocab), max_size=4)))
        rad = data.draw(st.integers(min_value=1, max_value=10))
        got = distance_score(words, q_words, a_words, rad)
        want = reference_distance_score(words, q_words, a_words, rad)
        assert got == pytest.approx(want, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_invariant_under_distant_padding(self, data):
        words = ["question", "word", "answer"]
        rad = data.draw(st.integers(min_value=1, max_value=5))
        pad = data.draw(st.integers(min_value=rad + 1, max_value=rad + 20))
        padded = ["pad"] * pad + words + ["pad"] * pad
        base = distance_score(words, {"question", "word"}, {"answer"}, rad)
        assert distance_score(padded, {"question", "word"}, {"answer"}, rad) == base


class TestNaiveCounts:
    def test_mini_corpus_counts(self, mini_index):
        vector = naive_counts(FRANCE, classify(FRANCE), mini_index)
        assert vector.scores == (1.0, 0.0, 0.0, 0.0)
        assert vector.strategy is Strategy.NAIVE_COUNT
        assert not vector.no_signal

    def test_fallback_reaches_answer_only_stage(self):
        # No question term appears anywhere, but "berlin" does.
        index = make_index({"d1": "berlin wall segments on display"})
        vector = naive_counts(FRANCE, classify(FRANCE), index)
        assert vector.scores[1] > 0
        assert vector.scores[0] == 0
        assert not vector.no_signal

    def test_empty_corpus_flags_no_signal(self):
        index = make_index({})
        vector = naive_counts(FRANCE, classify(FRANCE), index)
        assert vector.scores == (0.0, 0.0, 0.0, 0.0)
        assert vector.no_signal


class TestProximityStrategy:
    def test_no_documents_gives_zero_vector(self):
        vector = proximity_strategy(FRANCE, classify(FRANCE), make_index({}))
        assert vector.scores == (0.0, 0.0, 0.0, 0.0)
        assert vector.no_signal

    def test_single_document_equals_its_distance_score(self, mini_index):
        params = ProximityParams(radius=4)
        vector = proximity_strategy(FRANCE, classify(FRANCE), mini_index, params)
        doc = mini_index.top_documents(
            __import__("quizminer.retrieval", fromlist=["Query"]).Query(
                terms=("paris", "capital", "france")
            )
        )[0]
        expected = distance_score(doc.tokens, {"capital", "france"}, {"paris"}, 4)
        assert vector.scores[0] == pytest.approx(expected)

    def test_scores_add_across_documents(self):
        text = "paris is the capital of france"
        index = make_index({"d1": text, "d2": text})
        params = ProximityParams(radius=4)
        single = make_index({"d1": text})
        one = proximity_strategy(FRANCE, classify(FRANCE), single, params).scores[0]
        two = proximity_strategy(FRANCE, classify(FRANCE), index, params).scores[0]
        assert two == pytest.approx(2 * one)


class TestNounPhrases:
    def test_capitalized_run_and_remainder(self):
        phrases = [p.tokens for p in extract_noun_phrases("Who is Flash Gordon's archenemy?")]
        assert phrases == [("flash", "gordon"), ("archenemy",)]

    def test_house_question_phrases(self):
        phrases = [p.tokens for p in extract_noun_phrases(
            "Which of these parts of a house shares its name with a viewing area "
            "on a computer screen?"
        )]
        assert ("house",) in phrases
        assert ("viewing", "area") in phrases
        assert ("computer", "screen") in phrases

    def test_phrases_never_entirely_stopwords(self):
        for text in ("Which of these is best?", "Who painted the Mona Lisa?"):
            for phrase in extract_noun_phrases(text):
                assert any(t not in STOPWORDS for t in phrase.tokens)

    def test_sentence_initial_capital_not_a_run(self):
        # "Paris" opens the sentence, so rule (a) must not claim it; it
        # surfaces through rule (b) alongside its neighbor instead.
        phrases = [p.tokens for p in extract_noun_phrases("Paris hosts the games.")]
        assert ("paris", "hosts") in phrases
        assert ("games",) in phrases

    def test_duplicates_keep_first_occurrence(self):
        phrases = [p.tokens for p in extract_noun_phrases(
            "Which famous tower, the famous tower of all towers, stands in Paris?"
        )]
        assert phrases.count(("famous", "tower")) == 1

    def test_question_without_content_tokens(self):
        assert extract_noun_phrases("Was it?") == []


class TestNounPhraseStrategy:
    def test_single_phrase_single_doc(self):
        question = Question(
            id="q", text="Who is Flash Gordon's archenemy?",
            choices=("Ming the Merciless", "Sinestro", "Lex Luthor", "Doctor Octopus"),
            correct_index=0, level=5,
        )
        index = make_index(
            {"d1": "flash gordon faces ming the merciless on mongo"}
        )
        vector = noun_phrase_strategy(question, classify(question), index,
                                      ProximityParams(radius=10))
        assert vector.strategy is Strategy.NOUN_PHRASE_PROXIMITY
        assert vector.scores[0] > 0
        assert vector.scores[1] == vector.scores[2] == vector.scores[3] == 0.0

    def test_contributions_add_over_phrases(self, mini_index):
        vector = noun_phrase_strategy(FRANCE, classify(FRANCE), mini_index,
                                      ProximityParams(radius=6))
        phrases = extract_noun_phrases(FRANCE.text)
        total = 0.0
        for phrase in phrases:
            doc = mini_index.documents()[0]
            total += distance_score(doc.tokens, frozenset(phrase.tokens), {"paris"}, 6)
        assert vector.scores[0] == pytest.approx(total)

    def test_empty_corpus_no_signal(self):
        vector = noun_phrase_strategy(FRANCE, classify(FRANCE), make_index({}))
        assert vector.no_signal
        assert vector.scores == (0.0, 0.0, 0.0, 0.0)


class TestDeterminism:
    def test_strategies_are_deterministic(self, bundled_bank, bundled_engines):
        engine = bundled_engines[0]
        question = bundled_bank.get("q33")
        flags = classify(question)
        params = ProximityParams()
        for fn in (lambda: naive_counts(question, flags, engine),
                   lambda: proximity_strategy(question, flags, engine, params),
                   lambda: noun_phrase_strategy(question, flags, engine, params)):
            assert fn().scores == fn().scores
