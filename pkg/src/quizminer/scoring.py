"""Answer-scoring strategies: result counting and the two proximity experts.

Each strategy yields one four-entry score vector per search engine.  All
strategies share the joint fallback rule: the four per-choice query plans
advance together, stage by stage, until at least one choice produces a
non-zero result count.  When every stage is exhausted without signal the
vector is all-zero and flagged ``no_signal``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .question_bank import (
    NUM_CHOICES,
    Question,
    QuestionFlags,
    tokenize,
    tokenize_and_filter,
)
from .retrieval import (
    QueryPlan,
    SearchBackend,
    build_pair_plan,
    build_query_plan,
)
from .stopwords import STOPWORDS


class Strategy(Enum):
    NAIVE_COUNT = "naive_count"
    WORD_PROXIMITY = "word_proximity"
    NOUN_PHRASE_PROXIMITY = "noun_phrase_proximity"


@dataclass(frozen=True)
class ScoreVector:
    """Four non-negative scores from one (strategy, engine) expert."""

    scores: tuple[float, float, float, float]
    strategy: Strategy
    engine_id: str
    no_signal: bool = False

    def __post_init__(self):
        if len(self.scores) != NUM_CHOICES:
            raise ValueError("score vector must have four entries")
        if any(not math.isfinite(s) or s < 0 for s in self.scores):
            raise ValueError("scores must be finite and non-negative")


@dataclass(frozen=True)
class ProximityParams:
    radius: int = 20
    docs_per_query: int = 10

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if self.docs_per_query < 1:
            raise ValueError("docs_per_query must be >= 1")


@dataclass(frozen=True)
class NounPhrase:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("noun phrase must be non-empty")


def distance_score(
    word_list: list[str] | tuple[str, ...],
    q_words: set[str] | frozenset[str],
    a_words: set[str] | frozenset[str],
    radius: int,
) -> float:
    """Proximity credit for question words near answer-word occurrences.

    Every question-word occurrence within ``radius`` positions of an
    answer-word occurrence contributes ``(radius - distance) / radius``;
    the total is averaged over answer-word occurrences.  A position never
    scores against itself, and window positions outside the list are
    skipped.  Returns 0 when no answer word occurs.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    n = len(word_list)
    score = 0.0
    answer_words = 0
    for i in range(n):
        if word_list[i] in a_words:
            answer_words += 1
            lo = max(0, i - radius)
            hi = min(n - 1, i + radius)
            for j in range(lo, hi + 1):
                if j != i and word_list[j] in q_words:
                    score += (radius - abs(i - j)) / radius
    if answer_words == 0:
        return 0.0
    return score / answer_words


def _first_stage_with_signal(
    backend: SearchBackend, plans: list[QueryPlan]
) -> tuple[int, list[int]] | None:
    """Advance all plans together; return (stage, counts) at first signal."""
    longest = max(len(p) for p in plans)
    for stage in range(longest):
        counts = [backend.count_results(p.stage(stage)) for p in plans]
        if any(counts):
            return stage, counts
    return None


def naive_counts(
    question: Question,
    flags: QuestionFlags,
    backend: SearchBackend,
    stopwords: frozenset[str] = STOPWORDS,
) -> ScoreVector:
    """Result counts per choice at the first fallback stage with signal."""
    plans = [
        build_query_plan(question, flags, choice, stopwords)
        for choice in question.choices
    ]
    hit = _first_stage_with_signal(backend, plans)
    if hit is None:
        return ScoreVector(
            scores=(0.0,) * 4, strategy=Strategy.NAIVE_COUNT,
            engine_id=backend.engine_id, no_signal=True,
        )
    _, counts = hit
    return ScoreVector(
        scores=tuple(float(c) for c in counts),
        strategy=Strategy.NAIVE_COUNT,
        engine_id=backend.engine_id,
    )


def proximity_strategy(
    question: Question,
    flags: QuestionFlags,
    backend: SearchBackend,
    params: ProximityParams = ProximityParams(),
    stopwords: frozenset[str] = STOPWORDS,
) -> ScoreVector:
    """Sum of document proximity scores per choice.

    Uses the same per-choice plans and joint fallback as result counting,
    then scores the top fetched documents with :func:`distance_score`
    against the filtered question words.
    """
    plans = [
        build_query_plan(question, flags, choice, stopwords)
        for choice in question.choices
    ]
    hit = _first_stage_with_signal(backend, plans)
    if hit is None:
        return ScoreVector(
            scores=(0.0,) * 4, strategy=Strategy.WORD_PROXIMITY,
            engine_id=backend.engine_id, no_signal=True,
        )
    stage, _ = hit
    q_words = frozenset(tokenize_and_filter(question.text, stopwords, True))
    scores = []
    for choice, plan in zip(question.choices, plans):
        a_words = frozenset(tokenize(choice))
        total = 0.0
        for doc in backend.top_documents(plan.stage(stage), params.docs_per_query):
            total += distance_score(doc.tokens, q_words, a_words, params.radius)
        scores.append(total)
    return ScoreVector(
        scores=tuple(scores),
        strategy=Strategy.WORD_PROXIMITY,
        engine_id=backend.engine_id,
    )


# --- shallow noun-phrase chunker ---------------------------------------------

_SINGULAR_DETERMINERS = frozenset(
    {"a", "an", "this", "that", "each", "every", "another", "one"}
)
_POSSESSIVE_CASED = re.compile(r"['’][sS](?![0-9A-Za-z])")
_WORD = re.compile(r"[^\W_]+", re.UNICODE)
_SENTENCE_SPLIT = re.compile(r"(?<=[.?!])\s+")


def _verbish(token: str) -> bool:
    # After a singular determiner the noun-phrase head cannot end in a
    # plain plural/3rd-person -s, so such a token marks the phrase edge.
    return token.endswith("s") and not token.endswith("ss") and len(token) > 2


def extract_noun_phrases(
    text: str, stopwords: frozenset[str] = STOPWORDS
) -> list[NounPhrase]:
    """Deterministic shallow noun-phrase extraction.

    Two rules: (a) maximal runs of capitalized tokens away from sentence
    starts, with possessives stripped; (b) runs of non-stopword tokens,
    trimmed after the head when introduced by a singular determiner.
    Duplicates keep their first occurrence; phrases made entirely of
    stopwords are dropped.  When nothing is found, the filtered question
    tokens are returned as a single fallback pseudo-phrase.
    """
    tokens: list[str] = []
    sentence_initial: list[bool] = []
    for sentence in _SENTENCE_SPLIT.split(text):
        words = _WORD.findall(_POSSESSIVE_CASED.sub("", sentence))
        for k, word in enumerate(words):
            tokens.append(word)
            sentence_initial.append(k == 0)

    n = len(tokens)
    claimed = [False] * n
    found: list[tuple[int, tuple[str, ...]]] = []

    i = 0
    while i < n:
        if tokens[i][0].isupper() and not sentence_initial[i]:
            start = i
            while i < n and tokens[i][0].isupper() and not sentence_initial[i]:
                claimed[i] = True
                i += 1
            found.append((start, tuple(t.lower() for t in tokens[start:i])))
        else:
            i += 1

    i = 0
    while i < n:
        low = tokens[i].lower()
        if claimed[i] or low in stopwords:
            i += 1
            continue
        start = i
        chunk: list[str] = []
        while i < n and not claimed[i] and tokens[i].lower() not in stopwords:
            chunk.append(tokens[i].lower())
            i += 1
        if start > 0 and tokens[start - 1].lower() in _SINGULAR_DETERMINERS:
            for cut in range(1, len(chunk)):
                if _verbish(chunk[cut]):
                    chunk = chunk[:cut]
                    break
        found.append((start, tuple(chunk)))

    found.sort(key=lambda item: item[0])
    phrases: list[NounPhrase] = []
    seen: set[tuple[str, ...]] = set()
    for _, phrase in found:
        if phrase in seen:
            continue
        seen.add(phrase)
        if all(t in stopwords for t in phrase):
            continue
        phrases.append(NounPhrase(tokens=phrase))

    if not phrases:
        fallback = tuple(tokenize_and_filter(text, stopwords, True))
        if fallback:
            phrases.append(NounPhrase(tokens=fallback))
    return phrases


def noun_phrase_strategy(
    question: Question,
    flags: QuestionFlags,
    backend: SearchBackend,
    params: ProximityParams = ProximityParams(),
    stopwords: frozenset[str] = STOPWORDS,
) -> ScoreVector:
    """Proximity scores accumulated over {noun-phrase, answer} pair queries.

    For every extracted phrase, the four per-choice pair plans advance
    jointly; fetched documents contribute ``distance_score`` computed
    against the phrase's own tokens.  Contributions accumulate in (phrase,
    choice, document-rank) order so results are bit-stable.
    """
    phrases = extract_noun_phrases(question.text, stopwords)
    scores = [0.0] * NUM_CHOICES
    saw_signal = False
    for phrase in phrases:
        plans = [build_pair_plan(phrase.tokens, choice) for choice in question.choices]
        hit = _first_stage_with_signal(backend, plans)
        if hit is None:
            continue
        saw_signal = True
        stage, _ = hit
        q_words = frozenset(phrase.tokens)
        for idx, (choice, plan) in enumerate(zip(question.choices, plans)):
            a_words = frozenset(tokenize(choice))
            for doc in backend.top_documents(plan.stage(stage), params.docs_per_query):
                scores[idx] += distance_score(doc.tokens, q_words, a_words, params.radius)
    return ScoreVector(
        scores=tuple(scores),
        strategy=Strategy.NOUN_PHRASE_PROXIMITY,
        engine_id=backend.engine_id,
        no_signal=not saw_signal,
    )
