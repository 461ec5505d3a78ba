"""Expert combination: confidence ratios, weighting, and answer selection.

Each (strategy, engine) pair is one expert.  An expert's raw vector is
normalized by its own maximum entry, the normalized vectors are mixed
with either hand-tuned or confidence-based weights, and the answer is the
argmax of the combined scores (argmin for inverted questions).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .question_bank import NUM_CHOICES, Question, classify
from .retrieval import SearchBackend
from .scoring import (
    ProximityParams,
    ScoreVector,
    Strategy,
    naive_counts,
    noun_phrase_strategy,
    proximity_strategy,
)
from .stopwords import STOPWORDS

#: Empirically tuned per-strategy weights for hand_tuned mode.
HAND_TUNED_STRATEGY_WEIGHTS: dict[Strategy, float] = {
    Strategy.NAIVE_COUNT: 0.40,
    Strategy.WORD_PROXIMITY: 0.15,
    Strategy.NOUN_PHRASE_PROXIMITY: 0.45,
}

#: Sharpness of the confidence-to-weight map w = (1 - x**4) / T.
CONFIDENCE_EXPONENT = 4

_STRATEGY_ORDER = (
    Strategy.NAIVE_COUNT,
    Strategy.WORD_PROXIMITY,
    Strategy.NOUN_PHRASE_PROXIMITY,
)


class WeightMode(Enum):
    HAND_TUNED = "hand_tuned"
    CONFIDENCE = "confidence"


@dataclass(frozen=True)
class ExpertOpinion:
    vector: ScoreVector
    confidence_ratio: float

    def __post_init__(self):
        if not 0.0 <= self.confidence_ratio <= 1.0:
            raise ValueError("confidence ratio must lie in [0, 1]")


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]
    mode: WeightMode

    def __post_init__(self):
        if any(w < 0 or w > 1 for w in self.weights):
            raise ValueError("weights must lie in [0, 1]")
        if self.weights and abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")


@dataclass(frozen=True)
class CombinedScores:
    """Final mixed scores, the selected choice, and the overall ratio."""

    c: tuple[float, float, float, float]
    chosen_index: int
    overall_ratio: float


def confidence_ratio(scores: Sequence[float], inverted: bool = False) -> float:
    """Second-best over best score; lowest over second-lowest when inverted.

    0 means maximal confidence, 1 means a tie (or no signal at all: a zero
    denominator also yields 1).
    """
    ordered = sorted(scores)
    if inverted:
        low, second_low = ordered[0], ordered[1]
        if second_low == 0:
            return 1.0
        return low / second_low
    high, second_high = ordered[-1], ordered[-2]
    if high == 0:
        return 1.0
    return second_high / high


def confidence_weights(ratios: Sequence[float]) -> WeightVector:
    """Weights proportional to 1 - x**4; uniform when every ratio is 1."""
    raw = [1.0 - r**CONFIDENCE_EXPONENT for r in ratios]
    total = sum(raw)
    if total == 0.0:
        n = len(ratios)
        return WeightVector(weights=(1.0 / n,) * n, mode=WeightMode.CONFIDENCE)
    return WeightVector(
        weights=tuple(w / total for w in raw), mode=WeightMode.CONFIDENCE
    )


def _argbest(c: Sequence[float], inverted: bool) -> int:
    best = 0
    for i in range(1, len(c)):
        if (c[i] < c[best]) if inverted else (c[i] > c[best]):
            best = i
    return best


def select_answer(combined: CombinedScores, inverted: bool = False) -> int:
    """Argmax of the combined scores, argmin for inverted questions.

    Ties break toward the lowest index.
    """
    return _argbest(combined.c, inverted)


def _normalize(scores: Sequence[float]) -> list[float]:
    peak = max(scores)
    if peak == 0:
        return [0.0] * len(scores)
    return [s / peak for s in scores]


def combine(
    opinions: Sequence[ExpertOpinion],
    weights: WeightVector,
    inverted: bool = False,
) -> CombinedScores:
    """Mix expert vectors, each normalized by its own maximum entry.

    An all-zero vector normalizes to all zeros, so signal-free experts
    contribute nothing regardless of their weight.
    """
    if not opinions or len(opinions) != len(weights.weights):
        raise ValueError("need one weight per expert opinion")
    c = [0.0] * NUM_CHOICES
    for opinion, w in zip(opinions, weights.weights):
        normalized = _normalize(opinion.vector.scores)
        for i in range(NUM_CHOICES):
            c[i] += w * normalized[i]
    c_t = tuple(c)
    return CombinedScores(
        c=c_t,
        chosen_index=_argbest(c_t, inverted),
        overall_ratio=confidence_ratio(c_t, inverted),
    )


def hand_tuned_weights(
    pairs: Sequence[tuple[Strategy, str]],
    overrides: dict[Strategy, float] | None = None,
) -> WeightVector:
    """Distribute per-strategy weights equally across each strategy's engines.

    When only a subset of strategies is present their weights are
    renormalized so the vector still sums to 1.
    """
    table = dict(HAND_TUNED_STRATEGY_WEIGHTS)
    if overrides:
        table.update(overrides)
    present = [s for s in _STRATEGY_ORDER if any(p[0] == s for p in pairs)]
    mass = sum(table[s] for s in present)
    if mass == 0:
        raise ValueError("hand-tuned weights for present strategies sum to zero")
    counts = {s: sum(1 for p in pairs if p[0] == s) for s in present}
    weights = tuple(table[s] / mass / counts[s] for s, _ in pairs)
    return WeightVector(weights=weights, mode=WeightMode.HAND_TUNED)


_STRATEGY_FN = {
    Strategy.NAIVE_COUNT: lambda q, f, b, p, sw: naive_counts(q, f, b, sw),
    Strategy.WORD_PROXIMITY: proximity_strategy,
    Strategy.NOUN_PHRASE_PROXIMITY: noun_phrase_strategy,
}


@dataclass(frozen=True)
class AnswerBreakdown:
    """Full per-expert detail behind one combined decision."""

    combined: CombinedScores
    opinions: tuple[ExpertOpinion, ...]
    weights: WeightVector
    inverted: bool

    @property
    def no_signal(self) -> bool:
        return all(op.vector.no_signal for op in self.opinions)


def answer_question_detailed(
    question: Question,
    strategies: Sequence[Strategy] | None = None,
    engines: Sequence[SearchBackend] = (),
    weight_mode: WeightMode = WeightMode.CONFIDENCE,
    params: ProximityParams = ProximityParams(),
    stopwords: frozenset[str] = STOPWORDS,
    hand_tuned_overrides: dict[Strategy, float] | None = None,
) -> AnswerBreakdown:
    """Run every (strategy, engine) expert and combine the opinions.

    Experts are evaluated in a fixed strategy-major, engine-minor order so
    floating-point results are reproducible.
    """
    if not engines:
        raise ValueError("need at least one engine")
    chosen_strategies = [
        s for s in _STRATEGY_ORDER if strategies is None or s in strategies
    ]
    if not chosen_strategies:
        raise ValueError("need at least one strategy")

    flags = classify(question)
    opinions: list[ExpertOpinion] = []
    pairs: list[tuple[Strategy, str]] = []
    for strategy in chosen_strategies:
        fn = _STRATEGY_FN[strategy]
        for engine in engines:
            vector = fn(question, flags, engine, params, stopwords)
            opinions.append(
                ExpertOpinion(
                    vector=vector,
                    confidence_ratio=confidence_ratio(vector.scores, flags.inverted),
                )
            )
            pairs.append((strategy, engine.engine_id))

    if weight_mode is WeightMode.HAND_TUNED:
        weights = hand_tuned_weights(pairs, hand_tuned_overrides)
    else:
        weights = confidence_weights([op.confidence_ratio for op in opinions])
    combined = combine(opinions, weights, inverted=flags.inverted)
    return AnswerBreakdown(
        combined=combined,
        opinions=tuple(opinions),
        weights=weights,
        inverted=flags.inverted,
    )


def answer_question(
    question: Question,
    strategies: Sequence[Strategy] | None = None,
    engines: Sequence[SearchBackend] = (),
    weight_mode: WeightMode = WeightMode.CONFIDENCE,
    params: ProximityParams = ProximityParams(),
    stopwords: frozenset[str] = STOPWORDS,
    hand_tuned_overrides: dict[Strategy, float] | None = None,
) -> CombinedScores:
    """Combined decision for one question; see :func:`answer_question_detailed`."""
    return answer_question_detailed(
        question, strategies, engines, weight_mode, params, stopwords,
        hand_tuned_overrides,
    ).combined
