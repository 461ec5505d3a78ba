"""Prize ladder, risk-adjusted utility, lifelines, and action selection.

The player's next move maximizes expected utility over a decision tree
with answer / walk-away / use-lifeline forks at every decision node and
chance forks for answering.  Future stages use historical per-level
accuracies; the current stage uses the probability derived from the
question-answerer's confidence ratio.  Future values are memoized on
(stage, available lifelines) inside a :class:`DecisionPlanner`, which can
be shared across calls with identical parameters.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .ensemble import CombinedScores, confidence_ratio
from .question_bank import NUM_CHOICES, Question, classify


class Lifeline(Enum):
    FIFTY_FIFTY = "fifty_fifty"
    POLL_AUDIENCE = "poll_audience"
    PHONE_A_FRIEND = "phone_a_friend"


DEFAULT_LADDER = (
    100, 200, 300, 500, 1000, 2000, 4000, 8000,
    16000, 32000, 64000, 125000, 250000, 500000, 1000000,
)
DEFAULT_MILESTONES = {5: 1000, 10: 32000}

# Stage -> difficulty level for the standard 15-question ladder.
_STAGE_LEVELS = (1, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7)


@dataclass(frozen=True)
class GameRules:
    ladder: tuple[int, ...] = DEFAULT_LADDER
    milestone_stages: Mapping[int, int] = field(default_factory=lambda: dict(DEFAULT_MILESTONES))
    lifelines: frozenset[Lifeline] = frozenset(Lifeline)

    def __post_init__(self):
        if not self.ladder:
            raise ValueError("ladder must be non-empty")
        if len(self.ladder) > len(_STAGE_LEVELS):
            raise ValueError("ladder cannot exceed 15 stages")
        if any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ValueError("ladder must be strictly increasing")
        for stage, amount in self.milestone_stages.items():
            if not 1 <= stage <= len(self.ladder):
                raise ValueError(f"milestone stage {stage} outside the ladder")
            if self.ladder[stage - 1] != amount:
                raise ValueError(
                    f"milestone at stage {stage} must equal ladder value "
                    f"{self.ladder[stage - 1]}"
                )

    @property
    def num_stages(self) -> int:
        return len(self.ladder)

    def banked_after(self, completed_stage: int) -> int:
        """Prize held after completing ``completed_stage`` questions."""
        return self.ladder[completed_stage - 1] if completed_stage >= 1 else 0


@dataclass(frozen=True)
class GameState:
    next_stage: int
    lifelines_available: frozenset[Lifeline] = frozenset(Lifeline)
    banked_prize: int = 0


@dataclass(frozen=True)
class RiskParams:
    """Exponential-utility risk attitude; ``k=None`` means risk neutral."""

    k: float | None = 250000.0
    alpha: float = 4.0

    def __post_init__(self):
        if self.k is not None and self.k <= 0:
            raise ValueError("k must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @classmethod
    def risk_neutral(cls, alpha: float = 4.0) -> "RiskParams":
        return cls(k=None, alpha=alpha)


@dataclass(frozen=True)
class LevelAccuracy:
    p_level: Mapping[int, float]

    def __post_init__(self):
        for level, p in self.p_level.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"level {level} probability {p} outside [0, 1]")

    def p(self, level: int) -> float:
        return self.p_level[level]


@dataclass(frozen=True)
class LifelineSpec:
    """Model for one lifeline.

    ``historical_boost`` competes with the quadratic boost inside
    :func:`lifeline_boost`; ``vote_accuracy`` and ``expert_weight`` are
    used only by the two vote-style lifelines.
    """

    historical_boost: float = 0.0
    vote_accuracy: Mapping[int, float] | None = None
    expert_weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.historical_boost <= 1.0:
            raise ValueError("historical_boost must lie in [0, 1]")
        if self.expert_weight < 0:
            raise ValueError("expert_weight must be >= 0")
        if self.vote_accuracy is not None:
            for level, p in self.vote_accuracy.items():
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"vote accuracy for level {level} outside [0, 1]")


@dataclass(frozen=True)
class LifelineModel:
    specs: Mapping[Lifeline, LifelineSpec] = field(
        default_factory=lambda: {kind: LifelineSpec() for kind in Lifeline}
    )

    def spec(self, kind: Lifeline) -> LifelineSpec:
        return self.specs.get(kind, LifelineSpec())


class ActionKind(Enum):
    ANSWER = "answer"
    WALK_AWAY = "walk_away"
    USE_LIFELINE = "use_lifeline"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    lifeline: Lifeline | None = None

    def label(self) -> str:
        if self.kind is ActionKind.USE_LIFELINE:
            assert self.lifeline is not None
            return self.lifeline.value
        return self.kind.value


ANSWER = Action(ActionKind.ANSWER)
WALK_AWAY = Action(ActionKind.WALK_AWAY)

# Deterministic preference order for exact expected-utility ties.
_TIE_ORDER = (
    ANSWER,
    Action(ActionKind.USE_LIFELINE, Lifeline.FIFTY_FIFTY),
    Action(ActionKind.USE_LIFELINE, Lifeline.POLL_AUDIENCE),
    Action(ActionKind.USE_LIFELINE, Lifeline.PHONE_A_FRIEND),
    WALK_AWAY,
)


@dataclass(frozen=True)
class ActionChoice:
    action: Action
    utilities: dict[Action, float]

    @property
    def value(self) -> float:
        return self.utilities[self.action]


def utility(amount: float, risk: RiskParams) -> float:
    """Risk-adjusted utility of a dollar amount.

    Risk-neutral mode returns the amount itself; this is the exact k -> inf
    limit, not a large-k approximation, so no cancellation occurs.
    """
    if amount < 0:
        raise ValueError("amount must be non-negative")
    if risk.k is None:
        return float(amount)
    return -math.expm1(-amount / risk.k)


def safe_amount(completed_stage: int, rules: GameRules = GameRules()) -> int:
    """Guaranteed payout after a wrong answer: the best milestone reached."""
    best = 0
    for stage, amount in rules.milestone_stages.items():
        if completed_stage >= stage and amount > best:
            best = amount
    return best


def stage_to_level(stage: int) -> int:
    """Difficulty level (1-7) for a ladder stage (1-15)."""
    if not 1 <= stage <= len(_STAGE_LEVELS):
        raise ValueError(f"stage {stage} outside [1, {len(_STAGE_LEVELS)}]")
    return _STAGE_LEVELS[stage - 1]


def question_probability(x: float, alpha: float) -> float:
    """Estimated success probability 1 - x**alpha from a confidence ratio."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    return 1.0 - x**alpha


def lifeline_boost(p: float, historical: float) -> float:
    """Post-lifeline success probability: max of -p^2 + 2p and the
    lifeline's historical performance."""
    return max(-p * p + 2.0 * p, historical)


class DecisionPlanner:
    """Expected-utility evaluator for one fixed parameter set.

    The full future-value table over (stage, surviving lifeline subset) is
    built once up front, so a long simulation pays for the tree once.  The
    planner is immutable after construction and safe to share across
    threads.  Lifeline subsets are kept as bitmasks internally because the
    table is consulted on every simulated question.
    """

    def __init__(
        self,
        levels: LevelAccuracy,
        risk: RiskParams,
        lifelines: LifelineModel = LifelineModel(),
        rules: GameRules = GameRules(),
    ):
        self.levels = levels
        self.risk = risk
        self.lifelines = lifelines
        self.rules = rules

        self._kinds = tuple(
            kind for kind in Lifeline if kind in rules.lifelines
        )
        self._bit = {kind: 1 << i for i, kind in enumerate(self._kinds)}
        self._hist = tuple(
            lifelines.spec(kind).historical_boost for kind in self._kinds
        )
        n = rules.num_stages
        self._fail_u = [utility(safe_amount(s - 1, rules), risk) for s in range(1, n + 1)]
        self._walk_u = [utility(rules.banked_after(s - 1), risk) for s in range(1, n + 1)]
        self._p_stage = [levels.p(stage_to_level(s)) for s in range(1, n + 1)]
        win_u = utility(rules.ladder[-1], risk)

        full = (1 << len(self._kinds)) - 1
        table = [[win_u] * (full + 1) for _ in range(n + 2)]
        for stage in range(n, 0, -1):
            for mask in range(full + 1):
                table[stage][mask] = self._stage_value(
                    table, stage, mask, self._p_stage[stage - 1],
                    self._walk_u[stage - 1],
                )
        self._table = table

    def _stage_value(
        self, table, stage: int, mask: int, p: float, walk_u: float
    ) -> float:
        """Best value at a decision node: walk, answer, or burn a lifeline."""
        answer = p * table[stage + 1][mask] + (1.0 - p) * self._fail_u[stage - 1]
        best = answer if answer > walk_u else walk_u
        remaining = mask
        while remaining:
            bit = remaining & -remaining
            remaining ^= bit
            boosted = lifeline_boost(p, self._hist[bit.bit_length() - 1])
            value = self._stage_value(table, stage, mask ^ bit, boosted, walk_u)
            if value > best:
                best = value
        return best

    def _mask(self, available: frozenset[Lifeline]) -> int:
        mask = 0
        for kind in available:
            bit = self._bit.get(kind)
            if bit is not None:
                mask |= bit
        return mask

    def future_value(self, stage: int, available: frozenset[Lifeline]) -> float:
        """Value of reaching ``stage`` with the given lifelines intact."""
        if stage > self.rules.num_stages:
            return self._table[self.rules.num_stages + 1][0]
        return self._table[stage][self._mask(available)]

    def best_action(self, state: GameState, p_current: float) -> ActionChoice:
        """Utility-maximizing move for the current question.

        Reports the expected utility of every available action; exact ties
        resolve in the order answer, 50/50, poll, phone, walk away.
        """
        stage = state.next_stage
        if not 1 <= stage <= self.rules.num_stages:
            raise ValueError(f"stage {stage} is terminal or out of range")
        mask = self._mask(state.lifelines_available)
        walk_u = utility(state.banked_prize, self.risk)
        utilities: dict[Action, float] = {}
        for action in _TIE_ORDER:
            if action.kind is ActionKind.ANSWER:
                utilities[action] = (
                    p_current * self._table[stage + 1][mask]
                    + (1.0 - p_current) * self._fail_u[stage - 1]
                )
            elif action.kind is ActionKind.WALK_AWAY:
                utilities[action] = walk_u
            else:
                bit = self._bit.get(action.lifeline)
                if bit is None or not mask & bit:
                    continue
                boosted = lifeline_boost(p_current, self._hist[bit.bit_length() - 1])
                utilities[action] = self._stage_value(
                    self._table, stage, mask ^ bit, boosted, walk_u
                )
        chosen = None
        for action in _TIE_ORDER:
            if action not in utilities:
                continue
            if chosen is None or utilities[action] > utilities[chosen]:
                chosen = action
        assert chosen is not None
        return ActionChoice(action=chosen, utilities=utilities)


def best_action(
    state: GameState,
    p_current: float,
    levels: LevelAccuracy,
    risk: RiskParams,
    lifelines: LifelineModel = LifelineModel(),
    rules: GameRules = GameRules(),
) -> ActionChoice:
    """One-shot convenience wrapper around :class:`DecisionPlanner`."""
    return DecisionPlanner(levels, risk, lifelines, rules).best_action(state, p_current)


def apply_fifty_fifty(
    question: Question,
    combined: CombinedScores,
    eliminator: random.Random,
) -> CombinedScores:
    """Remove two incorrect choices uniformly at random and re-decide.

    The new response is the higher-scored surviving choice (lower index on
    a tie); the new overall ratio is the lower surviving score over the
    higher (1 when the higher is 0).  Eliminated entries are zeroed.
    """
    correct = question.correct_index
    wrong = [i for i in range(NUM_CHOICES) if i != correct]
    survivor_wrong = eliminator.choice(wrong)
    survivors = sorted((correct, survivor_wrong))
    first, second = (combined.c[survivors[0]], combined.c[survivors[1]])
    chosen = survivors[0] if first >= second else survivors[1]
    high, low = max(first, second), min(first, second)
    ratio = 1.0 if high == 0 else low / high
    c = tuple(
        combined.c[i] if i in survivors else 0.0 for i in range(NUM_CHOICES)
    )
    return CombinedScores(c=c, chosen_index=chosen, overall_ratio=ratio)


def apply_vote_lifeline(
    kind: Lifeline,
    question: Question,
    combined: CombinedScores,
    model: LifelineModel,
    level: int,
    rng: random.Random,
) -> CombinedScores:
    """Mix in a poll-the-audience or phone-a-friend vote as an extra expert.

    With probability ``vote_accuracy(level)`` the vote backs the correct
    choice, otherwise a uniformly random incorrect one.  The vote vector
    is combined with the existing scores (weight 1) at the lifeline's
    expert weight; for inverted questions the vote is expressed in
    selection space, i.e. it lowers the backed choice so the argmin rule
    still favors it.
    """
    if kind is Lifeline.FIFTY_FIFTY:
        raise ValueError("50/50 is not a vote lifeline")
    spec = model.spec(kind)
    weight = spec.expert_weight
    if weight == 0:
        return combined
    if spec.vote_accuracy is None or level not in spec.vote_accuracy:
        raise ValueError(f"no vote accuracy configured for {kind.value} level {level}")
    accuracy = spec.vote_accuracy[level]

    if rng.random() < accuracy:
        target = question.correct_index
    else:
        target = rng.choice(
            [i for i in range(NUM_CHOICES) if i != question.correct_index]
        )
    inverted = classify(question).inverted
    if inverted:
        vote = tuple(0.0 if i == target else 1.0 for i in range(NUM_CHOICES))
    else:
        vote = tuple(1.0 if i == target else 0.0 for i in range(NUM_CHOICES))

    peak = max(combined.c)
    base = [v / peak for v in combined.c] if peak > 0 else [0.0] * NUM_CHOICES
    total = 1.0 + weight
    c = tuple((base[i] + weight * vote[i]) / total for i in range(NUM_CHOICES))
    chosen = min(
        range(NUM_CHOICES), key=lambda i: ((c[i], i) if inverted else (-c[i], i))
    )
    return CombinedScores(
        c=c, chosen_index=chosen, overall_ratio=confidence_ratio(c, inverted)
    )
