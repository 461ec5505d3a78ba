"""Monte Carlo game simulation, sweeps, and accuracy calibration.

Games are independent: each one runs on its own RNG stream derived by
hashing (seed, game index), so results are identical whether games run
sequentially or on a thread pool, and a report is reproducible
byte-for-byte from its seed and parameters.
"""

from __future__ import annotations

import hashlib
import random
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping, Sequence

from .decision import (
    DecisionPlanner,
    GameRules,
    GameState,
    LevelAccuracy,
    Lifeline,
    LifelineModel,
    RiskParams,
    ActionKind,
    apply_fifty_fifty,
    apply_vote_lifeline,
    question_probability,
    safe_amount,
    stage_to_level,
)
from .ensemble import CombinedScores
from .question_bank import NUM_CHOICES, Question, QuestionBank


class LevelExhaustedError(RuntimeError):
    """A game needed more questions from a level than the bank holds."""


class QAOracle(ABC):
    """Answers one question with combined scores and a confidence ratio."""

    @abstractmethod
    def answer(self, question: Question, rng: random.Random) -> CombinedScores:
        """Return the oracle's decision; ``rng`` feeds stochastic oracles."""


class PipelineOracle(QAOracle):
    """Wraps the full corpus-mining ensemble as a game oracle.

    The pipeline is deterministic per question, so results are cached by
    question id; the cache only ever stores the one equal value per key,
    which keeps concurrent games safe.
    """

    def __init__(self, answer_fn: Callable[[Question], CombinedScores]):
        self._answer_fn = answer_fn
        self._cache: dict[str, CombinedScores] = {}

    def answer(self, question: Question, rng: random.Random) -> CombinedScores:
        hit = self._cache.get(question.id)
        if hit is None:
            hit = self._answer_fn(question)
            self._cache[question.id] = hit
        return hit


@dataclass(frozen=True)
class SyntheticOracle(QAOracle):
    """Statistical stand-in for the QA pipeline.

    Correctness per question is Bernoulli at the level's probability; the
    confidence ratio is Beta-distributed with mean 0.34 when correct and
    0.58 when incorrect (the concentration knob shapes the spread, the
    means are fixed by measurement).
    """

    p_level: Mapping[int, float]
    ratio_mean_correct: float = 0.34
    ratio_mean_incorrect: float = 0.58
    concentration: float = 5.0

    def __post_init__(self):
        for level, p in self.p_level.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"level {level} probability outside [0, 1]")
        for mean in (self.ratio_mean_correct, self.ratio_mean_incorrect):
            if not 0.0 < mean < 1.0:
                raise ValueError("ratio means must lie strictly inside (0, 1)")
        if self.concentration <= 0:
            raise ValueError("concentration must be positive")

    def answer(self, question: Question, rng: random.Random) -> CombinedScores:
        correct, x = synthetic_answer(question.level, self, rng)
        wrong = [i for i in range(NUM_CHOICES) if i != question.correct_index]
        if correct:
            chosen = question.correct_index
            runner_up = rng.choice(wrong)
        else:
            chosen = rng.choice(wrong)
            runner_up = question.correct_index
        rest = [i for i in range(NUM_CHOICES) if i not in (chosen, runner_up)]
        c = [0.0] * NUM_CHOICES
        c[chosen] = 1.0
        c[runner_up] = x
        c[rest[0]] = x * x
        c[rest[1]] = x * x * x
        return CombinedScores(c=tuple(c), chosen_index=chosen, overall_ratio=x)


def synthetic_answer(
    level: int, model: SyntheticOracle, rng: random.Random
) -> tuple[bool, float]:
    """Draw (answered correctly?, confidence ratio) for one question."""
    correct = rng.random() < model.p_level[level]
    mean = model.ratio_mean_correct if correct else model.ratio_mean_incorrect
    nu = model.concentration
    x = rng.betavariate(mean * nu, (1.0 - mean) * nu)
    return correct, x


@dataclass(frozen=True)
class SimulationParams:
    levels: LevelAccuracy
    n_games: int = 10000
    risk: RiskParams = RiskParams()
    handicap: int = 0
    seed: int = 0
    lifelines: LifelineModel = LifelineModel()
    rules: GameRules = GameRules()
    forced_answer: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.n_games < 1:
            raise ValueError("n_games must be >= 1")
        if not 0 <= self.handicap <= self.rules.num_stages:
            raise ValueError(
                f"handicap must lie in [0, {self.rules.num_stages}]"
            )
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


class EndReason(Enum):
    WON = "won"
    WRONG = "wrong"
    WALKED = "walked"


@dataclass(frozen=True)
class StageEvent:
    """One question faced: where, with what outcome, and lifeline activity."""

    stage: int
    banked: int
    outcome: str  # "right" | "wrong" | "stop"
    ll_used: int = 0
    ll_good: int = 0
    ll_bad: int = 0


@dataclass(frozen=True)
class GameRecord:
    final_prize: int
    questions_right: int
    end_stage: int
    end_reason: EndReason
    lifelines_used: int
    lifelines_good: int
    lifelines_bad: int
    events: tuple[StageEvent, ...] = ()


def _question_pools(bank: QuestionBank) -> dict[int, list[Question]]:
    index = {q.id: q for q in bank.questions}
    return {
        level: [index[qid] for qid in ids] for level, ids in bank.by_level.items()
    }


def play_game(
    params: SimulationParams,
    rng: random.Random,
    bank: QuestionBank,
    oracle: QAOracle,
    planner: DecisionPlanner | None = None,
    pools: dict[int, list[Question]] | None = None,
    observer: Callable[[dict], None] | None = None,
) -> GameRecord:
    """Play one full game and return its record.

    The game starts at stage ``handicap + 1`` with the corresponding prize
    banked and all lifelines intact.  Lifelines mutate the pending answer
    and confidence, after which the decision re-evaluates; a game never
    repeats a question.  ``observer``, when given, receives one dict per
    decision and per stage outcome for tracing.
    """
    rules = params.rules
    if planner is None:
        planner = DecisionPlanner(params.levels, params.risk, params.lifelines, rules)
    if pools is None:
        pools = _question_pools(bank)

    stage = params.handicap + 1
    banked = rules.banked_after(params.handicap)
    available = set(rules.lifelines)
    used_ids: set[str] = set()
    events: list[StageEvent] = []
    right = 0
    total_used = total_good = total_bad = 0

    while stage <= rules.num_stages:
        level = stage_to_level(stage)
        pool = [q for q in pools.get(level, ()) if q.id not in used_ids]
        if not pool:
            raise LevelExhaustedError(
                f"level {level} has no unused questions for stage {stage}"
            )
        question = pool[rng.randrange(len(pool))]
        used_ids.add(question.id)

        combined = oracle.answer(question, rng)
        p = question_probability(combined.overall_ratio, params.risk.alpha)
        stage_used = stage_good = stage_bad = 0

        while True:
            if params.forced_answer:
                kind = ActionKind.ANSWER
                lifeline = None
                if observer is not None:
                    observer(
                        {
                            "type": "decision",
                            "stage": stage,
                            "banked": banked,
                            "question_id": question.id,
                            "pending_choice": combined.chosen_index,
                            "ratio": combined.overall_ratio,
                            "p": p,
                            "action": "answer",
                        }
                    )
            else:
                choice = planner.best_action(
                    GameState(
                        next_stage=stage,
                        lifelines_available=frozenset(available),
                        banked_prize=banked,
                    ),
                    p,
                )
                kind = choice.action.kind
                lifeline = choice.action.lifeline
                if observer is not None:
                    observer(
                        {
                            "type": "decision",
                            "stage": stage,
                            "banked": banked,
                            "question_id": question.id,
                            "pending_choice": combined.chosen_index,
                            "ratio": combined.overall_ratio,
                            "p": p,
                            "utilities": {
                                a.label(): u for a, u in choice.utilities.items()
                            },
                            "action": choice.action.label(),
                        }
                    )
            if kind is not ActionKind.USE_LIFELINE:
                break
            assert lifeline is not None
            before = combined.chosen_index
            if lifeline is Lifeline.FIFTY_FIFTY:
                combined = apply_fifty_fifty(question, combined, rng)
            else:
                combined = apply_vote_lifeline(
                    lifeline, question, combined, params.lifelines, level, rng
                )
            after = combined.chosen_index
            if after != before:
                if after == question.correct_index:
                    stage_good += 1
                elif before == question.correct_index:
                    stage_bad += 1
            available.discard(lifeline)
            stage_used += 1
            p = question_probability(combined.overall_ratio, params.risk.alpha)

        total_used += stage_used
        total_good += stage_good
        total_bad += stage_bad

        if kind is ActionKind.WALK_AWAY:
            events.append(
                StageEvent(stage, banked, "stop", stage_used, stage_good, stage_bad)
            )
            if observer is not None:
                observer({"type": "end", "reason": "walked", "prize": banked})
            return GameRecord(
                final_prize=banked,
                questions_right=right,
                end_stage=stage,
                end_reason=EndReason.WALKED,
                lifelines_used=total_used,
                lifelines_good=total_good,
                lifelines_bad=total_bad,
                events=tuple(events),
            )

        if combined.chosen_index == question.correct_index:
            events.append(
                StageEvent(stage, banked, "right", stage_used, stage_good, stage_bad)
            )
            right += 1
            banked = rules.ladder[stage - 1]
            if observer is not None:
                observer({"type": "outcome", "stage": stage, "result": "right",
                          "banked": banked})
            stage += 1
        else:
            events.append(
                StageEvent(stage, banked, "wrong", stage_used, stage_good, stage_bad)
            )
            prize = safe_amount(stage - 1, rules)
            if observer is not None:
                observer({"type": "outcome", "stage": stage, "result": "wrong",
                          "banked": prize})
                observer({"type": "end", "reason": "wrong", "prize": prize})
            return GameRecord(
                final_prize=prize,
                questions_right=right,
                end_stage=stage,
                end_reason=EndReason.WRONG,
                lifelines_used=total_used,
                lifelines_good=total_good,
                lifelines_bad=total_bad,
                events=tuple(events),
            )

    if observer is not None:
        observer({"type": "end", "reason": "won", "prize": rules.ladder[-1]})
    return GameRecord(
        final_prize=rules.ladder[-1],
        questions_right=right,
        end_stage=rules.num_stages,
        end_reason=EndReason.WON,
        lifelines_used=total_used,
        lifelines_good=total_good,
        lifelines_bad=total_bad,
        events=tuple(events),
    )


@dataclass(frozen=True)
class StageRow:
    """Per-prize-level tallies; 'ending' counts games whose final prize
    equals this level."""

    prize_level: int
    ending: int
    wrong: int
    right: int
    stop: int
    ll_used: int
    ll_good: int
    ll_bad: int


@dataclass(frozen=True)
class SimulationReport:
    n_games: int
    rows: tuple[StageRow, ...]
    avg_right: float
    avg_winnings: float
    std_winnings: float
    total_ll_used: int
    total_ll_good: int
    total_ll_bad: int

    @property
    def pct_zero(self) -> float:
        zero = next((r.ending for r in self.rows if r.prize_level == 0), 0)
        return zero / self.n_games

    def to_dict(self) -> dict:
        return {
            "n_games": self.n_games,
            "rows": [
                {
                    "prize_level": r.prize_level,
                    "ending": r.ending,
                    "wrong": r.wrong,
                    "right": r.right,
                    "stop": r.stop,
                    "ll_used": r.ll_used,
                    "ll_good": r.ll_good,
                    "ll_bad": r.ll_bad,
                }
                for r in self.rows
            ],
            "summary": {
                "avg_right": self.avg_right,
                "avg_winnings": self.avg_winnings,
                "std_winnings": self.std_winnings,
                "pct_zero": self.pct_zero,
                "ll_used": self.total_ll_used,
                "ll_good": self.total_ll_good,
                "ll_bad": self.total_ll_bad,
            },
        }


def _stream_seed(seed: int, index: int | str) -> int:
    digest = hashlib.sha256(f"{seed}:{index}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def _aggregate(params: SimulationParams, records: Sequence[GameRecord]) -> SimulationReport:
    levels = [0, *params.rules.ladder]
    slot = {level: i for i, level in enumerate(levels)}
    ending = [0] * len(levels)
    wrong = [0] * len(levels)
    right = [0] * len(levels)
    stop = [0] * len(levels)
    ll_used = [0] * len(levels)
    ll_good = [0] * len(levels)
    ll_bad = [0] * len(levels)

    for record in records:
        ending[slot[record.final_prize]] += 1
        for event in record.events:
            i = slot[event.banked]
            if event.outcome == "right":
                right[i] += 1
            elif event.outcome == "wrong":
                wrong[i] += 1
            else:
                stop[i] += 1
            ll_used[i] += event.ll_used
            ll_good[i] += event.ll_good
            ll_bad[i] += event.ll_bad

    n = len(records)
    mean_prize = sum(r.final_prize for r in records) / n
    variance = sum((r.final_prize - mean_prize) ** 2 for r in records) / n
    rows = tuple(
        StageRow(
            prize_level=level,
            ending=ending[i],
            wrong=wrong[i],
            right=right[i],
            stop=stop[i],
            ll_used=ll_used[i],
            ll_good=ll_good[i],
            ll_bad=ll_bad[i],
        )
        for i, level in enumerate(levels)
    )
    return SimulationReport(
        n_games=n,
        rows=rows,
        avg_right=sum(r.questions_right for r in records) / n,
        avg_winnings=mean_prize,
        std_winnings=variance**0.5,
        total_ll_used=sum(r.lifelines_used for r in records),
        total_ll_good=sum(r.lifelines_good for r in records),
        total_ll_bad=sum(r.lifelines_bad for r in records),
    )


def run_games(
    params: SimulationParams, bank: QuestionBank, oracle: QAOracle
) -> list[GameRecord]:
    """Play ``n_games`` independent games on seed-derived RNG streams.

    Records come back in game-index order regardless of the worker count,
    so any aggregate over them is order-stable.
    """
    planner = DecisionPlanner(params.levels, params.risk, params.lifelines, params.rules)
    pools = _question_pools(bank)
    records: list[GameRecord | None] = [None] * params.n_games

    def run(index: int) -> None:
        rng = random.Random(_stream_seed(params.seed, index))
        records[index] = play_game(params, rng, bank, oracle, planner, pools)

    if params.workers > 1:
        with ThreadPoolExecutor(max_workers=params.workers) as pool:
            list(pool.map(run, range(params.n_games)))
    else:
        for index in range(params.n_games):
            run(index)

    done = [r for r in records if r is not None]
    assert len(done) == params.n_games
    return done


def simulate(
    params: SimulationParams, bank: QuestionBank, oracle: QAOracle
) -> SimulationReport:
    """Play ``n_games`` independent games and aggregate them.

    Deterministic for a fixed (seed, params, bank, oracle config): the
    report is identical for any worker count.
    """
    return _aggregate(params, run_games(params, bank, oracle))


@dataclass(frozen=True)
class SweepTable:
    dimension: str
    header: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        for row in self.rows:
            lines.append(",".join(_format_cell(v) for v in row))
        return "\n".join(lines) + "\n"


def _format_cell(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


GAME_SWEEP_HEADER = ("value", "avg_winnings", "std_winnings", "avg_right", "pct_zero")


def sweep(
    params: SimulationParams,
    dimension: str,
    values: Sequence[float],
    bank: QuestionBank | None = None,
    oracle: QAOracle | None = None,
    accuracy_fn: Callable[[float], float] | None = None,
) -> SweepTable:
    """Re-run the simulation (or a QA accuracy evaluation, for the radius
    dimension) across parameter values.

    Every point reuses the same base seed so the per-game RNG streams are
    common across values and differences reflect the parameter alone.
    """
    if not values:
        raise ValueError("values must be non-empty")
    if dimension == "radius":
        if accuracy_fn is None:
            raise ValueError("radius sweeps need an accuracy evaluation function")
        rows = tuple((float(v), float(accuracy_fn(v))) for v in values)
        return SweepTable(dimension=dimension, header=("value", "accuracy"), rows=rows)

    if bank is None or oracle is None:
        raise ValueError(f"{dimension} sweeps need a bank and an oracle")
    rows = []
    for value in values:
        if dimension == "k":
            point = replace(params, risk=replace(params.risk, k=float(value)))
        elif dimension == "alpha":
            point = replace(params, risk=replace(params.risk, alpha=float(value)))
        elif dimension == "handicap":
            point = replace(params, handicap=int(value))
        else:
            raise ValueError(f"unknown sweep dimension {dimension!r}")
        report = simulate(point, bank, oracle)
        rows.append(
            (
                float(value),
                report.avg_winnings,
                report.std_winnings,
                report.avg_right,
                report.pct_zero,
            )
        )
    return SweepTable(dimension=dimension, header=GAME_SWEEP_HEADER, rows=tuple(rows))


def calibrate(bank: QuestionBank, oracle: QAOracle, seed: int = 0) -> LevelAccuracy:
    """Measure the oracle's per-level accuracy over the whole bank."""
    p_level: dict[int, float] = {}
    for level, ids in sorted(bank.by_level.items()):
        if not ids:
            raise ValueError(f"level {level} bucket is empty")
        rng = random.Random(_stream_seed(seed, f"calibrate-{level}"))
        correct = 0
        for question in bank.level_questions(level):
            decision = oracle.answer(question, rng)
            correct += decision.chosen_index == question.correct_index
        p_level[level] = correct / len(ids)
    return LevelAccuracy(p_level=p_level)


def evaluate_accuracy(
    bank: QuestionBank, oracle: QAOracle, seed: int = 0
) -> dict:
    """Overall and per-level QA accuracy of an oracle over a bank."""
    per_level: dict[int, dict[str, float]] = {}
    total = correct_total = 0
    for level, ids in sorted(bank.by_level.items()):
        if not ids:
            continue
        rng = random.Random(_stream_seed(seed, f"eval-{level}"))
        correct = 0
        for question in bank.level_questions(level):
            decision = oracle.answer(question, rng)
            correct += decision.chosen_index == question.correct_index
        per_level[level] = {"n": len(ids), "accuracy": correct / len(ids)}
        total += len(ids)
        correct_total += correct
    return {
        "n": total,
        "accuracy": correct_total / total if total else 0.0,
        "per_level": per_level,
    }
