"""Structured JSON configuration for the CLI.

One config file drives every subcommand; individual flags override single
keys.  Unknown keys are rejected and referenced input paths must exist
when the file is loaded, so typos fail fast instead of producing empty
results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .decision import LevelAccuracy, Lifeline, LifelineModel, LifelineSpec, RiskParams
from .ensemble import WeightMode, answer_question
from .question_bank import Question
from .retrieval import LocalCorpusIndex, SearchBackend, index_corpus
from .scoring import ProximityParams, Strategy
from .simulator import PipelineOracle, QAOracle, SyntheticOracle


class ConfigError(ValueError):
    """Raised for malformed configuration files."""


_TOP_KEYS = {
    "bank", "corpus", "engines", "strategies", "weight_mode",
    "hand_tuned_weights", "proximity", "risk", "levels", "lifelines",
    "oracle", "seed", "n_games", "handicap", "forced_answer", "workers",
    "figures",
}
_ENGINE_KEYS = {"type", "id", "corpus", "index", "cache_dir"}
_PROXIMITY_KEYS = {"radius", "docs_per_query"}
_RISK_KEYS = {"k", "alpha"}
_ORACLE_KEYS = {
    "type", "levels", "ratio_mean_correct", "ratio_mean_incorrect", "concentration",
}
_LIFELINE_KEYS = {"historical_boost", "vote_accuracy", "expert_weight"}

#: Synthetic defaults for the vote lifelines; override them in the config
#: once real historical data exists.
DEFAULT_VOTE_ACCURACY = {
    Lifeline.POLL_AUDIENCE: {1: 0.95, 2: 0.92, 3: 0.88, 4: 0.82, 5: 0.75, 6: 0.68, 7: 0.60},
    Lifeline.PHONE_A_FRIEND: {1: 0.90, 2: 0.87, 3: 0.83, 4: 0.78, 5: 0.72, 6: 0.65, 7: 0.58},
}

DEFAULT_LEVEL_ACCURACY = {1: 0.86, 2: 0.75, 3: 0.70, 4: 0.65, 5: 0.60, 6: 0.55, 7: 0.50}


def default_lifeline_model() -> LifelineModel:
    return LifelineModel(
        specs={
            Lifeline.FIFTY_FIFTY: LifelineSpec(),
            Lifeline.POLL_AUDIENCE: LifelineSpec(
                vote_accuracy=DEFAULT_VOTE_ACCURACY[Lifeline.POLL_AUDIENCE]
            ),
            Lifeline.PHONE_A_FRIEND: LifelineSpec(
                vote_accuracy=DEFAULT_VOTE_ACCURACY[Lifeline.PHONE_A_FRIEND]
            ),
        }
    )


@dataclass(frozen=True)
class EngineSpec:
    type: str
    id: str
    corpus: Path | None = None
    index: Path | None = None
    cache_dir: Path | None = None


@dataclass(frozen=True)
class OracleSpec:
    type: str = "synthetic"
    levels: dict[int, float] | None = None
    ratio_mean_correct: float = 0.34
    ratio_mean_incorrect: float = 0.58
    concentration: float = 5.0


@dataclass(frozen=True)
class Config:
    bank: Path
    corpus: Path | None = None
    engines: tuple[EngineSpec, ...] = ()
    strategies: tuple[Strategy, ...] = tuple(Strategy)
    weight_mode: WeightMode = WeightMode.CONFIDENCE
    hand_tuned_weights: dict[Strategy, float] | None = None
    proximity: ProximityParams = ProximityParams()
    risk: RiskParams = RiskParams()
    levels: LevelAccuracy = field(
        default_factory=lambda: LevelAccuracy(dict(DEFAULT_LEVEL_ACCURACY))
    )
    lifelines: LifelineModel = field(default_factory=default_lifeline_model)
    oracle: OracleSpec = OracleSpec()
    seed: int = 0
    n_games: int = 10000
    handicap: int = 0
    forced_answer: bool = False
    workers: int = 1
    figures: bool = True

    def build_engines(self) -> list[SearchBackend]:
        engines: list[SearchBackend] = []
        for spec in self.engines:
            if spec.type == "local":
                if spec.index is not None:
                    engines.append(LocalCorpusIndex.load(spec.index))
                elif spec.corpus is not None:
                    engines.append(index_corpus(spec.corpus, engine_id=spec.id))
                else:
                    raise ConfigError(
                        f"local engine {spec.id!r} needs a corpus or an index path"
                    )
            elif spec.type == "live":
                raise ConfigError(
                    f"engine {spec.id!r}: no live search adapter ships with this "
                    "package; subclass quizminer.retrieval.LiveSearchAdapter"
                )
            else:
                raise ConfigError(f"unknown engine type {spec.type!r}")
        return engines

    def pipeline_answer_fn(self, engines: list[SearchBackend], radius: int | None = None):
        params = self.proximity if radius is None else ProximityParams(
            radius=radius, docs_per_query=self.proximity.docs_per_query
        )

        def answer(question: Question):
            return answer_question(
                question,
                strategies=self.strategies,
                engines=engines,
                weight_mode=self.weight_mode,
                params=params,
                hand_tuned_overrides=self.hand_tuned_weights,
            )

        return answer

    def build_oracle(self, engines: list[SearchBackend] | None = None) -> QAOracle:
        if self.oracle.type == "synthetic":
            levels = self.oracle.levels or dict(self.levels.p_level)
            return SyntheticOracle(
                p_level=levels,
                ratio_mean_correct=self.oracle.ratio_mean_correct,
                ratio_mean_incorrect=self.oracle.ratio_mean_incorrect,
                concentration=self.oracle.concentration,
            )
        if self.oracle.type == "pipeline":
            if engines is None:
                engines = self.build_engines()
            if not engines:
                raise ConfigError("pipeline oracle needs at least one engine")
            return PipelineOracle(self.pipeline_answer_fn(engines))
        raise ConfigError(f"unknown oracle type {self.oracle.type!r}")


def _reject_unknown(record: dict, allowed: set[str], where: str) -> None:
    unknown = set(record) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _check_exists(path: Path, where: str) -> Path:
    if not path.exists():
        raise ConfigError(f"{where}: path {path} does not exist")
    return path


def _parse_levels(record: dict, where: str) -> dict[int, float]:
    out: dict[int, float] = {}
    for key, value in record.items():
        try:
            level = int(key)
        except ValueError as exc:
            raise ConfigError(f"{where}: level key {key!r} is not an integer") from exc
        out[level] = float(value)
    return out


def _parse_lifelines(record: dict) -> LifelineModel:
    by_name = {kind.value: kind for kind in Lifeline}
    specs: dict[Lifeline, LifelineSpec] = dict(default_lifeline_model().specs)
    for name, entry in record.items():
        if name not in by_name:
            raise ConfigError(f"lifelines: unknown lifeline {name!r}")
        _reject_unknown(entry, _LIFELINE_KEYS, f"lifelines.{name}")
        kind = by_name[name]
        vote = entry.get("vote_accuracy")
        specs[kind] = LifelineSpec(
            historical_boost=float(entry.get("historical_boost", 0.0)),
            vote_accuracy=(
                _parse_levels(vote, f"lifelines.{name}.vote_accuracy")
                if vote is not None
                else specs[kind].vote_accuracy
            ),
            expert_weight=float(entry.get("expert_weight", 1.0)),
        )
    return LifelineModel(specs=specs)


def load_config(path: str | Path) -> Config:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    base = path.parent
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(record, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    _reject_unknown(record, _TOP_KEYS, str(path))

    if "bank" not in record:
        raise ConfigError(f"{path}: missing required key 'bank'")
    bank = _check_exists(base / record["bank"], "bank")
    corpus = None
    if record.get("corpus") is not None:
        corpus = _check_exists(base / record["corpus"], "corpus")

    engines = []
    for i, entry in enumerate(record.get("engines", [])):
        _reject_unknown(entry, _ENGINE_KEYS, f"engines[{i}]")
        engine_corpus = entry.get("corpus")
        engine_index = entry.get("index")
        engines.append(
            EngineSpec(
                type=entry.get("type", "local"),
                id=entry.get("id", f"engine{i}"),
                corpus=_check_exists(base / engine_corpus, f"engines[{i}].corpus")
                if engine_corpus
                else None,
                index=_check_exists(base / engine_index, f"engines[{i}].index")
                if engine_index
                else None,
                cache_dir=(base / entry["cache_dir"]) if entry.get("cache_dir") else None,
            )
        )

    strategy_by_name = {s.value: s for s in Strategy}
    strategies = []
    for name in record.get("strategies", [s.value for s in Strategy]):
        if name not in strategy_by_name:
            raise ConfigError(f"strategies: unknown strategy {name!r}")
        strategies.append(strategy_by_name[name])

    mode_name = record.get("weight_mode", WeightMode.CONFIDENCE.value)
    try:
        weight_mode = WeightMode(mode_name)
    except ValueError as exc:
        raise ConfigError(f"weight_mode: unknown mode {mode_name!r}") from exc

    hand_tuned = None
    if record.get("hand_tuned_weights"):
        hand_tuned = {}
        for name, value in record["hand_tuned_weights"].items():
            if name not in strategy_by_name:
                raise ConfigError(f"hand_tuned_weights: unknown strategy {name!r}")
            hand_tuned[strategy_by_name[name]] = float(value)

    proximity_rec = record.get("proximity", {})
    _reject_unknown(proximity_rec, _PROXIMITY_KEYS, "proximity")
    proximity = ProximityParams(
        radius=int(proximity_rec.get("radius", 20)),
        docs_per_query=int(proximity_rec.get("docs_per_query", 10)),
    )

    risk_rec = record.get("risk", {})
    _reject_unknown(risk_rec, _RISK_KEYS, "risk")
    k_raw = risk_rec.get("k", 250000)
    risk = RiskParams(
        k=None if k_raw in (None, "risk_neutral") else float(k_raw),
        alpha=float(risk_rec.get("alpha", 4.0)),
    )

    levels_rec = record.get("levels")
    levels = LevelAccuracy(
        p_level=_parse_levels(levels_rec, "levels")
        if levels_rec
        else dict(DEFAULT_LEVEL_ACCURACY)
    )

    lifelines = (
        _parse_lifelines(record["lifelines"])
        if record.get("lifelines")
        else default_lifeline_model()
    )

    oracle_rec = record.get("oracle", {})
    _reject_unknown(oracle_rec, _ORACLE_KEYS, "oracle")
    oracle = OracleSpec(
        type=oracle_rec.get("type", "synthetic"),
        levels=_parse_levels(oracle_rec["levels"], "oracle.levels")
        if oracle_rec.get("levels")
        else None,
        ratio_mean_correct=float(oracle_rec.get("ratio_mean_correct", 0.34)),
        ratio_mean_incorrect=float(oracle_rec.get("ratio_mean_incorrect", 0.58)),
        concentration=float(oracle_rec.get("concentration", 5.0)),
    )

    return Config(
        bank=bank,
        corpus=corpus,
        engines=tuple(engines),
        strategies=tuple(strategies),
        weight_mode=weight_mode,
        hand_tuned_weights=hand_tuned,
        proximity=proximity,
        risk=risk,
        levels=levels,
        lifelines=lifelines,
        oracle=oracle,
        seed=int(record.get("seed", 0)),
        n_games=int(record.get("n_games", 10000)),
        handicap=int(record.get("handicap", 0)),
        forced_answer=bool(record.get("forced_answer", False)),
        workers=int(record.get("workers", 1)),
        figures=bool(record.get("figures", True)),
    )
