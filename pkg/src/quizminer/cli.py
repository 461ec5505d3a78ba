"""Command-line interface.

Subcommands: index, answer, eval, calibrate, play, simulate, sweep.  All
regular output is machine-parseable JSON or CSV on stdout; diagnostics go
to stderr.  When a report is written to a file via --out, a matplotlib
figure is rendered next to it (same basename, .png) unless figures are
disabled.  Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import replace
from pathlib import Path

from .config import Config, ConfigError, load_config
from .decision import RiskParams
from .ensemble import answer_question_detailed
from .question_bank import BankFormatError, QuestionBank, load_bank
from .retrieval import CorpusFormatError, index_corpus
from .scoring import ProximityParams
from .simulator import (
    LevelExhaustedError,
    PipelineOracle,
    SimulationParams,
    evaluate_accuracy,
    calibrate,
    play_game,
    simulate,
    sweep,
)

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="quizminer",
        description="Corpus-mining trivia answerer and prize-ladder game player.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=Path("data/config.json"),
                       help="JSON config file (default: data/config.json)")
        p.add_argument("--out", type=Path, default=None,
                       help="write the result to this file as well as stdout")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering next to --out files")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("index", help="build a local search index from a corpus")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--corpus", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("answer", help="answer one bank question, with expert detail")
    common(p)
    p.add_argument("--question-id", required=True)

    p = sub.add_parser("eval", help="QA accuracy over the bank, per level and overall")
    common(p)
    p.add_argument("--sweep-radius", default=None,
                   help="comma-separated radii; emits an accuracy CSV instead")

    p = sub.add_parser("calibrate", help="measure per-level accuracy of the oracle")
    common(p)

    p = sub.add_parser("play", help="play one game, tracing each decision")
    common(p)
    p.add_argument("--handicap", type=int, default=None)

    p = sub.add_parser("simulate", help="Monte Carlo simulation report")
    common(p)
    p.add_argument("--n-games", type=int, default=None)
    p.add_argument("--handicap", type=int, default=None)
    p.add_argument("--k", default=None,
                   help="risk coefficient in dollars, or 'neutral'")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--forced-answer", action="store_true")

    p = sub.add_parser("sweep", help="sweep k, alpha, handicap, or radius")
    common(p)
    p.add_argument("--dimension", required=True,
                   choices=["k", "alpha", "handicap", "radius"])
    p.add_argument("--values", required=True,
                   help="comma-separated parameter values")
    p.add_argument("--n-games", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)

    return parser


def _apply_overrides(config: Config, args: argparse.Namespace) -> Config:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "n_games", None) is not None:
        updates["n_games"] = args.n_games
    if getattr(args, "handicap", None) is not None:
        updates["handicap"] = args.handicap
    if getattr(args, "workers", None) is not None:
        updates["workers"] = args.workers
    if getattr(args, "forced_answer", False):
        updates["forced_answer"] = True
    if getattr(args, "no_figures", False):
        updates["figures"] = False
    k = getattr(args, "k", None)
    alpha = getattr(args, "alpha", None)
    if k is not None or alpha is not None:
        new_k = config.risk.k if k is None else (None if k == "neutral" else float(k))
        new_alpha = config.risk.alpha if alpha is None else alpha
        updates["risk"] = RiskParams(k=new_k, alpha=new_alpha)
    return replace(config, **updates) if updates else config


def _emit(text: str, out: Path | None) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _emit_json(payload, out: Path | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True), out)


def _simulation_params(config: Config) -> SimulationParams:
    return SimulationParams(
        levels=config.levels,
        n_games=config.n_games,
        risk=config.risk,
        handicap=config.handicap,
        seed=config.seed,
        lifelines=config.lifelines,
        forced_answer=config.forced_answer,
        workers=config.workers,
    )


def _load_bank(config: Config) -> QuestionBank:
    return load_bank(config.bank)


def _cmd_index(args) -> int:
    corpus = args.corpus
    if corpus is None:
        if args.config is None:
            raise ConfigError("index needs --corpus or a config with a corpus key")
        config = load_config(args.config)
        if config.corpus is None:
            raise ConfigError(f"{args.config}: no corpus configured")
        corpus = config.corpus
    index = index_corpus(corpus)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    index.save(args.out)
    print(f"indexed {len(index)} documents -> {args.out}", file=sys.stderr)
    return 0


def _cmd_answer(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    bank = _load_bank(config)
    try:
        question = bank.get(args.question_id)
    except KeyError:
        raise BankFormatError(
            f"question id {args.question_id!r} not found in {config.bank}"
        )
    engines = config.build_engines()
    if not engines:
        raise ConfigError("answer needs at least one configured engine")
    detail = answer_question_detailed(
        question,
        strategies=config.strategies,
        engines=engines,
        weight_mode=config.weight_mode,
        params=config.proximity,
        hand_tuned_overrides=config.hand_tuned_weights,
    )
    payload = {
        "question_id": question.id,
        "question": question.text,
        "choices": list(question.choices),
        "level": question.level,
        "inverted": detail.inverted,
        "experts": [
            {
                "strategy": op.vector.strategy.value,
                "engine": op.vector.engine_id,
                "scores": list(op.vector.scores),
                "no_signal": op.vector.no_signal,
                "confidence_ratio": op.confidence_ratio,
                "weight": w,
            }
            for op, w in zip(detail.opinions, detail.weights.weights)
        ],
        "weight_mode": detail.weights.mode.value,
        "combined": list(detail.combined.c),
        "chosen_index": detail.combined.chosen_index,
        "chosen_text": question.choices[detail.combined.chosen_index],
        "overall_ratio": detail.combined.overall_ratio,
        "correct_index": question.correct_index,
        "is_correct": detail.combined.chosen_index == question.correct_index,
    }
    _emit_json(payload, args.out)
    return 0


def _radius_accuracy_fn(config: Config, bank: QuestionBank):
    engines = config.build_engines()
    if not engines:
        raise ConfigError("radius evaluation needs at least one configured engine")

    def accuracy(radius: float) -> float:
        oracle = PipelineOracle(config.pipeline_answer_fn(engines, radius=int(radius)))
        return evaluate_accuracy(bank, oracle, seed=config.seed)["accuracy"]

    return accuracy


def _cmd_eval(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    bank = _load_bank(config)
    if args.sweep_radius:
        values = [float(v) for v in args.sweep_radius.split(",") if v]
        table = sweep(
            _simulation_params(config), "radius", values,
            accuracy_fn=_radius_accuracy_fn(config, bank),
        )
        _emit(table.to_csv(), args.out)
        _maybe_render_sweep(config, table, args.out)
        return 0
    engines = config.build_engines()
    if not engines:
        raise ConfigError("eval needs at least one configured engine")
    oracle = PipelineOracle(config.pipeline_answer_fn(engines))
    _emit_json(evaluate_accuracy(bank, oracle, seed=config.seed), args.out)
    return 0


def _cmd_calibrate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    bank = _load_bank(config)
    oracle = config.build_oracle()
    levels = calibrate(bank, oracle, seed=config.seed)
    payload = {"levels": {str(k): v for k, v in sorted(levels.p_level.items())}}
    _emit_json(payload, args.out)
    return 0


def _cmd_play(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    bank = _load_bank(config)
    oracle = config.build_oracle()
    params = _simulation_params(config)
    lines: list[str] = []

    def observer(event: dict) -> None:
        lines.append(json.dumps(event, sort_keys=True))

    rng = random.Random(params.seed)
    record = play_game(params, rng, bank, oracle, observer=observer)
    lines.append(
        json.dumps(
            {
                "type": "record",
                "final_prize": record.final_prize,
                "questions_right": record.questions_right,
                "end_stage": record.end_stage,
                "end_reason": record.end_reason.value,
                "lifelines_used": record.lifelines_used,
                "lifelines_good": record.lifelines_good,
                "lifelines_bad": record.lifelines_bad,
            },
            sort_keys=True,
        )
    )
    _emit("\n".join(lines), args.out)
    return 0


def _maybe_render_report(config: Config, report, out: Path | None) -> None:
    if out is None or not config.figures:
        return
    from .figures import figure_path, render_report_figure

    target = render_report_figure(report, figure_path(out))
    print(f"figure -> {target}", file=sys.stderr)


def _maybe_render_sweep(config: Config, table, out: Path | None) -> None:
    if out is None or not config.figures:
        return
    from .figures import figure_path, render_sweep_figure

    target = render_sweep_figure(table, figure_path(out))
    print(f"figure -> {target}", file=sys.stderr)


def _cmd_simulate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    bank = _load_bank(config)
    oracle = config.build_oracle()
    report = simulate(_simulation_params(config), bank, oracle)
    _emit_json(report.to_dict(), args.out)
    _maybe_render_report(config, report, args.out)
    return 0


def _cmd_sweep(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    bank = _load_bank(config)
    values = [float(v) for v in args.values.split(",") if v]
    if not values:
        raise ConfigError("sweep: --values must list at least one number")
    params = _simulation_params(config)
    if args.dimension == "radius":
        table = sweep(params, "radius", values,
                      accuracy_fn=_radius_accuracy_fn(config, bank))
    else:
        oracle = config.build_oracle()
        table = sweep(params, args.dimension, values, bank=bank, oracle=oracle)
    _emit(table.to_csv(), args.out)
    _maybe_render_sweep(config, table, args.out)
    return 0


_COMMANDS = {
    "index": _cmd_index,
    "answer": _cmd_answer,
    "eval": _cmd_eval,
    "calibrate": _cmd_calibrate,
    "play": _cmd_play,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
}


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, BankFormatError, CorpusFormatError,
            LevelExhaustedError, FileNotFoundError) as exc:
        print(f"quizminer: {exc}", file=sys.stderr)
        return DATA_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
