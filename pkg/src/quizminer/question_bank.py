"""Question bank loading, validation, tokenization, and classification.

A bank is a JSON Lines file, one question per line:

    {"id": "q1", "level": 3, "question": "...", "choices": [c0, c1, c2, c3],
     "answer": 0}

Levels run 1 (easiest) through 7 (hardest).  All types here are immutable
after construction and every operation is a pure function, so the module
is safe for unrestricted concurrent use.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .stopwords import STOPWORDS

MIN_LEVEL = 1
MAX_LEVEL = 7
NUM_CHOICES = 4

# Strings marking "complete the saying" questions.  "According" must match
# case-sensitively; the other two are matched case-insensitively.
_SAYING_EXACT = ("According",)
_SAYING_FOLDED = ("said to", "asked to")

_POSSESSIVE = re.compile(r"['’]s(?![0-9A-Za-z])")
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


class BankFormatError(ValueError):
    """Raised when a bank file or record is malformed.

    Carries the offending line number (1-based) when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Question:
    """A single multiple-choice question with exactly four choices."""

    id: str
    text: str
    choices: tuple[str, str, str, str]
    correct_index: int
    level: int

    def __post_init__(self):
        if len(self.choices) != NUM_CHOICES:
            raise ValueError(f"expected {NUM_CHOICES} choices, got {len(self.choices)}")
        if any(not c.strip() for c in self.choices):
            raise ValueError("choices must be non-empty after trimming")
        if not 0 <= self.correct_index < NUM_CHOICES:
            raise ValueError(f"correct_index {self.correct_index} out of range")
        if not MIN_LEVEL <= self.level <= MAX_LEVEL:
            raise ValueError(f"level {self.level} outside [{MIN_LEVEL}, {MAX_LEVEL}]")


@dataclass(frozen=True)
class QuestionFlags:
    """Classification flags; both may be set independently."""

    inverted: bool = False
    saying: bool = False


@dataclass(frozen=True)
class QuestionBank:
    questions: tuple[Question, ...]
    by_level: dict[int, tuple[str, ...]] = field(compare=False)

    def __len__(self) -> int:
        return len(self.questions)

    def get(self, question_id: str) -> Question:
        for q in self.questions:
            if q.id == question_id:
                return q
        raise KeyError(question_id)

    def level_questions(self, level: int) -> list[Question]:
        index = {q.id: q for q in self.questions}
        return [index[qid] for qid in self.by_level.get(level, ())]


def _make_bank(questions: list[Question]) -> QuestionBank:
    buckets: dict[int, list[str]] = {lv: [] for lv in range(MIN_LEVEL, MAX_LEVEL + 1)}
    for q in questions:
        buckets[q.level].append(q.id)
    return QuestionBank(
        questions=tuple(questions),
        by_level={lv: tuple(ids) for lv, ids in buckets.items()},
    )


def load_bank(path: str | Path) -> QuestionBank:
    """Load and validate a JSONL question bank.

    Raises :class:`BankFormatError` naming the offending line for any
    malformed record, wrong choice count, out-of-range answer index or
    level, or duplicate id.  An empty file yields an empty bank with all
    seven level buckets present and empty.
    """
    path = Path(path)
    questions: list[Question] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BankFormatError(f"invalid JSON: {exc.msg}", lineno) from exc
            if not isinstance(record, dict):
                raise BankFormatError("record is not a JSON object", lineno)
            missing = {"id", "level", "question", "choices", "answer"} - record.keys()
            if missing:
                raise BankFormatError(f"missing fields: {sorted(missing)}", lineno)
            qid = record["id"]
            if not isinstance(qid, str) or not qid:
                raise BankFormatError("id must be a non-empty string", lineno)
            if qid in seen:
                raise BankFormatError(f"duplicate id {qid!r}", lineno)
            choices = record["choices"]
            if not isinstance(choices, list) or len(choices) != NUM_CHOICES:
                n = len(choices) if isinstance(choices, list) else "non-list"
                raise BankFormatError(f"expected {NUM_CHOICES} choices, got {n}", lineno)
            try:
                question = Question(
                    id=qid,
                    text=str(record["question"]),
                    choices=tuple(str(c) for c in choices),
                    correct_index=int(record["answer"]),
                    level=int(record["level"]),
                )
            except (TypeError, ValueError) as exc:
                raise BankFormatError(str(exc), lineno) from exc
            seen.add(qid)
            questions.append(question)
    return _make_bank(questions)


def classify(question: Question) -> QuestionFlags:
    """Flag inverted ("not") questions and "complete the saying" questions.

    "not" must occur as a standalone lowercase token, so "note" or "Nottingham"
    never trigger inversion.
    """
    tokens = tokenize(question.text)
    inverted = "not" in tokens
    text = question.text
    folded = text.lower()
    saying = any(s in text for s in _SAYING_EXACT) or any(
        s in folded for s in _SAYING_FOLDED
    )
    return QuestionFlags(inverted=inverted, saying=saying)


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on runs of non-alphanumeric characters.

    Digits are kept and possessive 's suffixes are stripped, so
    "Flash Gordon's" tokenizes to [flash, gordon].
    """
    stripped = _POSSESSIVE.sub("", text.lower())
    return _TOKEN.findall(stripped)


def tokenize_and_filter(
    text: str, stopwords: frozenset[str] = STOPWORDS, filter: bool = True
) -> list[str]:
    """Tokenize, optionally dropping stopwords.

    Question text is filtered (``filter=True``); answer text never is,
    because some answers consist entirely of stopwords.
    """
    tokens = tokenize(text)
    if not filter:
        return tokens
    return [t for t in tokens if t not in stopwords]
