"""Query construction with fallback plans, and pluggable search backends.

The deterministic :class:`LocalCorpusIndex` is the reference backend: a
positional inverted index over a small document corpus supporting phrase
queries, conjunctive term queries, and filename-extension exclusion.
:class:`LiveSearchAdapter` defines the contract for talking to a real
search service; it renders query strings and caches responses on disk but
leaves the wire call abstract.
"""

from __future__ import annotations

import hashlib
import json
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

from .question_bank import Question, QuestionFlags, tokenize, tokenize_and_filter
from .stopwords import STOPWORDS

DEFAULT_TERM_BUDGET = 10
DEFAULT_EXCLUDE = ("pdf",)
DEFAULT_TOP_K = 10


class CorpusFormatError(ValueError):
    """Raised for unreadable corpus sources or duplicate document ids."""


class BackendUnavailableError(RuntimeError):
    """A live search backend could not be reached.

    ``retry_after`` carries the backend's suggested wait in seconds when
    the service provided one.
    """

    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


@dataclass(frozen=True)
class Query:
    """One search query: required phrases, required terms, exclusions.

    The total number of distinct tokens across phrases and terms must fit
    ``term_budget``.  Builders bump the budget rather than split a phrase
    that cannot be shortened (an answer must survive intact).
    """

    required_phrases: tuple[tuple[str, ...], ...] = ()
    terms: tuple[str, ...] = ()
    exclude_extensions: tuple[str, ...] = ()
    term_budget: int = DEFAULT_TERM_BUDGET

    def __post_init__(self):
        if any(not p for p in self.required_phrases):
            raise ValueError("phrases must be non-empty token lists")
        if len(self.distinct_tokens()) > self.term_budget:
            raise ValueError(
                f"query has {len(self.distinct_tokens())} distinct tokens, "
                f"budget is {self.term_budget}"
            )

    def distinct_tokens(self) -> frozenset[str]:
        tokens = set(self.terms)
        for phrase in self.required_phrases:
            tokens.update(phrase)
        return frozenset(tokens)


@dataclass(frozen=True)
class QueryPlan:
    """Ordered, strictly weakening fallback sequence of queries."""

    stages: tuple[Query, ...]

    def __len__(self) -> int:
        return len(self.stages)

    def stage(self, i: int) -> Query:
        """Stage ``i``, clamped to the final stage once the plan is exhausted."""
        return self.stages[min(i, len(self.stages) - 1)]


@dataclass(frozen=True)
class Document:
    id: str
    source_name: str = ""
    tokens: tuple[str, ...] = ()


class SearchBackend(ABC):
    """A search engine: result counting plus top-document retrieval.

    Implementations must keep the two consistent: ``count_results`` is
    positive exactly when ``top_documents`` is non-empty.
    """

    engine_id: str

    @abstractmethod
    def count_results(self, query: Query) -> int:
        """Number of documents satisfying every constraint in ``query``."""

    @abstractmethod
    def top_documents(self, query: Query, k: int = DEFAULT_TOP_K) -> list[Document]:
        """Up to ``k`` best matching documents, deterministically ordered."""


# --- query plan construction -------------------------------------------------

_QUOTED = re.compile(r"[\"“']([^\"“”']+)[\"”']")
_BLANK = re.compile(r"_{2,}|…|\.\.\.")
_WH_SLOTS = frozenset({"what", "where", "who", "whom", "whose", "which"})


def construct_saying(text: str, choice: str) -> str | None:
    """Build the candidate full saying for a "complete the saying" question.

    Takes the quoted span when one exists, otherwise the clause after the
    last comma, and substitutes the choice for the blank (a run of
    underscores or an ellipsis) or for the first wh-word slot.  Returns
    None when no template can be detected.
    """
    quoted = _QUOTED.findall(text)
    clause = max(quoted, key=len) if quoted else None
    if clause is None:
        _, _, tail = text.rpartition(",")
        clause = tail.strip()
    if not clause:
        return None
    if _BLANK.search(clause):
        return _BLANK.sub(f" {choice} ", clause, count=1)
    words = clause.split()
    for i, word in enumerate(words):
        bare = re.sub(r"[^\w]", "", word).lower()
        if bare in _WH_SLOTS:
            words[i] = choice
            return " ".join(words)
    return None


def _dedup(tokens: list[str]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    for t in tokens:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _make_query(
    phrases: tuple[tuple[str, ...], ...],
    terms: tuple[str, ...],
    budget: int,
) -> Query:
    distinct = set(terms)
    for p in phrases:
        distinct.update(p)
    return Query(
        required_phrases=phrases,
        terms=terms,
        exclude_extensions=DEFAULT_EXCLUDE,
        term_budget=max(budget, len(distinct)),
    )


def build_query_plan(
    question: Question,
    flags: QuestionFlags,
    choice: str,
    stopwords: frozenset[str] = STOPWORDS,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> QueryPlan:
    """Build the fallback query sequence for one answer choice.

    Stage 1 pairs the answer (quoted as a phrase when multi-word) with the
    filtered question terms, truncated to the term budget.  For saying
    questions stage 1 instead requires the constructed candidate saying as
    a phrase.  Each later stage weakens the previous one: the phrase is
    demoted to loose terms first, then question terms are dropped one at a
    time from the end, until only the answer's tokens remain.  Every stage
    excludes .pdf sources.
    """
    answer_tokens = _dedup(tokenize(choice))
    answer_set = set(answer_tokens)

    saying_tokens: list[str] | None = None
    if flags.saying:
        saying = construct_saying(question.text, choice)
        if saying is not None:
            saying_tokens = tokenize(saying)

    if saying_tokens:
        # Demoted term order keeps the answer first so the final stage is
        # reached by dropping the saying's other words from the end.
        extra = [t for t in _dedup(saying_tokens) if t not in answer_set]
        stages = [_make_query((tuple(saying_tokens),), (), term_budget)]
        loose = answer_tokens + extra
        stages.append(_make_query((), tuple(loose), term_budget))
        for cut in range(len(extra) - 1, -1, -1):
            stages.append(
                _make_query((), tuple(answer_tokens + extra[:cut]), term_budget)
            )
        return QueryPlan(stages=tuple(stages))

    question_terms = [
        t for t in _dedup(tokenize_and_filter(question.text, stopwords, True))
        if t not in answer_set
    ]
    room = max(term_budget - len(answer_tokens), 0)
    kept = question_terms[:room]

    stages = []
    answer_is_phrase = len(answer_tokens) > 1
    if answer_is_phrase:
        stages.append(_make_query((tuple(answer_tokens),), tuple(kept), term_budget))
    for cut in range(len(kept), -1, -1):
        stages.append(
            _make_query((), tuple(answer_tokens + kept[:cut]), term_budget)
        )
    return QueryPlan(stages=tuple(stages))


def build_pair_plan(
    phrase_tokens: tuple[str, ...],
    choice: str,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> QueryPlan:
    """Fallback plan for a {noun-phrase, answer} pair query.

    Stage 1 requires both the phrase and the answer (quoted when
    multi-word); weakening demotes the answer phrase first, then the noun
    phrase, then drops the phrase's tokens from the end until only the
    answer's tokens remain.
    """
    answer_tokens = _dedup(tokenize(choice))
    answer_set = set(answer_tokens)
    answer_is_phrase = len(answer_tokens) > 1
    extra = [t for t in _dedup(list(phrase_tokens)) if t not in answer_set]

    stages = []
    if answer_is_phrase:
        stages.append(
            _make_query((tuple(answer_tokens), tuple(phrase_tokens)), (), term_budget)
        )
        stages.append(
            _make_query((tuple(phrase_tokens),), tuple(answer_tokens), term_budget)
        )
    else:
        stages.append(
            _make_query((tuple(phrase_tokens),), tuple(answer_tokens), term_budget)
        )
    for cut in range(len(extra), -1, -1):
        stages.append(
            _make_query((), tuple(answer_tokens + extra[:cut]), term_budget)
        )
    return QueryPlan(stages=tuple(stages))


# --- local positional index ---------------------------------------------------


class LocalCorpusIndex(SearchBackend):
    """Deterministic positional inverted index over an in-memory corpus.

    Phrase constraints require strictly consecutive positions.  Results
    are ordered by descending sum of match-term frequencies, then by
    ascending document id, so repeated queries are bit-stable.  The index
    is immutable once built and safe for concurrent queries.
    """

    def __init__(self, documents: list[Document], engine_id: str = "local"):
        self.engine_id = engine_id
        self._docs: dict[str, Document] = {}
        self._postings: dict[str, dict[str, tuple[int, ...]]] = {}
        for doc in documents:
            if doc.id in self._docs:
                raise CorpusFormatError(f"duplicate document id {doc.id!r}")
            self._docs[doc.id] = doc
            positions: dict[str, list[int]] = {}
            for pos, token in enumerate(doc.tokens):
                positions.setdefault(token, []).append(pos)
            for token, plist in positions.items():
                self._postings.setdefault(token, {})[doc.id] = tuple(plist)

    def __len__(self) -> int:
        return len(self._docs)

    def postings(self, token: str) -> dict[str, tuple[int, ...]]:
        return self._postings.get(token, {})

    def _excluded(self, doc: Document, query: Query) -> bool:
        name = doc.source_name.lower()
        return any(name.endswith("." + ext.lower()) for ext in query.exclude_extensions)

    def _phrase_in(self, doc_id: str, phrase: tuple[str, ...]) -> bool:
        position_sets = []
        for token in phrase:
            plist = self._postings.get(token, {}).get(doc_id)
            if plist is None:
                return False
            position_sets.append(set(plist))
        first = position_sets[0]
        return any(
            all(start + offset in position_sets[offset] for offset in range(1, len(phrase)))
            for start in first
        )

    def _matches(self, query: Query) -> list[str]:
        tokens = query.distinct_tokens()
        if not tokens:
            return []
        candidates: set[str] | None = None
        for token in tokens:
            docs = set(self._postings.get(token, {}))
            candidates = docs if candidates is None else candidates & docs
            if not candidates:
                return []
        assert candidates is not None
        out = []
        for doc_id in candidates:
            doc = self._docs[doc_id]
            if self._excluded(doc, query):
                continue
            if all(self._phrase_in(doc_id, p) for p in query.required_phrases):
                out.append(doc_id)
        return out

    def count_results(self, query: Query) -> int:
        return len(self._matches(query))

    def top_documents(self, query: Query, k: int = DEFAULT_TOP_K) -> list[Document]:
        if k < 1:
            raise ValueError("k must be >= 1")
        tokens = sorted(query.distinct_tokens())
        scored = []
        for doc_id in self._matches(query):
            tf = sum(len(self._postings[t].get(doc_id, ())) for t in tokens)
            scored.append((-tf, doc_id))
        scored.sort()
        return [self._docs[doc_id] for _, doc_id in scored[:k]]

    def documents(self) -> list[Document]:
        return list(self._docs.values())

    def save(self, path: str | Path) -> None:
        payload = {
            "engine_id": self.engine_id,
            "documents": [
                {"id": d.id, "source_name": d.source_name, "tokens": list(d.tokens)}
                for d in self._docs.values()
            ],
        }
        Path(path).write_text(
            json.dumps(payload, sort_keys=True, ensure_ascii=False), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "LocalCorpusIndex":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        docs = [
            Document(id=d["id"], source_name=d.get("source_name", ""),
                     tokens=tuple(d["tokens"]))
            for d in payload["documents"]
        ]
        return cls(docs, engine_id=payload.get("engine_id", "local"))


def read_corpus(source: str | Path) -> list[Document]:
    """Read documents from a JSONL corpus file or a directory of .txt files.

    JSONL records are ``{"id": ..., "url": ..., "text": ...}`` with url
    optional; in a directory, each file's name is the document id and its
    contents the text.
    """
    source = Path(source)
    docs: list[Document] = []
    if source.is_dir():
        for path in sorted(source.iterdir()):
            if not path.is_file():
                continue
            try:
                text = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                raise CorpusFormatError(f"{path}: unreadable: {exc}") from exc
            docs.append(
                Document(id=path.name, source_name=path.name, tokens=tuple(tokenize(text)))
            )
        return docs
    if not source.is_file():
        raise CorpusFormatError(f"{source}: no such corpus file or directory")
    with source.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{source}:{lineno}: invalid JSON: {exc.msg}") from exc
            if "id" not in record or "text" not in record:
                raise CorpusFormatError(f"{source}:{lineno}: record needs id and text")
            docs.append(
                Document(
                    id=str(record["id"]),
                    source_name=str(record.get("url", "")),
                    tokens=tuple(tokenize(str(record["text"]))),
                )
            )
    return docs


def index_corpus(source: str | Path, engine_id: str = "local") -> LocalCorpusIndex:
    """Build a positional index directly from a corpus source."""
    return LocalCorpusIndex(read_corpus(source), engine_id=engine_id)


# --- live search adapter shell -------------------------------------------------


class LiveSearchAdapter(SearchBackend):
    """Base class for live search-engine adapters.

    Subclasses implement :meth:`fetch`, which speaks the engine's public
    wire protocol and returns ``{"count": int, "documents": [{"id": ...,
    "url": ..., "text": ...}]}``.  Responses are cached on disk keyed by
    the rendered query string, so replays are deterministic and free.
    Outbound calls are made serially; callers see a plain blocking call.

    This adapter is interface-level plumbing: it is excluded from the
    acceptance suite and no concrete service client ships with the
    package.
    """

    def __init__(self, engine_id: str, cache_dir: str | Path):
        self.engine_id = engine_id
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def render_query(self, query: Query) -> str:
        """Engine query syntax: quoted phrases, loose terms, exclusions."""
        parts = [f'"{" ".join(p)}"' for p in query.required_phrases]
        parts.extend(query.terms)
        parts.extend(self.exclusion_syntax(ext) for ext in query.exclude_extensions)
        return " ".join(parts)

    def exclusion_syntax(self, extension: str) -> str:
        return f"-filetype:{extension}"

    @abstractmethod
    def fetch(self, rendered_query: str) -> dict:
        """Execute one live query.  Raise BackendUnavailableError on failure."""

    def _cache_path(self, rendered: str) -> Path:
        digest = hashlib.sha256(rendered.encode("utf-8")).hexdigest()[:32]
        return self.cache_dir / f"{digest}.json"

    def _response(self, query: Query) -> dict:
        rendered = self.render_query(query)
        path = self._cache_path(rendered)
        if path.exists():
            return json.loads(path.read_text(encoding="utf-8"))
        payload = self.fetch(rendered)
        path.write_text(
            json.dumps({"query": rendered, **payload}, sort_keys=True), encoding="utf-8"
        )
        return payload

    def count_results(self, query: Query) -> int:
        return int(self._response(query)["count"])

    def top_documents(self, query: Query, k: int = DEFAULT_TOP_K) -> list[Document]:
        if k < 1:
            raise ValueError("k must be >= 1")
        records = self._response(query)["documents"][:k]
        return [
            Document(
                id=str(r["id"]),
                source_name=str(r.get("url", "")),
                tokens=tuple(tokenize(str(r.get("text", "")))),
            )
            for r in records
        ]
