from __future__ import annotations

from pathlib import Path

import pytest

from quizminer.config import load_config
from quizminer.question_bank import load_bank
from quizminer.retrieval import Document, LocalCorpusIndex
from quizminer.question_bank import tokenize

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def bundled_config():
    return load_config(DATA_DIR / "config.json")


@pytest.fixture(scope="session")
def bundled_bank(bundled_config):
    return load_bank(bundled_config.bank)


@pytest.fixture(scope="session")
def bundled_engines(bundled_config):
    return bundled_config.build_engines()


def make_index(texts: dict[str, str], urls: dict[str, str] | None = None) -> LocalCorpusIndex:
    urls = urls or {}
    docs = [
        Document(id=doc_id, source_name=urls.get(doc_id, ""), tokens=tuple(tokenize(text)))
        for doc_id, text in texts.items()
    ]
    return LocalCorpusIndex(docs)


@pytest.fixture
def mini_index() -> LocalCorpusIndex:
    """Three-document fixture: only d1 answers the France question."""
    return make_index(
        {
            "d1": "Paris is the capital of France and a popular destination.",
            "d2": "Berlin has a famous wall and busy museums.",
            "d3": "Rome hosts ancient ruins beside modern cafes.",
        }
    )
