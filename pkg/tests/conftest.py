from __future__ import annotations

from pathlib import Path

import pytest

from elfe.library import CORPUS_DIR
from elfe.pipeline import Prepared, prepare

DATA_DIR = Path(__file__).parent / "data"


def corpus_text(name: str) -> str:
    return (CORPUS_DIR / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def midpoint_prepared() -> Prepared:
    return prepare(corpus_text("midpoint_extension.elfe"))


@pytest.fixture(scope="session")
def line_extension_prepared() -> Prepared:
    return prepare(corpus_text("line_extension.elfe"))


@pytest.fixture(scope="session")
def midpoint_parallel_prepared() -> Prepared:
    return prepare(corpus_text("midpoint_parallel.elfe"))


@pytest.fixture()
def broken_path() -> Path:
    return DATA_DIR / "broken.elfe"
