from __future__ import annotations

from pathlib import Path

import pytest

from expedition import index as index_mod
from expedition.corpus import Corpus, ingest

REPO = Path(__file__).resolve().parents[1]
TINY6 = REPO / "data" / "tiny6.jsonl"
SCHEMAS = REPO / "schemas"


@pytest.fixture(scope="session")
def tiny6_path() -> Path:
    return TINY6


@pytest.fixture(scope="session")
def tiny6_corpus() -> Corpus:
    return ingest(TINY6)


@pytest.fixture(scope="session")
def tiny6_index(tiny6_corpus):
    return index_mod.build(tiny6_corpus)


@pytest.fixture(scope="session")
def schema_dir() -> Path:
    return SCHEMAS


# One pass/fail line per acceptance criterion at the end of the run.
_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{mark}  {name}")
