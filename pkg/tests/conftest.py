"""Shared fixtures and the acceptance criteria report hook."""

from pathlib import Path

import pytest

import statedge as se

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus():
    """The bundled five-scene corpus, straight from the generator."""
    return se.make_corpus()


@pytest.fixture(scope="session")
def corpus_dir():
    assert CORPUS_DIR.is_dir(), "bundled corpus directory missing"
    return CORPUS_DIR


def pytest_terminal_summary(terminalreporter):
    reports = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, ()):
            if rep.when == "call" and "acceptance" in rep.keywords:
                reports.append((rep.nodeid, rep.passed))
    if not reports:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid, passed in sorted(reports):
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
