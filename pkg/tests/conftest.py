"""Shared fixtures plus a terminal-summary hook that prints one PASS/FAIL
line per acceptance criterion after the run."""

from __future__ import annotations

import json
import re
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"

_CRITERION_RE = re.compile(r"test_criterion_(\d+)")
_criterion_results: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def pattern_fixture():
    """The hand-tagged 50-tweet crisis-pattern corpus and its hand counts."""
    lines = (DATA_DIR / "crisis_patterns.jsonl").read_text().splitlines()
    expected = json.loads((DATA_DIR / "crisis_patterns_expected.json").read_text())
    return lines, expected


@pytest.fixture(scope="session")
def tagger_sample():
    """Hand-tagged 50-token sample validating the fallback tagger lexicons."""
    return json.loads((DATA_DIR / "fallback_tagger_sample.json").read_text())


def pytest_runtest_logreport(report):
    match = _CRITERION_RE.search(report.nodeid)
    if not match:
        return
    number = int(match.group(1))
    if report.when == "call":
        _criterion_results[number] = (report.outcome.upper(), report.nodeid)
    elif report.when == "setup" and report.outcome != "passed":
        _criterion_results[number] = (report.outcome.upper(), report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criterion_results):
        outcome, nodeid = _criterion_results[number]
        status = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  ({nodeid.split('::')[-1]})")
