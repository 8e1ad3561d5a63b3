"""Shared pytest wiring.

Adds the tests directory to sys.path so oracle helpers import plainly, and
prints a one-line-per-criterion digest of test_acceptance.py at the end of
a run."""

from __future__ import annotations

import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

_ACCEPT_RE = re.compile(r"test_acceptance\.py::test_c(\d+)_(\w+)")

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    match = _ACCEPT_RE.search(report.nodeid)
    if match is None:
        return
    number = int(match.group(1))
    label = match.group(2).replace("_", " ")
    if report.when == "call":
        if report.passed:
            _RESULTS[number] = ("PASS", label)
        elif report.failed:
            _RESULTS[number] = ("FAIL", label)
        elif report.skipped:
            _RESULTS[number] = ("SKIP", label)
    elif report.when == "setup" and (report.failed or report.skipped):
        _RESULTS[number] = ("FAIL" if report.failed else "SKIP", label)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, label = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}  {label}")
