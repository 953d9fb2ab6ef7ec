import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tristable.fixtures import circular_strong_counterexample, weakest_link_counterexample  # noqa: E402

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    _ACCEPTANCE.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def weakest4():
    return weakest_link_counterexample()


@pytest.fixture
def circular4():
    return circular_strong_counterexample()
