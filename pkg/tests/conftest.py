import time
from pathlib import Path

import pytest

import acceptance_log

FIXTURES = Path(__file__).parent / "fixtures"
_state = {}


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def pytest_sessionstart(session):
    _state["start"] = time.perf_counter()
    _state["session"] = session


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.RESULTS:
        return
    elapsed = time.perf_counter() - _state["start"]
    within = elapsed < acceptance_log.SUITE_BUDGET_S
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in acceptance_log.RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    terminalreporter.write_line(
        f"{'PASS' if within else 'FAIL'}  suite wall clock  {elapsed:.1f} s (budget {acceptance_log.SUITE_BUDGET_S:.0f} s)"
    )
    session = _state["session"]
    if not within and session.exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED
