import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

ACCEPTANCE_LINES: list[str] = []
SUITE_BUDGET_S = 60.0
_start = time.perf_counter()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def fixture_text():
    def read(name):
        return (FIXTURES / name).read_text(encoding="utf-8")
    return read


def pytest_sessionstart(session):
    global _start
    _start = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.perf_counter() - _start
    lines = list(ACCEPTANCE_LINES)
    if lines:
        ok = elapsed < SUITE_BUDGET_S
        lines.append(f"[{'PASS' if ok else 'FAIL'}] AC10 whole suite runtime {elapsed:.1f}s < {SUITE_BUDGET_S:.0f}s")
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def pytest_sessionfinish(session, exitstatus):
    if ACCEPTANCE_LINES and time.perf_counter() - _start >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
