import time

import pytest

from barrierclock.scattering import PotentialProfile

_SESSION = {}
CRITERIA: list[tuple[str, bool, str]] = []


def pytest_sessionstart(session):
    _SESSION["start"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in CRITERIA:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    elapsed = time.perf_counter() - _SESSION.get("start", time.perf_counter())
    terminalreporter.write_line(f"{'PASS' if elapsed < 60 else 'FAIL'}  suite wall time {elapsed:.1f} s (limit 60 s)")


@pytest.fixture
def steps():
    """Asymmetric three-step profile used across modules."""
    return PotentialProfile([(-1.0, 0.0, 1.0), (0.0, 0.7, 0.3), (0.7, 2.0, 1.4)])
