import io
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

GOLDEN_SESSIONS = """node,location,start,end
aa:bb:cc:dd:ee:ff,Loc-1,44400343,76404567
a1:b2:c3:d4:e5:f6,Loc-1,64300343,86895742
a7:b8:c9:d1:e2:f3,Loc-1,56744343,89404567
a4:b5:c6:d7:e8:f9,Loc-4,62846767,88878766
"""


@pytest.fixture
def golden_sessions_text() -> str:
    return GOLDEN_SESSIONS


@pytest.fixture
def golden_sessions_stream():
    return io.StringIO(GOLDEN_SESSIONS)


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record one acceptance line, then fail the test if the check failed."""

    def record(number: int, title: str, ok: bool, detail: str):
        ACCEPTANCE[number] = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
