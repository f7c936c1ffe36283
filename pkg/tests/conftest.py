import os
import random

import pytest

ACCEPTANCE = {}


@pytest.fixture
def rng():
    return random.Random(int(os.environ.get("DVBKIT_SEED", 42)))


@pytest.fixture
def record():
    """record(number, ok, detail) stores an acceptance line for the summary."""
    def _record(number, ok, detail=""):
        ACCEPTANCE[number] = (ok, detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
