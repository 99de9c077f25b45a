import sys
from pathlib import Path

import pytest
from hypothesis import settings

from zeckendorf_intervals.plrs_core import SequenceCache

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

TEST_SIGNATURES = [(1, 1), (2, 3, 1), (3, 2, 1), (1, 1, 1), (2, 2, 1)]
MONOTONE_SIGNATURES = [(1, 1), (3, 2, 1), (2, 2, 1), (1, 1, 1)]


@pytest.fixture(scope="session")
def fib():
    return SequenceCache([1, 1])


@pytest.fixture(scope="session")
def caches():
    return {c: SequenceCache(c) for c in TEST_SIGNATURES}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
