import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mergeruns import trees

REFERENCE_TERM = "a.b.(c || d.(e || f))"
REFERENCE_SHAPE = (((), ((), ())),)  # nested-tuple form for the oracles

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ref_term() -> str:
    return REFERENCE_TERM


@pytest.fixture
def ref_tree() -> trees.SyntaxTree:
    return trees.parse_process(REFERENCE_TERM)


@pytest.fixture
def ref_shape():
    return REFERENCE_SHAPE


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
