import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from risesim.scenario import CANONICAL_SCENES, load_canonical  # noqa: E402

# filled by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def canonical():
    return {sid: load_canonical(sid) for sid in CANONICAL_SCENES}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
