import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coevo_csp import make_instance  # noqa: E402

NEQ2 = [(0, 0), (1, 1)]


@pytest.fixture
def triangle2():
    """Three pairwise-different variables over {0, 1}: unsatisfiable."""
    return make_instance("tri2", [[0, 1]] * 3,
                         [(0, 1, "conflicts", NEQ2), (1, 2, "conflicts", NEQ2),
                          (0, 2, "conflicts", NEQ2)])


@pytest.fixture
def triangle3():
    neq = [(v, v) for v in range(3)]
    return make_instance("tri3", [[0, 1, 2]] * 3,
                         [(0, 1, "conflicts", neq), (1, 2, "conflicts", neq),
                          (0, 2, "conflicts", neq)])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
