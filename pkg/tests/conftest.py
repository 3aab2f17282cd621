import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dessin_homology.complex_builder import boundary_matrices, build_complex  # noqa: E402


@pytest.fixture(scope="session")
def g1():
    return build_complex(1)


@pytest.fixture(scope="session")
def g2():
    return build_complex(2)


@pytest.fixture(scope="session")
def g2_mats(g2):
    return boundary_matrices(g2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, 9):
        status, title = RESULTS.get(number, ("NOT RUN", ""))
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
