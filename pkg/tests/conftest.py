import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from antimod import build_graph  # noqa: E402

TRIANGLE = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]
K22 = [(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)]


@pytest.fixture
def triangle():
    return build_graph(3, TRIANGLE)


@pytest.fixture
def k22():
    return build_graph(4, K22)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def complete_bipartite(m, n=None, w=1.0):
    n = m if n is None else n
    return build_graph(m + n, [(i, m + j, w) for i in range(m) for j in range(n)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for key in sorted(verdicts):
            terminalreporter.write_line(verdicts[key])
