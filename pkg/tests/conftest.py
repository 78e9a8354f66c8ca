import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from svdgft.graph import DirectedGraph

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE = {}


def record(criterion, ok, detail):
    ACCEPTANCE[criterion] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cycle3():
    return DirectedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)])


def graph_from_matrix(A):
    """Graph with adjacency ``A`` (``A[dst, src]``)."""
    d, s = np.nonzero(A)
    return DirectedGraph(A.shape[0], [(int(j), int(i), float(A[i, j])) for i, j in zip(d, s)])
