import numpy as np
import pytest

from ccdhest.graph import Graph


def assert_within_sigma(count, trials, p, k=5.0):
    """Binomial ``count`` out of ``trials`` lies within ``k`` standard deviations of ``p``."""
    sd = np.sqrt(trials * p * (1 - p))
    assert abs(count - trials * p) <= k * sd, (count, trials * p, sd)


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def star5():
    return Graph.from_edges(6, [(0, i) for i in range(1, 6)])


def random_graph(rng, n, p):
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.stack([iu[0][keep], iu[1][keep]], axis=1))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split("-")[0][2:].rstrip("ab")), k)):
        terminalreporter.write_line(ACCEPTANCE[key])
