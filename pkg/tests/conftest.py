import random
import sys

import pytest

from latticeplast.generators import random_connected_graph
from latticeplast.model import benchmark_graph, graph_from_edges

BENCH_EDGES = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 5), (4, 5), (4, 6), (5, 6)]


@pytest.fixture(scope="session")
def bench():
    return benchmark_graph()


@pytest.fixture(scope="session")
def one_spring():
    return graph_from_edges(2, [(1, 2)], 1, 2)


@pytest.fixture(scope="session")
def path3():
    # phi=1 -- a=2 -- psi=3
    return graph_from_edges(3, [(1, 2), (2, 3)], 1, 3)


def random_graphs(count, seed=0, **kw):
    rng = random.Random(seed)
    return [random_connected_graph(rng, **kw) for _ in range(count)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULT_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULT_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
