import random

import pytest

from localrank.graph import DirectedGraph

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_graph(rng: random.Random, n_max=8, density=None, loops=True, n_min=1):
    n = rng.randint(n_min, n_max)
    d = rng.uniform(0.1, 0.5) if density is None else density
    arcs = [(a, b) for a in range(n) for b in range(n) if (loops or a != b) and rng.random() < d]
    return DirectedGraph(n, arcs)


# Nodes: u=0, u1=1, u2=2, v=3, v1=4, then the hidden extras.
TWIN_CORE = [(1, 0), (2, 0), (3, 3), (4, 3)]
TWIN_KERNEL = {0, 1, 3}


@pytest.fixture
def twin_g1():
    """u ranks above v: u2 has three hidden parents."""
    return DirectedGraph(8, TWIN_CORE + [(5, 2), (6, 2), (7, 2)])


@pytest.fixture
def twin_g2():
    """v ranks above u: v1 has hidden parents, one of them u2."""
    return DirectedGraph(7, TWIN_CORE + [(5, 4), (6, 4), (2, 4)])


@pytest.fixture
def two_star():
    """u=0 with parents 1, 2; v=3 with parent 4; both self-looped; node 5 isolated."""
    return DirectedGraph(6, [(0, 0), (1, 0), (2, 0), (3, 3), (4, 3)])


def clique_example_source():
    arcs = [(a, b) for a in range(5) for b in range(5) if a != b] + [(2, 2)]
    arcs += [(1, 5), (1, 6), (2, 5), (4, 7), (5, 2), (6, 2), (6, 5), (6, 0)]
    return DirectedGraph(8, arcs)


def domset_example_source():
    return DirectedGraph(5, [(0, 2), (1, 0), (2, 0), (2, 3), (2, 4), (3, 2), (4, 2)])
