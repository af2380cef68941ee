import itertools
import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from bracdraw.drawing import BendBudget
from bracdraw.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def complete(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star(k: int) -> Graph:
    return Graph(k + 1, [(0, i) for i in range(1, k + 1)])


def theta(lengths, n_extra: int = 0) -> Graph:
    """Hubs 0 and 1 joined by internally disjoint paths of the given lengths."""
    edges = []
    nxt = 2
    for ln in lengths:
        prev = 0
        for _ in range(ln - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, 1))
    return Graph(nxt + n_extra, edges)


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    return Graph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def uniform_budget(g: Graph, b: int, beta: int) -> BendBudget:
    return BendBudget.uniform(g, b, beta)


@st.composite
def graphs(draw, min_n: int = 0, max_n: int = 9):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, keep in zip(pairs, mask) if keep])


@pytest.fixture
def rng():
    return random.Random(12345)
