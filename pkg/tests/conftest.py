import numpy as np
import pytest

from rigsim.graphs import Graph


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def random_connected_graph(rng, n_max=12, p_lo=0.15, p_hi=0.9) -> Graph:
    """Random ER graph conditioned on connectivity (for oracle tests)."""
    while True:
        n = int(rng.integers(2, n_max + 1))
        p = rng.uniform(p_lo, p_hi)
        mask = rng.random((n, n)) < p
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
        g = Graph.from_edges(n, edges)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if int(w) not in seen:
                    seen.add(int(w))
                    stack.append(int(w))
        if len(seen) == n:
            return g


def random_graph(rng, n_max=12, p_lo=0.1, p_hi=0.9) -> Graph:
    n = int(rng.integers(1, n_max + 1))
    p = rng.uniform(p_lo, p_hi)
    mask = rng.random((n, n)) < p
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
    return Graph.from_edges(n, edges)
