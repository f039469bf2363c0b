import os
import warnings

import numpy as np
import pytest

from fracinfluence import ActivationProfile, Graph

warnings.filterwarnings("ignore", message="The TBB threading layer")

ACCEPTANCE_LINES = []


def random_tiny_graph(rng, max_nodes=8, max_edges=12, min_nodes=2):
    """Random directed graph with uniform(0, 1) edge probabilities."""
    n = int(rng.integers(min_nodes, max_nodes + 1))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    chosen = rng.choice(len(pairs), size=m, replace=False)
    edges = sorted(pairs[i] for i in chosen)
    return Graph.from_edges(n, edges, rng.random(m))


def random_profile(rng, n, a_choices=(0.5, 1.0), b_choices=(0.0, 0.2)):
    return ActivationProfile(rng.choice(a_choices, n), rng.choice(b_choices, n))


def random_instances(seed, count, **kw):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = random_tiny_graph(rng, **kw)
        out.append((g, random_profile(rng, g.node_count)))
    return out


def brute_sigma(graph, S0):
    """Plain-Python enumeration of live-edge subsets with an explicit BFS."""
    edges = graph.edges
    total = 0.0
    for mask in range(1 << len(edges)):
        w = 1.0
        adj = {}
        for e, (u, v, p) in enumerate(edges):
            if mask >> e & 1:
                w *= p
                adj.setdefault(u, []).append(v)
            else:
                w *= 1 - p
        seen = set(S0)
        stack = list(S0)
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        total += w * len(seen)
    return total


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)], 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cache_dir():
    from fracinfluence.datasets import default_cache_dir

    return os.environ.get("FRAC_INFLUENCE_CACHE") or str(default_cache_dir())
