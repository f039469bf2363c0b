import itertools

import numpy as np
import pytest

from conftest import brute_sigma, random_tiny_graph
from fracinfluence import (
    ActivationProfile,
    Allocation,
    Graph,
    GridSpec,
    SeedingSemantics,
    assign_weighted_cascade,
    check_submodularity,
    exact_F,
    exact_sigma,
    grid_optimum,
)
from fracinfluence.exceptions import FeasibilityError, SizeError
from fracinfluence.oracle import _grid_points, sigma_table, subset_weights

GLOB = SeedingSemantics.GLOBAL_BASELINE
SEL = SeedingSemantics.SELECTED_ONLY


def test_exact_sigma_examples():
    g = Graph.from_edges(2, [(0, 1)], 0.3)
    assert exact_sigma(g, []) == 0
    assert exact_sigma(g, [0]) == pytest.approx(1.3)
    path = Graph.from_edges(3, [(0, 1), (1, 2)], 0.5)
    assert exact_sigma(path, [0]) == pytest.approx(1.75)
    assert brute_sigma(path, {0}) == pytest.approx(1.75)


def test_exact_sigma_size_guard():
    n = 7
    edges = [(u, v) for u in range(n) for v in range(n) if u != v][:21]
    with pytest.raises(SizeError):
        exact_sigma(Graph.from_edges(n, edges, 0.5), [0])


def test_sigma_table_matches_single_queries(rng):
    for _ in range(10):
        g = random_tiny_graph(rng, max_nodes=6, max_edges=10)
        table = sigma_table(g)
        for mask in range(1 << g.node_count):
            S = [v for v in range(g.node_count) if mask >> v & 1]
            assert table[mask] == pytest.approx(brute_sigma(g, S), abs=1e-12)


def test_sigma_table_monotone(rng):
    for _ in range(10):
        g = random_tiny_graph(rng)
        t = sigma_table(g)
        for mask in range(len(t)):
            for v in range(g.node_count):
                assert t[mask] <= t[mask | (1 << v)] + 1e-12


def test_subset_weights_brute():
    q = np.array([0.2, 0.7, 0.5])
    w = subset_weights(q)
    for mask in range(8):
        expect = np.prod([q[v] if mask >> v & 1 else 1 - q[v] for v in range(3)])
        assert w[mask] == pytest.approx(expect)
    assert subset_weights(np.stack([q, q])).shape == (2, 8)


def test_exact_F_examples():
    g = Graph.from_edges(2, [(0, 1)], 0.5)
    prof = ActivationProfile.uniform(2)
    assert exact_F(g, prof, Allocation([1, 0], 1), GLOB) == pytest.approx(1.5)
    assert exact_F(g, prof, Allocation.zeros(2), GLOB) == 0
    path = Graph.from_edges(3, [(0, 1), (1, 2)], 0.5)
    full = exact_F(path, ActivationProfile.uniform(3), Allocation([1, 1, 1], 3), GLOB)
    assert full == pytest.approx(exact_sigma(path, [0, 1, 2]))


def test_exact_F_by_hand_enumeration(rng):
    # sum over all seed sets of P(S) * sigma(S), written out directly
    g = random_tiny_graph(rng, max_nodes=4, max_edges=6)
    prof = ActivationProfile(rng.choice([0.5, 1.0], g.node_count), rng.choice([0, 0.2], g.node_count))
    y = rng.random(g.node_count) * 0.5
    alloc = Allocation(y, y.sum())
    for sem, sel in ((GLOB, False), (SEL, True)):
        q = prof.a * y + prof.b
        if sel:
            q = np.where(y > 0, q, 0)
        total = 0.0
        for r in range(g.node_count + 1):
            for S in itertools.combinations(range(g.node_count), r):
                p = np.prod([q[v] if v in S else 1 - q[v] for v in range(g.node_count)])
                total += p * brute_sigma(g, set(S))
        assert exact_F(g, prof, alloc, sem) == pytest.approx(total, abs=1e-12)


def test_exact_F_semantics_differ_with_intercepts():
    g = Graph.from_edges(2, [(0, 1)], 0.5)
    prof = ActivationProfile([1, 1], [0.2, 0.2])
    assert exact_F(g, prof, Allocation.zeros(2), SEL) == 0
    assert exact_F(g, prof, Allocation.zeros(2), GLOB) > 0


def test_exact_F_errors():
    g = Graph.from_edges(2, [(0, 1)], 0.5)
    with pytest.raises(FeasibilityError):
        exact_F(g, ActivationProfile.uniform(2), Allocation([1.2, 0], 2))
    big = Graph.from_edges(13, [(i, i + 1) for i in range(12)], 0.5)
    with pytest.raises(SizeError):
        exact_F(big, ActivationProfile.uniform(13), Allocation.zeros(13))


def test_grid_examples():
    g1 = Graph([0], [], [], [])
    alloc, val = grid_optimum(g1, ActivationProfile.uniform(1), 0.5, GridSpec(0.25))
    assert alloc.y.tolist() == [0.5] and val == pytest.approx(0.5)

    g2 = Graph.from_edges(2, [(0, 1)], 1.0)
    levels = [GridSpec(0.25).levels(1.0, 1.0)] * 2
    assert len(_grid_points(levels, 1.0)) == 15
    alloc, val = grid_optimum(g2, ActivationProfile.uniform(2), 1.0, GridSpec(0.25))
    assert alloc.y.tolist() == [1.0, 0.0] and val == pytest.approx(2.0)

    alloc, val = grid_optimum(g2, ActivationProfile.uniform(2), 0.0)
    assert alloc.y.tolist() == [0, 0] and val == 0


def test_grid_levels_include_boundaries():
    g = GridSpec(0.25)
    assert g.levels(1.6, 3).tolist() == pytest.approx([0, .25, .5, .75, 1, 1.25, 1.5, 1.6])
    assert g.levels(2.0, 0.6).tolist() == pytest.approx([0, .25, .5, .6])


def test_grid_value_monotone_in_budget_and_refinement(rng):
    g = assign_weighted_cascade(random_tiny_graph(rng, max_nodes=5, max_edges=8))
    prof = ActivationProfile(rng.choice([0.5, 1], g.node_count), rng.choice([0, 0.2], g.node_count))
    vals = [grid_optimum(g, prof, K, GridSpec(0.25))[1] for K in (0, 0.5, 1, 1.5, 2)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    coarse = grid_optimum(g, prof, 1.0, GridSpec(0.5))[1]
    fine = grid_optimum(g, prof, 1.0, GridSpec(0.25))[1]
    assert coarse <= fine + 1e-12


def test_grid_guard():
    g = Graph.from_edges(12, [(i, i + 1) for i in range(11)], 0.5)
    with pytest.raises(SizeError):
        grid_optimum(g, ActivationProfile.uniform(12, 0.5), 6.0, GridSpec(0.1))


def test_submodularity_edgeless_is_tight():
    g = Graph(np.arange(4), [], [], [])
    rep = check_submodularity(g)
    assert rep.ok and rep.max_violation == 0 and rep.pairs_checked == 256
    t = sigma_table(g)
    R = np.arange(16)[:, None]
    S = np.arange(16)[None, :]
    np.testing.assert_allclose(t[R | S] + t[R & S], t[R] + t[S])


def test_submodularity_random_weighted_cascade(rng):
    for _ in range(5):
        n = 6
        pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
        chosen = rng.choice(len(pairs), 10, replace=False)
        g = assign_weighted_cascade(Graph.from_edges(n, [pairs[i] for i in chosen]))
        rep = check_submodularity(g)
        assert rep.ok, rep
        assert "max_violation" in rep.to_json()


def test_submodularity_detects_violation():
    # sigma = |S|^2 is supermodular; worst pair is disjoint sizes 1 and 2: 9 - 1 - 4 = 4
    t = np.array([bin(m).count("1") ** 2 for m in range(8)], dtype=float)
    rep = check_submodularity(Graph(np.arange(3), [], [], []), table=t)
    assert not rep.ok and rep.max_violation == pytest.approx(4.0)


def test_submodularity_size_guard():
    with pytest.raises(SizeError):
        check_submodularity(Graph(np.arange(9), [], [], []))
