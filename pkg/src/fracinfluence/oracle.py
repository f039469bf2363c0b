"""Brute-force ground truth for tiny instances.

Spread is computed by enumerating all ``2**m`` live-edge subgraphs with
their probabilities. The objective is computed by enumerating all ``2**n``
initial seed sets. None of this shares code with the Monte-Carlo or pool
estimators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .diffusion import SeedingSemantics
from .exceptions import DomainError, SizeError
from .graph import Graph
from .marketing import ActivationProfile, Allocation, check_feasible

MAX_EDGES = 20
MAX_NODES = 12
MAX_SUBMOD_NODES = 8
MAX_GRID_POINTS = 10**7
_CHUNK = 1 << 12


def _check_edges(graph):
    if graph.edge_count > MAX_EDGES:
        raise SizeError(f"exact enumeration needs at most {MAX_EDGES} edges, got {graph.edge_count}")


def _realizations(graph, lo, hi):
    """Kept-edge masks ``(hi - lo, m)`` and probabilities of subsets lo..hi-1."""
    idx = np.arange(lo, hi, dtype=np.int64)
    kept = ((idx[:, None] >> np.arange(graph.edge_count)) & 1).astype(bool)
    p = graph.probs
    w = np.where(kept, p, 1.0 - p).prod(axis=1)
    return kept, w


def _reach(graph, kept, start):
    """Boolean ``(C, n)`` reachability from node set ``start`` per realization."""
    active = np.zeros((len(kept), graph.node_count), dtype=bool)
    active[:, list(start)] = True
    src, dst = graph.sources, graph.targets
    while True:
        before = active.sum()
        for e in range(graph.edge_count):
            active[:, dst[e]] |= active[:, src[e]] & kept[:, e]
        if active.sum() == before:
            return active


def exact_sigma(graph: Graph, S0) -> float:
    """Expected number of nodes reached from ``S0``, by full enumeration."""
    _check_edges(graph)
    S0 = sorted({int(v) for v in S0})
    if not S0:
        return 0.0
    if S0[0] < 0 or S0[-1] >= graph.node_count:
        raise DomainError("seed node out of range")
    total = 0.0
    for lo in range(0, 1 << graph.edge_count, _CHUNK):
        kept, w = _realizations(graph, lo, min(lo + _CHUNK, 1 << graph.edge_count))
        total += float(w @ _reach(graph, kept, S0).sum(axis=1))
    return total


def _subset_or(values, n):
    """``out[S] = OR of values[v] for v in S`` over all ``2**n`` subsets S.

    ``values`` has shape ``(n, C)``; output has shape ``(2**n, C)``.
    """
    out = np.zeros((1 << n,) + values.shape[1:], dtype=values.dtype)
    for j in range(n):
        view = out.reshape((1 << (n - j - 1), 2, 1 << j) + values.shape[1:])
        view[:, 1] = view[:, 0] | values[j]
    return out


def sigma_table(graph: Graph) -> np.ndarray:
    """Exact spread of every subset, indexed by bitmask (bit v = node v)."""
    n = graph.node_count
    if n > MAX_NODES:
        raise SizeError(f"subset enumeration needs at most {MAX_NODES} nodes, got {n}")
    _check_edges(graph)
    popcount = np.array([bin(x).count("1") for x in range(1 << n)], dtype=np.float64)
    bits = (1 << np.arange(n)).astype(np.int64)
    table = np.zeros(1 << n)
    for lo in range(0, 1 << graph.edge_count, _CHUNK):
        kept, w = _realizations(graph, lo, min(lo + _CHUNK, 1 << graph.edge_count))
        # reach mask of every single node, per realization: shape (n, C)
        masks = np.stack([_reach(graph, kept, [v]) @ bits for v in range(n)])
        table += popcount[_subset_or(masks, n)] @ w
    return table


def subset_weights(q) -> np.ndarray:
    """Probability of each seed set when node v seeds independently w.p. q[v].

    Accepts ``(n,)`` or a batch ``(B, n)``; returns ``(2**n,)`` or ``(B, 2**n)``.
    """
    q = np.asarray(q, dtype=np.float64)
    batch = q.ndim == 2
    q2 = np.atleast_2d(q)
    B, n = q2.shape
    out = np.ones((B, 1 << n))
    for j in range(n):
        view = out.reshape(B, 1 << (n - j - 1), 2, 1 << j)
        view[:, :, 0] *= (1.0 - q2[:, j])[:, None, None]
        view[:, :, 1] *= q2[:, j][:, None, None]
    return out if batch else out[0]


def exact_F(graph: Graph, profile: ActivationProfile, alloc: Allocation,
            semantics=SeedingSemantics.GLOBAL_BASELINE, table=None) -> float:
    """Expected cascade size, summing over every initial seed set."""
    semantics = SeedingSemantics.parse(semantics)
    if len(profile) != graph.node_count:
        raise DomainError("profile length does not match graph")
    check_feasible(alloc, profile)
    if table is None:
        table = sigma_table(graph)
    q = profile.seed_probabilities(alloc.y, semantics is SeedingSemantics.SELECTED_ONLY)
    return float(subset_weights(q) @ table)


@dataclass(frozen=True)
class GridSpec:
    """Allocation grid: each y_v ranges over multiples of ``step`` up to
    ``min(cap_v, K)``, plus that boundary point itself."""

    step: float = 0.25

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"grid step must be > 0, got {self.step}")

    def levels(self, cap: float, budget: float) -> np.ndarray:
        top = min(cap, budget)
        k = int(np.floor(top / self.step + 1e-9))
        pts = np.minimum(self.step * np.arange(k + 1), top)
        if top - pts[-1] > 1e-9:
            pts = np.append(pts, top)
        return pts


def _grid_points(level_sets, budget):
    """All level combinations with total <= budget, as an array (P, n)."""
    rows = np.zeros((1, 0))
    for levels in level_sets:
        sums = rows.sum(axis=1)[:, None] + levels[None, :]
        r, c = np.nonzero(sums <= budget + 1e-9)
        rows = np.column_stack([rows[r], levels[c]])
    return rows


def _count_grid(level_sets, budget, step):
    # count combinations via dp on budget units; caps are rounded up to a unit
    units = int(np.floor(budget / step + 1e-9)) + 1
    dp = np.zeros(units + 1, dtype=object)
    dp[0] = 1
    for levels in level_sets:
        cost = [int(np.floor(y / step + 1e-9)) for y in levels]
        new = np.zeros_like(dp)
        for c in cost:
            new[c:] = new[c:] + dp[:len(dp) - c]
        dp = new
    return int(dp.sum())


def grid_optimum(graph: Graph, profile: ActivationProfile, K: float, grid: GridSpec = GridSpec(),
                 semantics=SeedingSemantics.GLOBAL_BASELINE, table=None):
    """Best allocation on the grid by exhaustive search.

    Returns ``(Allocation, value)``. The value lower-bounds the continuous
    optimum.
    """
    K = float(K)
    if not K >= 0:
        raise DomainError(f"budget must be >= 0, got {K}")
    if len(profile) != graph.node_count:
        raise DomainError("profile length does not match graph")
    semantics = SeedingSemantics.parse(semantics)
    level_sets = [grid.levels(c, K) for c in profile.caps()]
    if _count_grid(level_sets, K, grid.step) > MAX_GRID_POINTS:
        raise SizeError("grid enumeration exceeds guard")
    if table is None:
        table = sigma_table(graph)
    pts = _grid_points(level_sets, K)
    selected_only = semantics is SeedingSemantics.SELECTED_ONLY
    best_val, best_y = -np.inf, None
    for lo in range(0, len(pts), 4096):
        chunk = pts[lo:lo + 4096]
        q = np.minimum(profile.a * chunk + profile.b, 1.0)
        if selected_only:
            q = np.where(chunk > 0, q, 0.0)
        vals = subset_weights(q) @ table
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_y = float(vals[i]), chunk[i]
    return Allocation(best_y, K), best_val


@dataclass
class SubmodularityReport:
    nodes: int
    edges: int
    pairs_checked: int
    max_violation: float
    worst_pair: tuple

    @property
    def ok(self) -> bool:
        return self.max_violation <= 1e-9

    def to_json(self) -> str:
        d = dict(self.__dict__, ok=self.ok, worst_pair=[sorted(s) for s in self.worst_pair])
        return json.dumps(d)


def check_submodularity(graph: Graph, table=None) -> SubmodularityReport:
    """Check ``sigma(R|S) + sigma(R&S) <= sigma(R) + sigma(S)`` over all pairs."""
    n = graph.node_count
    if n > MAX_SUBMOD_NODES:
        raise SizeError(f"pairwise check needs at most {MAX_SUBMOD_NODES} nodes, got {n}")
    if table is None:
        table = sigma_table(graph)
    R = np.arange(1 << n)[:, None]
    S = np.arange(1 << n)[None, :]
    viol = table[R | S] + table[R & S] - table[R] - table[S]
    i, j = np.unravel_index(int(np.argmax(viol)), viol.shape)
    unpack = lambda mask: frozenset(v for v in range(n) if mask >> v & 1)  # noqa: E731
    return SubmodularityReport(n, graph.edge_count, viol.size, max(float(viol[i, j]), 0.0),
                               (unpack(i), unpack(j)))

