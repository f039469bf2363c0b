"""Generalized discrete greedy for fractional budget allocation.

Each round picks the unselected node with the largest weighted marginal gain
``a_v * (sigma(S + v) - sigma(S))``, gives it ``min((1 - b_v) / a_v, remaining)``
and adds it to ``S``. The loop stops once the budget is spent or every
eligible node is selected, so at most the last selected node ends up with an
activation probability strictly below 1.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _kernels
from .diffusion import LiveEdgePool, SeedingSemantics, estimate_F
from .exceptions import ConfigError, DomainError
from .graph import Graph
from .marketing import ActivationProfile, Allocation
from .oracle import MAX_NODES, exact_sigma, sigma_table
from .validation import check_budget, check_count, check_graph, check_profile, check_seed

# remaining budget below this counts as spent; absorbs float residue of sum(y)
SPENT_TOL = 1e-12


class PoolSpread:
    """Marginal spread on a fixed live-edge pool, kept in integer counts."""

    def __init__(self, pool: LiveEdgePool):
        self.pool = pool
        self.scale = 1.0 / pool.R
        self.reset()

    def reset(self):
        self.covered = np.zeros((self.pool.R, self.pool.node_count), dtype=np.bool_)
        self.evaluations = 0

    def gains(self, nodes) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.int64)
        self.evaluations += len(nodes)
        return _kernels.pool_marginal_counts(self.pool.indptr, self.pool.targets, self.covered, nodes)

    def commit(self, v: int):
        _kernels.pool_cover(self.pool.indptr, self.pool.targets, self.covered, int(v))


class ExactSpread:
    """Marginal spread by exact enumeration. For oracle-sized graphs only."""

    scale = 1.0

    def __init__(self, graph: Graph):
        self.graph = graph
        self.table = sigma_table(graph) if graph.node_count <= MAX_NODES else None
        self.reset()

    def reset(self):
        self.mask = 0
        self.members = []
        self.base = 0.0
        self.evaluations = 0

    def _sigma(self, mask, members):
        if self.table is not None:
            return float(self.table[mask])
        return exact_sigma(self.graph, members)

    def gains(self, nodes) -> np.ndarray:
        self.evaluations += len(nodes)
        return np.array([self._sigma(self.mask | (1 << int(v)), self.members + [int(v)]) - self.base
                         for v in nodes])

    def commit(self, v: int):
        self.mask |= 1 << int(v)
        self.members.append(int(v))
        self.base = self._sigma(self.mask, self.members)


def make_spread(spread_eval, graph: Graph):
    if isinstance(spread_eval, LiveEdgePool):
        if spread_eval.node_count != graph.node_count:
            raise ConfigError("pool was built for a different graph")
        return PoolSpread(spread_eval)
    if isinstance(spread_eval, (PoolSpread, ExactSpread)):
        spread_eval.reset()
        return spread_eval
    if spread_eval == "exact":
        return ExactSpread(graph)
    raise ConfigError(f"spread_eval must be a LiveEdgePool or 'exact', got {spread_eval!r}")


@dataclass
class GreedyConfig:
    budget: float
    spread_eval: object = "exact"
    lazy: bool = True
    tie_break: str = "lowest-node-id"

    def __post_init__(self):
        self.budget = check_budget(self.budget)
        if self.tie_break != "lowest-node-id":
            raise ConfigError(f"unsupported tie_break {self.tie_break!r}")


@dataclass(frozen=True)
class TraceStep:
    node: int
    weighted_gain: float
    y: float
    spent: float


@dataclass
class GreedyTrace:
    steps: list = field(default_factory=list)
    evaluations: int = 0

    @property
    def selected(self) -> list[int]:
        return [s.node for s in self.steps]

    @property
    def last(self):
        return self.steps[-1].node if self.steps else None

    def to_jsonl(self) -> str:
        return "".join(json.dumps(dict(asdict(s), round=i)) + "\n" for i, s in enumerate(self.steps))

    def __eq__(self, other):
        if not isinstance(other, GreedyTrace):
            return NotImplemented
        return self.steps == other.steps


def _naive_rounds(spread, weights, eligible):
    """Re-evaluate every remaining candidate each round."""
    remaining = np.array(eligible, dtype=np.int64)
    while len(remaining):
        w = weights[remaining] * spread.gains(remaining) * spread.scale
        j = int(np.argmax(w))  # first maximum = lowest node id
        v = int(remaining[j])
        yield v, float(w[j])
        remaining = np.delete(remaining, j)


def lazy_selection(spread, weights, eligible):
    """CELF selection order; identical to :func:`_naive_rounds` for
    submodular spread.

    Heap entries are ``(-bound, node, round)``. A popped entry computed in the
    current round beats every other entry's stale upper bound, so it is the
    true argmax; ties resolve to the lowest node id through tuple order.
    """
    eligible = np.array(eligible, dtype=np.int64)
    if not len(eligible):
        return
    w0 = weights[eligible] * spread.gains(eligible) * spread.scale
    heap = [(-float(w), int(v), 0) for w, v in zip(w0, eligible)]
    heapq.heapify(heap)
    rnd = 0
    while heap:
        neg, v, seen = heapq.heappop(heap)
        if seen == rnd:
            yield v, -neg
            rnd += 1
            continue
        w = float(weights[v] * spread.gains([v])[0] * spread.scale)
        heapq.heappush(heap, (-w, v, rnd))


def greedy_allocate(graph: Graph, profile: ActivationProfile, config: GreedyConfig):
    """Run the greedy allocation. Returns ``(Allocation, GreedyTrace)``.

    Nodes with slope 0 can never reach probability 1 and carry zero weight, so
    they are never selected.
    """
    graph = check_graph(graph)
    profile = check_profile(profile, graph.node_count)
    K = check_budget(config.budget)
    eligible = np.flatnonzero(profile.a > 0)
    if not len(eligible):
        raise DomainError("no selectable nodes (every slope is 0)")
    spread = make_spread(config.spread_eval, graph)
    caps = profile.caps()
    y = np.zeros(graph.node_count)
    trace = GreedyTrace()
    spent = 0.0
    if K - spent > SPENT_TOL:
        rounds = (lazy_selection if config.lazy else _naive_rounds)(spread, profile.a, eligible)
        for v, gain in rounds:
            y[v] = min(caps[v], K - spent)
            spent = float(y.sum())
            trace.steps.append(TraceStep(v, gain, float(y[v]), spent))
            if K - spent <= SPENT_TOL:
                break
            spread.commit(v)
    trace.evaluations = spread.evaluations
    return Allocation(y, K), trace


def degree_baseline(graph: Graph, profile: ActivationProfile, K: float) -> Allocation:
    """Fill nodes to probability 1 in descending out-degree order."""
    graph = check_graph(graph)
    profile = check_profile(profile, graph.node_count)
    K = check_budget(K)
    order = np.lexsort((np.arange(graph.node_count), -graph.out_degree))
    caps = profile.caps()
    y = np.zeros(graph.node_count)
    spent = 0.0
    for v in order:
        if K - spent <= SPENT_TOL:
            break
        if profile.a[v] <= 0:
            continue
        y[v] = min(caps[v], K - spent)
        spent = float(y.sum())
    return Allocation(y, K)


def fractional_nodes(alloc: Allocation, profile: ActivationProfile, tol: float = 1e-12) -> np.ndarray:
    """Allocated nodes whose activation probability is strictly inside (0, 1)."""
    p = profile.evaluate(alloc.y)
    return np.flatnonzero((alloc.y > 0) & (p > tol) & (p < 1 - tol))


class _AllocatorMixin:
    def score(self, graph, profile=None, n_sims=1000, semantics="selected-only", random_state=None):
        """Monte-Carlo expected spread of the fitted allocation."""
        check_is_fitted(self, "allocation_")
        profile = check_profile(profile, graph.node_count)
        seed = check_seed(self.random_state if random_state is None else random_state)
        return estimate_F(graph, profile, self.allocation_, SeedingSemantics.parse(semantics),
                          n_sims, seed).mean

    def predict(self, X=None):
        """The fitted discount vector."""
        check_is_fitted(self, "allocation_")
        return np.array(self.allocation_.y)


class GreedyAllocator(_AllocatorMixin, BaseEstimator):
    """Estimator wrapper around :func:`greedy_allocate`.

    Parameters
    ----------
    budget : float
        Total discount ``K``.
    pool_size : int
        Number of live-edge realizations used to estimate spread.
    spread : {"pool", "exact"}
        Spread evaluator. ``"exact"`` enumerates edge subsets and only works
        on tiny graphs.
    lazy : bool
        Use CELF-style lazy re-evaluation.
    random_state : int
        Seed of the live-edge pool.

    Attributes
    ----------
    allocation_ : Allocation
    trace_ : GreedyTrace
    pool_ : LiveEdgePool or None
    selected_ : list of int
    """

    def __init__(self, budget=1.0, pool_size=1024, spread="pool", lazy=True, random_state=0):
        self.budget = budget
        self.pool_size = pool_size
        self.spread = spread
        self.lazy = lazy
        self.random_state = random_state

    def fit(self, graph, profile=None, pool=None):
        graph = check_graph(graph)
        profile = check_profile(profile, graph.node_count)
        if self.spread == "exact":
            evaluator, self.pool_ = "exact", None
        elif self.spread == "pool":
            if pool is None:
                pool = LiveEdgePool(graph, check_count(self.pool_size, "pool_size"),
                                    check_seed(self.random_state))
            evaluator = self.pool_ = pool
        else:
            raise ConfigError(f"spread must be 'pool' or 'exact', got {self.spread!r}")
        config = GreedyConfig(self.budget, evaluator, lazy=bool(self.lazy))
        self.allocation_, self.trace_ = greedy_allocate(graph, profile, config)
        self.selected_ = self.trace_.selected
        return self


class DegreeAllocator(_AllocatorMixin, BaseEstimator):
    """Out-degree heuristic with the same interface as :class:`GreedyAllocator`."""

    def __init__(self, budget=1.0, random_state=0):
        self.budget = budget
        self.random_state = random_state

    def fit(self, graph, profile=None):
        graph = check_graph(graph)
        self.allocation_ = degree_baseline(graph, check_profile(profile, graph.node_count), self.budget)
        self.selected_ = self.allocation_.support.tolist()
        return self
