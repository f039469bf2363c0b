"""Independent-cascade simulation and spread estimation.

Two estimators live here. :func:`estimate_F` runs fresh Monte-Carlo cascades
with random initial seeding and is what experiments report. :class:`LiveEdgePool`
fixes ``R`` sampled live-edge subgraphs once; :func:`sigma_hat` averages
reachability over them, which makes it deterministic, monotone and exactly
submodular in the seed set. The greedy search uses the pool.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rng import as_seed, stream_key_np, uniform_at_np
from .exceptions import DomainError
from .graph import Graph
from .marketing import ActivationProfile, Allocation, check_feasible


class SeedingSemantics(enum.Enum):
    """Who may be an initial seed.

    ``SELECTED_ONLY``: only nodes with a positive discount seed, with
    probability ``a_v y_v + b_v``. ``GLOBAL_BASELINE``: every node seeds with
    probability ``a_v y_v + b_v``, so undiscounted nodes still seed with
    probability ``b_v``.
    """

    SELECTED_ONLY = "selected-only"
    GLOBAL_BASELINE = "global-baseline"

    @classmethod
    def parse(cls, value) -> SeedingSemantics:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            raise DomainError(f"unknown seeding semantics {value!r}") from None


@dataclass(frozen=True, eq=False)
class CascadeOutcome:
    activated: frozenset
    activation_time: np.ndarray

    @property
    def size(self) -> int:
        return len(self.activated)


def _node_array(nodes, n) -> np.ndarray:
    arr = np.fromiter((int(v) for v in nodes), dtype=np.int64)
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        raise DomainError("seed node out of range")
    return arr


def simulate_cascade(graph: Graph, seeds, seed: int = 0, stream: int = 0) -> CascadeOutcome:
    """Run one cascade from ``seeds``.

    The random stream is identified by ``(seed, stream)``; edge ``e`` uses the
    uniform at counter ``e`` of that stream, see :func:`edge_coins`.
    """
    s = _node_array(seeds, graph.node_count)
    key = np.uint64(stream_key_np(seed, stream))
    t = _kernels.cascade_times(graph.indptr, graph.targets, graph.probs, s, key)
    return CascadeOutcome(frozenset(np.flatnonzero(t >= 0).tolist()), t)


def edge_coins(graph: Graph, seed: int = 0, stream: int = 0) -> np.ndarray:
    """Which edges would fire if attempted in stream ``(seed, stream)``."""
    key = stream_key_np(seed, stream)
    return uniform_at_np(key, np.arange(graph.edge_count, dtype=np.uint64)) < graph.probs


class LiveEdgePool:
    """``R`` live-edge realizations of a graph.

    Realization ``i`` keeps edge ``e`` iff the uniform at counter ``e`` of
    stream ``(seed, i)`` is below the edge probability.
    """

    def __init__(self, graph: Graph, R: int, seed: int = 0):
        R = int(R)
        if R < 1:
            raise DomainError(f"pool size must be >= 1, got {R}")
        self.graph = graph
        self.R = R
        self.rng_seed = int(seed)
        s = as_seed(seed)
        counts = _kernels.pool_counts(graph.indptr, graph.probs, s, R)
        indptr = np.zeros((R, graph.node_count + 1), np.int64)
        flat = np.concatenate([[0], np.cumsum(counts.ravel())])
        n = graph.node_count
        for i in range(R):
            indptr[i] = flat[i * n:(i + 1) * n + 1]
        targets = np.empty(int(flat[-1]), np.int64)
        _kernels.pool_fill(graph.indptr, graph.targets, graph.probs, s, indptr, targets)
        indptr.setflags(write=False)
        targets.setflags(write=False)
        self.indptr = indptr
        self.targets = targets

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def __len__(self):
        return self.R

    def __repr__(self):
        return f"LiveEdgePool(R={self.R}, seed={self.rng_seed}, kept={len(self.targets)})"

    def realization(self, i: int) -> list[tuple[int, int]]:
        """Kept edges of realization ``i`` as (source, target) pairs."""
        row = self.indptr[i]
        src = np.repeat(np.arange(self.node_count), np.diff(row))
        return list(zip(src.tolist(), self.targets[row[0]:row[-1]].tolist()))

    def cache_key(self) -> str:
        h = hashlib.sha256()
        for arr in (self.graph.sources, self.graph.targets, self.graph.probs):
            h.update(arr.tobytes())
        return f"{h.hexdigest()[:16]}-R{self.R}-s{self.rng_seed}"

    def save(self, path) -> None:
        np.savez_compressed(path, indptr=self.indptr, targets=self.targets,
                            meta=np.array([self.R, self.rng_seed], dtype=object))

    @classmethod
    def load(cls, path, graph: Graph) -> LiveEdgePool:
        with np.load(path, allow_pickle=True) as z:
            pool = cls.__new__(cls)
            pool.graph = graph
            pool.R, pool.rng_seed = (int(x) for x in z["meta"])
            pool.indptr = z["indptr"]
            pool.targets = z["targets"]
        if pool.indptr.shape != (pool.R, graph.node_count + 1):
            raise DomainError("cached pool does not match graph")
        return pool


def build_pool(graph: Graph, R: int, seed: int = 0) -> LiveEdgePool:
    return LiveEdgePool(graph, R, seed)


def sigma_hat(pool: LiveEdgePool, S0) -> float:
    """Average number of nodes reachable from ``S0`` across the pool."""
    s = _node_array(S0, pool.node_count)
    if len(s) == 0:
        return 0.0
    return _kernels.pool_reach_total(pool.indptr, pool.targets, s) / pool.R


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    stderr: float
    num_sims: int

    def __iter__(self):
        return iter((self.mean, self.stderr))


def estimate_F(graph: Graph, profile: ActivationProfile, alloc: Allocation,
               semantics=SeedingSemantics.SELECTED_ONLY, num_sims: int = 1000,
               seed: int = 0) -> SpreadEstimate:
    """Monte-Carlo estimate of the expected cascade size under ``alloc``.

    Each simulation seeds nodes independently per ``semantics`` and then runs
    a cascade; simulation ``i`` uses stream ``(seed, i)`` only, so the result
    does not depend on thread count.
    """
    semantics = SeedingSemantics.parse(semantics)
    num_sims = int(num_sims)
    if num_sims < 1:
        raise DomainError(f"num_sims must be >= 1, got {num_sims}")
    if len(profile) != graph.node_count:
        raise DomainError("profile length does not match graph")
    check_feasible(alloc, profile)
    q = profile.seed_probabilities(alloc.y, semantics is SeedingSemantics.SELECTED_ONLY)
    cand = np.flatnonzero(q > 0)
    counts = _kernels.mc_spread(graph.indptr, graph.targets, graph.probs,
                                cand, q[cand], as_seed(seed), num_sims)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / np.sqrt(num_sims)) if num_sims > 1 else 0.0
    return SpreadEstimate(mean, se, num_sims)
