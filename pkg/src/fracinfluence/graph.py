"""Directed graphs with per-edge activation probabilities.

Edges are stored in CSR order: sorted by source, then target, so edge index
``e`` in :attr:`Graph.sources` is also its position in the out-adjacency.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, ParseError


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable directed graph.

    Parameters
    ----------
    node_ids : array of int
        Raw identifier of each dense node index, ascending.
    sources, targets : array of int
        Edge endpoints as dense indices, lexicographically sorted.
    probs : array of float
        Activation probability of each edge.
    directed : bool
        Whether the graph was read as directed. Undirected input has already
        been doubled into a symmetric edge set.
    """

    node_ids: np.ndarray
    sources: np.ndarray
    targets: np.ndarray
    probs: np.ndarray
    directed: bool = True
    indptr: np.ndarray = field(init=False, repr=False)
    in_degree: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "node_ids", _frozen(self.node_ids, np.int64))
        set_(self, "sources", _frozen(self.sources, np.int64))
        set_(self, "targets", _frozen(self.targets, np.int64))
        set_(self, "probs", _frozen(self.probs, np.float64))
        n = len(self.node_ids)
        if not (len(self.sources) == len(self.targets) == len(self.probs)):
            raise ValueError("edge arrays must have equal length")
        if len(self.sources):
            if self.sources.min() < 0 or self.targets.min() < 0:
                raise ValueError("negative node index")
            if max(self.sources.max(), self.targets.max()) >= n:
                raise ValueError("node index out of range")
            if np.any(self.sources == self.targets):
                raise ValueError("self-loops are not allowed")
            key = self.sources * n + self.targets
            if np.any(np.diff(key) <= 0):
                raise ValueError("edges must be sorted and unique")
            if np.any((self.probs < 0) | (self.probs > 1)) or np.isnan(self.probs).any():
                raise DomainError("edge probabilities must lie in [0, 1]")
        set_(self, "indptr", _frozen(np.searchsorted(self.sources, np.arange(n + 1)), np.int64))
        set_(self, "in_degree", _frozen(np.bincount(self.targets, minlength=n), np.int64))

    @classmethod
    def from_edges(cls, n, edges, probs=None, directed=True, node_ids=None):
        """Build from ``(source, target)`` pairs of dense indices.

        Duplicates collapse and self-loops are dropped. Handy in tests.
        """
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        p = np.zeros(len(pairs)) if probs is None else np.broadcast_to(
            np.asarray(probs, dtype=np.float64), (len(pairs),))
        if not directed:
            pairs = np.concatenate([pairs, pairs[:, ::-1]])
            p = np.concatenate([p, p])
        keep = pairs[:, 0] != pairs[:, 1]
        pairs, p = pairs[keep], p[keep]
        key = pairs[:, 0] * max(n, 1) + pairs[:, 1]
        _, first = np.unique(key, return_index=True)
        pairs, p = pairs[first], p[first]
        if node_ids is None:
            node_ids = np.arange(n)
        return cls(node_ids, pairs[:, 0], pairs[:, 1], p, directed=directed)

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @property
    def edge_count(self) -> int:
        return len(self.sources)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.probs.tolist()))

    @property
    def adjacency(self) -> list[np.ndarray]:
        return [self.targets[self.indptr[v]:self.indptr[v + 1]] for v in range(self.node_count)]

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def out_edges(self, v: int) -> slice:
        return slice(int(self.indptr[v]), int(self.indptr[v + 1]))

    def with_probs(self, probs) -> Graph:
        return Graph(self.node_ids, self.sources, self.targets, probs, directed=self.directed)

    def index_of(self, raw_id: int) -> int:
        i = int(np.searchsorted(self.node_ids, raw_id))
        if i == self.node_count or self.node_ids[i] != raw_id:
            raise KeyError(raw_id)
        return i

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.directed == other.directed
            and np.array_equal(self.node_ids, other.node_ids)
            and np.array_equal(self.sources, other.sources)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.probs, other.probs)
        )

    __hash__ = None

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.node_count}, m={self.edge_count}, {kind})"


def parse_edge_list(text, directed: bool = True) -> Graph:
    """Parse a SNAP-style edge list.

    ``text`` may be a string or any iterable of lines (an open file works).
    Lines starting with ``#`` and blank lines are skipped. Raw identifiers are
    remapped to dense indices in ascending raw-id order. All probabilities
    start at 0; apply a weight model afterwards.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    us, vs = [], []
    for lineno, line in enumerate(text, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 node identifiers, got {len(parts)}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node identifier in {s!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("node identifiers must be nonnegative", lineno)
        us.append(u)
        vs.append(v)

    raw = np.array([us, vs], dtype=np.int64).reshape(2, -1)
    raw = raw[:, raw[0] != raw[1]]
    if raw.shape[1] == 0:
        raise ParseError("no edges")
    if not directed:
        raw = np.concatenate([raw, raw[::-1]], axis=1)
    node_ids, dense = np.unique(raw, return_inverse=True)
    dense = dense.reshape(2, -1)
    n = len(node_ids)
    key = np.unique(dense[0] * n + dense[1])
    return Graph(node_ids, key // n, key % n, np.zeros(len(key)), directed=directed)


def read_edge_list(path, directed: bool = True) -> Graph:
    with open(os.fspath(path), encoding="utf-8") as fh:
        return parse_edge_list(fh, directed=directed)


def serialize_edge_list(graph: Graph) -> str:
    """Edge list with raw ids, one directed edge per line, plus a header.

    Parsing the output with ``directed=True`` reproduces the graph's edge set
    (probabilities are not stored).
    """
    out = io.StringIO()
    out.write(f"# nodes: {graph.node_count}\n")
    out.write(f"# edges: {graph.edge_count}\n")
    out.write(f"# directed: {str(graph.directed).lower()}\n")
    ids = graph.node_ids
    for u, v in zip(ids[graph.sources].tolist(), ids[graph.targets].tolist()):
        out.write(f"{u} {v}\n")
    return out.getvalue()


def assign_weighted_cascade(graph: Graph) -> Graph:
    """Every edge into ``v`` gets probability ``1 / in_degree(v)``."""
    if graph.edge_count == 0:
        raise DomainError("weighted cascade needs at least one edge")
    return graph.with_probs(1.0 / graph.in_degree[graph.targets])


def assign_uniform(graph: Graph, p: float) -> Graph:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"edge probability must lie in [0, 1], got {p}")
    return graph.with_probs(np.full(graph.edge_count, p))
