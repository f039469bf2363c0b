"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import ConfigError, DomainError
from .graph import Graph
from .marketing import ActivationProfile


def check_graph(graph) -> Graph:
    if not isinstance(graph, Graph):
        raise ConfigError(f"expected a Graph, got {type(graph).__name__}")
    if graph.node_count == 0:
        raise ConfigError("graph has no nodes")
    return graph


def check_profile(profile, n_nodes: int) -> ActivationProfile:
    """Accept a profile, ``None`` (all nodes ``a=1, b=0``), an ``(a, b)`` pair
    of arrays, or a single ``(a, b)`` pair of scalars applied to every node."""
    if profile is None:
        profile = ActivationProfile.uniform(n_nodes)
    elif not isinstance(profile, ActivationProfile):
        a, b = profile
        if np.ndim(a) == 0 and np.ndim(b) == 0:
            profile = ActivationProfile.uniform(n_nodes, float(a), float(b))
        else:
            profile = ActivationProfile(a, b)
    if len(profile) != n_nodes:
        raise ConfigError(f"profile has {len(profile)} entries, graph has {n_nodes} nodes")
    return profile


def check_budget(K) -> float:
    if isinstance(K, bool) or not isinstance(K, numbers.Real):
        raise DomainError(f"budget must be a real number, got {K!r}")
    K = float(K)
    if not K >= 0 or not np.isfinite(K):
        raise DomainError(f"budget must be finite and >= 0, got {K}")
    return K


def check_seed(seed) -> int:
    if seed is None:
        return 0
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    return int(seed)


def check_count(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
