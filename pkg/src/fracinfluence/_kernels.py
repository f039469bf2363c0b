"""numba kernels for cascade simulation and live-edge reachability.

Pool layout: realization ``i`` keeps the out-neighbours of node ``u`` in
``targets[indptr[i, u]:indptr[i, u + 1]]``.
"""

import os

import numba as nb
import numpy as np

if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ and "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe; old system TBB builds only produce a warning
    nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from ._rng import stream_key, uniform_at


@nb.njit(cache=True)
def cascade_times(indptr, targets, probs, seeds, key):
    """One independent-cascade run; returns activation step (-1 if never).

    Edge ``e`` succeeds iff ``uniform_at(key, e) < probs[e]``; each edge is
    attempted at most once, when its source is newly active.
    """
    n = len(indptr) - 1
    time = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    tail = 0
    for s in seeds:
        if time[s] < 0:
            time[s] = 0
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            u = targets[e]
            if time[u] < 0 and uniform_at(key, np.uint64(e)) < probs[e]:
                time[u] = time[v] + 1
                queue[tail] = u
                tail += 1
    return time


@nb.njit(cache=True, parallel=True)
def mc_spread(indptr, targets, probs, cand, cand_q, seed, n_sims):
    """Activated-node count of ``n_sims`` cascades with Bernoulli seeding.

    Node ``cand[j]`` seeds with probability ``cand_q[j]``, drawn at counter
    ``m + node`` so seeding never shares draws with the edges.
    """
    n = len(indptr) - 1
    m = len(targets)
    out = np.zeros(n_sims, np.int64)
    for i in nb.prange(n_sims):
        key = stream_key(seed, np.uint64(i))
        active = np.zeros(n, np.bool_)
        queue = np.empty(n, np.int64)
        tail = 0
        for j in range(len(cand)):
            v = cand[j]
            if uniform_at(key, np.uint64(m + v)) < cand_q[j]:
                active[v] = True
                queue[tail] = v
                tail += 1
        head = 0
        while head < tail:
            v = queue[head]
            head += 1
            for e in range(indptr[v], indptr[v + 1]):
                u = targets[e]
                if not active[u] and uniform_at(key, np.uint64(e)) < probs[e]:
                    active[u] = True
                    queue[tail] = u
                    tail += 1
        out[i] = tail
    return out


@nb.njit(cache=True, parallel=True)
def pool_counts(indptr, probs, seed, R):
    """Kept-edge count per node per realization, shape (R, n)."""
    n = len(indptr) - 1
    counts = np.zeros((R, n), np.int64)
    for i in nb.prange(R):
        key = stream_key(seed, np.uint64(i))
        for v in range(n):
            c = 0
            for e in range(indptr[v], indptr[v + 1]):
                if uniform_at(key, np.uint64(e)) < probs[e]:
                    c += 1
            counts[i, v] = c
    return counts


@nb.njit(cache=True, parallel=True)
def pool_fill(indptr, targets, probs, seed, pool_indptr, out):
    R = pool_indptr.shape[0]
    n = len(indptr) - 1
    for i in nb.prange(R):
        key = stream_key(seed, np.uint64(i))
        for v in range(n):
            k = pool_indptr[i, v]
            for e in range(indptr[v], indptr[v + 1]):
                if uniform_at(key, np.uint64(e)) < probs[e]:
                    out[k] = targets[e]
                    k += 1


@nb.njit(cache=True, parallel=True)
def pool_reach_total(pool_indptr, pool_targets, seeds):
    """Sum over realizations of the number of nodes reachable from ``seeds``."""
    R, n1 = pool_indptr.shape
    n = n1 - 1
    per = np.zeros(R, np.int64)
    for i in nb.prange(R):
        seen = np.zeros(n, np.bool_)
        queue = np.empty(n, np.int64)
        tail = 0
        for s in seeds:
            if not seen[s]:
                seen[s] = True
                queue[tail] = s
                tail += 1
        head = 0
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(pool_indptr[i, v], pool_indptr[i, v + 1]):
                u = pool_targets[k]
                if not seen[u]:
                    seen[u] = True
                    queue[tail] = u
                    tail += 1
        per[i] = tail
    return per.sum()


@nb.njit(cache=True, parallel=True)
def pool_marginal_counts(pool_indptr, pool_targets, covered, cand):
    """For each candidate, newly reached nodes summed over realizations.

    ``covered[i, u]`` marks nodes already reached from the current seed set in
    realization ``i``; the search stops at covered nodes since everything
    beyond them is covered too.
    """
    R, n1 = pool_indptr.shape
    n = n1 - 1
    out = np.zeros(len(cand), np.int64)
    for j in nb.prange(len(cand)):
        c = cand[j]
        stamp = np.zeros(n, np.int64)
        queue = np.empty(n, np.int64)
        total = 0
        for i in range(R):
            if covered[i, c]:
                continue
            mark = i + 1
            stamp[c] = mark
            queue[0] = c
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for k in range(pool_indptr[i, v], pool_indptr[i, v + 1]):
                    u = pool_targets[k]
                    if stamp[u] != mark and not covered[i, u]:
                        stamp[u] = mark
                        queue[tail] = u
                        tail += 1
            total += tail
        out[j] = total
    return out


@nb.njit(cache=True, parallel=True)
def pool_cover(pool_indptr, pool_targets, covered, v0):
    """Mark everything reachable from ``v0`` as covered, in place."""
    R, n1 = pool_indptr.shape
    n = n1 - 1
    for i in nb.prange(R):
        if covered[i, v0]:
            continue
        queue = np.empty(n, np.int64)
        covered[i, v0] = True
        queue[0] = v0
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(pool_indptr[i, v], pool_indptr[i, v + 1]):
                u = pool_targets[k]
                if not covered[i, u]:
                    covered[i, u] = True
                    queue[tail] = u
                    tail += 1
