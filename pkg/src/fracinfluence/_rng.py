"""Counter-based random numbers.

Every draw is a pure function of ``(seed, stream, counter)``: the uniform for
edge ``e`` in simulation ``i`` never depends on which worker ran simulation
``i`` or in what order the edges were visited. The mixer is SplitMix64.

The numba kernels and the numpy versions below must stay bit-identical; the
test suite checks them against each other.
"""

import numba as nb
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

MASK64 = (1 << 64) - 1


@nb.njit(cache=True, inline="always")
def splitmix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


@nb.njit(cache=True, inline="always")
def stream_key(seed, stream):
    """Key for one independent stream (one simulation or one realization)."""
    return splitmix64(splitmix64(seed) ^ stream)


@nb.njit(cache=True, inline="always")
def uniform_at(key, counter):
    """Uniform double in [0, 1) at position ``counter`` of stream ``key``."""
    return np.float64(splitmix64(key ^ counter) >> _S11) * _INV53


def as_seed(seed) -> np.uint64:
    """Coerce a Python int (possibly negative or > 2**64) to a uint64 seed."""
    return np.uint64(int(seed) & MASK64)


# numpy twins, vectorized over ``counter``

def splitmix64_np(x):
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> _S30)) * _MUL1
        z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


def stream_key_np(seed, stream):
    return splitmix64_np(splitmix64_np(as_seed(seed)) ^ np.asarray(stream, dtype=np.uint64))


def uniform_at_np(key, counter):
    h = splitmix64_np(np.asarray(key, dtype=np.uint64) ^ np.asarray(counter, dtype=np.uint64))
    return (h >> _S11).astype(np.float64) * _INV53


def derive_seed(master_seed: int, tag: str) -> int:
    """Child seed for a named purpose (pool, evaluation, profile, ...)."""
    words = [int(master_seed) & MASK64, *tag.encode()]
    return int(np.random.SeedSequence(words).generate_state(1, np.uint64)[0])
