"""Affine activation functions, discount allocations and coefficient schemes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ConfigError, DomainError, FeasibilityError

BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class AffineActivation:
    """Activation probability ``a * y + b`` of a node given discount ``y``."""

    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if not self.a >= 0:
            raise DomainError(f"slope must be >= 0, got {self.a}")
        if not 0 <= self.b < 1:
            raise DomainError(f"intercept must lie in [0, 1), got {self.b}")

    def __call__(self, y):
        return evaluate(self, y)


def evaluate(f: AffineActivation, y):
    """``f.a * y + f.b``, unclamped. Callers enforce ``f(y) <= 1``."""
    return f.a * y + f.b


def inverse_at_one(f: AffineActivation) -> float:
    """Discount at which the activation probability reaches exactly 1."""
    if f.a <= 0:
        raise DomainError("activation cannot reach 1 (slope is 0)")
    return (1.0 - f.b) / f.a


class ActivationProfile:
    """Per-node affine activations stored as two coefficient arrays.

    Indexing returns an :class:`AffineActivation`.
    """

    def __init__(self, a, b=None):
        a = np.array(a, dtype=np.float64, ndmin=1)
        b = np.zeros_like(a) if b is None else np.array(b, dtype=np.float64, ndmin=1)
        if a.shape != b.shape or a.ndim != 1:
            raise ConfigError("slope and intercept arrays must be 1-d and equally long")
        if np.any(~(a >= 0)):
            raise DomainError("slopes must be >= 0")
        if np.any(~((b >= 0) & (b < 1))):
            raise DomainError("intercepts must lie in [0, 1)")
        a.setflags(write=False)
        b.setflags(write=False)
        self.a = a
        self.b = b

    @classmethod
    def uniform(cls, n: int, a: float = 1.0, b: float = 0.0) -> ActivationProfile:
        return cls(np.full(n, a), np.full(n, b))

    @classmethod
    def from_functions(cls, fs: Sequence[AffineActivation]) -> ActivationProfile:
        return cls([f.a for f in fs], [f.b for f in fs])

    def __len__(self):
        return len(self.a)

    def __getitem__(self, v) -> AffineActivation:
        return AffineActivation(float(self.a[v]), float(self.b[v]))

    def __iter__(self):
        return (self[v] for v in range(len(self)))

    def __eq__(self, other):
        if not isinstance(other, ActivationProfile):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    __hash__ = None

    def __repr__(self):
        return f"ActivationProfile(n={len(self)})"

    def evaluate(self, y) -> np.ndarray:
        return self.a * np.asarray(y, dtype=np.float64) + self.b

    def caps(self) -> np.ndarray:
        """Per-node ``inverse_at_one``; ``inf`` where the slope is 0."""
        with np.errstate(divide="ignore"):
            return np.where(self.a > 0, (1.0 - self.b) / np.where(self.a > 0, self.a, 1.0), np.inf)

    def seed_probabilities(self, y, selected_only: bool) -> np.ndarray:
        """Initial activation probability of every node under allocation ``y``.

        With ``selected_only`` nodes without discount never seed, regardless of
        their intercept.
        """
        y = np.asarray(y, dtype=np.float64)
        q = np.minimum(self.evaluate(y), 1.0)
        if selected_only:
            q = np.where(y > 0, q, 0.0)
        return q


@dataclass(frozen=True, eq=False)
class Allocation:
    """Nonnegative discount vector ``y`` with total budget ``budget``."""

    y: np.ndarray
    budget: float

    def __post_init__(self):
        y = np.array(self.y, dtype=np.float64, ndmin=1)
        y.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "budget", float(self.budget))
        if not self.budget >= 0:
            raise DomainError(f"budget must be >= 0, got {self.budget}")
        if np.any(~(y >= 0)):
            raise FeasibilityError("discounts must be >= 0")
        if y.sum() > self.budget + BUDGET_TOL:
            raise FeasibilityError(f"discounts sum to {y.sum()!r}, exceeding budget {self.budget!r}")

    @classmethod
    def zeros(cls, n: int, budget: float = 0.0) -> Allocation:
        return cls(np.zeros(n), budget)

    @property
    def spent(self) -> float:
        return float(self.y.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.y > 0)

    def __len__(self):
        return len(self.y)

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return self.budget == other.budget and np.array_equal(self.y, other.y)

    __hash__ = None


def check_feasible(alloc: Allocation, profile: ActivationProfile, tol: float = BUDGET_TOL) -> None:
    """Raise :class:`FeasibilityError` unless ``f_v(y_v) <= 1`` for every node."""
    if len(alloc) != len(profile):
        raise FeasibilityError(f"allocation has {len(alloc)} entries, profile has {len(profile)}")
    p = profile.evaluate(alloc.y)
    bad = np.flatnonzero(p > 1 + tol)
    if len(bad):
        raise FeasibilityError(f"activation probability exceeds 1 at node {int(bad[0])}: {p[bad[0]]!r}")


@dataclass(frozen=True)
class CoefficientScheme:
    """Finite choice sets for slopes and intercepts, sampled uniformly."""

    a_choices: tuple = (1.0,)
    b_choices: tuple = (0.0,)
    rng_seed: int = 0

    def __post_init__(self):
        a = tuple(float(x) for x in self.a_choices)
        b = tuple(float(x) for x in self.b_choices)
        if not a or not b:
            raise ConfigError("coefficient choice sets must be nonempty")
        if any(not x > 0 for x in a):
            raise ConfigError(f"slope choices must be > 0, got {a}")
        if any(not 0 <= x < 1 for x in b):
            raise ConfigError(f"intercept choices must lie in [0, 1), got {b}")
        object.__setattr__(self, "a_choices", a)
        object.__setattr__(self, "b_choices", b)

    @property
    def descriptor(self) -> str:
        fmt = lambda xs: ",".join(f"{x:g}" for x in xs)  # noqa: E731
        return f"a={{{fmt(self.a_choices)}}};b={{{fmt(self.b_choices)}}}"

    @property
    def is_fixed(self) -> bool:
        return len(self.a_choices) == 1 and len(self.b_choices) == 1


def sample_profile(scheme: CoefficientScheme, n: int) -> ActivationProfile:
    """Draw each node's slope and intercept independently and uniformly."""
    if n < 1:
        raise DomainError(f"node count must be >= 1, got {n}")
    rng = np.random.default_rng(int(scheme.rng_seed) & ((1 << 64) - 1))
    a = np.asarray(scheme.a_choices)[rng.integers(len(scheme.a_choices), size=n)]
    b = np.asarray(scheme.b_choices)[rng.integers(len(scheme.b_choices), size=n)]
    return ActivationProfile(a, b)
