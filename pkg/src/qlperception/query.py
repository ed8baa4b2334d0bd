"""Query operator, zero-count belief grouping and raw-frame distances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qlperception.errors import ConfigError, DomainError
from qlperception.sensors import FrameLike, as_frame
from qlperception.state import (
    NORM_TOL,
    InputLike,
    NormalizedInput,
    StateVector,
    _check_tau,
    as_input,
    product_from_pairs,
    ry_pair,
)

# A query target has exactly the shape constraints of an encoded input.
QueryTarget = NormalizedInput


@dataclass(frozen=True)
class ZeroGroupSummary:
    """Probability mass per number of zero bits in the measured basis state.

    After a query, more zeros means an outcome closer to the target;
    ``by_zero_count[n]`` is the mass on ``|0...0>``.
    """

    by_zero_count: dict[int, float]

    @property
    def n(self) -> int:
        return len(self.by_zero_count) - 1

    def __getitem__(self, k: int) -> float:
        return self.by_zero_count[k]

    def as_array(self) -> np.ndarray:
        """Masses ordered from most zeros (``n``) down to none (``0``)."""
        return np.array([self.by_zero_count[k] for k in range(self.n, -1, -1)])


def apply_query(x: InputLike, target: InputLike, tau: float = 1.0) -> StateVector:
    """Encode ``x`` and rotate every qubit back by its target angle.

    Since ``Ry(-a) Ry(b) = Ry(b - a)``, qubit ``i`` ends up at
    ``Ry(pi * (x_i - target_i) / tau)|0>``; the result is built directly from
    those differences rather than by applying gates.
    """
    x = as_input(x)
    target = as_input(target)
    tau = _check_tau(tau)
    if x.n != target.n:
        raise ConfigError(f"input has {x.n} entries but the query target has {target.n}")
    pairs = [ry_pair(math.pi * (a - b) / tau) for a, b in zip(x.values, target.values)]
    return StateVector(product_from_pairs(pairs))


def zero_counts(n: int) -> np.ndarray:
    """Number of zero bits in each basis index ``0 .. 2**n - 1``."""
    idx = np.arange(2**n)
    ones = np.zeros(2**n, dtype=np.int64)
    for bit in range(n):
        ones += (idx >> bit) & 1
    return n - ones


def zero_group_probabilities(probs, n: int) -> ZeroGroupSummary:
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size != 2**n:
        raise ConfigError(f"expected {2**n} probabilities for {n} qubits, got shape {probs.shape}")
    if np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise DomainError("probabilities must be finite and non-negative")
    total = float(probs.sum())
    if abs(total - 1.0) > NORM_TOL:
        raise DomainError(f"probabilities sum to {total!r}, not 1")
    masses = np.bincount(zero_counts(n), weights=probs, minlength=n + 1)
    return ZeroGroupSummary({k: float(masses[k]) for k in range(n, -1, -1)})


def grouped_masses(probs: np.ndarray, n: int) -> np.ndarray:
    """Row-wise zero-group masses for a ``(m, 2**n)`` array, columns ``n .. 0``."""
    counts = zero_counts(n)
    onehot = counts[:, None] == np.arange(n, -1, -1)[None, :]
    return probs @ onehot.astype(float)


def euclidean_distance(a: FrameLike, b: FrameLike) -> float:
    """Distance between two raw frames, in domain units (not normalized)."""
    a, b = as_frame(a), as_frame(b)
    if len(a) != len(b):
        raise ConfigError(f"cannot compare frames of length {len(a)} and {len(b)}")
    diff = np.asarray(a.readings, dtype=float) - np.asarray(b.readings, dtype=float)
    return float(np.linalg.norm(diff))
