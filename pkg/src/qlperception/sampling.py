"""Simulated projective measurements.

Shots are drawn by inverse-CDF lookup on the cumulative probability table
using NumPy's ``PCG64`` bit generator seeded with the caller's 64-bit seed:
``u = Generator(PCG64(seed)).random(shots)`` and each ``u`` selects the first
basis index whose cumulative probability exceeds it.  Both the generator and
the lookup are platform independent, so a ``(probs, shots, seed)`` triple
always reproduces the same counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qlperception.errors import DomainError
from qlperception.state import NORM_TOL, bitstring

DEFAULT_SEED = 20201006

_U64 = 2**64


@dataclass(frozen=True)
class MeasurementHistogram:
    counts: dict[int, int]
    shots: int
    seed: int
    n: int = field(default=0)  # 0 means: smallest width holding every key

    def __post_init__(self):
        if self.shots < 1 or any(c < 0 for c in self.counts.values()):
            raise DomainError("histogram needs positive shots and non-negative counts")
        if sum(self.counts.values()) != self.shots:
            raise DomainError("histogram counts do not add up to the number of shots")
        if self.n == 0:
            object.__setattr__(self, "n", max(1, max(self.counts, default=0).bit_length()))
        if any(not 0 <= b < 2**self.n for b in self.counts):
            raise DomainError(f"histogram keys must lie in [0, {2**self.n})")

    def dense(self) -> np.ndarray:
        out = np.zeros(2**self.n, dtype=np.int64)
        for b, c in self.counts.items():
            out[b] = c
        return out

    def to_lines(self) -> list[str]:
        """``bitstring,count,frequency`` rows for every basis state, MSB first."""
        dense = self.dense()
        return [
            f"{bitstring(b, self.n)},{int(c)},{c / self.shots!r}"
            for b, c in enumerate(dense.tolist())
        ]


def check_probabilities(probs) -> tuple[np.ndarray, int]:
    probs = np.asarray(probs, dtype=float)
    size = probs.size
    if probs.ndim != 1 or size < 2 or size & (size - 1):
        raise DomainError(f"probability vector length must be a power of two, got shape {probs.shape}")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise DomainError("probabilities must be finite and non-negative")
    total = float(probs.sum())
    if abs(total - 1.0) > NORM_TOL:
        raise DomainError(f"probabilities sum to {total!r}, not 1")
    return probs, size.bit_length() - 1


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    # zero-probability states past the last supported one must stay unreachable
    last = int(np.flatnonzero(probs)[-1])
    cdf[last:] = 1.0
    return cdf


def sample_dense(probs, shots: int, seed: int) -> np.ndarray:
    """Counts per basis index as a dense array."""
    probs, _ = check_probabilities(probs)
    if isinstance(shots, bool) or int(shots) != shots or shots < 1:
        raise DomainError(f"shots must be a positive integer, got {shots!r}")
    if not 0 <= int(seed) < _U64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    u = rng.random(int(shots))
    idx = np.searchsorted(_cdf(probs), u, side="right")
    return np.bincount(idx, minlength=probs.size)


def sample(probs, shots: int, seed: int) -> MeasurementHistogram:
    """Multinomial histogram of ``shots`` measurements; only observed states are keyed."""
    probs, n = check_probabilities(probs)
    dense = sample_dense(probs, shots, seed)
    counts = {int(b): int(c) for b, c in enumerate(dense) if c}
    return MeasurementHistogram(counts, int(shots), int(seed), n)


def frequencies(hist: MeasurementHistogram) -> np.ndarray:
    return hist.dense() / hist.shots


def derive_seed(base_seed: int, index: int) -> int:
    """Per-task seed as a pure function of ``(base_seed, index)``."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
