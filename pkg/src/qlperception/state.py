"""Statevector construction for the sensor encoding.

Basis index ``b`` stores qubit ``q_i`` in bit ``i - 1``: sensor 1 is the least
significant bit and bitstrings print as ``|q_n ... q_1>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

from qlperception.errors import ConfigError, DomainError

MAX_QUBITS = 24

NORM_TOL = 1e-9


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau < 1.0:
        raise DomainError(f"tau must be a finite real >= 1, got {tau!r}")
    return tau


def _check_unit(x: float, what: str = "x") -> float:
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"{what} must lie in [0, 1], got {x!r}")
    return x


def _check_n(n: int) -> int:
    if n < 1:
        raise ConfigError("at least one qubit is required")
    if n > MAX_QUBITS:
        raise ConfigError(f"{n} qubits exceeds the dense-storage limit of {MAX_QUBITS}")
    return n


@dataclass(frozen=True)
class NormalizedInput:
    """Sensor readings mapped onto the unit interval, one entry per qubit."""

    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(_check_unit(v, "normalized reading") for v in self.values)
        _check_n(len(values))
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


InputLike = Union[NormalizedInput, Sequence[float], np.ndarray]


def as_input(x: InputLike) -> NormalizedInput:
    if isinstance(x, NormalizedInput):
        return x
    return NormalizedInput(tuple(float(v) for v in np.asarray(x, dtype=float).ravel()))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Real amplitudes over the ``2**n`` computational basis states."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float).ravel()
        size = amps.size
        if size < 2 or size & (size - 1):
            raise ConfigError(f"statevector length must be a power of two >= 2, got {size}")
        _check_n(size.bit_length() - 1)
        norm = float(np.dot(amps, amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"statevector is not normalized (sum of squares {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def __len__(self) -> int:
        return self.amplitudes.size

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    def probabilities(self) -> np.ndarray:
        return probabilities(self)


@dataclass(frozen=True)
class BlochPoint:
    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def basis_state(n: int, index: int = 0) -> StateVector:
    _check_n(n)
    if not 0 <= index < 2**n:
        raise DomainError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(2**n)
    amps[index] = 1.0
    return StateVector(amps)


def ry_pair(angle: float) -> tuple[float, float]:
    """Amplitudes of ``Ry(angle)|0>``."""
    half = 0.5 * angle
    return math.cos(half), math.sin(half)


def qubit_amplitudes(x: float, tau: float = 1.0) -> tuple[float, float]:
    """Return ``(cos(pi*x/(2*tau)), sin(pi*x/(2*tau)))`` for one encoded reading."""
    x = _check_unit(x)
    tau = _check_tau(tau)
    return ry_pair(math.pi * x / tau)


def product_from_pairs(pairs: Sequence[tuple[float, float]]) -> np.ndarray:
    """Tensor product of single-qubit amplitude pairs, first pair on the LSB."""
    # kron(a, b) puts b on the fast (low) index, so fold from the last qubit.
    factors = [np.asarray(p, dtype=float) for p in reversed(pairs)]
    return reduce(np.kron, factors)


def product_state(x: InputLike, tau: float = 1.0) -> StateVector:
    """Encode a normalized input as the product state ``(x)_i Ry(pi*x_i/tau)|0>``.

    >>> np.round(product_state([0.8, 0.3, 0.7]).amplitudes, 3)
    array([0.125, 0.385, 0.064, 0.196, 0.245, 0.755, 0.125, 0.385])
    """
    x = as_input(x)
    tau = _check_tau(tau)
    return StateVector(product_from_pairs([qubit_amplitudes(v, tau) for v in x.values]))


def apply_ry(state: StateVector, qubit_index: int, angle: float) -> StateVector:
    """Apply ``Ry(angle)`` to qubit ``qubit_index`` (1-based) of ``state``.

    This is a plain gate application, kept independent of the closed-form
    product so the two can check each other.
    """
    n = state.n
    if not 1 <= qubit_index <= n:
        raise DomainError(f"qubit index {qubit_index} out of range 1..{n}")
    angle = float(angle)
    if not math.isfinite(angle):
        raise DomainError(f"rotation angle must be finite, got {angle!r}")
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    # axis 1 of this view is bit (qubit_index - 1) of the basis index
    view = state.amplitudes.reshape(2 ** (n - qubit_index), 2, 2 ** (qubit_index - 1))
    lo, hi = view[:, 0, :], view[:, 1, :]
    out = np.empty_like(view)
    out[:, 0, :] = c * lo - s * hi
    out[:, 1, :] = s * lo + c * hi
    return StateVector(out.reshape(-1))


def probabilities(state: StateVector) -> np.ndarray:
    amps = state.amplitudes
    return amps * amps


def bloch_coordinates(x: float, tau: float = 1.0) -> BlochPoint:
    """Bloch vector of the qubit encoding reading ``x``; always in the x-z plane."""
    x = _check_unit(x)
    theta = math.pi * x / _check_tau(tau)
    return BlochPoint(math.sin(theta), 0.0, math.cos(theta))


def bitstring(index: int, n: int) -> str:
    """MSB-first label of a basis index, e.g. ``bitstring(5, 3) == "101"``."""
    return format(index, f"0{n}b")
