"""Quantum-like multi-sensor perception model.

Normalized sensor readings are encoded as single-qubit ``Ry`` rotations of a
product statevector.  A query operator rotates the state into the basis of a
target perception so that the probability of ``|0...0>`` reads as the degree
of belief that the world matches the target.
"""

from qlperception.errors import ConfigError, DomainError
from qlperception.state import (
    MAX_QUBITS,
    BlochPoint,
    NormalizedInput,
    StateVector,
    apply_ry,
    basis_state,
    bloch_coordinates,
    probabilities,
    product_state,
    qubit_amplitudes,
)
from qlperception.sensors import (
    RawFrame,
    SensorConfig,
    SensorSpec,
    default_config,
    load_config,
    normalize,
    normalize_frame,
)
from qlperception.query import (
    QueryTarget,
    ZeroGroupSummary,
    apply_query,
    euclidean_distance,
    zero_group_probabilities,
)
from qlperception.sampling import (
    DEFAULT_SEED,
    MeasurementHistogram,
    frequencies,
    sample,
)
from qlperception.sweep import (
    SweepRecord,
    SweepResult,
    SweepSpec,
    CASE_STUDY_ROWS,
    confidence_curve,
    reproduce_table,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_QUBITS",
    "DEFAULT_SEED",
    "CASE_STUDY_ROWS",
    "BlochPoint",
    "ConfigError",
    "DomainError",
    "MeasurementHistogram",
    "NormalizedInput",
    "QueryTarget",
    "RawFrame",
    "SensorConfig",
    "SensorSpec",
    "StateVector",
    "SweepRecord",
    "SweepResult",
    "SweepSpec",
    "ZeroGroupSummary",
    "apply_query",
    "apply_ry",
    "basis_state",
    "bloch_coordinates",
    "confidence_curve",
    "default_config",
    "euclidean_distance",
    "frequencies",
    "load_config",
    "normalize",
    "normalize_frame",
    "probabilities",
    "product_state",
    "qubit_amplitudes",
    "reproduce_table",
    "run_sweep",
    "sample",
    "zero_group_probabilities",
]
