"""Bounded sensor channels and reading normalization.

A sensor configuration is a TOML file with an ordered ``[[sensor]]`` array;
the order of the entries is the qubit assignment (first entry is qubit 1)::

    name = "rgb-camera"

    [[sensor]]
    name = "R"
    lower = 0
    upper = 255
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from qlperception.errors import ConfigError, DomainError
from qlperception.state import MAX_QUBITS, NormalizedInput

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CONFIG_ENV_VAR = "QLPERCEPTION_CONFIG"


@dataclass(frozen=True)
class SensorSpec:
    name: str
    lower: int
    upper: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ConfigError("sensor name must be a nonempty string")
        for bound in (self.lower, self.upper):
            if isinstance(bound, bool) or not isinstance(bound, (int, np.integer)):
                raise ConfigError(f"sensor {self.name!r}: bounds must be integers")
        if not self.lower < self.upper:
            raise ConfigError(
                f"sensor {self.name!r}: lower bound {self.lower} must be below upper {self.upper}"
            )

    @property
    def span(self) -> int:
        return self.upper - self.lower


@dataclass(frozen=True)
class SensorConfig:
    sensors: tuple[SensorSpec, ...]
    name: str = ""

    def __post_init__(self):
        sensors = tuple(self.sensors)
        if not sensors:
            raise ConfigError("a sensor configuration needs at least one sensor")
        if len(sensors) > MAX_QUBITS:
            raise ConfigError(f"{len(sensors)} sensors exceeds the limit of {MAX_QUBITS}")
        names = [s.name for s in sensors]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate sensor names in {names}")
        object.__setattr__(self, "sensors", sensors)

    @property
    def n(self) -> int:
        return len(self.sensors)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.sensors]

    def lower_frame(self) -> "RawFrame":
        return RawFrame(tuple(s.lower for s in self.sensors))

    @classmethod
    def from_mapping(cls, data: dict) -> "SensorConfig":
        entries = data.get("sensor")
        if not isinstance(entries, list):
            raise ConfigError("configuration must contain a [[sensor]] array")
        sensors = []
        for i, entry in enumerate(entries):
            try:
                sensors.append(SensorSpec(entry["name"], entry["lower"], entry["upper"]))
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"sensor entry {i}: missing or malformed field {exc}") from None
        return cls(tuple(sensors), name=str(data.get("name", "")))


@dataclass(frozen=True)
class RawFrame:
    """One reading per sensor, in domain units."""

    readings: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "readings", tuple(self.readings))

    def __len__(self) -> int:
        return len(self.readings)

    def __iter__(self):
        return iter(self.readings)


FrameLike = Union[RawFrame, Sequence[float], np.ndarray]


def as_frame(frame: FrameLike) -> RawFrame:
    if isinstance(frame, RawFrame):
        return frame
    return RawFrame(tuple(np.asarray(frame).ravel().tolist()))


def load_config(path: Union[str, os.PathLike]) -> SensorConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read sensor configuration {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from None
    return SensorConfig.from_mapping(data)


def bundled_config_path() -> Path:
    return Path(str(resources.files("qlperception") / "data" / "rgb.toml"))


def default_config() -> SensorConfig:
    """The configuration named by ``$QLPERCEPTION_CONFIG``, else the bundled RGB camera."""
    override = os.environ.get(CONFIG_ENV_VAR)
    return load_config(override if override else bundled_config_path())


def normalize(reading: float, spec: SensorSpec, clamp: bool = False) -> float:
    """Map ``reading`` from ``[lower, upper]`` onto ``[0, 1]``.

    Out-of-range readings raise :class:`DomainError` unless ``clamp`` is set,
    in which case they are pinned to the nearest bound.
    """
    value = float(reading)
    if not np.isfinite(value):
        raise DomainError(f"sensor {spec.name!r}: reading {reading!r} is not finite")
    if value < spec.lower or value > spec.upper:
        if not clamp:
            raise DomainError(
                f"sensor {spec.name!r}: reading {reading!r} outside [{spec.lower}, {spec.upper}]"
            )
        value = min(max(value, spec.lower), spec.upper)
    return (value - spec.lower) / spec.span


def normalize_frame(frame: FrameLike, config: SensorConfig, clamp: bool = False) -> NormalizedInput:
    frame = as_frame(frame)
    if len(frame) != config.n:
        raise ConfigError(f"frame has {len(frame)} readings but {config.n} sensors are configured")
    return NormalizedInput(
        tuple(normalize(r, s, clamp=clamp) for r, s in zip(frame.readings, config.sensors))
    )
