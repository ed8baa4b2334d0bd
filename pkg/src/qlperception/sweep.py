"""Exhaustive input sweeps and the RGB case-study table.

Sweeps evaluate every point of a regular grid over the sensor ranges and keep
the results columnar (one array per quantity) so the 51**3-point RGB cube fits
comfortably in memory and serializes quickly.  Indexing a :class:`SweepResult`
yields :class:`SweepRecord` views, in lexicographic order of raw inputs.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from qlperception.errors import ConfigError, DomainError
from qlperception.query import (
    ZeroGroupSummary,
    apply_query,
    euclidean_distance,
    grouped_masses,
)
from qlperception.sampling import DEFAULT_SEED, derive_seed, sample_dense
from qlperception.sensors import SensorConfig, SensorSpec, default_config, normalize_frame
from qlperception.state import _check_tau, bitstring, probabilities, product_state

MODES = ("exact", "sampled")

# "start": lower, lower+step, ... strictly below upper  -> 0, 5, ..., 250 for RGB
# "end":   lower+step, ..., up to and including upper   -> 5, 10, ..., 255 for RGB
GRIDS = ("start", "end")

REFERENCE_TARGET = (132, 35, 107)

# (input, target) pairs of the RGB case study: six readings in the canonical
# basis, then four readings queried against the same target colour.
CASE_STUDY_ROWS: tuple[tuple[tuple[int, int, int], Optional[tuple[int, int, int]]], ...] = (
    ((0, 25, 0), None),
    ((55, 0, 210), None),
    ((10, 75, 125), None),
    ((0, 200, 200), None),
    ((230, 15, 230), None),
    ((215, 225, 220), None),
    ((102, 18, 124), REFERENCE_TARGET),
    ((84, 48, 38), REFERENCE_TARGET),
    ((36, 101, 84), REFERENCE_TARGET),
    ((239, 239, 110), REFERENCE_TARGET),
)


@dataclass(frozen=True)
class SweepSpec:
    step: int = 5
    target: Optional[tuple[int, ...]] = None  # raw frame, domain units
    mode: str = "exact"
    shots: Optional[int] = None
    seed: int = DEFAULT_SEED
    grid: str = "start"
    tau: float = 1.0

    def __post_init__(self):
        if isinstance(self.step, bool) or int(self.step) != self.step or self.step < 1:
            raise ConfigError(f"sweep step must be a positive integer, got {self.step!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown sweep mode {self.mode!r}; expected one of {MODES}")
        if self.grid not in GRIDS:
            raise ConfigError(f"unknown grid {self.grid!r}; expected one of {GRIDS}")
        if (self.mode == "sampled") != (self.shots is not None):
            raise ConfigError("shots must be given exactly when mode is 'sampled'")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be positive")
        if self.target is not None:
            object.__setattr__(self, "target", tuple(self.target))
        _check_tau(self.tau)


def grid_axis(sensor: SensorSpec, step: int, grid: str = "start") -> np.ndarray:
    if step > sensor.span:
        raise ConfigError(f"step {step} exceeds the range of sensor {sensor.name!r}")
    if grid == "start":
        return np.arange(sensor.lower, sensor.upper, step, dtype=np.int64)
    return np.arange(sensor.lower + step, sensor.upper + 1, step, dtype=np.int64)


def grid_points(config: SensorConfig, step: int, grid: str = "start") -> np.ndarray:
    """All grid points as an ``(m, n)`` integer array, first sensor varying slowest."""
    axes = [grid_axis(s, step, grid) for s in config.sensors]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def batch_probabilities(angles: np.ndarray) -> np.ndarray:
    """Outcome probabilities of product states, one row per point.

    ``angles[:, i]`` is the ``Ry`` angle on qubit ``i + 1``; qubit 1 ends up on
    the least significant bit of the column index.
    """
    c2 = np.cos(0.5 * angles) ** 2
    s2 = np.sin(0.5 * angles) ** 2
    probs = np.ones((angles.shape[0], 1))
    for i in range(angles.shape[1]):
        probs = np.concatenate([probs * c2[:, i : i + 1], probs * s2[:, i : i + 1]], axis=1)
    return probs


def _sample_rows(args):
    probs, shots, seeds = args
    return np.stack([sample_dense(p, shots, s) / shots for p, s in zip(probs, seeds)])


@dataclass(frozen=True)
class SweepRecord:
    raw_input: tuple[int, ...]
    distance_to_reference: float
    probs: np.ndarray
    groups: ZeroGroupSummary


@dataclass(eq=False)
class SweepResult:
    """Columnar sweep output; behaves as an ordered sequence of records."""

    config: SensorConfig
    spec: SweepSpec
    inputs: np.ndarray  # (m, n) raw readings
    distances: np.ndarray  # (m,)
    probs: np.ndarray  # (m, 2**n)
    groups: np.ndarray  # (m, n + 1), most zeros first
    reference: tuple[int, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.config.n

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def __getitem__(self, i: int) -> SweepRecord:
        if not -len(self) <= i < len(self):
            raise IndexError(i)
        g = self.groups[i]
        return SweepRecord(
            tuple(int(v) for v in self.inputs[i]),
            float(self.distances[i]),
            self.probs[i],
            ZeroGroupSummary({self.n - j: float(g[j]) for j in range(self.n + 1)}),
        )

    def __iter__(self) -> Iterator[SweepRecord]:
        for i in range(len(self)):
            yield self[i]

    def index_of(self, raw_input: Sequence[int]) -> int:
        hits = np.flatnonzero(np.all(self.inputs == np.asarray(raw_input), axis=1))
        if hits.size == 0:
            raise KeyError(tuple(raw_input))
        return int(hits[0])

    def header(self) -> list[str]:
        n = self.n
        return (
            [name.lower() for name in self.config.names]
            + ["distance"]
            + [f"p_{bitstring(b, n)}" for b in range(2**n)]
            + [f"g{k}" for k in range(n, -1, -1)]
        )

    def write_csv(self, fh: IO[str]) -> None:
        fh.write(",".join(self.header()) + "\n")
        floats = np.concatenate([self.distances[:, None], self.probs, self.groups], axis=1)
        fmt = ",".join(["{}"] * self.n + ["{:.12g}"] * floats.shape[1]) + "\n"
        for raw, row in zip(self.inputs.tolist(), floats.tolist()):
            fh.write(fmt.format(*raw, *row))

    def write_json_lines(self, fh: IO[str]) -> None:
        names = self.header()
        for raw, d, p, g in zip(
            self.inputs.tolist(), self.distances.tolist(), self.probs.tolist(), self.groups.tolist()
        ):
            fh.write(json.dumps(dict(zip(names, raw + [d] + p + g))) + "\n")

    def metadata(self) -> dict:
        from qlperception import __version__

        grid_desc = {
            "start": "lower + k*step, strictly below upper",
            "end": "lower + k*step for k >= 1, up to and including upper",
        }[self.spec.grid]
        return {
            "artifact": "qlperception",
            "version": __version__,
            "records": len(self),
            "spec": asdict(self.spec),
            "grid": {"name": self.spec.grid, "definition": grid_desc},
            "mode": self.spec.mode,
            "seed": self.spec.seed if self.spec.mode == "sampled" else None,
            "reference_frame": list(self.reference),
            "sensors": [asdict(s) for s in self.config.sensors],
            "bit_order": "bitstrings are MSB first; the first sensor is the least significant bit",
        }


def run_sweep(
    spec: SweepSpec, config: Optional[SensorConfig] = None, workers: int = 1
) -> SweepResult:
    """Evaluate every grid point of ``config`` under ``spec``.

    With a target the query is applied before measuring and distances are taken
    to the target frame; otherwise distances are taken to the all-lower-bound
    frame.  Sampled mode seeds point ``k`` with ``derive_seed(spec.seed, k)`` so
    the output does not depend on ``workers``.
    """
    config = config or default_config()
    points = grid_points(config, spec.step, spec.grid)
    lower = np.array([s.lower for s in config.sensors], dtype=float)
    span = np.array([s.span for s in config.sensors], dtype=float)
    x = (points - lower) / span

    if spec.target is not None:
        target = normalize_frame(spec.target, config).as_array()
        reference = tuple(int(v) for v in spec.target)
        delta = x - target
    else:
        reference = tuple(int(s.lower) for s in config.sensors)
        delta = x
    probs = batch_probabilities(math.pi * delta / spec.tau)

    if spec.mode == "sampled":
        seeds = [derive_seed(spec.seed, k) for k in range(len(points))]
        if workers > 1:
            chunk = max(1, math.ceil(len(points) / (4 * workers)))
            jobs = [
                (probs[i : i + chunk], spec.shots, seeds[i : i + chunk])
                for i in range(0, len(points), chunk)
            ]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                probs = np.concatenate(list(pool.map(_sample_rows, jobs)))
        else:
            probs = _sample_rows((probs, spec.shots, seeds))

    distances = np.linalg.norm(points - np.asarray(reference, dtype=float), axis=1)
    groups = grouped_masses(probs, config.n)
    return SweepResult(config, spec, points, distances, probs, groups, reference)


def confidence_curve(
    records: Union[SweepResult, Iterable[SweepRecord]],
) -> list[tuple[float, ...]]:
    """``(distance, P_nzeros, ..., P_0zeros)`` sorted by distance, ties by raw input."""
    if isinstance(records, SweepResult):
        keys = [records.inputs[:, j] for j in range(records.n - 1, -1, -1)]
        order = np.lexsort(keys + [records.distances])
        table = np.concatenate([records.distances[:, None], records.groups], axis=1)[order]
        return [tuple(row) for row in table.tolist()]
    rows = sorted(records, key=lambda r: (r.distance_to_reference, r.raw_input))
    return [(r.distance_to_reference, *r.groups.as_array().tolist()) for r in rows]


@dataclass(frozen=True)
class TableRow:
    raw_input: tuple[int, ...]
    target: Optional[tuple[int, ...]]
    exact: np.ndarray
    sampled: np.ndarray
    shots: int
    seed: int
    distance: Optional[float]


def reproduce_table(
    rows: Sequence[tuple[Sequence[int], Optional[Sequence[int]]]] = CASE_STUDY_ROWS,
    config: Optional[SensorConfig] = None,
    shots: int = 10**6,
    seed: int = DEFAULT_SEED,
    tau: float = 1.0,
) -> list[TableRow]:
    """Exact and sampled outcome probabilities for each ``(input, target)`` row.

    Row ``k`` is sampled with ``derive_seed(seed, k)``.
    """
    config = config or default_config()
    out = []
    for k, (raw, target) in enumerate(rows):
        x = normalize_frame(raw, config)
        if target is None:
            state = product_state(x, tau)
            distance = None
        else:
            state = apply_query(x, normalize_frame(target, config), tau)
            distance = euclidean_distance(raw, target)
        exact = probabilities(state)
        row_seed = derive_seed(seed, k)
        sampled = sample_dense(exact, shots, row_seed) / shots
        out.append(
            TableRow(
                tuple(raw),
                None if target is None else tuple(target),
                exact,
                sampled,
                shots,
                row_seed,
                distance,
            )
        )
    return out


def format_table(rows: Sequence[TableRow], which: str = "sampled") -> str:
    """Fixed-width text table, percentages to two decimals."""
    if which not in ("exact", "sampled"):
        raise DomainError(f"unknown column source {which!r}")
    n = len(rows[0].raw_input) if rows else 3
    head = ["input", "target"] + [f"|{bitstring(b, n)}>" for b in range(2**n)] + ["d"]
    lines = ["  ".join(f"{h:>15}" if i < 2 else f"{h:>8}" for i, h in enumerate(head))]
    for row in rows:
        probs = row.exact if which == "exact" else row.sampled
        cells = [
            "(" + ",".join(map(str, row.raw_input)) + ")",
            "--" if row.target is None else "(" + ",".join(map(str, row.target)) + ")",
        ]
        cells += [f"{100 * p:.2f}%" for p in probs]
        cells.append("--" if row.distance is None else f"{row.distance:.2f}")
        lines.append("  ".join(f"{c:>15}" if i < 2 else f"{c:>8}" for i, c in enumerate(cells)))
    return "\n".join(lines)
