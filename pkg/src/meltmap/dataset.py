"""Process-map records, CSV ingestion, design matrices, and synthetic data.

One record is one single-track experiment: laser power and scan velocity in,
melt-pool dimensions / geometry and spatter volume out. The CSV schema is
fixed (see ``CSV_HEADER``); synthetic datasets carry a provenance comment
line before the header.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np

from .errors import ContractError, CsvParseError, DomainError, SchemaError, ValidationError

if TYPE_CHECKING:
    from .polyfit import SymbolicEquation

# Record fields, in CSV column order.
FIELD_NAMES = ("power", "velocity", "length", "width", "depth", "cross_section", "volume", "spatter")

# Exact CSV header (units encoded in the names).
CSV_HEADER = (
    "power_W",
    "velocity_mm_s",
    "length_um",
    "width_um",
    "depth_um",
    "cross_section_um2",
    "volume_um3",
    "spatter_um3",
)

IDENTITY = "identity"
NATURAL_LOG = "natural_log"

# Fields that may appear as model inputs, with their display names.
_INPUT_DISPLAY = {
    "power": "Power",
    "velocity": "Velocity",
    "length": "Length",
    "width": "Width",
    "depth": "Depth",
}
INPUT_FIELDS = tuple(_INPUT_DISPLAY)

# Fields that may serve as a regression target.
TARGET_FIELDS = ("length", "width", "depth", "cross_section", "volume", "spatter")


@dataclass(frozen=True)
class ProcessMapRecord:
    """One simulated experiment. Power in W, velocity in mm/s, lengths in
    µm, areas in µm², volumes in µm³.

    Output fields of measured data are non-negative; that is checked at CSV
    ingestion rather than here, because synthetic oracle datasets legitimately
    carry negative model outputs (the stored polynomials dip below zero in
    parts of the process window).
    """

    power: float
    velocity: float
    length: float = 0.0
    width: float = 0.0
    depth: float = 0.0
    cross_section: float = 0.0
    volume: float = 0.0
    spatter: float = 0.0

    def __post_init__(self):
        for name in FIELD_NAMES:
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValidationError(f"{name} is not a number: {value!r}") from None
            object.__setattr__(self, name, value)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}")
        if self.power <= 0:
            raise ValidationError(f"power must be > 0, got {self.power}")
        if self.velocity <= 0:
            raise ValidationError(f"velocity must be > 0, got {self.velocity}")


class Dataset:
    """Immutable ordered collection of ProcessMapRecord.

    Duplicate (power, velocity) pairs are rejected: the source data has one
    record per process condition.
    """

    def __init__(self, records: Sequence[ProcessMapRecord], provenance: str = ""):
        records = tuple(records)
        seen = {}
        for i, rec in enumerate(records):
            key = (rec.power, rec.velocity)
            if key in seen:
                raise ValidationError(
                    f"duplicate (power, velocity) pair {key} at records {seen[key]} and {i}"
                )
            seen[key] = i
        self._records = records
        self.provenance = provenance

    @property
    def records(self) -> tuple:
        return self._records

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[ProcessMapRecord]:
        return iter(self._records)

    def __getitem__(self, i) -> ProcessMapRecord:
        return self._records[i]

    def column(self, field: str) -> np.ndarray:
        """Values of one record field as a float array."""
        if field not in FIELD_NAMES:
            raise ContractError(f"unknown field {field!r}; expected one of {FIELD_NAMES}")
        return np.array([getattr(r, field) for r in self._records], dtype=float)


@dataclass(frozen=True)
class FeatureEntry:
    """One design-matrix column: a base field plus a transform."""

    name: str
    transform: str = IDENTITY

    def __post_init__(self):
        if self.name not in INPUT_FIELDS:
            raise ContractError(f"unknown input field {self.name!r}; expected one of {INPUT_FIELDS}")
        if self.transform not in (IDENTITY, NATURAL_LOG):
            raise ContractError(f"unknown transform {self.transform!r}")

    @property
    def column_name(self) -> str:
        display = _INPUT_DISPLAY[self.name]
        return display if self.transform == IDENTITY else f"log_{display}"


@dataclass(frozen=True)
class FeatureSpec:
    """Ordered list of input columns defining a design matrix."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ContractError("FeatureSpec needs at least one entry")
        keys = [(e.name, e.transform) for e in entries]
        if len(set(keys)) != len(keys):
            raise ContractError(f"duplicate feature entries in {keys}")

    @classmethod
    def of(cls, *names: str) -> "FeatureSpec":
        """Build from column tokens, e.g. ``FeatureSpec.of("power", "log_velocity")``."""
        return cls(tuple(parse_feature_token(t) for t in names))

    @classmethod
    def parse(cls, text: str) -> "FeatureSpec":
        """Parse a comma-separated column list, e.g. ``"power,velocity,log_velocity"``."""
        tokens = [t.strip() for t in text.split(",") if t.strip()]
        if not tokens:
            raise ContractError(f"no feature tokens in {text!r}")
        return cls.of(*tokens)

    @property
    def column_names(self) -> tuple:
        return tuple(e.column_name for e in self.entries)


def parse_feature_token(token: str) -> FeatureEntry:
    """Turn a token like ``"power"``, ``"log_velocity"`` or ``"log_Width"``
    into a FeatureEntry."""
    t = token.strip()
    low = t.lower()
    if low.startswith("log_"):
        return FeatureEntry(low[4:], NATURAL_LOG)
    return FeatureEntry(low, IDENTITY)


def velocity_magnitude(vx: float, vy: float, vz: float) -> float:
    """Speed from three velocity components, sqrt(vx^2 + vy^2 + vz^2)."""
    for name, v in (("vx", vx), ("vy", vy), ("vz", vz)):
        if not math.isfinite(v):
            raise ContractError(f"{name} must be finite, got {v}")
    return math.hypot(vx, vy, vz)


def load_csv(path) -> Dataset:
    """Load and validate a process-map CSV.

    The header must match ``CSV_HEADER`` exactly. A leading comment line
    ``# provenance: ...`` is honored as the dataset's provenance tag; a
    ``synthetic`` provenance exempts the file from the output-field
    non-negativity check (synthetic oracle data may carry negative model
    outputs).

    Raises
    ------
    SchemaError
        Header missing or not matching the schema.
    CsvParseError
        A cell is not a number, or a row has the wrong width.
    ValidationError
        A record invariant fails (cites the offending line).
    """
    provenance = str(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()

    line_no = 0
    header = None
    data_lines = []
    for raw in lines:
        line_no += 1
        if raw.startswith("#"):
            body = raw.lstrip("#").strip()
            if body.startswith("provenance:"):
                provenance = body[len("provenance:"):].strip()
            continue
        if not raw.strip():
            continue
        if header is None:
            header = next(csv.reader([raw]))
            header_line = line_no
        else:
            data_lines.append((line_no, raw))

    if header is None:
        raise SchemaError(f"{path}: no header line found; expected {','.join(CSV_HEADER)}")
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise SchemaError(
            f"{path}: header mismatch at line {header_line}; "
            f"expected {list(CSV_HEADER)}, found {header}"
        )

    synthetic = provenance.startswith("synthetic")
    records = []
    seen = {}
    for line_no, raw in data_lines:
        cells = next(csv.reader([raw]))
        if len(cells) != len(CSV_HEADER):
            raise CsvParseError(
                f"{path}: line {line_no} has {len(cells)} cells, expected {len(CSV_HEADER)}"
            )
        values = {}
        for field, col, cell in zip(FIELD_NAMES, CSV_HEADER, cells):
            try:
                values[field] = float(cell)
            except ValueError:
                raise CsvParseError(
                    f"{path}: line {line_no}, column {col!r}: not a number: {cell!r}"
                ) from None
        try:
            rec = ProcessMapRecord(**values)
        except ValidationError as exc:
            raise ValidationError(f"{path}: line {line_no}: {exc}") from None
        if not synthetic:
            for field, col in zip(FIELD_NAMES, CSV_HEADER):
                if field in TARGET_FIELDS and getattr(rec, field) < 0:
                    raise ValidationError(
                        f"{path}: line {line_no}: {col} must be >= 0, got {getattr(rec, field)}"
                    )
        key = (rec.power, rec.velocity)
        if key in seen:
            raise ValidationError(
                f"{path}: duplicate (power, velocity) pair {key} at lines {seen[key]} and {line_no}"
            )
        seen[key] = line_no
        records.append(rec)

    return Dataset(records, provenance=provenance)


def write_csv(ds: Dataset, path) -> None:
    """Write a dataset to CSV with full round-trip precision.

    Floats are rendered with ``repr``, the shortest digit string that parses
    back to the identical 64-bit value. A non-empty provenance is written as
    a ``# provenance:`` comment before the header.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if ds.provenance:
            fh.write(f"# provenance: {ds.provenance}\n")
        fh.write(",".join(CSV_HEADER) + "\n")
        for rec in ds:
            fh.write(",".join(repr(getattr(rec, f)) for f in FIELD_NAMES) + "\n")


def train_test_split(ds: Dataset, test_fraction: float = 0.2, seed: int = 42):
    """Deterministic random partition into (train, test).

    The test set holds round(test_fraction * n) records (half-up, clamped to
    [1, n-1]); both splits keep the original record order.
    """
    n = len(ds)
    if n < 5:
        raise ContractError(f"need at least 5 records to split, got {n}")
    if not (0.0 < test_fraction < 1.0):
        raise ContractError(f"test_fraction must be in (0, 1), got {test_fraction}")
    test_n = int(math.floor(test_fraction * n + 0.5))
    test_n = max(1, min(test_n, n - 1))
    perm = np.random.default_rng(seed).permutation(n)
    test_idx = set(int(i) for i in perm[:test_n])
    train = [ds[i] for i in range(n) if i not in test_idx]
    test = [ds[i] for i in range(n) if i in test_idx]
    return Dataset(train, ds.provenance), Dataset(test, ds.provenance)


def build_design(ds: Dataset, spec: FeatureSpec):
    """Materialize the design matrix for a feature spec.

    Returns
    -------
    (ndarray of shape (n, d), tuple of column names)

    Raises
    ------
    DomainError
        If a natural-log column hits a non-positive value (cites the record
        index).
    """
    if len(ds) == 0:
        raise ContractError("dataset is empty")
    cols = []
    for entry in spec.entries:
        raw = ds.column(entry.name)
        if entry.transform == NATURAL_LOG:
            bad = np.nonzero(raw <= 0)[0]
            if bad.size:
                raise DomainError(
                    f"cannot take log of {entry.name} <= 0 at record {int(bad[0])}"
                )
            cols.append(np.log(raw))
        else:
            cols.append(raw)
    return np.column_stack(cols), spec.column_names


def synth_generate(
    eq: "SymbolicEquation",
    n: int,
    power_range,
    velocity_range,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Generate a synthetic dataset from a (power, velocity) equation.

    Power and velocity are drawn uniformly from the given ranges; the
    equation's target field is set to eq(P, V) plus Gaussian noise and all
    other output fields are zero. Deterministic per seed.
    """
    if n < 2:
        raise ContractError(f"need n >= 2, got {n}")
    if noise_sigma < 0:
        raise ContractError(f"noise_sigma must be >= 0, got {noise_sigma}")
    (p_lo, p_hi), (v_lo, v_hi) = power_range, velocity_range
    if not (p_lo < p_hi) or not (v_lo < v_hi):
        raise ContractError(
            f"ranges must be non-degenerate, got power={power_range}, velocity={velocity_range}"
        )
    if eq.target_name not in TARGET_FIELDS:
        raise ContractError(f"equation target {eq.target_name!r} is not an output field")

    entries = [parse_feature_token(name) for name in eq.base_features]
    for entry in entries:
        if entry.name not in ("power", "velocity"):
            raise ContractError(
                f"equation base feature {entry.column_name!r} is not derived from power/velocity"
            )

    rng = np.random.default_rng(seed)
    powers = rng.uniform(p_lo, p_hi, n)
    velocities = rng.uniform(v_lo, v_hi, n)

    raw = {"power": powers, "velocity": velocities}
    columns = {}
    for entry in entries:
        base = raw[entry.name]
        columns[entry.column_name] = np.log(base) if entry.transform == NATURAL_LOG else base
    y = eq.evaluate_columns(columns)
    if noise_sigma > 0:
        y = y + rng.normal(0.0, noise_sigma, n)

    records = [
        ProcessMapRecord(
            power=float(powers[i]),
            velocity=float(velocities[i]),
            **{eq.target_name: float(y[i])},
        )
        for i in range(n)
    ]
    return Dataset(records, provenance=f"synthetic seed={seed}")
