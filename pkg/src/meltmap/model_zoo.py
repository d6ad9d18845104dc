"""Bundled reference equations for melt-pool geometry and spatter volume.

Nine published constitutive polynomials are stored verbatim, coefficient by
coefficient, together with their reported degree and train/test R^2. Five
map (power, velocity) to melt-pool dimensions and geometry; four map either
process conditions or melt-pool dimensions to spatter volume.

Coefficients are transcribed exactly as printed in the source material, with
no re-rounding; known oddities in the source (a dangling constant, one
intercept appearing in two equations) are kept as-is and documented in
``models/TRANSCRIPTION_NOTES.md``.

The equations are only claimed valid over the calibration envelope
P in [50, 500] W, V in [100, 2000] mm/s; predictions outside it are
returned unchanged but flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .dataset import FeatureSpec, NATURAL_LOG
from .errors import ContractError, DomainError
from .polyfit import FitDiagnostics, SymbolicEquation, Term, monomial_exponents

POWER_ENVELOPE = (50.0, 500.0)
VELOCITY_ENVELOPE = (100.0, 2000.0)


@dataclass(frozen=True)
class ZooEntry:
    """One stored reference model and its reported metadata."""

    id: str
    target: str
    input_set: FeatureSpec
    equation: SymbolicEquation
    reported_degree: int
    reported_r2_train: float
    reported_r2_test: float
    notes: str = ""


@dataclass(frozen=True)
class MeltPoolPrediction:
    """All five melt-pool outputs at one (power, velocity) point."""

    length: float
    width: float
    depth: float
    cross_section: float
    volume: float
    out_of_envelope: bool


def _equation(target, spec: FeatureSpec, degree, coefficients, train_r2) -> SymbolicEquation:
    names = spec.column_names
    exps = monomial_exponents(len(names), degree)
    if len(coefficients) != len(exps):
        raise ContractError(
            f"{target}: expected {len(exps)} coefficients for degree {degree}, got {len(coefficients)}"
        )
    terms = tuple(Term(e, float(c)) for e, c in zip(exps, coefficients))
    return SymbolicEquation(
        target_name=target,
        base_features=names,
        degree=degree,
        terms=terms,
        fit_diagnostics=FitDiagnostics(train_r2=train_r2),
    )


_PV = FeatureSpec.of("power", "velocity")
_PV_LOGV = FeatureSpec.of("power", "velocity", "log_velocity")
_DIMS = FeatureSpec.of("length", "width", "depth")
_LOGDIMS = FeatureSpec.of("log_length", "width", "depth", "log_width", "log_depth")

# (power, velocity) -> melt-pool length, degree 3
_LENGTH_PV = (
    170.3876,
    0.7513, -0.5552,
    -0.0032, 0.0034, 5.40e-4,
    4.19e-6, -4.83e-6, 4.49e-7, -3.46e-7,
)

# (power, velocity) -> melt-pool width; printed terms stop at degree 4 even
# though the reported order is 5.
_WIDTH_PV = (
    14.7778,
    -0.0065, 0.3516,
    0.0173, -0.0056, 1.94e-4,
    -9.14e-5, 3.31e-5, -4.99e-6, -1.35e-7,
    1.96e-7, -1.12e-7, 3.67e-8, -4.82e-9, 7.74e-10,
)

# (power, velocity) -> melt-pool depth, degree 2
_DEPTH_PV = (
    53.7694,
    1.5055, -0.3504,
    -2.92e-4, -7.54e-4, 2.12e-4,
)

# (power, velocity) -> cross-sectional area, degree 2
_AREA_PV = (
    4176.5581,
    224.9810, -54.3024,
    -0.0011, -0.1333, 0.0353,
)

# (power, velocity) -> melt-pool volume, degree 2
_VOLUME_PV = (
    -1262141.6793,
    21113.6671, 7.5091,
    17.3061, -9.5400, -0.4026,
)

# (power, velocity) -> spatter volume, degree 6. The source prints an extra
# dangling constant -0.1273 after the intercept; it is not merged here (see
# TRANSCRIPTION_NOTES).
_SPATTER_PV = (
    -47591.2675,
    -0.2616, -0.0237,
    -0.0944, 0.2825, 3.0756,
    0.2039, -0.1063, 0.0093, -0.0102,
    -0.0014, 5.58e-4, 3.93e-5, -1.76e-5, 1.47e-5,
    3.68e-6, -1.14e-6, -2.27e-7, 6.23e-8, -2.26e-9, -8.52e-9,
    -3.32e-9, 1.26e-9, -2.78e-10, 2.47e-10, -8.39e-11, 1.11e-11, 1.42e-12,
)

# (power, velocity, log velocity) -> spatter volume, degree 6, 84 terms.
_SPATTER_PV_LOGV = (
    -94877.9016,
    0.0016, -0.0113, -0.0131,
    0.0192, -0.0054, 0.0023, -0.0043, -2.81e-4, -6.35e-4,
    0.3343, 0.0824, 0.0351, -0.0297, -0.0093, 1.98e-4, -0.0378, -0.0140,
    -0.0019, -1.05e-4,
    -0.0303, 0.7149, 0.2123, 0.0801, 0.0937, 0.0668, -0.1631, -0.0153,
    -0.0357, -0.0020, 0.0014, -0.0473, -0.0347, -0.0075, -5.44e-4,
    6.57e-6, 2.25e-4, 0.0143, -7.38e-4, -0.2463, -0.6532, 1.34e-4, -0.0214,
    0.0456, 0.0618, -1.87e-5, 0.0427, 0.1350, -0.0936, -0.0160, -1.04e-6,
    -0.0018, -0.0172, -0.0543, -0.0257, -0.0026,
    2.08e-9, 6.55e-9, -2.34e-6, 8.67e-9, -2.98e-5, -0.0020, -1.53e-8,
    8.50e-5, 0.0244, 0.0579, 5.18e-9, -1.74e-5, 0.0010, -0.0073, -0.1802,
    -1.17e-9, 2.95e-6, -0.0029, 0.0018, -0.0679, -0.0785, 9.03e-11,
    1.59e-8, 2.22e-4, 0.0071, 0.0482, -0.0750, -0.0110,
)

# (length, width, depth) -> spatter volume, degree 3
_SPATTER_DIMS = (
    -73673.5843,
    60.4532, 1719.4559, 424.9562,
    1.6502, -23.3099, 14.7747, 48.4069, -77.2674, 24.4086,
    -0.0070, 0.0752, -0.0317, -0.1816, 0.1530, -0.0400, 0.0515, 0.0234,
    -0.0140, -0.0023,
)

# (log length, width, depth, log width, log depth) -> spatter volume,
# degree 2. The printed intercept equals the melt-pool volume intercept
# verbatim; kept as printed (see TRANSCRIPTION_NOTES).
_SPATTER_LOGDIMS = (
    -1262141.6793,
    -34.2697, 46.6761, 3.3128, 1832.5419, -19.5423,
    2.0622, -0.0189, 6.79e-4, 1.5434, 1.1827, 0.0032, 0.0011, -6.1771,
    -0.1413, 1.73e-5, -0.3015, -0.2274, -347.0129, 40.4521, -26.0121,
)

_ENTRIES = (
    ZooEntry(
        id="length_pv",
        target="length",
        input_set=_PV,
        equation=_equation("length", _PV, 3, _LENGTH_PV, 0.98),
        reported_degree=3,
        reported_r2_train=0.98,
        reported_r2_test=0.95,
    ),
    ZooEntry(
        id="width_pv",
        target="width",
        input_set=_PV,
        equation=_equation("width", _PV, 4, _WIDTH_PV, 0.95),
        reported_degree=5,
        reported_r2_train=0.95,
        reported_r2_test=0.95,
        notes="reported order 5, but the printed equation carries only degree <= 4 terms; stored as degree 4",
    ),
    ZooEntry(
        id="depth_pv",
        target="depth",
        input_set=_PV,
        equation=_equation("depth", _PV, 2, _DEPTH_PV, 0.99),
        reported_degree=2,
        reported_r2_train=0.99,
        reported_r2_test=0.99,
    ),
    ZooEntry(
        id="area_pv",
        target="cross_section",
        input_set=_PV,
        equation=_equation("cross_section", _PV, 2, _AREA_PV, 0.99),
        reported_degree=2,
        reported_r2_train=0.99,
        reported_r2_test=0.99,
    ),
    ZooEntry(
        id="volume_pv",
        target="volume",
        input_set=_PV,
        equation=_equation("volume", _PV, 2, _VOLUME_PV, 0.98),
        reported_degree=2,
        reported_r2_train=0.98,
        reported_r2_test=0.97,
    ),
    ZooEntry(
        id="spatter_pv",
        target="spatter",
        input_set=_PV,
        equation=_equation("spatter", _PV, 6, _SPATTER_PV, 0.83),
        reported_degree=6,
        reported_r2_train=0.83,
        reported_r2_test=0.75,
        notes="source prints a dangling constant -0.1273 after the intercept; not merged",
    ),
    ZooEntry(
        id="spatter_pv_logv",
        target="spatter",
        input_set=_PV_LOGV,
        equation=_equation("spatter", _PV_LOGV, 6, _SPATTER_PV_LOGV, 0.9),
        reported_degree=6,
        reported_r2_train=0.9,
        reported_r2_test=0.79,
    ),
    ZooEntry(
        id="spatter_dims",
        target="spatter",
        input_set=_DIMS,
        equation=_equation("spatter", _DIMS, 3, _SPATTER_DIMS, 0.8),
        reported_degree=3,
        reported_r2_train=0.8,
        reported_r2_test=0.71,
    ),
    ZooEntry(
        id="spatter_logdims",
        target="spatter",
        input_set=_LOGDIMS,
        equation=_equation("spatter", _LOGDIMS, 2, _SPATTER_LOGDIMS, 0.85),
        reported_degree=2,
        reported_r2_train=0.85,
        reported_r2_test=0.82,
        notes="intercept duplicates the melt-pool volume intercept verbatim; stored as printed",
    ),
)

_BY_ID = {entry.id: entry for entry in _ENTRIES}

# The five melt-pool outputs, in MeltPoolPrediction field order.
MELT_POOL_IDS = ("length_pv", "width_pv", "depth_pv", "area_pv", "volume_pv")


def list_models() -> tuple:
    """All stored entries, in table order."""
    return _ENTRIES


def model_ids() -> tuple:
    return tuple(e.id for e in _ENTRIES)


def get_entry(model_id: str) -> ZooEntry:
    try:
        return _BY_ID[model_id]
    except KeyError:
        raise ContractError(
            f"unknown model id {model_id!r}; valid ids: {', '.join(model_ids())}"
        ) from None


def in_envelope(power: Optional[float] = None, velocity: Optional[float] = None) -> bool:
    """True when the given process conditions sit inside the calibration envelope."""
    ok = True
    if power is not None:
        ok = ok and POWER_ENVELOPE[0] <= power <= POWER_ENVELOPE[1]
    if velocity is not None:
        ok = ok and VELOCITY_ENVELOPE[0] <= velocity <= VELOCITY_ENVELOPE[1]
    return ok


def _feature_values(entry: ZooEntry, values: Mapping[str, float]) -> dict:
    """Map raw field values onto the entry's (possibly log-transformed) columns."""
    out = {}
    for fe in entry.input_set.entries:
        if fe.name not in values:
            raise ContractError(f"{entry.id} needs a value for {fe.name!r}")
        v = float(values[fe.name])
        if fe.transform == NATURAL_LOG:
            if v <= 0:
                raise DomainError(f"{entry.id}: cannot take log of {fe.name} = {v}")
            out[fe.column_name] = math.log(v)
        else:
            out[fe.column_name] = v
    return out


def predict(model_id: str, values: Mapping[str, float]) -> float:
    """Evaluate one stored equation at raw field values (power in W, etc.)."""
    entry = get_entry(model_id)
    return entry.equation.evaluate(_feature_values(entry, values))


def predict_melt_pool(power: float, velocity: float) -> MeltPoolPrediction:
    """Evaluate all five melt-pool equations at one process condition.

    Out-of-envelope points are evaluated anyway and flagged; negative values
    can occur there because the polynomials are only calibrated inside the
    envelope.
    """
    if power <= 0 or velocity <= 0:
        raise ContractError(f"power and velocity must be > 0, got ({power}, {velocity})")
    values = {"power": power, "velocity": velocity}
    outputs = [predict(mid, values) for mid in MELT_POOL_IDS]
    return MeltPoolPrediction(
        length=outputs[0],
        width=outputs[1],
        depth=outputs[2],
        cross_section=outputs[3],
        volume=outputs[4],
        out_of_envelope=not in_envelope(power, velocity),
    )


def predict_spatter(model_id: str, values: Mapping[str, float]) -> float:
    """Evaluate one of the four stored spatter equations at raw field values."""
    entry = get_entry(model_id)
    if entry.target != "spatter":
        raise ContractError(f"{model_id!r} predicts {entry.target}, not spatter")
    return entry.equation.evaluate(_feature_values(entry, values))
