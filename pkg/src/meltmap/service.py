"""Prediction, sweep, and fit operations plus the JSON HTTP service.

The CLI and the HTTP endpoints share the payload builders in this module,
so a command and its endpoint twin produce identical numeric results; sweep
responses are byte-identical after canonical serialization. Canonical JSON
uses Python's shortest round-trip float rendering with compact separators
and sorted keys.
"""

from __future__ import annotations

import itertools
import json
import math
import tempfile
import threading
from typing import Mapping, Optional, Sequence

import numpy as np
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import Response

from . import model_zoo, numerics, polyfit
from .dataset import Dataset, FeatureSpec, load_csv, parse_feature_token, train_test_split, build_design
from .ensembles import EvalReport
from .errors import ContractError, MeltMapError
from .polyfit import SymbolicEquation

MAX_SWEEP_RESOLUTION = 512
MAX_CSV_BYTES = 8 * 1024 * 1024

# Default sweep/predict outputs: the five melt-pool models plus spatter.
DEFAULT_MODEL_IDS = model_zoo.MELT_POOL_IDS + ("spatter_pv",)


class TooLargeError(MeltMapError):
    """Request exceeds a hard size limit (maps to HTTP 413)."""


def canonical_json(payload) -> str:
    """Compact, key-sorted JSON with shortest round-trip float rendering."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def models_payload() -> dict:
    """Metadata for every stored model, plus the calibration envelope."""
    models = []
    for entry in model_zoo.list_models():
        models.append(
            {
                "id": entry.id,
                "target": entry.target,
                "inputs": list(entry.input_set.column_names),
                "base_fields": [fe.name for fe in entry.input_set.entries],
                "degree": entry.equation.degree,
                "reported_degree": entry.reported_degree,
                "reported_r2_train": entry.reported_r2_train,
                "reported_r2_test": entry.reported_r2_test,
                "notes": entry.notes,
            }
        )
    return {
        "models": models,
        "envelope": {
            "power": list(model_zoo.POWER_ENVELOPE),
            "velocity": list(model_zoo.VELOCITY_ENVELOPE),
        },
    }


def _equation_fields(eq: SymbolicEquation):
    """(field, transform) entries implied by an equation's base features."""
    return [parse_feature_token(name) for name in eq.base_features]


def _equation_feature_values(eq: SymbolicEquation, values: Mapping[str, float]) -> dict:
    out = {}
    for fe in _equation_fields(eq):
        if fe.name not in values:
            raise ContractError(f"equation needs a value for {fe.name!r}")
        v = float(values[fe.name])
        if fe.transform != "identity":
            if v <= 0:
                raise ContractError(f"cannot take log of {fe.name} = {v}")
            v = math.log(v)
        out[fe.column_name] = v
    return out


def predict_payload(
    inputs: Mapping[str, float],
    model_ids: Optional[Sequence[str]] = None,
    equation: Optional[SymbolicEquation] = None,
) -> dict:
    """Evaluate stored models and/or one ad-hoc equation at named inputs."""
    if not model_ids and equation is None:
        raise ContractError("nothing to predict: give model ids or an equation")
    inputs = {str(k): float(v) for k, v in inputs.items()}
    predictions = {}
    for mid in model_ids or ():
        entry = model_zoo.get_entry(mid)
        predictions[mid] = {
            "target": entry.target,
            "value": model_zoo.predict(mid, inputs),
        }
    if equation is not None:
        predictions["equation"] = {
            "target": equation.target_name,
            "value": equation.evaluate(_equation_feature_values(equation, inputs)),
        }
    out_of_envelope = not model_zoo.in_envelope(inputs.get("power"), inputs.get("velocity"))
    payload = {
        "inputs": inputs,
        "predictions": predictions,
        "out_of_envelope": out_of_envelope,
    }
    if len(predictions) == 1:
        only = next(iter(predictions.values()))
        payload["target"] = only["target"]
        payload["value"] = only["value"]
    return payload


def _axis(bounds, count) -> np.ndarray:
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (lo < hi):
        raise ContractError(f"range must be increasing, got ({lo}, {hi})")
    return np.linspace(lo, hi, count)


def _resolution_pair(resolution):
    if isinstance(resolution, (list, tuple)):
        if len(resolution) != 2:
            raise ContractError(f"resolution must be an int or a pair, got {resolution}")
        np_, nv = int(resolution[0]), int(resolution[1])
    else:
        np_ = nv = int(resolution)
    for n in (np_, nv):
        if n > MAX_SWEEP_RESOLUTION:
            raise TooLargeError(f"resolution {n} exceeds the {MAX_SWEEP_RESOLUTION} per-axis limit")
        if n < 2:
            raise ContractError(f"resolution must be >= 2 per axis, got {n}")
    return np_, nv


def sweep_payload(
    power_range,
    velocity_range,
    resolution,
    model_ids: Optional[Sequence[str]] = None,
    equations: Optional[Sequence[SymbolicEquation]] = None,
) -> dict:
    """Evaluate models over a (power, velocity) grid.

    Cells are row-major with velocity as the slow axis: power varies fastest.
    Each cell carries every requested output keyed by model id (ad-hoc
    equations get ids ``equation_0``, ``equation_1``, ...).
    """
    n_power, n_velocity = _resolution_pair(resolution)
    power_axis = _axis(power_range, n_power)
    velocity_axis = _axis(velocity_range, n_velocity)

    selected = []
    for mid in model_ids if model_ids is not None else DEFAULT_MODEL_IDS:
        entry = model_zoo.get_entry(mid)
        fields = {fe.name for fe in entry.input_set.entries}
        if not fields <= {"power", "velocity"}:
            raise ContractError(
                f"model {mid!r} needs inputs {sorted(fields)}; sweeps only vary power and velocity"
            )
        selected.append((mid, entry.target, entry.equation))
    for i, eq in enumerate(equations or ()):
        fields = {fe.name for fe in _equation_fields(eq)}
        if not fields <= {"power", "velocity"}:
            raise ContractError(
                f"equation {i} needs inputs {sorted(fields)}; sweeps only vary power and velocity"
            )
        selected.append((f"equation_{i}", eq.target_name, eq))
    if not selected:
        raise ContractError("nothing to sweep: give model ids or equations")

    # Power varies fastest within each velocity row.
    p_flat = np.tile(power_axis, n_velocity)
    v_flat = np.repeat(velocity_axis, n_power)
    column_cache = {"Power": p_flat, "Velocity": v_flat}

    def columns_for(eq):
        cols = {}
        for fe in _equation_fields(eq):
            name = fe.column_name
            if name not in column_cache:
                base = column_cache["Power" if fe.name == "power" else "Velocity"]
                column_cache[name] = np.log(base)
            cols[name] = column_cache[name]
        return cols

    values = {mid: eq.evaluate_columns(columns_for(eq)) for mid, _, eq in selected}
    env_p = (p_flat >= model_zoo.POWER_ENVELOPE[0]) & (p_flat <= model_zoo.POWER_ENVELOPE[1])
    env_v = (v_flat >= model_zoo.VELOCITY_ENVELOPE[0]) & (v_flat <= model_zoo.VELOCITY_ENVELOPE[1])
    outside = (~(env_p & env_v)).tolist()

    # Each cell's values align with the top-level "models" list.
    value_lists = [values[mid].tolist() for mid, _, _ in selected]
    cells = [
        {"out_of_envelope": o, "values": list(vs)}
        for o, *vs in zip(outside, *value_lists)
    ]
    return {
        "power_axis": power_axis.tolist(),
        "velocity_axis": velocity_axis.tolist(),
        "cell_order": "velocity-major rows, power varies fastest",
        "models": [{"id": mid, "target": target} for mid, target, _ in selected],
        "cells": cells,
    }


def _report_payload(report: EvalReport) -> dict:
    return {
        "r2_train": report.r2_train,
        "r2_test": report.r2_test,
        "mae_train": report.mae_train,
        "mae_test": report.mae_test,
    }


def fit_payload(
    ds: Dataset,
    spec: FeatureSpec,
    target: str,
    degree,
    split_fraction: float = 0.2,
    seed: int = 42,
) -> dict:
    """Fit on a train split (fixed degree or ``"auto"``) and report both splits."""
    if degree == "auto":
        selection = polyfit.select_degree(
            ds, spec, target, split_fraction=split_fraction, seed=seed
        )
        eq = selection.equation
        chosen = selection.chosen_degree
        report = selection.reports[chosen]
        per_degree = {str(d): _report_payload(r) for d, r in sorted(selection.reports.items())}
    else:
        chosen = int(degree)
        train, test = train_test_split(ds, split_fraction, seed)
        eq = polyfit.fit_polynomial(train, spec, target, chosen)
        x_train, names = build_design(train, spec)
        x_test, _ = build_design(test, spec)
        pred_train = eq.evaluate_columns({n: x_train[:, j] for j, n in enumerate(names)})
        pred_test = eq.evaluate_columns({n: x_test[:, j] for j, n in enumerate(names)})
        report = EvalReport(
            r2_train=numerics.r_squared(train.column(target), pred_train),
            r2_test=numerics.r_squared(test.column(target), pred_test),
            mae_train=numerics.mean_absolute_error(train.column(target), pred_train),
            mae_test=numerics.mean_absolute_error(test.column(target), pred_test),
        )
        per_degree = {str(chosen): _report_payload(report)}
    return {
        "degree": chosen,
        "equation": polyfit.equation_to_json(eq),
        "equation_text": polyfit.equation_to_string(eq),
        "report": _report_payload(report),
        "per_degree": per_degree,
    }


def correlation_payload(ds: Dataset) -> dict:
    """Pearson correlations between all eight record columns."""
    from .dataset import FIELD_NAMES

    columns = [(name, ds.column(name)) for name in FIELD_NAMES]
    corr = numerics.pearson_correlation_matrix(columns)
    return {
        "names": list(corr.names),
        "matrix": [[float(v) for v in row] for row in corr.matrix.array],
    }


def importance_payload(eq: SymbolicEquation) -> dict:
    report = polyfit.feature_importance(eq)
    return {
        "target": report.target_name,
        "entries": [
            {
                "label": e.label,
                "abs_coefficient": e.abs_coefficient,
                "percentage": e.percentage,
            }
            for e in report.entries
        ],
    }


# ---------------------------------------------------------------------------
# HTTP service
# ---------------------------------------------------------------------------


class _EquationStore:
    """Fitted equations published atomically under generated ids."""

    def __init__(self):
        self._lock = threading.Lock()
        self._counter = itertools.count(1)
        self._equations = {}

    def add(self, eq: SymbolicEquation) -> str:
        with self._lock:
            eq_id = f"fit-{next(self._counter)}"
        self._equations[eq_id] = eq  # atomic dict publish
        return eq_id

    def get(self, eq_id: str) -> Optional[SymbolicEquation]:
        return self._equations.get(eq_id)


def create_app(ui_dir=None):
    """Build the FastAPI app. ``ui_dir`` mounts the explorer's static assets at /ui."""
    app = FastAPI(title="meltmap", version="0.1.0")
    store = _EquationStore()

    def json_response(payload, status_code: int = 200) -> Response:
        return Response(
            content=canonical_json(payload) + "\n",
            status_code=status_code,
            media_type="application/json",
        )

    def error_response(status_code: int, code: str, message: str) -> Response:
        return json_response({"error": {"code": code, "message": message}}, status_code)

    def handle_error(exc: Exception) -> Response:
        if isinstance(exc, TooLargeError):
            return error_response(413, "too_large", str(exc))
        if isinstance(exc, ContractError) and "unknown model id" in str(exc):
            return error_response(404, "unknown_model", str(exc))
        if isinstance(exc, MeltMapError):
            code = type(exc).__name__.replace("Error", "").lower() + "_error"
            return error_response(400, code, str(exc))
        raise exc

    async def read_json_body(request: Request) -> dict:
        content_type = request.headers.get("content-type", "")
        if not content_type.startswith("application/json"):
            raise ContractError(f"expected application/json, got {content_type or 'none'}")
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise ContractError(f"invalid JSON body: {exc}") from None
        if not isinstance(body, dict):
            raise ContractError("JSON body must be an object")
        return body

    @app.get("/models")
    def get_models():
        return json_response(models_payload())

    @app.post("/predict")
    async def post_predict(request: Request):
        try:
            body = await read_json_body(request)
            inputs = body.get("inputs")
            if not isinstance(inputs, Mapping):
                raise ContractError('"inputs" must be an object of named values')
            model_ids = body.get("model_ids")
            if body.get("model_id") is not None:
                model_ids = [body["model_id"]] + list(model_ids or [])
            equation = None
            if body.get("equation") is not None:
                equation = polyfit.equation_from_json(body["equation"])
            return json_response(predict_payload(inputs, model_ids, equation))
        except Exception as exc:  # noqa: BLE001 - funneled into HTTP codes
            return handle_error(exc)

    @app.post("/sweep")
    async def post_sweep(request: Request):
        try:
            body = await read_json_body(request)
            for key in ("power_range", "velocity_range", "resolution"):
                if key not in body:
                    raise ContractError(f"missing required field {key!r}")
            equations = None
            if body.get("equations") is not None:
                equations = [polyfit.equation_from_json(e) for e in body["equations"]]
            payload = sweep_payload(
                body["power_range"],
                body["velocity_range"],
                body["resolution"],
                model_ids=body.get("models"),
                equations=equations,
            )
            return json_response(payload)
        except Exception as exc:  # noqa: BLE001
            return handle_error(exc)

    @app.get("/equations/{eq_id}")
    def get_equation(eq_id: str):
        try:
            eq = store.get(eq_id)
            if eq is None:
                try:
                    eq = model_zoo.get_entry(eq_id).equation
                except ContractError:
                    raise ContractError(
                        f"unknown model id {eq_id!r}; valid ids: "
                        f"{', '.join(model_zoo.model_ids())} plus fitted ids"
                    ) from None
            return json_response(polyfit.equation_to_json(eq))
        except Exception as exc:  # noqa: BLE001
            return handle_error(exc)

    @app.post("/fit")
    async def post_fit(
        csv: UploadFile = File(...),
        input: str = Form("power,velocity"),
        target: str = Form(...),
        degree: str = Form("2"),
        split: float = Form(0.2),
        seed: int = Form(42),
    ):
        try:
            raw = await csv.read()
            if len(raw) > MAX_CSV_BYTES:
                raise TooLargeError(f"CSV upload exceeds {MAX_CSV_BYTES} bytes")
            with tempfile.NamedTemporaryFile("wb", suffix=".csv", delete=False) as tmp:
                tmp.write(raw)
                tmp_path = tmp.name
            ds = load_csv(tmp_path)
            spec = FeatureSpec.parse(input)
            degree_arg = "auto" if degree == "auto" else int(degree)
            payload = fit_payload(ds, spec, target, degree_arg, split, seed)
            eq = polyfit.equation_from_json(payload["equation"])
            payload["id"] = store.add(eq)
            return json_response(payload)
        except ValueError as exc:
            return handle_error(ContractError(f"bad form field: {exc}"))
        except Exception as exc:  # noqa: BLE001
            return handle_error(exc)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
