"""Command-line frontend: fit, predict, train, correlate, importance, sweep, serve.

Every command delegates to the same core functions as the HTTP endpoints, so
a command and its endpoint twin agree numerically; ``sweep`` output is
byte-identical to ``POST /sweep``. Errors exit with status 2 and a message
on stderr.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import ensembles, model_zoo, polyfit, service
from .dataset import FeatureSpec, build_design, load_csv, train_test_split
from .errors import MeltMapError


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MeltMapError as exc:
            _fail(str(exc))
        except OSError as exc:
            _fail(str(exc))

    return wrapper


@click.group()
@click.version_option(package_name="meltmap")
def main():
    """Melt-pool geometry and spatter process-map regression toolkit."""


@main.command()
@click.argument("csv_path", type=click.Path())
@click.option("--input", "input_spec", default="power,velocity", show_default=True,
              help="Comma-separated input columns; prefix log_ for natural log.")
@click.option("--target", required=True, type=str, help="Output field to fit.")
@click.option("--degree", default="2", show_default=True,
              help="Polynomial degree, or 'auto' to pick by test R^2 over 2-6.")
@click.option("--split", default=0.2, show_default=True, help="Test fraction.")
@click.option("--seed", default=42, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the fitted equation JSON here.")
@_handle_errors
def fit(csv_path, input_spec, target, degree, split, seed, out_path):
    """Fit a polynomial equation to a process-map CSV."""
    ds = load_csv(csv_path)
    spec = FeatureSpec.parse(input_spec)
    if degree != "auto":
        try:
            degree = int(degree)
        except ValueError:
            _fail(f"--degree must be an integer or 'auto', got {degree!r}")
    payload = service.fit_payload(ds, spec, target, degree, split, seed)
    report = payload["report"]
    click.echo(f"degree: {payload['degree']}")
    click.echo(f"{target} = {payload['equation_text']}")
    click.echo(f"train R^2 = {report['r2_train']:.6f}   test R^2 = {report['r2_test']:.6f}")
    click.echo(f"train MAE = {report['mae_train']:.6g}   test MAE = {report['mae_test']:.6g}")
    if out_path:
        eq = polyfit.equation_from_json(payload["equation"])
        polyfit.save_equation(eq, out_path)
        click.echo(f"wrote {out_path}")


def _collect_inputs(power, velocity, length, width, depth):
    values = {}
    for name, v in (("power", power), ("velocity", velocity), ("length", length),
                    ("width", width), ("depth", depth)):
        if v is not None:
            values[name] = v
    return values


@main.command()
@click.option("--zoo", "zoo_id", default=None, help="Stored model id (see `meltmap sweep --help`).")
@click.option("--equation", "equation_path", type=click.Path(), default=None,
              help="Path to an equation JSON file.")
@click.option("-P", "--power", type=float, default=None)
@click.option("-V", "--velocity", type=float, default=None)
@click.option("-L", "--length", type=float, default=None)
@click.option("-W", "--width", type=float, default=None)
@click.option("-D", "--depth", type=float, default=None)
@_handle_errors
def predict(zoo_id, equation_path, power, velocity, length, width, depth):
    """Evaluate a stored model or a saved equation at named inputs."""
    if (zoo_id is None) == (equation_path is None):
        _fail("give exactly one of --zoo or --equation")
    inputs = _collect_inputs(power, velocity, length, width, depth)
    if zoo_id is not None:
        payload = service.predict_payload(inputs, model_ids=[zoo_id])
    else:
        eq = polyfit.load_equation(equation_path)
        payload = service.predict_payload(inputs, equation=eq)
    click.echo(f"{payload['target']} = {payload['value']!r}")
    if payload["out_of_envelope"]:
        click.echo("warning: inputs outside the calibration envelope", err=True)


# short aliases for the family flag
_FAMILY_ALIASES = {
    "rf": "random_forest",
    "et": "extra_trees",
    "extratree": "extra_trees",
    "extratrees": "extra_trees",
    "gb": "gradient_boost",
}


@main.command()
@click.argument("csv_path", type=click.Path())
@click.option("--input", "input_spec", default="power,velocity", show_default=True)
@click.option("--target", required=True, type=str)
@click.option("--family", required=True,
              type=click.Choice(tuple(ensembles.FAMILIES) + tuple(_FAMILY_ALIASES)))
@click.option("--n-estimators", type=int, default=None)
@click.option("--max-depth", type=int, default=None)
@click.option("--n-neighbors", type=int, default=None)
@click.option("--lr", "learning_rate", type=float, default=None)
@click.option("--min-leaf", type=int, default=1, show_default=True)
@click.option("--split", default=0.2, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the fitted model JSON here.")
@_handle_errors
def train(csv_path, input_spec, target, family, n_estimators, max_depth,
          n_neighbors, learning_rate, min_leaf, split, seed, out_path):
    """Train a tree ensemble or KNN model and report train/test metrics."""
    ds = load_csv(csv_path)
    spec = FeatureSpec.parse(input_spec)
    family = _FAMILY_ALIASES.get(family, family)
    config = ensembles.EnsembleConfig(
        family=family,
        n_estimators=n_estimators,
        max_depth=max_depth,
        n_neighbors=n_neighbors,
        learning_rate=learning_rate,
        seed=seed,
        min_leaf=min_leaf,
    )
    train_ds, test_ds = train_test_split(ds, split, seed)
    x_train, _ = build_design(train_ds, spec)
    x_test, _ = build_design(test_ds, spec)
    y_train = train_ds.column(target)
    y_test = test_ds.column(target)
    model = ensembles.fit_ensemble(x_train, y_train, config)
    report = ensembles.evaluate_model(model, (x_train, y_train), (x_test, y_test))
    click.echo(f"family: {family}")
    click.echo(f"train R^2 = {report.r2_train:.6f}   test R^2 = {report.r2_test:.6f}")
    click.echo(f"train MAE = {report.mae_train:.6g}   test MAE = {report.mae_test:.6g}")
    if out_path:
        ensembles.save_model(model, out_path)
        click.echo(f"wrote {out_path}")


@main.command()
@click.argument("csv_path", type=click.Path())
@click.option("--json", "json_path", type=click.Path(), default=None,
              help="Also write the matrix as JSON here.")
@_handle_errors
def correlate(csv_path, json_path):
    """Pearson correlation matrix across all dataset columns."""
    ds = load_csv(csv_path)
    payload = service.correlation_payload(ds)
    names = payload["names"]
    width = max(len(n) for n in names) + 2
    header = " " * width + "".join(f"{n:>{width}}" for n in names)
    click.echo(header)
    for name, row in zip(names, payload["matrix"]):
        cells = "".join(f"{v:>{width}.3f}" for v in row)
        click.echo(f"{name:<{width}}{cells}")
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        click.echo(f"wrote {json_path}")


@main.command()
@click.argument("equation_path", type=click.Path())
@_handle_errors
def importance(equation_path):
    """Rank an equation's terms by absolute-coefficient share."""
    eq = polyfit.load_equation(equation_path)
    payload = service.importance_payload(eq)
    click.echo(f"target: {payload['target']}")
    click.echo(f"{'term':<32}{'|coef|':>14}{'share %':>10}")
    for e in payload["entries"]:
        click.echo(f"{e['label']:<32}{e['abs_coefficient']:>14.6g}{e['percentage']:>10.4f}")


def _parse_range(text, label):
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        _fail(f"--{label} must look like LO:HI, got {text!r}")


def _parse_resolution(text):
    try:
        if "x" in text:
            a, b = text.split("x")
            return (int(a), int(b))
        return int(text)
    except ValueError:
        _fail(f"--resolution must be N or NPxNV, got {text!r}")


@main.command()
@click.option("--model", "models", multiple=True,
              help="Stored model id; repeatable. Default: the five melt-pool models plus spatter_pv.")
@click.option("--equation", "equation_paths", multiple=True, type=click.Path(),
              help="Equation JSON file; repeatable.")
@click.option("--power", default="50:500", show_default=True, help="Power range LO:HI (W).")
@click.option("--velocity", default="100:2000", show_default=True, help="Velocity range LO:HI (mm/s).")
@click.option("--resolution", default="64", show_default=True, help="Grid size N or NPxNV.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the sweep JSON here instead of stdout.")
@_handle_errors
def sweep(models, equation_paths, power, velocity, resolution, out_path):
    """Evaluate models over a (power, velocity) grid; prints canonical JSON."""
    equations = [polyfit.load_equation(p) for p in equation_paths]
    if models:
        model_ids = list(models)
    else:
        # default model set only when no ad-hoc equations were given
        model_ids = [] if equations else None
    payload = service.sweep_payload(
        _parse_range(power, "power"),
        _parse_range(velocity, "velocity"),
        _parse_resolution(resolution),
        model_ids=model_ids,
        equations=equations or None,
    )
    text = service.canonical_json(payload)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {out_path}", err=True)
    else:
        click.echo(text)


@main.command()
@click.option("--host", envvar="MELTMAP_HOST", default="127.0.0.1", show_default=True,
              help="Bind host (env MELTMAP_HOST; the flag wins).")
@click.option("--port", envvar="MELTMAP_PORT", default=8077, show_default=True, type=int,
              help="Bind port (env MELTMAP_PORT; the flag wins).")
@click.option("--ui", "ui_dir", type=click.Path(), default=None, flag_value="frontend/dist",
              is_flag=False, help="Serve the explorer UI from this directory at /ui.")
@_handle_errors
def serve(host, port, ui_dir):
    """Run the JSON HTTP service (and optionally the explorer UI)."""
    import uvicorn

    app = service.create_app(ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
