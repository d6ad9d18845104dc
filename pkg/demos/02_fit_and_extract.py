#!/usr/bin/env python3
"""Fit a polynomial to synthetic data and read the equation back.

Generates zero-noise samples from the stored depth polynomial, refits a
degree-2 model, and shows that the printed equation reproduces the original
coefficients. Then adds noise and lets the degree selector pick the order.
"""

from meltmap import (
    FeatureSpec,
    equation_to_string,
    fit_polynomial,
    select_degree,
    synth_generate,
)
from meltmap import model_zoo

truth = model_zoo.get_entry("depth_pv").equation
spec = FeatureSpec.of("power", "velocity")

print("Truth: ", equation_to_string(truth))

clean = synth_generate(truth, 281, (50, 500), (100, 2000), noise_sigma=0.0, seed=42)
fitted = fit_polynomial(clean, spec, "depth", 2)
print("Refit: ", equation_to_string(fitted))
print(f"train R^2 = {fitted.fit_diagnostics.train_r2:.12f}")

worst = max(
    abs(a.coefficient - b.coefficient) / abs(b.coefficient)
    for a, b in zip(fitted.terms, truth.terms)
)
print(f"worst relative coefficient error: {worst:.2e}")

print("\nWith 5 um Gaussian noise, degree selection over 2..6:")
noisy = synth_generate(truth, 281, (50, 500), (100, 2000), noise_sigma=5.0, seed=42)
selection = select_degree(noisy, spec, "depth")
for degree in sorted(selection.reports):
    r = selection.reports[degree]
    print(
        f"  degree {degree}: train R^2={r.r2_train:.6f}  test R^2={r.r2_test:.6f}  "
        f"test MAE={r.mae_test:.3f} um"
    )
print(f"chosen degree: {selection.chosen_degree}")

print("\nLog-transformed inputs work the same way:")
logfit = fit_polynomial(noisy, FeatureSpec.of("power", "velocity", "log_velocity"), "depth", 2)
print(f"  columns: {logfit.base_features}")
print(f"  train R^2 = {logfit.fit_diagnostics.train_r2:.6f}")
