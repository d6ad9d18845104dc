#!/usr/bin/env python3
"""Tour of the bundled reference equations.

Evaluates the stored melt-pool and spatter polynomials at a few process
conditions and prints the symbolic form plus the term-importance ranking.
"""

from meltmap import equation_to_string, feature_importance, model_zoo

print("Available models:")
for entry in model_zoo.list_models():
    inputs = ", ".join(entry.input_set.column_names)
    print(
        f"  {entry.id:<16} target={entry.target:<13} degree={entry.equation.degree} "
        f"R2(train/test)={entry.reported_r2_train}/{entry.reported_r2_test}  inputs=[{inputs}]"
    )

print("\nDepth equation:")
depth = model_zoo.get_entry("depth_pv").equation
print(" ", equation_to_string(depth))

print("\nMelt-pool prediction at P=200 W, V=800 mm/s:")
mp = model_zoo.predict_melt_pool(200.0, 800.0)
print(f"  length        = {mp.length:10.2f} um")
print(f"  width         = {mp.width:10.2f} um")
print(f"  depth         = {mp.depth:10.2f} um")
print(f"  cross section = {mp.cross_section:10.2f} um^2")
print(f"  volume        = {mp.volume:10.2f} um^3")

print("\nSpatter from process conditions vs. from melt-pool dimensions:")
s_pv = model_zoo.predict_spatter("spatter_pv", {"power": 200.0, "velocity": 800.0})
s_dims = model_zoo.predict_spatter(
    "spatter_dims", {"length": mp.length, "width": mp.width, "depth": mp.depth}
)
print(f"  spatter_pv   (P, V)    = {s_pv:12.1f} um^3")
print(f"  spatter_dims (L, W, D) = {s_dims:12.1f} um^3")

print("\nTerm importance for the depth equation (share of |coefficient| mass):")
for e in feature_importance(depth).entries:
    print(f"  {e.label:<20} {e.percentage:6.2f} %")

print("\nOutside the calibration envelope the models still answer, but flag it:")
out = model_zoo.predict_melt_pool(30.0, 2500.0)
print(f"  P=30, V=2500 -> depth={out.depth:.2f} um, out_of_envelope={out.out_of_envelope}")
