#!/usr/bin/env python3
"""Process-map sweep and the JSON service, exercised in-process.

Builds a (power, velocity) grid of predictions, renders a coarse ASCII
spatter map, then drives the HTTP endpoints through a test client without
binding a port. To run the real server instead: ``meltmap serve --port 8077``.
"""

from fastapi.testclient import TestClient

from meltmap import service

grid = service.sweep_payload((50, 500), (100, 2000), 24, model_ids=["spatter_pv"])
cells = grid["cells"]
n_p = len(grid["power_axis"])
n_v = len(grid["velocity_axis"])

values = [cell["values"][0] for cell in cells]
lo, hi = min(values), max(values)
shades = " .:-=+*#%@"

print("Spatter volume over the process window (rows: velocity up, cols: power right):")
for row in range(n_v - 1, -1, -1):
    line = ""
    for col in range(n_p):
        v = values[row * n_p + col]
        shade = shades[int((v - lo) / (hi - lo) * (len(shades) - 1))]
        line += shade * 2
    print(f"  V={grid['velocity_axis'][row]:7.0f} |{line}|")
print(f"  scale: '{shades[0]}' = {lo:.3g} um^3 ... '{shades[-1]}' = {hi:.3g} um^3")

print("\nSame numbers over HTTP:")
client = TestClient(service.create_app())

models = client.get("/models").json()
print(f"  GET /models -> {len(models['models'])} models, envelope {models['envelope']}")

pred = client.post(
    "/predict",
    json={"model_ids": ["depth_pv", "spatter_pv"], "inputs": {"power": 250, "velocity": 1100}},
).json()
for mid, entry in pred["predictions"].items():
    print(f"  POST /predict {mid:<12} -> {entry['target']} = {entry['value']:.2f}")

sweep = client.post(
    "/sweep",
    json={"power_range": [50, 500], "velocity_range": [100, 2000], "resolution": 4},
)
body = sweep.json()
print(f"  POST /sweep -> {len(body['cells'])} cells for {[m['id'] for m in body['models']]}")

eq = client.get("/equations/depth_pv").json()
print(f"  GET /equations/depth_pv -> degree {eq['degree']}, intercept {eq['intercept']}")
