#!/usr/bin/env python3
"""Pearson correlation map across process conditions and melt-pool outputs.

Builds a synthetic dataset in which every column varies, computes the full
correlation matrix, and prints it as an aligned table with the strongest
off-diagonal relationships called out.
"""

import numpy as np

from meltmap import Dataset, ProcessMapRecord, pearson_correlation_matrix
from meltmap.dataset import FIELD_NAMES

rng = np.random.default_rng(42)
records = []
for _ in range(150):
    p = rng.uniform(50, 500)
    v = rng.uniform(100, 2000)
    records.append(
        ProcessMapRecord(
            power=p,
            velocity=v,
            length=150 + 0.8 * p - 0.05 * v + rng.normal(0, 10),
            width=80 + 0.1 * p + 0.02 * v + rng.normal(0, 6),
            depth=40 + 0.9 * p - 0.012 * v + rng.normal(0, 8),
            cross_section=4000 + 20 * p - 1.5 * v + rng.normal(0, 300),
            volume=1e5 + 900 * p - 50 * v + rng.normal(0, 2e4),
            spatter=2e4 + 80 * p - 6 * v + rng.normal(0, 4e3),
        )
    )
ds = Dataset(records, provenance="synthetic correlation demo")

corr = pearson_correlation_matrix([(name, ds.column(name)) for name in FIELD_NAMES])

width = max(len(n) for n in corr.names) + 2
print(" " * width + "".join(f"{n:>{width}}" for n in corr.names))
for i, name in enumerate(corr.names):
    row = "".join(f"{corr.entry(i, j):>{width}.2f}" for j in range(len(corr.names)))
    print(f"{name:<{width}}{row}")

print("\nStrongest off-diagonal relationships:")
pairs = []
for i in range(len(corr.names)):
    for j in range(i + 1, len(corr.names)):
        pairs.append((abs(corr.entry(i, j)), corr.names[i], corr.names[j], corr.entry(i, j)))
for _, a, b, r in sorted(pairs, reverse=True)[:5]:
    print(f"  {a:<14} <-> {b:<14} r = {r:+.2f}")
