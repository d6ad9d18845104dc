"""Shared fixtures and independent oracle implementations.

The oracles deliberately avoid the library's fast paths: normal equations
instead of QR/SVD, plain Python loops with fsum instead of cumsum tricks.
"""

import math
import re
from pathlib import Path

import numpy as np
import pytest

import meltmap as mm
from meltmap import model_zoo

TESTS_DIR = Path(__file__).parent
GOLDEN_EQUATIONS = TESTS_DIR / "data" / "golden_equations.txt"

PV_SPEC = mm.FeatureSpec.of("power", "velocity")
ENVELOPE = ((50.0, 500.0), (100.0, 2000.0))


@pytest.fixture(scope="session")
def depth_equation():
    return model_zoo.get_entry("depth_pv").equation


@pytest.fixture(scope="session")
def depth_synth(depth_equation):
    """281 zero-noise samples of the stored depth polynomial over the envelope."""
    return mm.synth_generate(depth_equation, 281, *ENVELOPE, noise_sigma=0.0, seed=42)


@pytest.fixture(scope="session")
def depth_synth_noisy(depth_equation):
    return mm.synth_generate(depth_equation, 281, *ENVELOPE, noise_sigma=5.0, seed=42)


def make_rich_dataset(n=60, seed=11):
    """Synthetic dataset with nonzero variance in every column."""
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        p = rng.uniform(50, 500)
        v = rng.uniform(100, 2000)
        records.append(
            mm.ProcessMapRecord(
                power=p,
                velocity=v,
                length=150 + 0.8 * p - 0.05 * v + rng.normal(0, 5),
                width=80 + 0.1 * p + 0.02 * v + rng.normal(0, 3),
                depth=40 + 0.9 * p - 0.01 * v + rng.normal(0, 4),
                cross_section=4000 + 20 * p - 1.5 * v + rng.normal(0, 100),
                volume=1e5 + 900 * p - 50 * v + rng.normal(0, 5000),
                spatter=2e4 + 80 * p - 6 * v + rng.normal(0, 2000),
            )
        )
    return mm.Dataset(records, provenance="synthetic rich")


@pytest.fixture(scope="session")
def rich_dataset():
    return make_rich_dataset()


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def normal_equation_solve(X, y):
    """Least squares the brute-force way: beta = (X^T X)^-1 X^T y."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.linalg.solve(X.T @ X, X.T @ y)


def mae_loop(y_true, y_pred):
    """One-line naive summation oracle for MAE."""
    return math.fsum(abs(a - b) for a, b in zip(y_true, y_pred)) / len(y_true)


def _fsum_mean(values):
    return math.fsum(values) / len(values)


def partition_sse(y_groups):
    """Exact-summation SSE of a partition, each group predicted by its mean."""
    total = []
    for group in y_groups:
        m = _fsum_mean(group)
        total.extend((v - m) ** 2 for v in group)
    return math.fsum(total)


def tree_sse(tree, X, y):
    """SSE of a fitted tree on (X, y) with exact summation."""
    preds = tree.predict(X)
    return math.fsum((yi - pi) ** 2 for yi, pi in zip(y, preds))


def naive_best_split(rows, min_leaf=1):
    """Naive scan of every (feature, midpoint) split; returns
    (sse, feature, threshold, left_rows, right_rows) or None.

    rows is a list of (x_tuple, y). Ties go to the lowest feature index,
    then the lowest threshold, exactly like the library's tie-break.
    """
    if len(rows) < 2 * min_leaf:
        return None
    d = len(rows[0][0])
    best = None
    for f in range(d):
        values = sorted({x[f] for x, _ in rows})
        for a, b in zip(values, values[1:]):
            thr = (a + b) / 2.0
            left = [(x, y) for x, y in rows if x[f] <= thr]
            right = [(x, y) for x, y in rows if x[f] > thr]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            sse = partition_sse([[y for _, y in left], [y for _, y in right]])
            if best is None or sse < best[0]:
                best = (sse, f, thr, left, right)
    return best


def naive_greedy_cart_sse(X, y, max_depth, min_leaf=1):
    """Independent re-implementation of greedy best-split CART; returns the
    training SSE of the resulting tree (exact summation throughout)."""
    rows = [(tuple(x), float(v)) for x, v in zip(np.asarray(X, float), y)]

    def grow(rows, depth):
        ys = [v for _, v in rows]
        if depth >= max_depth:
            return [ys]
        cand = naive_best_split(rows, min_leaf)
        if cand is None:
            return [ys]
        sse_here = partition_sse([ys])
        if not (cand[0] < sse_here):
            return [ys]
        _, _, _, left, right = cand
        return grow(left, depth + 1) + grow(right, depth + 1)

    return partition_sse(grow(rows, 0))


def knn_brute_force(x_train, y_train, query, k):
    """Sort-all-distances KNN oracle with index tie-break."""
    dist = [
        (math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(row, query))), i)
        for i, row in enumerate(np.asarray(x_train, float))
    ]
    dist.sort()
    picked = [y_train[i] for _, i in dist[:k]]
    return math.fsum(picked) / k


# ---------------------------------------------------------------------------
# Golden transcription file
# ---------------------------------------------------------------------------


def parse_golden_equations():
    """Parse tests/data/golden_equations.txt into
    {model_id: [(token, monomial_string), ...]}."""
    blocks = {}
    current = None
    for raw in GOLDEN_EQUATIONS.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = re.fullmatch(r"\[([a-z_0-9]+)\]", line)
        if m:
            current = m.group(1)
            blocks[current] = []
            continue
        token, monomial = line.split(maxsplit=1)
        blocks[current].append((token, monomial.strip()))
    return blocks


def monomial_to_exponents(monomial, base_features):
    """Parse 'Power^2*Velocity' into an exponent tuple over base_features."""
    e = [0] * len(base_features)
    if monomial == "1":
        return tuple(e)
    for factor in monomial.split("*"):
        if "^" in factor:
            name, power = factor.split("^")
            power = int(power)
        else:
            name, power = factor, 1
        e[base_features.index(name)] += power
    return tuple(e)


def format_like(value, token):
    """Render ``value`` in the same shape as a transcribed token: same decimal
    places for plain decimals, same significant digits for scientific ones."""
    t = token[1:] if token.startswith("-") else token
    sign = "-" if token.startswith("-") else ""
    if "e" in t:
        mantissa, _ = t.split("e")
        digits = len(mantissa.replace(".", ""))
        rendered = f"{abs(value):.{digits - 1}e}"
        m, exp = rendered.split("e")
        return f"{sign}{m}e{int(exp)}"
    decimals = len(t.split(".")[1]) if "." in t else 0
    return f"{sign}{abs(value):.{decimals}f}"
