"""Regression trees and tree ensembles, written from scratch.

Five model families share one greedy CART builder:

* random_forest — bootstrap samples, best-split trees over a random
  ceil(d/2)-feature subset per split, prediction = mean of trees.
* extra_trees  — full sample, one uniformly drawn threshold per feature,
  best of those; all features considered.
* bagging      — bootstrap samples, exhaustive best splits, all features.
* gradient_boost — stagewise fit to residuals scaled by a learning rate.
* knn          — mean of the k nearest training targets.

All randomness flows through numpy Generators seeded as seed + member
index, so refits are bit-identical and independent of scheduling. Leaf
values use exactly rounded summation (math.fsum), which makes best-split
trees invariant to training row order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import numerics
from .errors import ContractError

FAMILIES = ("random_forest", "extra_trees", "bagging", "gradient_boost", "knn")
_TREE_FAMILIES = ("random_forest", "extra_trees", "bagging", "gradient_boost")

DEFAULT_LEARNING_RATE = 0.1


@dataclass(frozen=True)
class EvalReport:
    """Train/test R^2 and MAE for one fitted model."""

    r2_train: float
    r2_test: float
    mae_train: float
    mae_test: float


@dataclass(frozen=True)
class EnsembleConfig:
    """Model family plus its hyperparameters.

    Fields that do not apply to the family must be left unset; the learning
    rate defaults to 0.1 for gradient boosting when omitted.
    """

    family: str
    n_estimators: Optional[int] = None
    max_depth: Optional[int] = None
    n_neighbors: Optional[int] = None
    learning_rate: Optional[float] = None
    seed: int = 0
    min_leaf: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ContractError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.min_leaf < 1:
            raise ContractError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.family == "knn":
            if self.n_neighbors is None or self.n_neighbors < 1:
                raise ContractError("knn requires n_neighbors >= 1")
            for name in ("n_estimators", "max_depth", "learning_rate"):
                if getattr(self, name) is not None:
                    raise ContractError(f"{name} does not apply to knn")
            return
        if self.n_estimators is None or self.n_estimators < 1:
            raise ContractError(f"{self.family} requires n_estimators >= 1")
        if self.max_depth is None or self.max_depth < 1:
            raise ContractError(f"{self.family} requires max_depth >= 1")
        if self.n_neighbors is not None:
            raise ContractError(f"n_neighbors does not apply to {self.family}")
        if self.family == "gradient_boost":
            if self.learning_rate is None:
                object.__setattr__(self, "learning_rate", DEFAULT_LEARNING_RATE)
            if not (0.0 < self.learning_rate <= 1.0):
                raise ContractError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        elif self.learning_rate is not None:
            raise ContractError(f"learning_rate does not apply to {self.family}")


@dataclass(frozen=True)
class Leaf:
    value: float
    n_samples: int


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: object
    right: object


@dataclass(frozen=True)
class RegressionTree:
    """Binary regression tree; rows go left when x[feature] <= threshold."""

    root: object
    max_depth: int
    min_leaf: int

    def predict_one(self, x) -> float:
        node = self.root
        while isinstance(node, Split):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        return np.array([self.predict_one(row) for row in X])


def _as_matrix(X) -> np.ndarray:
    arr = getattr(X, "array", X)
    a = np.asarray(arr, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ContractError(f"X must be 2-D, got ndim={a.ndim}")
    return a


def _leaf(y_sub) -> Leaf:
    # fsum is exactly rounded, so the leaf value ignores row order.
    return Leaf(value=math.fsum(y_sub) / len(y_sub), n_samples=len(y_sub))


def _sse(y_sub) -> float:
    s = float(np.sum(y_sub))
    s2 = float(np.sum(y_sub * y_sub))
    return s2 - s * s / len(y_sub)


def _best_threshold(xf, y_sub, min_leaf):
    """Exhaustive best (sse, threshold) over unique-value midpoints, or None."""
    order = np.lexsort((y_sub, xf))
    xs = xf[order]
    ys = y_sub[order]
    n = len(ys)
    cy = np.cumsum(ys)
    cy2 = np.cumsum(ys * ys)
    total_y = cy[-1]
    total_y2 = cy2[-1]
    best = None
    for i in range(min_leaf - 1, n - min_leaf):
        if xs[i] == xs[i + 1]:
            continue
        n_left = i + 1
        n_right = n - n_left
        s_left = cy[i]
        sse_left = cy2[i] - s_left * s_left / n_left
        s_right = total_y - s_left
        sse_right = (total_y2 - cy2[i]) - s_right * s_right / n_right
        sse = sse_left + sse_right
        if best is None or sse < best[0]:
            best = (sse, (xs[i] + xs[i + 1]) / 2.0)
    return best


def _random_threshold(xf, y_sub, min_leaf, rng):
    """One uniform threshold in [min, max); None when constant or unbalanced."""
    lo = float(xf.min())
    hi = float(xf.max())
    if lo == hi:
        return None
    thr = float(rng.uniform(lo, hi))
    mask = xf <= thr
    n_left = int(mask.sum())
    if n_left < min_leaf or len(xf) - n_left < min_leaf:
        return None
    left = y_sub[mask]
    right = y_sub[~mask]
    return (_sse(left) + _sse(right), thr)


def fit_cart(
    X,
    y,
    max_depth: int,
    min_leaf: int = 1,
    split_mode: str = "best",
    feature_subset: Optional[int] = None,
    seed=0,
) -> RegressionTree:
    """Grow a greedy top-down regression tree.

    ``best`` mode scans midpoints between consecutive sorted unique feature
    values; ``random_threshold`` draws one uniform threshold per candidate
    feature and keeps the best of those. Recursion stops at ``max_depth``,
    below ``2 * min_leaf`` samples, or when no candidate split strictly
    reduces the summed squared error. Ties go to the lowest feature index,
    then the lowest threshold.

    ``feature_subset`` restricts each split to that many randomly drawn
    features; ``seed`` may be an int or a numpy Generator.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0 or y.size == 0:
        raise ContractError("cannot fit a tree on empty data")
    if X.shape[0] != y.size:
        raise ContractError(f"X has {X.shape[0]} rows but y has {y.size}")
    if max_depth < 1:
        raise ContractError(f"max_depth must be >= 1, got {max_depth}")
    if min_leaf < 1:
        raise ContractError(f"min_leaf must be >= 1, got {min_leaf}")
    if split_mode not in ("best", "random_threshold"):
        raise ContractError(f"unknown split_mode {split_mode!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n, d = X.shape
    if feature_subset is not None and not (1 <= feature_subset <= d):
        raise ContractError(f"feature_subset must be in 1..{d}, got {feature_subset}")

    def build(idx, depth):
        y_sub = y[idx]
        if depth >= max_depth or len(idx) < 2 * min_leaf:
            return _leaf(y_sub)
        if feature_subset is not None and feature_subset < d:
            features = np.sort(rng.choice(d, size=feature_subset, replace=False))
        else:
            features = range(d)
        best = None  # (sse, feature, threshold)
        for f in features:
            xf = X[idx, f]
            if split_mode == "best":
                cand = _best_threshold(xf, y_sub, min_leaf)
            else:
                cand = _random_threshold(xf, y_sub, min_leaf, rng)
            if cand is not None and (best is None or cand[0] < best[0]):
                best = (cand[0], int(f), cand[1])
        if best is None or not (best[0] < _sse(y_sub)):
            return _leaf(y_sub)
        _, f, thr = best
        mask = X[idx, f] <= thr
        return Split(
            feature=f,
            threshold=thr,
            left=build(idx[mask], depth + 1),
            right=build(idx[~mask], depth + 1),
        )

    return RegressionTree(root=build(np.arange(n), 0), max_depth=max_depth, min_leaf=min_leaf)


class _TreeEnsemble:
    """Mean-of-trees predictor shared by forest, extra-trees, and bagging."""

    def __init__(self, family, config, trees):
        self.family = family
        self.config = config
        self.trees = list(trees)

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        preds = np.stack([t.predict(X) for t in self.trees])
        return preds.mean(axis=0)


class RandomForestModel(_TreeEnsemble):
    pass


class ExtraTreesModel(_TreeEnsemble):
    pass


class BaggingModel(_TreeEnsemble):
    pass


class GradientBoostModel:
    """Stagewise additive trees on residuals: F_m = F_{m-1} + lr * tree_m."""

    def __init__(self, config, init_value, trees, staged_train_mse):
        self.family = "gradient_boost"
        self.config = config
        self.init_value = init_value
        self.trees = list(trees)
        self.staged_train_mse = list(staged_train_mse)

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        out = np.full(X.shape[0], self.init_value)
        for tree in self.trees:
            out = out + self.config.learning_rate * tree.predict(X)
        return out


class KnnModel:
    """Stored-training-set k-nearest-neighbor regressor."""

    def __init__(self, config, x_train, y_train):
        self.family = "knn"
        self.config = config
        self.x_train = _as_matrix(x_train)
        self.y_train = np.asarray(y_train, dtype=float)

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X)
        return np.array(
            [knn_predict(self.x_train, self.y_train, row, self.config.n_neighbors) for row in X]
        )


def knn_predict(x_train, y_train, x, k: int) -> float:
    """Mean target of the k nearest rows under Euclidean distance.

    Distance ties break toward the lower row index.
    """
    xt = _as_matrix(x_train)
    yt = np.asarray(y_train, dtype=float)
    n = xt.shape[0]
    if not (1 <= k <= n):
        raise ContractError(f"k must be in 1..{n}, got {k}")
    diff = xt - np.asarray(x, dtype=float)
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    order = np.argsort(dist, kind="stable")
    return math.fsum(yt[order[:k]]) / k


def fit_ensemble(X, y, config: EnsembleConfig):
    """Train the configured model family on (X, y).

    Every ensemble member draws its randomness from a Generator seeded as
    ``config.seed + member_index``, so identical inputs give bit-identical
    models no matter how members would be scheduled.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ContractError("cannot fit on empty data")
    if X.shape[0] != y.size:
        raise ContractError(f"X has {X.shape[0]} rows but y has {y.size}")
    n, d = X.shape

    if config.family == "knn":
        if config.n_neighbors > n:
            raise ContractError(f"n_neighbors={config.n_neighbors} exceeds {n} training rows")
        return KnnModel(config, X, y)

    if config.family == "random_forest":
        subset = max(1, math.ceil(d / 2))
        trees = []
        for i in range(config.n_estimators):
            rng = np.random.default_rng(config.seed + i)
            idx = rng.integers(0, n, n)
            trees.append(
                fit_cart(X[idx], y[idx], config.max_depth, config.min_leaf, "best", subset, rng)
            )
        return RandomForestModel("random_forest", config, trees)

    if config.family == "extra_trees":
        trees = []
        for i in range(config.n_estimators):
            rng = np.random.default_rng(config.seed + i)
            trees.append(
                fit_cart(X, y, config.max_depth, config.min_leaf, "random_threshold", None, rng)
            )
        return ExtraTreesModel("extra_trees", config, trees)

    if config.family == "bagging":
        trees = []
        for i in range(config.n_estimators):
            rng = np.random.default_rng(config.seed + i)
            idx = rng.integers(0, n, n)
            trees.append(fit_cart(X[idx], y[idx], config.max_depth, config.min_leaf, "best", None, rng))
        return BaggingModel("bagging", config, trees)

    # gradient_boost: deterministic best-split trees on running residuals
    current = np.full(n, float(np.mean(y)))
    init_value = float(current[0])
    trees = []
    staged_mse = [float(np.mean((y - current) ** 2))]
    for _ in range(config.n_estimators):
        tree = fit_cart(X, y - current, config.max_depth, config.min_leaf, "best", None, 0)
        current = current + config.learning_rate * tree.predict(X)
        trees.append(tree)
        staged_mse.append(float(np.mean((y - current) ** 2)))
    return GradientBoostModel(config, init_value, trees, staged_mse)


def evaluate_model(model, train, test) -> EvalReport:
    """Score a fitted model on (X, y) train and test pairs."""
    (x_tr, y_tr), (x_te, y_te) = train, test
    pred_tr = model.predict(x_tr)
    pred_te = model.predict(x_te)
    return EvalReport(
        r2_train=numerics.r_squared(y_tr, pred_tr),
        r2_test=numerics.r_squared(y_te, pred_te),
        mae_train=numerics.mean_absolute_error(y_tr, pred_tr),
        mae_test=numerics.mean_absolute_error(y_te, pred_te),
    )


def _node_to_dict(node) -> dict:
    if isinstance(node, Leaf):
        return {"kind": "leaf", "value": node.value, "n_samples": node.n_samples}
    return {
        "kind": "split",
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(obj):
    if obj["kind"] == "leaf":
        return Leaf(value=float(obj["value"]), n_samples=int(obj["n_samples"]))
    return Split(
        feature=int(obj["feature"]),
        threshold=float(obj["threshold"]),
        left=_node_from_dict(obj["left"]),
        right=_node_from_dict(obj["right"]),
    )


def _tree_to_dict(tree: RegressionTree) -> dict:
    return {
        "max_depth": tree.max_depth,
        "min_leaf": tree.min_leaf,
        "root": _node_to_dict(tree.root),
    }


def _tree_from_dict(obj) -> RegressionTree:
    return RegressionTree(
        root=_node_from_dict(obj["root"]),
        max_depth=int(obj["max_depth"]),
        min_leaf=int(obj["min_leaf"]),
    )


def model_to_json(model) -> dict:
    """Serialize a fitted model: family, config echo, and full structure."""
    out = {"family": model.family, "config": asdict(model.config)}
    if model.family == "knn":
        out["model"] = {
            "x_train": model.x_train.tolist(),
            "y_train": model.y_train.tolist(),
        }
    elif model.family == "gradient_boost":
        out["model"] = {
            "init_value": model.init_value,
            "trees": [_tree_to_dict(t) for t in model.trees],
            "staged_train_mse": model.staged_train_mse,
        }
    else:
        out["model"] = {"trees": [_tree_to_dict(t) for t in model.trees]}
    return out


def model_from_json(obj) -> object:
    """Rebuild a fitted model from :func:`model_to_json` output."""
    try:
        family = obj["family"]
        config = EnsembleConfig(**obj["config"])
        body = obj["model"]
    except (KeyError, TypeError) as exc:
        raise ContractError(f"malformed model JSON: {exc}") from None
    if family != config.family:
        raise ContractError(f"family {family!r} does not match config {config.family!r}")
    if family == "knn":
        return KnnModel(config, np.array(body["x_train"], dtype=float), body["y_train"])
    trees = [_tree_from_dict(t) for t in body["trees"]]
    if family == "gradient_boost":
        return GradientBoostModel(
            config, float(body["init_value"]), trees, body.get("staged_train_mse", [])
        )
    cls = {"random_forest": RandomForestModel, "extra_trees": ExtraTreesModel, "bagging": BaggingModel}[family]
    return cls(family, config, trees)


def save_model(model, path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=2)
        fh.write("\n")


def load_model(path):
    import json

    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
