"""Class-weighted random forest trained on feature matrices with gaps."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .validation import as_float_matrix, check_is_fitted

__all__ = ["Tree", "RandomForest", "Metrics", "evaluate"]

_MODEL_FORMAT = "poslens-forest"
_MODEL_VERSION = 1


@dataclass
class Tree:
    """Flat-array binary decision tree.

    feature is -1 at leaves; value holds the class-weighted probability
    pair (control, target); cover is the weighted sample count.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    cover: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index for every row of an imputed matrix."""
        nodes = np.zeros(len(X), dtype=np.int64)
        while True:
            feats = self.feature[nodes]
            active = np.flatnonzero(feats >= 0)
            if active.size == 0:
                return nodes
            rows = active
            f = feats[rows]
            go_left = X[rows, f] <= self.threshold[nodes[rows]]
            nodes[rows] = np.where(
                go_left, self.left[nodes[rows]], self.right[nodes[rows]]
            )

    def max_path_depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        best = 0
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                for child in (self.left[node], self.right[node]):
                    depth[child] = depth[node] + 1
                    best = max(best, depth[child])
        return int(best)


class _TreeBuilder:
    def __init__(self, X, y, weights, max_depth, n_candidates, min_leaf, rng):
        self.X = X
        self.y = y
        self.weights = weights
        self.max_depth = max_depth
        self.n_candidates = n_candidates
        self.min_leaf = min_leaf
        self.rng = rng
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[tuple[float, float]] = []
        self.cover: list[float] = []

    def _add_node(self, w0: float, w1: float) -> int:
        node = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        total = w0 + w1
        self.value.append((w0 / total, w1 / total))
        self.cover.append(total)
        return node

    def build(self, idx: np.ndarray) -> Tree:
        self._grow(idx, depth=0)
        return Tree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=np.float64),
            cover=np.array(self.cover, dtype=np.float64),
        )

    def _grow(self, idx: np.ndarray, depth: int) -> int:
        y = self.y[idx]
        w = self.weights[y]
        w1 = float(w[y == 1].sum())
        w0 = float(w.sum()) - w1
        node = self._add_node(w0, w1)
        if depth >= self.max_depth or w0 == 0.0 or w1 == 0.0:
            return node
        split = self._best_split(idx, w0, w1)
        if split is None:
            return node
        feat, thr = split
        go_left = self.X[idx, feat] <= thr
        self.feature[node] = feat
        self.threshold[node] = thr
        self.left[node] = self._grow(idx[go_left], depth + 1)
        self.right[node] = self._grow(idx[~go_left], depth + 1)
        return node

    def _best_split(self, idx, w0, w1) -> Optional[tuple[int, float]]:
        d = self.X.shape[1]
        candidates = np.sort(self.rng.choice(d, size=self.n_candidates, replace=False))
        total = w0 + w1
        parent_gini = 1.0 - (w0 / total) ** 2 - (w1 / total) ** 2
        best_cost = parent_gini
        best: Optional[tuple[int, float]] = None
        for feat in candidates:
            values = self.X[idx, feat]
            order = np.argsort(values, kind="stable")
            sorted_values = values[order]
            boundaries = np.flatnonzero(sorted_values[1:] > sorted_values[:-1]) + 1
            if boundaries.size == 0:
                continue
            w_sorted = self.weights[self.y[idx][order]]
            w1_sorted = np.where(self.y[idx][order] == 1, w_sorted, 0.0)
            cum_w = np.cumsum(w_sorted)
            cum_w1 = np.cumsum(w1_sorted)
            if self.min_leaf > 1:
                counts = np.arange(1, len(idx) + 1)
                ok = (counts[boundaries - 1] >= self.min_leaf) & (
                    len(idx) - counts[boundaries - 1] >= self.min_leaf
                )
                boundaries = boundaries[ok]
                if boundaries.size == 0:
                    continue
            wl = cum_w[boundaries - 1]
            wl1 = cum_w1[boundaries - 1]
            wl0 = wl - wl1
            wr = total - wl
            wr1 = w1 - wl1
            wr0 = w0 - wl0
            # Weighted Gini of the two children, averaged by weight mass.
            cost = (wl - (wl0**2 + wl1**2) / wl + wr - (wr0**2 + wr1**2) / wr) / total
            k = int(np.argmin(cost))
            if cost[k] < best_cost:
                best_cost = float(cost[k])
                b = boundaries[k]
                thr = (sorted_values[b - 1] + sorted_values[b]) / 2.0
                if thr >= sorted_values[b]:
                    thr = float(sorted_values[b - 1])
                best = (int(feat), float(thr))
        return best


class RandomForest(BaseEstimator, ClassifierMixin):
    """Bootstrap ensemble of depth-capped, class-weighted Gini trees.

    Undefined (NaN) feature values are imputed with per-feature training
    medians, which are stored and reused at inference.  The whole model is
    determined by (data, params): per-tree generators are seeded with
    seed + tree index, so trees can be built in any order.
    """

    def __init__(
        self,
        n_trees: int = 50,
        max_depth: int = 15,
        class_weighting: str = "balanced",
        min_samples_leaf: int = 1,
        features_per_split: str | int = "sqrt",
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.class_weighting = class_weighting
        self.min_samples_leaf = min_samples_leaf
        self.features_per_split = features_per_split
        self.seed = seed

    def _n_candidates(self, d: int) -> int:
        if self.features_per_split == "sqrt":
            return max(1, int(math.isqrt(d)))
        if self.features_per_split == "all":
            return d
        n = int(self.features_per_split)
        if not 1 <= n <= d:
            raise ValueError(f"features_per_split {n} outside [1, {d}]")
        return n

    def fit(self, X, y, feature_names: Optional[Sequence[str]] = None):
        X = as_float_matrix(X, allow_nan=True)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y have different lengths")
        if X.shape[0] < 2:
            raise ValueError("training requires at least 2 samples")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be 0 (control) or 1 (target)")
        counts = np.bincount(y, minlength=2)
        if counts[0] == 0 or counts[1] == 0:
            raise ValueError("training requires both classes to be present")
        if self.class_weighting == "balanced":
            class_weights = len(y) / (2.0 * counts)
        elif self.class_weighting == "uniform":
            class_weights = np.ones(2, dtype=np.float64)
        else:
            raise ValueError(f"unknown class_weighting: {self.class_weighting!r}")

        medians = np.zeros(X.shape[1], dtype=np.float64)
        for j in range(X.shape[1]):
            col = X[:, j]
            defined = col[~np.isnan(col)]
            medians[j] = float(np.median(defined)) if defined.size else 0.0
        X_imputed = self._impute_with(X, medians)

        n = X.shape[0]
        n_candidates = self._n_candidates(X.shape[1])
        trees = []
        for t in range(self.n_trees):
            rng = np.random.default_rng(self.seed + t)
            bootstrap = rng.integers(0, n, size=n)
            builder = _TreeBuilder(
                X_imputed,
                y,
                class_weights,
                self.max_depth,
                n_candidates,
                self.min_samples_leaf,
                rng,
            )
            trees.append(builder.build(bootstrap))

        self.trees_ = trees
        self.medians_ = medians
        self.class_weights_ = class_weights
        self.n_features_ = X.shape[1]
        self.feature_names_ = list(feature_names) if feature_names is not None else None
        self.classes_ = np.array([0, 1])
        return self

    def _impute_with(self, X: np.ndarray, medians: np.ndarray) -> np.ndarray:
        X = X.copy()
        nan_rows, nan_cols = np.nonzero(np.isnan(X))
        X[nan_rows, nan_cols] = medians[nan_cols]
        return X

    def impute(self, X) -> np.ndarray:
        check_is_fitted(self, "trees_")
        X = as_float_matrix(X, allow_nan=True)
        if X.shape[1] != self.n_features_:
            raise ValueError(
                f"expected {self.n_features_} features, got {X.shape[1]}"
            )
        return self._impute_with(X, self.medians_)

    def predict_proba(self, X) -> np.ndarray:
        """Probability of the target class for every row."""
        X = self.impute(X)
        acc = np.zeros(len(X), dtype=np.float64)
        for tree in self.trees_:
            acc += tree.value[tree.apply(X), 1]
        return acc / len(self.trees_)

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X) >= threshold).astype(np.int64)

    def save(self, path) -> None:
        check_is_fitted(self, "trees_")
        payload = {
            "format": _MODEL_FORMAT,
            "version": _MODEL_VERSION,
            "params": self.get_params(),
            "class_weights": self.class_weights_.tolist(),
            "medians": self.medians_.tolist(),
            "n_features": self.n_features_,
            "feature_names": self.feature_names_,
            "trees": [
                {
                    "feature": tree.feature.tolist(),
                    "threshold": tree.threshold.tolist(),
                    "left": tree.left.tolist(),
                    "right": tree.right.tolist(),
                    "value": tree.value.tolist(),
                    "cover": tree.cover.tolist(),
                }
                for tree in self.trees_
            ],
        }
        Path(path).write_text(
            json.dumps(payload, sort_keys=True, separators=(",", ":")), encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "RandomForest":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != _MODEL_FORMAT:
            raise ValueError(f"{path}: not a forest model file")
        if payload.get("version") != _MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model version {payload.get('version')}")
        model = cls(**payload["params"])
        model.trees_ = [
            Tree(
                feature=np.array(t["feature"], dtype=np.int64),
                threshold=np.array(t["threshold"], dtype=np.float64),
                left=np.array(t["left"], dtype=np.int64),
                right=np.array(t["right"], dtype=np.int64),
                value=np.array(t["value"], dtype=np.float64),
                cover=np.array(t["cover"], dtype=np.float64),
            )
            for t in payload["trees"]
        ]
        model.medians_ = np.array(payload["medians"], dtype=np.float64)
        model.class_weights_ = np.array(payload["class_weights"], dtype=np.float64)
        model.n_features_ = payload["n_features"]
        model.feature_names_ = payload["feature_names"]
        model.classes_ = np.array([0, 1])
        return model


@dataclass
class Metrics:
    """Per-class precision/recall/F1 plus weighted and macro aggregates."""

    precision: dict[int, float]
    recall: dict[int, float]
    f1: dict[int, float]
    support: dict[int, int]
    weighted_f1: float
    macro_f1: float
    confusion: np.ndarray
    empty_classes: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        name = {0: "control", 1: "target"}
        return {
            "per_class": {
                name[c]: {
                    "precision": self.precision[c],
                    "recall": self.recall[c],
                    "f1": self.f1[c],
                    "support": self.support[c],
                }
                for c in (0, 1)
            },
            "weighted_f1": self.weighted_f1,
            "macro_f1": self.macro_f1,
            "confusion": self.confusion.tolist(),
            "empty_classes": [name[c] for c in self.empty_classes],
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def evaluate(forest: RandomForest, X, y, threshold: float = 0.5) -> Metrics:
    """Threshold the forest's target probabilities and score the labels."""
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise ValueError("evaluation requires at least one sample")
    predictions = forest.predict(X, threshold=threshold)
    confusion = np.zeros((2, 2), dtype=np.int64)
    for truth, guess in zip(y, predictions):
        confusion[truth, guess] += 1
    precision, recall, f1, support = {}, {}, {}, {}
    empty = []
    for c in (0, 1):
        tp = int(confusion[c, c])
        precision[c] = _safe_div(tp, int(confusion[:, c].sum()))
        recall[c] = _safe_div(tp, int(confusion[c, :].sum()))
        f1[c] = _safe_div(2 * precision[c] * recall[c], precision[c] + recall[c])
        support[c] = int(confusion[c, :].sum())
        if support[c] == 0:
            empty.append(c)
    total = support[0] + support[1]
    weighted_f1 = (support[0] * f1[0] + support[1] * f1[1]) / total
    macro_f1 = (f1[0] + f1[1]) / 2.0
    return Metrics(
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        weighted_f1=weighted_f1,
        macro_f1=macro_f1,
        confusion=confusion,
        empty_classes=empty,
    )
