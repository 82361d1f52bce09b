"""Shapley attribution of forest target probabilities.

The fast path evaluates, leaf by leaf, the Shapley value of the game in
which features inside the coalition follow the explained row's path and
features outside it split by node cover.  Per-path products collapse the
game to one polynomial per leaf, so the cost is O(leaves * depth^2) per
row instead of an exponential subset sweep; the exponential sweep is kept
as the verification oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .forest import RandomForest, Tree
from .validation import as_float_matrix

__all__ = [
    "Attribution",
    "SummaryRanking",
    "SummaryResult",
    "tree_shap",
    "tree_shap_batch",
    "brute_force_shapley",
    "forest_shap",
    "forest_shap_batch",
    "shap_summary",
]

_BRUTE_FORCE_MAX_FEATURES = 15


@dataclass
class Attribution:
    """Per-feature contributions reconstructing one model output."""

    phi: np.ndarray
    base_value: float
    model_output: float


@dataclass
class SummaryRanking:
    """Features ordered by descending mean |phi| over a sample of posts."""

    order: np.ndarray
    mean_abs_phi: np.ndarray


@dataclass
class SummaryResult:
    ranking: SummaryRanking
    indices: np.ndarray
    phi: np.ndarray
    base_value: float
    model_output: np.ndarray


@dataclass
class _PathTable:
    """Leaf paths consolidated by feature and padded to a common width.

    Padded slots get ratio 1 and an unbounded interval, which makes them
    dummy players: their linear factor is identically 1, so they change
    neither the coalition integrals nor any other feature's value.
    Leaves are stored sorted by true path size so batch processing can
    use tight widths per slice.
    """

    values: np.ndarray     # (L,)
    features: np.ndarray   # (L, K)
    ratios: np.ndarray     # (L, K)
    lower: np.ndarray      # (L, K)
    upper: np.ndarray      # (L, K)
    path_sizes: np.ndarray  # (L,)
    max_path: int
    base: float


def _leaf_paths(tree: Tree) -> _PathTable:
    """Consolidate every root-to-leaf path by feature.

    Repeated splits on one feature merge into an interval (lower, upper]
    and a product of cover ratios; the ratio is the fraction of training
    cover that follows the path when the feature is out of the coalition.
    """
    if (tree.cover <= 0).any():
        raise ValueError("tree nodes need positive cover counts")
    leaves: list[tuple[float, dict[int, tuple[float, float, float]]]] = []
    base = 0.0

    def descend(node: int, constraints: dict[int, tuple[float, float, float]]):
        nonlocal base
        feat = int(tree.feature[node])
        if feat < 0:
            value = float(tree.value[node, 1])
            leaves.append((value, dict(constraints)))
            base += value * math.prod(entry[0] for entry in constraints.values())
            return
        threshold = float(tree.threshold[node])
        cover = float(tree.cover[node])
        old = constraints.get(feat)
        prev = old if old is not None else (1.0, -math.inf, math.inf)
        for child, is_left in ((int(tree.left[node]), True), (int(tree.right[node]), False)):
            ratio = float(tree.cover[child]) / cover
            if is_left:
                constraints[feat] = (prev[0] * ratio, prev[1], min(prev[2], threshold))
            else:
                constraints[feat] = (prev[0] * ratio, max(prev[1], threshold), prev[2])
            descend(child, constraints)
        if old is None:
            del constraints[feat]
        else:
            constraints[feat] = old

    descend(0, {})
    leaves.sort(key=lambda pair: len(pair[1]))
    n_leaves = len(leaves)
    max_path = max((len(c) for _, c in leaves), default=0)
    width = max(max_path, 1)
    values = np.empty(n_leaves)
    features = np.zeros((n_leaves, width), dtype=np.int64)
    ratios = np.ones((n_leaves, width))
    lower = np.full((n_leaves, width), -np.inf)
    upper = np.full((n_leaves, width), np.inf)
    path_sizes = np.empty(n_leaves, dtype=np.int64)
    for i, (value, constraints) in enumerate(leaves):
        values[i] = value
        path_sizes[i] = len(constraints)
        for j, feat in enumerate(sorted(constraints)):
            ratio, lo, hi = constraints[feat]
            features[i, j] = feat
            ratios[i, j] = ratio
            lower[i, j] = lo
            upper[i, j] = hi
    return _PathTable(values, features, ratios, lower, upper, path_sizes, max_path, base)


def _unit_gauss_legendre(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating polynomials of `degree` exactly on [0, 1]."""
    m = max(1, (degree + 2) // 2)
    nodes, weights = np.polynomial.legendre.leggauss(m)
    return (nodes + 1.0) / 2.0, weights / 2.0


def _coalition_integrals(hits: np.ndarray, ratios: np.ndarray, width: int) -> np.ndarray:
    """Per-slot integrals of the product of the other slots' factors.

    Row r, slot j gets the exact value of the integral over u in [0, 1]
    of prod_{i != j} (hits[r, i] u + ratios[r, i] (1 - u)), evaluated by
    Gauss-Legendre quadrature (the integrand is a polynomial of degree
    below `width`).
    """
    nodes, node_weights = _unit_gauss_legendre(width - 1)
    coalition = np.zeros_like(hits)
    for u, w in zip(nodes, node_weights):
        factors = hits * u
        factors += ratios * (1.0 - u)
        full = factors.prod(axis=1)
        np.divide(full[:, None], factors, out=factors)
        factors *= w
        coalition += factors
    return coalition


_LEAF_CHUNK = 256
_DEDUP_MAX_WIDTH = 20


def tree_shap_batch(
    tree: Tree, X: np.ndarray, n_features: Optional[int] = None
) -> tuple[np.ndarray, float]:
    """Path-dependent Shapley values for every row; rows must be imputed.

    Returns the (n, d) phi matrix and the tree's base value (the
    cover-weighted expectation of its output).  For a leaf with path
    ratios r_i and per-row hit flags h_i, feature j's coalition sum is
    the exact integral over u in [0, 1] of prod_{i != j} of
    (h_i u + r_i (1 - u)); Gauss-Legendre nodes evaluate it exactly
    because the integrand is a polynomial of degree below the path size.
    """
    X = as_float_matrix(X)
    d = n_features if n_features is not None else X.shape[1]
    n = X.shape[0]
    phi = np.zeros((n, d))
    table = _leaf_paths(tree)
    if table.max_path == 0:
        return phi, table.base
    n_leaves = table.features.shape[0]
    for start in range(0, n_leaves, _LEAF_CHUNK):
        stop = min(start + _LEAF_CHUNK, n_leaves)
        # Leaves are sorted by path size, so this slice's true width is
        # its last leaf's; everything beyond it is neutral padding.
        width = max(int(table.path_sizes[stop - 1]), 1)
        sl = slice(start, stop)
        feats = table.features[sl, :width]
        ratios = table.ratios[sl, :width]
        values = table.values[sl]
        chunk = feats.shape[0]
        gathered = X[:, feats]  # (n, C, width)
        hits = (gathered > table.lower[sl, :width]) & (gathered <= table.upper[sl, :width])

        if width <= _DEDUP_MAX_WIDTH:
            # The contribution of a leaf to a row depends only on which
            # path constraints the row satisfies, and the same hit pattern
            # recurs across rows; do the integral work once per distinct
            # (leaf, pattern) pair.
            powers = np.int64(1) << np.arange(width, dtype=np.int64)
            codes = (hits * powers).sum(axis=2, dtype=np.int64)
            codes += np.arange(chunk, dtype=np.int64) << width
            flat = codes.ravel()
            space = chunk << width
            present = np.zeros(space, dtype=bool)
            present[flat] = True
            uniq = np.flatnonzero(present)
            lookup = np.zeros(space, dtype=np.int64)
            lookup[uniq] = np.arange(len(uniq))
            inverse = lookup[flat]
            leaf_of = uniq >> width
            pattern_hits = (
                (uniq[:, None] >> np.arange(width, dtype=np.int64)) & 1
            ).astype(np.float64)
            pattern_ratios = ratios[leaf_of]
            coalition = _coalition_integrals(pattern_hits, pattern_ratios, width)
            plays = coalition * (pattern_hits - pattern_ratios) * values[leaf_of, None]
            contrib = plays[inverse]
        else:
            hits = hits.astype(np.float64)
            coalition = np.zeros_like(hits)
            nodes, node_weights = _unit_gauss_legendre(width - 1)
            for u, w in zip(nodes, node_weights):
                factors = hits * u
                factors += ratios * (1.0 - u)
                full = factors.prod(axis=2)
                np.divide(full[:, :, None], factors, out=factors)
                factors *= w
                coalition += factors
            contrib = coalition * (hits - ratios) * values[None, :, None]

        # Segment-sum slot contributions into feature columns.
        onehot = np.zeros((chunk * width, d))
        onehot[np.arange(chunk * width), feats.ravel()] = 1.0
        phi += contrib.reshape(n, chunk * width) @ onehot
    return phi, table.base


def tree_shap(tree: Tree, x, n_features: Optional[int] = None) -> Attribution:
    """Explain one (already imputed) row against a single tree."""
    x = np.asarray(x, dtype=np.float64)
    phi, base = tree_shap_batch(tree, x.reshape(1, -1), n_features)
    output = float(tree.value[tree.apply(x.reshape(1, -1))[0], 1])
    return Attribution(phi=phi[0], base_value=base, model_output=output)


def _subset_expectation(tree: Tree, x: np.ndarray, subset: frozenset) -> float:
    def walk(node: int, weight: float) -> float:
        feat = int(tree.feature[node])
        if feat < 0:
            return weight * float(tree.value[node, 1])
        left, right = int(tree.left[node]), int(tree.right[node])
        if feat in subset:
            child = left if x[feat] <= tree.threshold[node] else right
            return walk(child, weight)
        cover = float(tree.cover[node])
        return walk(left, weight * float(tree.cover[left]) / cover) + walk(
            right, weight * float(tree.cover[right]) / cover
        )

    return walk(0, 1.0)


def brute_force_shapley(tree: Tree, x, n_features: int) -> Attribution:
    """Exact Shapley values by full subset enumeration (the oracle path).

    Independent of the polynomial route: every coalition's value comes
    from a fresh cover-weighted walk of the tree.
    """
    if n_features > _BRUTE_FORCE_MAX_FEATURES:
        raise ValueError(
            f"brute force enumeration supports at most"
            f" {_BRUTE_FORCE_MAX_FEATURES} features, got {n_features}"
        )
    x = np.asarray(x, dtype=np.float64)
    if (tree.cover <= 0).any():
        raise ValueError("tree nodes need positive cover counts")
    cache: dict[frozenset, float] = {}

    def value(subset: frozenset) -> float:
        if subset not in cache:
            cache[subset] = _subset_expectation(tree, x, subset)
        return cache[subset]

    d = n_features
    fact = [math.factorial(i) for i in range(d + 1)]
    phi = np.zeros(d)
    for i in range(d):
        others = [f for f in range(d) if f != i]
        for size in range(d):
            weight = fact[size] * fact[d - size - 1] / fact[d]
            for combo in combinations(others, size):
                subset = frozenset(combo)
                phi[i] += weight * (value(subset | {i}) - value(subset))
    return Attribution(
        phi=phi,
        base_value=value(frozenset()),
        model_output=value(frozenset(range(d))),
    )


def forest_shap_batch(forest: RandomForest, X) -> tuple[np.ndarray, float, np.ndarray]:
    """Per-row phi matrix, base value and model outputs for a forest."""
    X_imputed = forest.impute(X)
    n, d = X_imputed.shape
    phi = np.zeros((n, d))
    base = 0.0
    for tree in forest.trees_:
        tree_phi, tree_base = tree_shap_batch(tree, X_imputed, d)
        phi += tree_phi
        base += tree_base
    n_trees = len(forest.trees_)
    phi /= n_trees
    base /= n_trees
    return phi, base, forest.predict_proba(X)


def forest_shap(forest: RandomForest, x) -> Attribution:
    """Explain one post's target probability against the whole forest."""
    phi, base, outputs = forest_shap_batch(forest, np.asarray(x, dtype=np.float64).reshape(1, -1))
    return Attribution(phi=phi[0], base_value=base, model_output=float(outputs[0]))


def shap_summary(
    forest: RandomForest, X_sample, sample_size: int, seed: int = 0
) -> SummaryResult:
    """Mean-|phi| feature ranking over a seeded sample of posts.

    The sample is drawn uniformly without replacement; taking every row is
    the degenerate (and fully deterministic) case.  Ties in mean |phi|
    rank the lower feature index first.
    """
    X_sample = as_float_matrix(X_sample, allow_nan=True)
    n = X_sample.shape[0]
    if sample_size > n:
        raise ValueError(f"sample_size {sample_size} exceeds the {n} available rows")
    if sample_size < 1:
        raise ValueError("sample_size must be positive")
    if sample_size == n:
        indices = np.arange(n)
    else:
        rng = np.random.default_rng(seed)
        indices = np.sort(rng.choice(n, size=sample_size, replace=False))
    phi, base, outputs = forest_shap_batch(forest, X_sample[indices])
    mean_abs = np.abs(phi).mean(axis=0)
    order = np.lexsort((np.arange(len(mean_abs)), -mean_abs))
    return SummaryResult(
        ranking=SummaryRanking(order=order, mean_abs_phi=mean_abs),
        indices=indices,
        phi=phi,
        base_value=base,
        model_output=outputs,
    )
