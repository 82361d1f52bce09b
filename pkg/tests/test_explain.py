"""Shapley attribution: fast path vs brute-force oracle and summaries."""

import numpy as np
import pytest

from poslens.explain import (
    brute_force_shapley,
    forest_shap,
    forest_shap_batch,
    shap_summary,
    tree_shap,
)
from poslens.forest import RandomForest, Tree


def _leaf_tree(value: float, cover: float = 5.0) -> Tree:
    return Tree(
        feature=np.array([-1]),
        threshold=np.array([0.0]),
        left=np.array([-1]),
        right=np.array([-1]),
        value=np.array([[1.0 - value, value]]),
        cover=np.array([cover]),
    )


def _stump(feature: int, threshold: float, left_value: float, right_value: float,
           cover=(10.0, 6.0, 4.0)) -> Tree:
    return Tree(
        feature=np.array([feature, -1, -1]),
        threshold=np.array([threshold, 0.0, 0.0]),
        left=np.array([1, -1, -1]),
        right=np.array([2, -1, -1]),
        value=np.array([[0.5, 0.5], [1 - left_value, left_value], [1 - right_value, right_value]]),
        cover=np.array(list(cover)),
    )


def _hand_tree() -> Tree:
    # Root on feature 0 (cover 10 -> 6/4), left child on feature 1
    # (cover 6 -> 2/4); leaf target-values 0, 0.5 and 1.
    return Tree(
        feature=np.array([0, 1, -1, -1, -1]),
        threshold=np.array([0.0, 0.0, 0.0, 0.0, 0.0]),
        left=np.array([1, 3, -1, -1, -1]),
        right=np.array([2, 4, -1, -1, -1]),
        value=np.array([[0.5, 0.5], [0.5, 0.5], [0.0, 1.0], [1.0, 0.0], [0.5, 0.5]]),
        cover=np.array([10.0, 6.0, 4.0, 2.0, 4.0]),
    )


def _random_tree(rng, n_features, max_depth, consistent_covers=True) -> Tree:
    feature, threshold, left, right, value, cover = [], [], [], [], [], []

    def grow(depth, cover_in):
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        p = rng.uniform(0, 1)
        value.append([1 - p, p])
        cover.append(cover_in)
        if depth < max_depth and rng.uniform() < 0.75:
            feature[node] = int(rng.integers(0, n_features))
            threshold[node] = float(rng.normal())
            if consistent_covers:
                split = rng.uniform(0.2, 0.8)
                cover_left, cover_right = cover_in * split, cover_in * (1 - split)
            else:
                cover_left, cover_right = rng.uniform(0.5, 20, size=2)
            left[node] = grow(depth + 1, cover_left)
            right[node] = grow(depth + 1, cover_right)
        return node

    grow(0, float(rng.uniform(5, 50)))
    return Tree(
        feature=np.array(feature),
        threshold=np.array(threshold),
        left=np.array(left),
        right=np.array(right),
        value=np.array(value),
        cover=np.array(cover),
    )


class TestSingleTree:
    def test_constant_tree_has_no_attributions(self):
        tree = _leaf_tree(0.7)
        for algo in (tree_shap, lambda t, x, d: brute_force_shapley(t, x, d)):
            result = algo(tree, np.zeros(3), 3)
            np.testing.assert_array_equal(result.phi, np.zeros(3))
            assert result.base_value == pytest.approx(0.7)

    def test_depth_one_closed_form(self):
        tree = _stump(feature=1, threshold=0.5, left_value=0.2, right_value=0.9)
        x = np.array([0.0, 2.0, 0.0])
        result = tree_shap(tree, x, 3)
        base = 0.6 * 0.2 + 0.4 * 0.9
        assert result.base_value == pytest.approx(base)
        assert result.phi[1] == pytest.approx(0.9 - base)
        assert result.phi[0] == 0.0 and result.phi[2] == 0.0

    def test_hand_enumerated_depth_two(self):
        # Subset enumeration done by hand for x = (-1, 1):
        # v({}) = 0.6, v({0}) = 1/3, v({1}) = 0.7, v({0,1}) = 0.5,
        # phi = (-7/30, 2/15).
        tree = _hand_tree()
        x = np.array([-1.0, 1.0])
        for result in (tree_shap(tree, x, 2), brute_force_shapley(tree, x, 2)):
            assert result.base_value == pytest.approx(0.6, abs=1e-12)
            assert result.phi[0] == pytest.approx(-7.0 / 30.0, abs=1e-12)
            assert result.phi[1] == pytest.approx(2.0 / 15.0, abs=1e-12)
            assert result.model_output == pytest.approx(0.5, abs=1e-12)

    def test_symmetric_roles_equal_phi(self):
        # XOR-style tree: both features interchangeable, equal covers.
        tree = Tree(
            feature=np.array([0, 1, 1, -1, -1, -1, -1]),
            threshold=np.zeros(7),
            left=np.array([1, 3, 5, -1, -1, -1, -1]),
            right=np.array([2, 4, 6, -1, -1, -1, -1]),
            value=np.array(
                [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5],
                 [1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]
            ),
            cover=np.array([4.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0]),
        )
        result = tree_shap(tree, np.array([1.0, 1.0]), 2)
        assert result.phi[0] == pytest.approx(result.phi[1], abs=1e-12)

    def test_repeated_feature_on_path(self):
        # Feature 0 twice on one path: constraints consolidate to an interval.
        tree = Tree(
            feature=np.array([0, 0, -1, -1, -1]),
            threshold=np.array([1.0, -1.0, 0.0, 0.0, 0.0]),
            left=np.array([1, 3, -1, -1, -1]),
            right=np.array([2, 4, -1, -1, -1]),
            value=np.array([[0.5, 0.5], [0.5, 0.5], [0.2, 0.8], [1.0, 0.0], [0.4, 0.6]]),
            cover=np.array([12.0, 8.0, 4.0, 3.0, 5.0]),
        )
        for x_val in (-2.0, 0.0, 2.0):
            x = np.array([x_val])
            fast = tree_shap(tree, x, 1)
            brute = brute_force_shapley(tree, x, 1)
            np.testing.assert_allclose(fast.phi, brute.phi, atol=1e-12)
            assert fast.base_value == pytest.approx(brute.base_value, abs=1e-12)

    def test_oracle_equivalence_on_random_trees(self):
        rng = np.random.default_rng(77)
        worst = 0.0
        for i in range(100):
            n_features = int(rng.integers(1, 5))
            tree = _random_tree(rng, n_features, max_depth=3,
                                consistent_covers=bool(i % 2))
            for _ in range(3):
                x = rng.normal(size=n_features)
                fast = tree_shap(tree, x, n_features)
                brute = brute_force_shapley(tree, x, n_features)
                worst = max(worst, float(np.abs(fast.phi - brute.phi).max()))
                worst = max(worst, abs(fast.base_value - brute.base_value))
        assert worst <= 1e-9

    def test_brute_force_feature_limit(self):
        tree = _leaf_tree(0.5)
        with pytest.raises(ValueError):
            brute_force_shapley(tree, np.zeros(16), 16)

    def test_nonpositive_cover_rejected(self):
        tree = _leaf_tree(0.5, cover=0.0)
        with pytest.raises(ValueError):
            tree_shap(tree, np.zeros(2), 2)
        with pytest.raises(ValueError):
            brute_force_shapley(tree, np.zeros(2), 2)


def _manual_forest(trees, n_features) -> RandomForest:
    forest = RandomForest(n_trees=len(trees))
    forest.trees_ = trees
    forest.medians_ = np.zeros(n_features)
    forest.class_weights_ = np.ones(2)
    forest.n_features_ = n_features
    forest.feature_names_ = None
    forest.classes_ = np.array([0, 1])
    return forest


class TestForest:
    def test_identical_trees_average_to_single_tree(self):
        tree = _hand_tree()
        forest = _manual_forest([tree, tree, tree], 2)
        x = np.array([-1.0, 1.0])
        combined = forest_shap(forest, x)
        single = tree_shap(tree, x, 2)
        np.testing.assert_allclose(combined.phi, single.phi, atol=1e-12)
        assert combined.base_value == pytest.approx(single.base_value)

    def test_opposite_trees_cancel(self):
        up = _stump(feature=0, threshold=0.0, left_value=0.2, right_value=0.8)
        down = _stump(feature=0, threshold=0.0, left_value=0.8, right_value=0.2)
        forest = _manual_forest([up, down], 2)
        result = forest_shap(forest, np.array([1.0, 0.0]))
        np.testing.assert_allclose(result.phi, np.zeros(2), atol=1e-12)

    def test_local_accuracy_on_trained_forest(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(400, 6))
        y = ((X[:, 0] + 0.5 * X[:, 2]) > 0).astype(int)
        forest = RandomForest(n_trees=50, max_depth=15, seed=11).fit(X, y)
        phi, base, outputs = forest_shap_batch(forest, X[:100])
        np.testing.assert_allclose(base + phi.sum(axis=1), outputs, atol=1e-9)

    def test_linearity_forest_phi_is_mean_of_tree_phi(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(150, 4))
        y = (X[:, 1] > 0).astype(int)
        forest = RandomForest(n_trees=7, max_depth=4, seed=2).fit(X, y)
        x = X[3]
        per_tree = np.array([tree_shap(t, x, 4).phi for t in forest.trees_])
        combined = forest_shap(forest, x)
        np.testing.assert_allclose(combined.phi, per_tree.mean(axis=0), atol=1e-12)

    def test_imputation_applied_before_explaining(self):
        X = np.array([[1.0, 0.0], [2.0, 1.0], [3.0, 0.0], [4.0, 1.0]])
        y = np.array([0, 0, 1, 1])
        forest = RandomForest(n_trees=5, max_depth=3, seed=1).fit(X, y)
        with_nan = forest_shap(forest, np.array([np.nan, 1.0]))
        imputed = forest_shap(forest, np.array([forest.medians_[0], 1.0]))
        np.testing.assert_allclose(with_nan.phi, imputed.phi, atol=1e-12)


class TestSummary:
    def _forest_and_data(self, constant_feature=False, n=250):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(n, 4))
        if constant_feature:
            X[:, 3] = 0.0
        y = (X[:, 0] > 0).astype(int)
        forest = RandomForest(n_trees=10, max_depth=4, seed=4).fit(X, y)
        return forest, X

    def test_full_sample_is_exhaustive_and_deterministic(self):
        forest, X = self._forest_and_data()
        a = shap_summary(forest, X, sample_size=len(X), seed=1)
        b = shap_summary(forest, X, sample_size=len(X), seed=99)
        np.testing.assert_array_equal(a.indices, np.arange(len(X)))
        np.testing.assert_array_equal(a.ranking.mean_abs_phi, b.ranking.mean_abs_phi)

    def test_seeded_subsample_deterministic(self):
        forest, X = self._forest_and_data()
        a = shap_summary(forest, X, sample_size=60, seed=5)
        b = shap_summary(forest, X, sample_size=60, seed=5)
        np.testing.assert_array_equal(a.indices, b.indices)
        np.testing.assert_array_equal(a.phi, b.phi)

    def test_ignored_feature_ranks_last_with_zero_phi(self):
        forest, X = self._forest_and_data(constant_feature=True)
        assert all((t.feature != 3).all() for t in forest.trees_)
        result = shap_summary(forest, X, sample_size=100, seed=2)
        assert result.ranking.mean_abs_phi[3] == 0.0
        assert result.ranking.order[-1] == 3

    def test_planted_signal_ranks_first(self):
        forest, X = self._forest_and_data()
        result = shap_summary(forest, X, sample_size=200, seed=3)
        assert result.ranking.order[0] == 0

    def test_oversized_sample_rejected(self):
        forest, X = self._forest_and_data()
        with pytest.raises(ValueError):
            shap_summary(forest, X, sample_size=len(X) + 1, seed=0)
