import itertools

import numpy as np
import pytest

import shaptour as st

from conftest import DATA_DIR, random_tree, single_tree_forest


def stump(feature=0, threshold=0.0, left=0.0, right=10.0, cl=50, cr=50):
    return st.Internal(feature=feature, threshold=threshold,
                       left=st.Leaf(value=left, cover=cl),
                       right=st.Leaf(value=right, cover=cr), cover=cl + cr)


def depth2_tree():
    # root on x0, children on x1; leaves a..d with uneven covers
    return st.Internal(
        feature=0, threshold=0.0, cover=100,
        left=st.Internal(feature=1, threshold=1.0, cover=60,
                         left=st.Leaf(value=2.0, cover=20),
                         right=st.Leaf(value=-4.0, cover=40)),
        right=st.Internal(feature=1, threshold=-1.0, cover=40,
                          left=st.Leaf(value=7.0, cover=10),
                          right=st.Leaf(value=1.0, cover=30)),
    )


class TestConditionalExpectation:
    def test_all_known_is_tree_prediction(self):
        tree = depth2_tree()
        x = np.array([-1.0, 2.0])
        assert st.conditional_expectation(tree, x, {0, 1}) == -4.0

    def test_empty_known_is_cover_mean(self):
        assert st.conditional_expectation(stump(), [1.0], set()) == pytest.approx(5.0)

    def test_depth2_root_known_hand_value(self):
        # x goes left at the root; expectation over x1 mixes the left subtree
        # leaves by cover: (20*2 + 40*(-4)) / 60
        tree = depth2_tree()
        x = np.array([-1.0, 0.0])
        expected = (20 * 2.0 + 40 * (-4.0)) / 60
        assert st.conditional_expectation(tree, x, {0}) == pytest.approx(expected, abs=1e-12)


class TestExactShapley:
    def test_single_feature_margin_minus_baseline(self):
        tree = stump()
        f = single_tree_forest(tree, p=1)
        x = np.array([1.0])
        phi = st.exact_shapley(f, x)
        margin = st.scalar_margin(f, x)
        baseline = st.conditional_expectation(tree, x, set())
        assert phi[0] == pytest.approx(margin - baseline, abs=1e-12)

    def test_symmetric_features_equal_values(self):
        # trees mirrored in features 0/1 make the forest exchangeable
        t1 = st.Internal(feature=0, threshold=0.0, cover=100,
                         left=st.Internal(feature=1, threshold=0.0, cover=50,
                                          left=st.Leaf(value=1.0, cover=25),
                                          right=st.Leaf(value=2.0, cover=25)),
                         right=st.Internal(feature=1, threshold=0.0, cover=50,
                                           left=st.Leaf(value=3.0, cover=25),
                                           right=st.Leaf(value=4.0, cover=25)))
        t2 = st.Internal(feature=1, threshold=0.0, cover=100,
                         left=st.Internal(feature=0, threshold=0.0, cover=50,
                                          left=st.Leaf(value=1.0, cover=25),
                                          right=st.Leaf(value=2.0, cover=25)),
                         right=st.Internal(feature=0, threshold=0.0, cover=50,
                                           left=st.Leaf(value=3.0, cover=25),
                                           right=st.Leaf(value=4.0, cover=25)))
        f = st.Forest(trees=[t1, t2], task="regression", hyper=st.Hyperparams(2, 1, 1),
                      seed=0, p=2)
        for v in (-0.5, 0.5):
            phi = st.exact_shapley(f, [v, v])
            assert phi[0] == pytest.approx(phi[1], abs=1e-12)
            fast = st.tree_shap(f, [v, v])
            assert fast[0] == pytest.approx(fast[1], abs=1e-12)

    def test_too_many_features_rejected(self):
        f = single_tree_forest(st.Leaf(value=1.0, cover=5), p=21)
        with pytest.raises(st.DataValidationError, match="tree_shap"):
            st.exact_shapley(f, np.zeros(21))


class TestTreeShap:
    def test_stump_local_accuracy_forces_value(self):
        f = single_tree_forest(stump(), p=4)
        phi = st.tree_shap(f, [1.0, 0.0, 0.0, 0.0])
        assert phi == pytest.approx([5.0, 0.0, 0.0, 0.0], abs=1e-12)

    def test_local_accuracy_any_query_point(self, penguins, penguins_forest):
        rng = np.random.default_rng(0)
        probs = st.predict_matrix(penguins_forest, penguins.x)
        class_baselines = probs.mean(axis=0)
        # off-manifold points obey the identity too
        for _ in range(5):
            x = penguins.x[rng.integers(penguins.n)] * rng.uniform(0.5, 1.5, 4)
            for c in range(3):
                phi = st.tree_shap(penguins_forest, x, target_class=c)
                margin = st.scalar_margin(penguins_forest, x, target_class=c)
                baseline = class_baselines[c]
                assert abs(phi.sum() - (margin - baseline)) <= 1e-8 * max(1, abs(margin))

    def test_oracle_equivalence_randomized(self):
        rng = np.random.default_rng(123)
        for _ in range(40):
            p = int(rng.integers(2, 9))
            tree = random_tree(rng, depth=int(rng.integers(1, 7)), p=p, cover=200)
            f = single_tree_forest(tree, p=p)
            x = rng.normal(size=p)
            assert np.allclose(st.tree_shap(f, x), st.exact_shapley(f, x), atol=1e-10)

    def test_dummy_feature_exactly_zero(self):
        rng = np.random.default_rng(5)
        tree = random_tree(rng, depth=4, p=3, cover=64)  # never uses feature 3+
        f = single_tree_forest(tree, p=6)
        phi = st.tree_shap(f, rng.normal(size=6))
        assert phi[3] == 0.0 and phi[4] == 0.0 and phi[5] == 0.0

    def test_linearity_over_trees(self):
        rng = np.random.default_rng(17)
        p = 4
        trees = [random_tree(rng, depth=3, p=p, cover=100) for _ in range(9)]
        forest = st.Forest(trees=trees, task="regression",
                           hyper=st.Hyperparams(9, 1, 1), seed=0, p=p)
        x = rng.normal(size=p)
        per_tree = np.stack([st.tree_shap(single_tree_forest(t, p), x) for t in trees])
        assert np.allclose(st.tree_shap(forest, x), per_tree.mean(axis=0), atol=1e-12)

    def test_classification_needs_target(self, penguins_forest):
        with pytest.raises(st.DataValidationError):
            st.tree_shap(penguins_forest, np.zeros(4))


class TestAttributionMatrix:
    def test_penguins_shape_and_local_accuracy(self, penguins, penguins_forest):
        from shaptour.attribution import class_score

        am = st.attribution_matrix(penguins_forest, penguins)
        assert am.values.shape == (333, 4)
        probs = st.predict_matrix(penguins_forest, penguins.x)
        margins = class_score(probs)
        assert am.baseline == pytest.approx(margins.mean(), abs=1e-12)
        err = np.abs(am.values.sum(axis=1) - (margins - am.row_baselines()))
        assert (err <= 1e-8 * np.maximum(1.0, np.abs(margins))).all()

    def test_binary_matrix_is_second_level_probability(self):
        from shaptour.attribution import _forest_shap_batch

        ds = st.load_csv(DATA_DIR / "chocolates_synthetic.csv", "type")
        f = st.train(ds, st.Hyperparams(15, 3, 1), seed=2)
        am = st.attribution_matrix(f, ds)
        phi = _forest_shap_batch(f, ds.x)
        assert np.allclose(am.values, phi[:, :, 1], atol=1e-12)
        assert "'" + ds.response.levels[1] + "'" in am.target

    def test_explained_class_is_predicted_class(self, penguins, penguins_forest):
        am = st.attribution_matrix(penguins_forest, penguins)
        probs = st.predict_matrix(penguins_forest, penguins.x)
        assert np.array_equal(am.explained_class, np.argmax(probs, axis=1))

    def test_regression_baseline_is_mean_margin(self, synth_regression):
        f = st.train(synth_regression, st.Hyperparams(20, 2, 5), seed=3)
        am = st.attribution_matrix(f, synth_regression)
        margins = st.predict_matrix(f, synth_regression.x)
        assert am.baseline == pytest.approx(margins.mean(), abs=1e-12)
        err = np.abs(am.values.sum(axis=1) - (margins - am.baseline))
        assert (err <= 1e-8 * np.maximum(1.0, np.abs(margins))).all()

    def test_constant_forest_all_zero(self):
        trees = [st.Leaf(value=3.3, cover=10) for _ in range(5)]
        f = st.Forest(trees=trees, task="regression", hyper=st.Hyperparams(5, 1, 1),
                      seed=0, p=3)
        am = st.attribution_matrix(f, np.random.default_rng(1).normal(size=(20, 3)))
        assert np.all(am.values == 0.0)


def additive_forest(p=4, seed=9):
    """Each tree splits on exactly one feature: attribution is order-free."""
    rng = np.random.default_rng(seed)
    trees = []
    for j in range(p):
        cl = int(rng.integers(20, 80))
        trees.append(stump(feature=j, threshold=float(rng.normal()),
                           left=float(rng.normal()), right=float(rng.normal()),
                           cl=cl, cr=100 - cl))
    return st.Forest(trees=trees, task="regression", hyper=st.Hyperparams(p, 1, 1),
                     seed=0, p=p)


class TestBreakdown:
    def test_telescoping_sum(self, penguins, penguins_forest):
        probs = st.predict_matrix(penguins_forest, penguins.x)
        x = penguins.x[0]
        c = int(np.argmax(probs[0]))
        bd = st.breakdown(penguins_forest, x, [2, 0, 3, 1], target_class=c)
        margin = st.scalar_margin(penguins_forest, x, target_class=c)
        baseline = probs[:, c].mean()
        assert bd.total() == pytest.approx(margin - baseline, abs=1e-10)

    def test_additive_forest_order_free(self):
        f = additive_forest()
        rng = np.random.default_rng(4)
        x = rng.normal(size=4)
        results = np.stack([
            st.breakdown(f, x, rng.permutation(4)).contributions for _ in range(10)
        ])
        assert np.ptp(results, axis=0).max() <= 1e-10

    def test_average_over_all_orders_is_shapley(self):
        rng = np.random.default_rng(21)
        p = 3
        trees = [random_tree(rng, depth=3, p=p, cover=60) for _ in range(4)]
        f = st.Forest(trees=trees, task="regression", hyper=st.Hyperparams(4, 1, 1),
                      seed=0, p=p)
        x = rng.normal(size=p)
        alls = np.stack([
            st.breakdown(f, x, order).contributions
            for order in itertools.permutations(range(p))
        ])
        assert np.allclose(alls.mean(axis=0), st.exact_shapley(f, x), atol=1e-10)

    def test_invalid_permutation(self):
        f = additive_forest()
        with pytest.raises(st.DataValidationError, match="permutation"):
            st.breakdown(f, np.zeros(4), [0, 1, 2, 2])


class TestSampledShap:
    def test_exhaustive_orders_match_shapley(self):
        rng = np.random.default_rng(33)
        p = 3
        trees = [random_tree(rng, depth=2, p=p, cover=40) for _ in range(3)]
        f = st.Forest(trees=trees, task="regression", hyper=st.Hyperparams(3, 1, 1),
                      seed=0, p=p)
        x = rng.normal(size=p)
        orders = np.array(list(itertools.permutations(range(p))))
        result = st.sampled_shap(f, x, orders=orders)
        assert np.allclose(result.mean, st.exact_shapley(f, x), atol=1e-10)
        assert result.sequences.shape == (6, 3)

    def test_additive_forest_zero_spread(self):
        f = additive_forest()
        result = st.sampled_shap(f, np.zeros(4), n_sequences=12, seed=1)
        assert np.ptp(result.sequences, axis=0).max() <= 1e-10
        assert np.allclose(result.mean, result.median, atol=1e-10)

    def test_seed_determinism(self):
        f = additive_forest()
        x = np.array([0.3, -1.0, 0.2, 2.0])
        a = st.sampled_shap(f, x, n_sequences=10, seed=42)
        b = st.sampled_shap(f, x, n_sequences=10, seed=42)
        assert np.array_equal(a.sequences, b.sequences)
        assert np.array_equal(a.orders, b.orders)

    def test_csv_export(self, tmp_path):
        f = additive_forest()
        result = st.sampled_shap(f, np.zeros(4), n_sequences=5, seed=0)
        out = tmp_path / "sequences.csv"
        result.to_csv(out, feature_names=["a", "b", "c", "d"])
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "a,b,c,d"
        assert len(lines) == 6


class TestClassificationTrees:
    def test_oracle_equivalence_probability_leaves(self):
        rng = np.random.default_rng(55)
        for _ in range(10):
            p = int(rng.integers(2, 6))
            tree = random_tree(rng, depth=4, p=p, cover=120, n_classes=3)
            f = single_tree_forest(tree, p=p, task="classification",
                                   levels=("a", "b", "c"))
            x = rng.normal(size=p)
            for c in range(3):
                assert np.allclose(st.tree_shap(f, x, target_class=c),
                                   st.exact_shapley(f, x, target_class=c),
                                   atol=1e-10)
