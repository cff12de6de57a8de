import json

import numpy as np
import pytest

from draftcoach import winmodel as wm
from draftcoach.winmodel import (
    Dataset,
    EvalReport,
    ForestModel,
    LogisticModel,
    LrParams,
    ModelError,
    RfParams,
    auc,
    evaluate,
    lr_loss_and_grad,
    split,
    train_lr,
    train_rf,
)


def oracle_best_split(X, y, min_leaf=1):
    """Exhaustive search for the Gini-minimizing feature (the test oracle)."""
    best_score, best_feature = np.inf, None
    n = len(y)
    for f in range(X.shape[1]):
        right = X[:, f] > 0.5
        nl, nr = int((~right).sum()), int(right.sum())
        if nl < min_leaf or nr < min_leaf:
            continue

        def gini(mask):
            p = y[mask].mean()
            return 1 - p * p - (1 - p) * (1 - p)

        score = (nl * gini(~right) + nr * gini(right)) / n
        if score < best_score:
            best_score, best_feature = score, f
    return best_feature


def oracle_auc(scores, labels):
    """O(n^2) pairwise concordance count."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    hits = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in pos for q in neg)
    return hits / (len(pos) * len(neg))


def xor_dataset(n, seed, width=10):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(n, width)).astype(np.float64)
    y = (X[:, 0].astype(int) ^ X[:, 1].astype(int)).astype(np.int8)
    return Dataset(X, y)


def linear_dataset(n, seed, width=12):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(n, width)).astype(np.float64)
    w = rng.normal(size=width) * 2.0
    logit = (X - 0.5) @ w
    y = (rng.random(n) < 1 / (1 + np.exp(-3 * logit))).astype(np.int8)
    return Dataset(X, y)


class TestSplit:
    def test_eight_two(self):
        ds = linear_dataset(10, seed=0)
        train, test = split(ds, ratio=0.8, seed=1)
        assert len(train) == 8 and len(test) == 2

    def test_same_seed_identical(self):
        ds = linear_dataset(50, seed=2)
        a = split(ds, 0.8, seed=7)
        b = split(ds, 0.8, seed=7)
        np.testing.assert_array_equal(a[0].X, b[0].X)
        np.testing.assert_array_equal(a[1].y, b[1].y)

    def test_different_seeds_differ(self):
        ds = linear_dataset(100, seed=3)
        baseline = split(ds, 0.8, seed=0)[0].X
        differing = sum(
            1 for s in range(1, 11) if not np.array_equal(split(ds, 0.8, seed=s)[0].X, baseline)
        )
        assert differing >= 9

    def test_partition(self):
        rng = np.random.default_rng(4)
        ids = np.arange(40, dtype=np.float64)[:, None]
        ds = Dataset(ids, rng.integers(0, 2, 40).astype(np.int8))
        train, test = split(ds, 0.75, seed=5)
        combined = sorted(np.concatenate([train.X[:, 0], test.X[:, 0]]).tolist())
        assert combined == list(range(40))

    def test_too_small_rejected(self):
        ds = Dataset(np.zeros((1, 3)), np.array([1], dtype=np.int8))
        with pytest.raises(ModelError):
            split(ds, 0.5, seed=0)


class TestForest:
    def test_single_tree_finds_separating_feature(self):
        rng = np.random.default_rng(10)
        X = rng.integers(0, 2, size=(60, 8)).astype(np.float64)
        y = X[:, 0].astype(np.int8)  # feature 0 separates perfectly
        ds = Dataset(X, y)
        params = RfParams(n_trees=1, max_depth=1, min_leaf=1, features_per_split=8, seed=0)
        model = train_rf(ds, params)
        root = int(model.roots[0])
        assert model.feature[root] == oracle_best_split(X, y) == 0
        preds = model.predict_proba_batch(X)
        assert (((preds >= 0.5).astype(np.int8)) == y).all()

    def test_single_class_predicts_one(self):
        ds = Dataset(np.eye(6), np.ones(6, dtype=np.int8))
        model = train_rf(ds, RfParams(n_trees=5, seed=0))
        assert model.predict_proba(np.zeros(6)) == 1.0
        assert model.predict_proba(np.ones(6)) == 1.0

    def test_xor_forest_beats_logistic(self):
        train = xor_dataset(600, seed=11)
        test = xor_dataset(400, seed=12)
        rf = train_rf(train, RfParams(n_trees=100, max_depth=6, min_leaf=2,
                                      features_per_split=3, seed=1))
        rf_acc = evaluate(rf, test).accuracy
        lr = train_lr(train, LrParams(learning_rate=0.5, epochs=400, l2=1e-4))
        lr_acc = evaluate(lr, test).accuracy
        assert rf_acc >= 0.9
        assert lr_acc <= 0.6

    def test_forest_is_mean_of_trees(self):
        ds = linear_dataset(200, seed=13)
        model = train_rf(ds, RfParams(n_trees=7, max_depth=4, min_leaf=2, seed=2))
        x = ds.X[17]
        per_tree = []
        for root in model.roots:
            node = int(root)
            while model.feature[node] >= 0:
                node = int(model.right[node] if x[model.feature[node]] > 0.5 else model.left[node])
            per_tree.append(model.value[node])
        assert model.predict_proba(x) == sum(per_tree) / len(per_tree)

    def test_bit_identical_retraining(self):
        ds = linear_dataset(300, seed=14)
        a = train_rf(ds, RfParams(n_trees=20, seed=3))
        b = train_rf(ds, RfParams(n_trees=20, seed=3))
        np.testing.assert_array_equal(a.feature, b.feature)
        np.testing.assert_array_equal(a.value, b.value)
        probe = linear_dataset(50, seed=15).X
        np.testing.assert_array_equal(a.predict_proba_batch(probe), b.predict_proba_batch(probe))

    def test_leaf_values_smoothed(self):
        ds = linear_dataset(100, seed=16)
        model = train_rf(ds, RfParams(n_trees=3, max_depth=3, min_leaf=5, seed=4))
        leaves = model.value[model.feature < 0]
        assert (leaves > 0).all() and (leaves < 1).all()

    def test_feature_length_checked(self):
        ds = linear_dataset(50, seed=17)
        model = train_rf(ds, RfParams(n_trees=2, seed=5))
        with pytest.raises(ModelError):
            model.predict_proba(np.zeros(ds.n_features + 1))


class TestLogistic:
    def test_separable_two_points(self):
        ds = Dataset(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([0, 1], dtype=np.int8))
        model = train_lr(ds, LrParams(learning_rate=1.0, epochs=200, l2=0.0))
        assert model.predict_proba(ds.X[0]) < 0.5 < model.predict_proba(ds.X[1])

    def test_zero_epochs_predicts_half(self):
        ds = linear_dataset(20, seed=20)
        model = train_lr(ds, LrParams(epochs=0))
        assert model.predict_proba(ds.X[0]) == 0.5

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(21)
        X = rng.integers(0, 2, size=(40, 6)).astype(np.float64)
        y = rng.integers(0, 2, size=40).astype(np.float64)
        w = rng.normal(size=6) * 0.3
        b = 0.1
        l2 = 0.01
        _, grad_w, grad_b = lr_loss_and_grad(w, b, X, y, l2)
        eps = 1e-6
        for i in range(6):
            wp, wn = w.copy(), w.copy()
            wp[i] += eps
            wn[i] -= eps
            num = (lr_loss_and_grad(wp, b, X, y, l2)[0] - lr_loss_and_grad(wn, b, X, y, l2)[0]) / (
                2 * eps
            )
            assert abs(num - grad_w[i]) <= 1e-5 * max(1.0, abs(num))
        num_b = (lr_loss_and_grad(w, b + eps, X, y, l2)[0] - lr_loss_and_grad(w, b - eps, X, y, l2)[0]) / (2 * eps)
        assert abs(num_b - grad_b) <= 1e-5 * max(1.0, abs(num_b))

    def test_loss_monotone_full_batch(self):
        ds = linear_dataset(200, seed=22)
        model = train_lr(ds, LrParams(learning_rate=0.1, epochs=150, l2=1e-4))
        diffs = np.diff(model.loss_history)
        assert (diffs <= 1e-6).all()


class TestAuc:
    def test_perfect_ranking(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_reversed_ranking(self):
        assert auc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0

    def test_random_scores_near_half(self):
        rng = np.random.default_rng(23)
        scores = rng.random(1000)
        labels = rng.integers(0, 2, 1000)
        assert abs(auc(scores, labels) - 0.5) < 0.05

    def test_matches_pairwise_oracle_exactly(self):
        rng = np.random.default_rng(24)
        for trial in range(100):
            n = int(rng.integers(5, 40))
            labels = rng.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            if trial % 3 == 0:
                scores = rng.integers(0, 4, n).astype(np.float64)  # heavy ties
            else:
                scores = rng.random(n)
            assert auc(scores, labels) == oracle_auc(scores, labels)

    def test_monotone_transform_invariant(self):
        rng = np.random.default_rng(25)
        scores = rng.random(60)
        labels = rng.integers(0, 2, 60)
        labels[0], labels[1] = 0, 1
        base = auc(scores, labels)
        assert auc(np.exp(3 * scores), labels) == base
        assert auc(2 * scores - 5, labels) == base

    def test_single_class_rejected(self):
        with pytest.raises(ModelError):
            auc([0.1, 0.9], [1, 1])


class TestEvaluate:
    def test_report_fields(self):
        ds = linear_dataset(300, seed=26)
        train, test = split(ds, 0.8, seed=0)
        model = train_rf(train, RfParams(n_trees=30, max_depth=8, min_leaf=2, seed=6))
        report = evaluate(model, test)
        assert isinstance(report, EvalReport)
        assert 0.0 <= report.accuracy <= 1.0
        assert 0.0 <= report.auc <= 1.0
        assert report.n_test == len(test)

    def test_strong_signal_high_auc(self):
        # Labels deterministic in one feature: any sane model ranks well.
        rng = np.random.default_rng(27)
        X = rng.integers(0, 2, size=(400, 10)).astype(np.float64)
        y = X[:, 3].astype(np.int8)
        train, test = split(Dataset(X, y), 0.8, seed=1)
        model = train_rf(train, RfParams(n_trees=20, max_depth=4, min_leaf=2, seed=7))
        assert evaluate(model, test).auc >= 0.95


class TestPersistence:
    def test_forest_round_trip(self, tmp_path):
        ds = linear_dataset(150, seed=28)
        model = train_rf(ds, RfParams(n_trees=10, max_depth=5, min_leaf=3, seed=8))
        path = tmp_path / "rf.json"
        wm.save(model, path)
        loaded = wm.load(path)
        assert isinstance(loaded, ForestModel)
        probe = linear_dataset(30, seed=29).X
        np.testing.assert_array_equal(
            model.predict_proba_batch(probe), loaded.predict_proba_batch(probe)
        )
        assert loaded.params == model.params

    def test_logistic_round_trip(self, tmp_path):
        ds = linear_dataset(80, seed=30)
        model = train_lr(ds, LrParams(epochs=50))
        path = tmp_path / "lr.json"
        wm.save(model, path)
        loaded = wm.load(path)
        assert isinstance(loaded, LogisticModel)
        np.testing.assert_array_equal(loaded.weights, model.weights)
        assert loaded.bias == model.bias

    def test_params_and_seed_embedded(self, tmp_path):
        ds = linear_dataset(60, seed=31)
        model = train_rf(ds, RfParams(n_trees=4, seed=99))
        path = tmp_path / "rf.json"
        wm.save(model, path)
        doc = json.loads(path.read_text())
        assert doc["params"]["seed"] == 99
        assert doc["model"] == "forest"
