"""Draft-outcome predictors: a from-scratch random forest and a logistic baseline.

Feature vectors are the concatenated blue/red pick indicators (length 2H),
labels are 1 when blue wins. Forest trees use axis-aligned splits at 0.5
(features are binary), Gini impurity, and per-node feature subsampling.
A split with zero impurity gain is still taken on an impure node when some
candidate yields two children of at least ``min_leaf`` rows; pure
interaction signals (XOR-like) have zero marginal gain at the root, and
refusing those splits would make such datasets unlearnable.

Everything is driven by explicit seeds: retraining with the same seed gives
bit-identical models. Trained models are immutable and safe to share across
threads; training itself is single-threaded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

WIN_MODEL_KIND = "draftcoach-win-model"
WIN_MODEL_VERSION = 1


class ModelError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus binary labels (1 = blue side wins)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.ndim != 1 or len(self.X) != len(self.y):
            raise ModelError("X must be (n, d) and y must be (n,) of matching length")
        if len(self.y) and not np.isin(self.y, (0, 1)).all():
            raise ModelError("labels must be 0/1")

    def __len__(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @staticmethod
    def from_rows(rows: Sequence[tuple[Sequence[float], int]]) -> Dataset:
        X = np.array([r[0] for r in rows], dtype=np.float64)
        y = np.array([r[1] for r in rows], dtype=np.int8)
        return Dataset(X, y)

    def take(self, idx: np.ndarray) -> Dataset:
        return Dataset(self.X[idx], self.y[idx])


def split(dataset: Dataset, ratio: float = 0.8, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled partition; train gets round(n * ratio) rows."""
    if not 0 < ratio < 1:
        raise ModelError("ratio must be in (0, 1)")
    n = len(dataset)
    if n < 2:
        raise ModelError("need at least 2 rows to split")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(np.floor(n * ratio + 0.5))
    return dataset.take(perm[:n_train]), dataset.take(perm[n_train:])


# ---------------------------------------------------------------------------
# Random forest
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RfParams:
    n_trees: int = 100
    max_depth: int = 12
    min_leaf: int = 5
    features_per_split: int | None = None  # default: round(sqrt(n_features))
    seed: int = 0

    def resolve_m(self, n_features: int) -> int:
        m = self.features_per_split or int(round(np.sqrt(n_features)))
        return max(1, min(m, n_features))


@dataclass(frozen=True, eq=False)
class ForestModel:
    """Flattened trees: feature < 0 marks a leaf holding ``value``."""

    params: RfParams
    n_features: int
    feature: np.ndarray = field(repr=False)  # int32
    left: np.ndarray = field(repr=False)  # int32
    right: np.ndarray = field(repr=False)  # int32
    value: np.ndarray = field(repr=False)  # float64
    roots: np.ndarray = field(repr=False)  # int32, root node per tree

    def predict_proba(self, features: np.ndarray) -> float:
        features = np.asarray(features, dtype=np.float64)
        if features.shape != (self.n_features,):
            raise ModelError(f"expected {self.n_features} features, got {features.shape}")
        total = 0.0
        for root in self.roots:
            node = int(root)
            while self.feature[node] >= 0:
                node = int(
                    self.right[node] if features[self.feature[node]] > 0.5 else self.left[node]
                )
            total += self.value[node]
        return total / len(self.roots)

    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelError(f"expected (n, {self.n_features}) features")
        total = np.zeros(len(X))
        rows = np.arange(len(X))
        for root in self.roots:
            node = np.full(len(X), int(root), dtype=np.int64)
            while True:
                feat = self.feature[node]
                live = feat >= 0
                if not live.any():
                    break
                go_right = np.zeros(len(X), dtype=bool)
                go_right[live] = X[rows[live], feat[live]] > 0.5
                node = np.where(live, np.where(go_right, self.right[node], self.left[node]), node)
            total += self.value[node]
        return total / len(self.roots)


class _TreeBuilder:
    """Grows one tree into flat arrays. Leaf value is Laplace-smoothed:
    (positives + 1) / (rows + 2)."""

    def __init__(self, X: np.ndarray, y: np.ndarray, params: RfParams, m: int,
                 rng: np.random.Generator):
        self.X = X
        self.y = y
        self.params = params
        self.m = m
        self.rng = rng
        self.feature: list[int] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def _emit(self, feat: int, val: float) -> int:
        self.feature.append(feat)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(val)
        return len(self.feature) - 1

    def build(self, idx: np.ndarray, depth: int) -> int:
        y = self.y[idx]
        n = len(idx)
        pos = int(y.sum())
        leaf_value = (pos + 1.0) / (n + 2.0)
        if depth >= self.params.max_depth or pos == 0 or pos == n or n < 2 * self.params.min_leaf:
            return self._emit(-1, leaf_value)
        feats = self.rng.choice(self.X.shape[1], size=self.m, replace=False)
        sub = self.X[np.ix_(idx, feats)]
        right_n = (sub > 0.5).sum(axis=0)
        right_pos = ((sub > 0.5) & (y[:, None] == 1)).sum(axis=0)
        left_n = n - right_n
        left_pos = pos - right_pos
        valid = (left_n >= self.params.min_leaf) & (right_n >= self.params.min_leaf)
        if not valid.any():
            return self._emit(-1, leaf_value)

        def gini(count, positives):
            with np.errstate(invalid="ignore", divide="ignore"):
                p = np.where(count > 0, positives / np.maximum(count, 1), 0.0)
            return 1.0 - p**2 - (1.0 - p) ** 2

        score = (left_n * gini(left_n, left_pos) + right_n * gini(right_n, right_pos)) / n
        score = np.where(valid, score, np.inf)
        choice = int(np.argmin(score))
        feat = int(feats[choice])
        node = self._emit(feat, leaf_value)
        go_right = self.X[idx, feat] > 0.5
        left_child = self.build(idx[~go_right], depth + 1)
        right_child = self.build(idx[go_right], depth + 1)
        self.left[node] = left_child
        self.right[node] = right_child
        return node


def train_rf(train: Dataset, params: RfParams = RfParams()) -> ForestModel:
    """Fit a forest of bootstrap trees. A single-class training set yields a
    constant model predicting that class with probability 1."""
    if len(train) == 0:
        raise ModelError("training set is empty")
    classes = np.unique(train.y)
    if len(classes) == 1:
        return ForestModel(
            params=params,
            n_features=train.n_features,
            feature=np.array([-1], dtype=np.int32),
            left=np.array([-1], dtype=np.int32),
            right=np.array([-1], dtype=np.int32),
            value=np.array([float(classes[0])], dtype=np.float64),
            roots=np.zeros(params.n_trees, dtype=np.int32),
        )
    m = params.resolve_m(train.n_features)
    seeds = np.random.SeedSequence(params.seed).spawn(params.n_trees)
    feature: list[int] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    roots = []
    n = len(train)
    for ss in seeds:
        rng = np.random.default_rng(ss)
        sample = rng.integers(0, n, size=n)
        builder = _TreeBuilder(train.X, train.y, params, m, rng)
        root = builder.build(sample, depth=0)
        offset = len(feature)
        feature.extend(builder.feature)
        left.extend(c + offset if c >= 0 else -1 for c in builder.left)
        right.extend(c + offset if c >= 0 else -1 for c in builder.right)
        value.extend(builder.value)
        roots.append(root + offset)
    return ForestModel(
        params=params,
        n_features=train.n_features,
        feature=np.array(feature, dtype=np.int32),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
        roots=np.array(roots, dtype=np.int32),
    )


# ---------------------------------------------------------------------------
# Logistic regression
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LrParams:
    learning_rate: float = 0.5
    epochs: int = 300
    l2: float = 1e-4
    seed: int = 0


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def lr_loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy with L2 on the weights (bias unregularized)."""
    z = X @ w + b
    p = _sigmoid(z)
    eps = 1e-12
    loss = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)) + 0.5 * l2 * (w @ w)
    grad_w = X.T @ (p - y) / len(y) + l2 * w
    grad_b = float(np.mean(p - y))
    return float(loss), grad_w, grad_b


@dataclass(frozen=True, eq=False)
class LogisticModel:
    params: LrParams
    n_features: int
    weights: np.ndarray
    bias: float
    loss_history: tuple[float, ...]

    def predict_proba(self, features: np.ndarray) -> float:
        features = np.asarray(features, dtype=np.float64)
        if features.shape != (self.n_features,):
            raise ModelError(f"expected {self.n_features} features, got {features.shape}")
        return float(_sigmoid(features @ self.weights + self.bias))

    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelError(f"expected (n, {self.n_features}) features")
        return _sigmoid(X @ self.weights + self.bias)


def train_lr(train: Dataset, params: LrParams = LrParams()) -> LogisticModel:
    """Full-batch gradient descent from zero init; loss history is recorded."""
    if len(train) == 0:
        raise ModelError("training set is empty")
    X = train.X
    y = train.y.astype(np.float64)
    w = np.zeros(train.n_features)
    b = 0.0
    history = []
    loss, gw, gb = lr_loss_and_grad(w, b, X, y, params.l2)
    history.append(loss)
    for _ in range(params.epochs):
        w = w - params.learning_rate * gw
        b = b - params.learning_rate * gb
        loss, gw, gb = lr_loss_and_grad(w, b, X, y, params.l2)
        history.append(loss)
    return LogisticModel(
        params=params,
        n_features=train.n_features,
        weights=w,
        bias=b,
        loss_history=tuple(history),
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def predict_proba(model, features: np.ndarray) -> float:
    """P(blue wins) for one draft encoding, any trained model."""
    return model.predict_proba(features)


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Area under the ROC curve via the rank statistic:
    (concordant pairs + half of ties) / (positives * negatives)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ModelError("auc undefined: need both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    auc: float
    n_test: int

    def __str__(self) -> str:
        return f"accuracy={self.accuracy:.3f} auc={self.auc:.3f} n_test={self.n_test}"


def evaluate(model, test: Dataset) -> EvalReport:
    """Accuracy at threshold 0.5 plus AUC on a held-out set."""
    if len(test) == 0:
        raise ModelError("test set is empty")
    scores = model.predict_proba_batch(test.X)
    accuracy = float(((scores >= 0.5).astype(np.int8) == test.y).mean())
    return EvalReport(accuracy=accuracy, auc=auc(scores, test.y), n_test=len(test))


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def save(model, path: str | Path) -> None:
    if isinstance(model, ForestModel):
        doc = {
            "kind": WIN_MODEL_KIND,
            "version": WIN_MODEL_VERSION,
            "model": "forest",
            "params": {
                "n_trees": model.params.n_trees,
                "max_depth": model.params.max_depth,
                "min_leaf": model.params.min_leaf,
                "features_per_split": model.params.features_per_split,
                "seed": model.params.seed,
            },
            "n_features": model.n_features,
            "feature": model.feature.tolist(),
            "left": model.left.tolist(),
            "right": model.right.tolist(),
            "value": model.value.tolist(),
            "roots": model.roots.tolist(),
        }
    elif isinstance(model, LogisticModel):
        doc = {
            "kind": WIN_MODEL_KIND,
            "version": WIN_MODEL_VERSION,
            "model": "logistic",
            "params": {
                "learning_rate": model.params.learning_rate,
                "epochs": model.params.epochs,
                "l2": model.params.l2,
                "seed": model.params.seed,
            },
            "n_features": model.n_features,
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "loss_history": list(model.loss_history),
        }
    else:
        raise ModelError(f"cannot persist model of type {type(model).__name__}")
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load(path: str | Path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("kind") != WIN_MODEL_KIND:
        raise ModelError(f"{path}: not a win-model file")
    if doc.get("version") != WIN_MODEL_VERSION:
        raise ModelError(f"{path}: unsupported version {doc.get('version')!r}")
    if doc["model"] == "forest":
        return ForestModel(
            params=RfParams(**doc["params"]),
            n_features=doc["n_features"],
            feature=np.array(doc["feature"], dtype=np.int32),
            left=np.array(doc["left"], dtype=np.int32),
            right=np.array(doc["right"], dtype=np.int32),
            value=np.array(doc["value"], dtype=np.float64),
            roots=np.array(doc["roots"], dtype=np.int32),
        )
    if doc["model"] == "logistic":
        return LogisticModel(
            params=LrParams(**doc["params"]),
            n_features=doc["n_features"],
            weights=np.array(doc["weights"], dtype=np.float64),
            bias=doc["bias"],
            loss_history=tuple(doc["loss_history"]),
        )
    raise ModelError(f"{path}: unknown model type {doc['model']!r}")
