"""Bagged CART random forests with per-node covers.

Trees are grown on bootstrap samples with mtry feature sampling (Gini
impurity decrease for classification, variance reduction for regression).
After growth, every node's cover is recounted by routing all original
training rows through the tree; these covers drive the path-dependent
conditioning used by the attribution engine, and they make attributions sum
exactly to prediction minus the mean prediction over the training rows.

Training is bit-reproducible: each tree draws from its own generator seeded
by a splitmix-style mix of (seed, tree index), and split statistics are
accumulated in a canonical order so the result is invariant to row order
given fixed bootstrap indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from sklearn.base import BaseEstimator

from .dataset import Dataset, Task
from .errors import DataValidationError
from .validation import as_matrix, as_vector, check_arity

_M64 = (1 << 64) - 1

# Relative tolerance for "this split actually reduces impurity"; guards
# against cancellation noise on (near-)pure nodes.
_GAIN_RTOL = 1e-12


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


def tree_seed(seed: int, tree_index: int) -> int:
    """Derive an independent 64-bit stream seed for one tree."""
    return _splitmix64((seed & _M64) ^ _splitmix64(tree_index + 1))


@dataclass(frozen=True)
class Hyperparams:
    n_trees: int
    mtry: int
    min_node: int

    def __post_init__(self):
        if self.n_trees < 1 or self.mtry < 1 or self.min_node < 1:
            raise DataValidationError("hyperparameters must be positive")


def default_hyper(task: Task, n: int, p: int) -> Hyperparams:
    """Default hyperparameters: 125 trees; mtry and minimum node size by task."""
    if task == "classification":
        return Hyperparams(n_trees=125, mtry=max(1, int(math.isqrt(p))),
                           min_node=max(1, n // 500))
    return Hyperparams(n_trees=125, mtry=max(1, p // 3), min_node=max(5, n // 500))


@dataclass
class Leaf:
    value: Union[float, np.ndarray]  # scalar for regression, class probabilities otherwise
    cover: int = 0


@dataclass
class Internal:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"
    cover: int = 0


TreeNode = Union[Leaf, Internal]


def _node_count(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 1
    return 1 + _node_count(node.left) + _node_count(node.right)


class FlatTree:
    """Array form of one tree for vectorized routing and attribution.

    Leaves hold a value row of width C (C=1 for regression); internal nodes
    have feature >= 0. Node 0 is the root, children in preorder.
    """

    __slots__ = ("feature", "threshold", "left", "right", "cover", "value")

    def __init__(self, root: TreeNode, n_values: int):
        count = _node_count(root)
        self.feature = np.full(count, -1, dtype=np.int32)
        self.threshold = np.zeros(count, dtype=np.float64)
        self.left = np.full(count, -1, dtype=np.int32)
        self.right = np.full(count, -1, dtype=np.int32)
        self.cover = np.zeros(count, dtype=np.float64)
        self.value = np.zeros((count, n_values), dtype=np.float64)
        self._fill(root, 0)

    def _fill(self, node: TreeNode, i: int) -> int:
        self.cover[i] = node.cover
        if isinstance(node, Leaf):
            self.value[i, :] = node.value
            return i + 1
        self.feature[i] = node.feature
        self.threshold[i] = node.threshold
        self.left[i] = i + 1
        nxt = self._fill(node.left, i + 1)
        self.right[i] = nxt
        return self._fill(node.right, nxt)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row (split rule: x[f] <= threshold goes left)."""
        idx = np.zeros(X.shape[0], dtype=np.int64)
        active = np.nonzero(self.feature[idx] >= 0)[0]
        while active.size:
            nd = idx[active]
            goes = X[active, self.feature[nd]] <= self.threshold[nd]
            idx[active] = np.where(goes, self.left[nd], self.right[nd])
            active = active[self.feature[idx[active]] >= 0]
        return idx

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


@dataclass
class Forest:
    trees: list
    task: Task
    hyper: Hyperparams
    seed: int
    p: int
    class_levels: Optional[tuple[str, ...]] = None
    _flat: Optional[list] = field(default=None, repr=False, compare=False)

    @property
    def n_classes(self) -> int:
        return len(self.class_levels) if self.class_levels else 0

    @property
    def n_values(self) -> int:
        return self.n_classes if self.task == "classification" else 1

    def flat(self) -> list:
        if self._flat is None:
            self._flat = [FlatTree(t, self.n_values) for t in self.trees]
        return self._flat


@dataclass(frozen=True)
class Prediction:
    value: Optional[float] = None
    probs: Optional[np.ndarray] = None
    class_index: Optional[int] = None


def _class_counts_cumulative(y_sorted: np.ndarray, n_classes: int) -> np.ndarray:
    onehot = np.zeros((y_sorted.size, n_classes), dtype=np.float64)
    onehot[np.arange(y_sorted.size), y_sorted] = 1.0
    return onehot.cumsum(axis=0)


def _best_split_classification(xf, y, n_classes, min_node):
    """(gain, threshold, n_left) of the best Gini-decrease split, or None."""
    order = np.lexsort((y, xf))
    xs, ys = xf[order], y[order]
    cut = np.nonzero(np.diff(xs))[0]  # split after position i
    if cut.size == 0:
        return None
    n = xs.size
    n_left = cut + 1
    ok = (n_left >= min_node) & (n - n_left >= min_node)
    if not ok.any():
        return None
    cut, n_left = cut[ok], n_left[ok]
    cum = _class_counts_cumulative(ys, n_classes)
    total = cum[-1]
    lc = cum[cut]
    rc = total - lc
    n_right = n - n_left
    score = (lc * lc).sum(axis=1) / n_left + (rc * rc).sum(axis=1) / n_right
    parent = (total * total).sum() / n
    gains = (score - parent) / n
    best = int(np.argmax(gains))
    if gains[best] <= _GAIN_RTOL * max(1.0, parent / n):
        return None
    i = cut[best]
    thr = (xs[i] + xs[i + 1]) / 2.0
    return float(gains[best]), float(thr), int(n_left[best])


def _best_split_regression(xf, y, min_node):
    """(gain, threshold, n_left) of the best variance-reduction split, or None."""
    order = np.lexsort((y, xf))
    xs, ys = xf[order], y[order]
    cut = np.nonzero(np.diff(xs))[0]
    if cut.size == 0:
        return None
    n = xs.size
    n_left = cut + 1
    ok = (n_left >= min_node) & (n - n_left >= min_node)
    if not ok.any():
        return None
    cut, n_left = cut[ok], n_left[ok]
    y0 = ys - ys.mean()  # center to limit cancellation in the cumulative sums
    cs = np.cumsum(y0)[cut]
    cs2 = np.cumsum(y0 * y0)[cut]
    tot2 = float((y0 * y0).sum())
    tot = float(y0.sum())
    n_right = n - n_left
    sse_parent = tot2 - tot * tot / n
    sse_left = cs2 - cs * cs / n_left
    sse_right = (tot2 - cs2) - (tot - cs) ** 2 / n_right
    gains = sse_parent - sse_left - sse_right
    best = int(np.argmax(gains))
    if gains[best] <= _GAIN_RTOL * max(1.0, abs(sse_parent)):
        return None
    i = cut[best]
    thr = (xs[i] + xs[i + 1]) / 2.0
    return float(gains[best]), float(thr), int(n_left[best])


def _leaf_value(y: np.ndarray, task: Task, n_classes: int):
    if task == "classification":
        return np.bincount(y, minlength=n_classes).astype(np.float64) / y.size
    # Sort before averaging so the value is independent of row order.
    return float(np.sort(y).mean())


def _grow(Xs, ys, idx, task, n_classes, mtry, min_node, rng) -> TreeNode:
    size = idx.size
    if size < 2 * min_node:
        return Leaf(value=_leaf_value(ys[idx], task, n_classes))
    p = Xs.shape[1]
    candidates = rng.choice(p, size=min(mtry, p), replace=False)
    best = None
    for f in candidates:
        xf = Xs[idx, f]
        if task == "classification":
            found = _best_split_classification(xf, ys[idx], n_classes, min_node)
        else:
            found = _best_split_regression(xf, ys[idx], min_node)
        if found is not None and (best is None or found[0] > best[0]):
            best = (found[0], int(f), found[1])
    if best is None:
        return Leaf(value=_leaf_value(ys[idx], task, n_classes))
    _, feature, threshold = best
    goes = Xs[idx, feature] <= threshold
    left = _grow(Xs, ys, idx[goes], task, n_classes, mtry, min_node, rng)
    right = _grow(Xs, ys, idx[~goes], task, n_classes, mtry, min_node, rng)
    return Internal(feature=feature, threshold=threshold, left=left, right=right)


def _recount_covers(root: TreeNode, X: np.ndarray) -> None:
    """Set every node's cover to the number of original training rows reaching it."""

    def visit(node: TreeNode, mask: np.ndarray) -> None:
        node.cover = int(mask.sum())
        if isinstance(node, Internal):
            goes = X[:, node.feature] <= node.threshold
            visit(node.left, mask & goes)
            visit(node.right, mask & ~goes)

    visit(root, np.ones(X.shape[0], dtype=bool))


def fit_forest(
    X,
    y,
    task: Task,
    hyper: Hyperparams,
    seed: int = 0,
    class_levels: Optional[tuple[str, ...]] = None,
    bootstrap_indices: Optional[np.ndarray] = None,
) -> Forest:
    """Train a forest on arrays. bootstrap_indices, when given, must be
    (n_trees, n) and overrides the per-tree bootstrap draw (testing hook)."""
    X = as_matrix(X, "X")
    n, p = X.shape
    if task == "classification":
        y = np.asarray(y)
        if class_levels is None:
            levels = tuple(str(v) for v in np.unique(y))
            index = {v: i for i, v in enumerate(np.unique(y))}
            y = np.array([index[v] for v in y], dtype=np.int64)
            class_levels = levels
        else:
            y = y.astype(np.int64)
        n_classes = len(class_levels)
    else:
        y = as_vector(y, "y")
        n_classes = 0
    if len(y) != n:
        raise DataValidationError("X and y have different lengths")

    trees = []
    for t in range(hyper.n_trees):
        rng = np.random.Generator(np.random.PCG64(tree_seed(seed, t)))
        if bootstrap_indices is not None:
            boot = np.asarray(bootstrap_indices[t], dtype=np.int64)
        else:
            boot = rng.integers(0, n, size=n)
        Xs, ys = X[boot], y[boot]
        root = _grow(Xs, ys, np.arange(n, dtype=np.int64), task, n_classes,
                     hyper.mtry, hyper.min_node, rng)
        _recount_covers(root, X)
        trees.append(root)
    return Forest(trees=trees, task=task, hyper=hyper, seed=seed, p=p,
                  class_levels=class_levels)


def train(ds: Dataset, hyper: Optional[Hyperparams] = None, seed: int = 0,
          bootstrap_indices: Optional[np.ndarray] = None) -> Forest:
    """Train a forest on a Dataset with task-appropriate defaults."""
    if hyper is None:
        hyper = default_hyper(ds.task, ds.n, ds.p)
    if ds.task == "classification":
        return fit_forest(ds.x, ds.response.observed, "classification", hyper, seed,
                          class_levels=ds.response.levels,
                          bootstrap_indices=bootstrap_indices)
    return fit_forest(ds.x, ds.response.observed, "regression", hyper, seed,
                      bootstrap_indices=bootstrap_indices)


def predict_matrix(f: Forest, X) -> np.ndarray:
    """Forest output for each row: (n,) for regression, (n, C) probabilities otherwise."""
    X = check_arity(as_matrix(X, "X"), f.p, "X")
    acc = np.zeros((X.shape[0], f.n_values), dtype=np.float64)
    for tree in f.flat():
        acc += tree.predict(X)
    acc /= len(f.trees)
    return acc[:, 0] if f.task == "regression" else acc


def predict(f: Forest, x) -> Prediction:
    """Predict one observation: mean of tree outputs; argmax class for classification."""
    x = check_arity(as_vector(x, "x"), f.p, "x")
    out = predict_matrix(f, x[None, :])
    if f.task == "regression":
        return Prediction(value=float(out[0]))
    probs = out[0]
    return Prediction(probs=probs, class_index=int(np.argmax(probs)))


def scalar_margin(f: Forest, x, target_class: Optional[int] = None) -> float:
    """The scalar the attribution engine explains: predicted value, or the
    predicted probability of target_class."""
    if f.task == "regression":
        if target_class is not None:
            raise DataValidationError("target_class is only valid for classification")
        return float(predict(f, x).value)
    if target_class is None:
        raise DataValidationError("classification requires a target_class")
    if not 0 <= target_class < f.n_classes:
        raise DataValidationError(
            f"target_class {target_class} out of range for {f.n_classes} classes"
        )
    return float(predict(f, x).probs[target_class])


class RandomForest(BaseEstimator):
    """Sklearn-style wrapper around the forest trainer.

    Parameters left as None resolve to the task defaults (125 trees,
    mtry=floor(sqrt(p)) / floor(p/3), min_node=max(1, n/500) / max(5, n/500))
    at fit time.
    """

    def __init__(self, task: Task = "classification", n_trees: Optional[int] = None,
                 mtry: Optional[int] = None, min_node: Optional[int] = None,
                 seed: int = 0):
        self.task = task
        self.n_trees = n_trees
        self.mtry = mtry
        self.min_node = min_node
        self.seed = seed

    def fit(self, X, y):
        X = as_matrix(X, "X")
        n, p = X.shape
        base = default_hyper(self.task, n, p)
        hyper = Hyperparams(
            n_trees=self.n_trees if self.n_trees is not None else base.n_trees,
            mtry=self.mtry if self.mtry is not None else base.mtry,
            min_node=self.min_node if self.min_node is not None else base.min_node,
        )
        self.forest_ = fit_forest(X, y, self.task, hyper, self.seed)
        return self

    def predict(self, X) -> np.ndarray:
        out = predict_matrix(self.forest_, X)
        if self.task == "regression":
            return out
        return np.argmax(out, axis=1)

    def predict_proba(self, X) -> np.ndarray:
        if self.task != "classification":
            raise DataValidationError("predict_proba is only valid for classification")
        return predict_matrix(self.forest_, X)
