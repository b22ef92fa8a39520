"""Per-observation attribution of forest predictions to features.

Two routes compute the same estimand:

* ``exact_shapley`` enumerates feature subsets against cover-weighted
  conditional expectations. Exponential in the number of features a tree
  uses; it is the reference the fast path is tested against.
* ``tree_shap`` runs the polynomial-time path recursion that maintains, for
  every root-to-node path, the permutation weights of each unique feature
  encountered (extending the path at each split and unwinding it at leaves
  and repeated features). It is vectorized over observations.

Conditioning is path-dependent: when a split feature is unknown, both
children contribute in proportion to their covers. Because covers count all
training rows, the empty-set expectation of a tree equals the mean of its
predictions over the training data, so attributions for any point sum to
its prediction minus the mean prediction (the baseline).

``breakdown`` gives the contribution sequence for one feature ordering and
``sampled_shap`` aggregates breakdowns over random orderings; averaging
breakdowns over all orderings reproduces ``exact_shapley``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .dataset import Dataset
from .errors import DataValidationError
from .forest import Forest, FlatTree, Internal, Leaf, TreeNode, predict_matrix
from .validation import as_matrix, as_vector, check_arity

MAX_EXACT_FEATURES = 20


@dataclass(frozen=True)
class AttributionMatrix:
    """Per-row feature attributions of one explained scalar.

    Regression explains the predicted value. Classification explains the
    class score: the probability-weighted class index, which for two classes
    is exactly the predicted probability of the second level. One scalar per
    dataset keeps rows of different classes comparable, so the attribution
    space separates classes instead of folding them onto each other.
    ``baseline`` is the mean of the explained scalar over all rows;
    ``explained_class`` records each row's predicted class for reporting.
    """

    values: np.ndarray
    baseline: float
    target: str
    explained_class: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def row_baselines(self) -> np.ndarray:
        return np.full(self.n, float(self.baseline))


@dataclass(frozen=True)
class BreakdownResult:
    """Contributions under one specific feature-entry order."""

    order: tuple[int, ...]
    contributions: np.ndarray

    def total(self) -> float:
        return float(self.contributions.sum())


@dataclass(frozen=True)
class SampledShap:
    """Breakdown contributions across sampled feature orderings."""

    sequences: np.ndarray  # (n_sequences, p)
    orders: np.ndarray     # (n_sequences, p)
    mean: np.ndarray
    median: np.ndarray

    def to_csv(self, path, feature_names: Optional[Sequence[str]] = None) -> None:
        p = self.sequences.shape[1]
        names = list(feature_names) if feature_names else [f"x{j}" for j in range(p)]
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(names)
            writer.writerows(self.sequences.tolist())


def _leaf_scalar(node: Leaf, target_class: Optional[int]) -> float:
    value = node.value
    if np.ndim(value) == 0:
        return float(value)
    if target_class is None:
        raise DataValidationError("classification tree requires a target_class")
    return float(np.asarray(value)[target_class])


def conditional_expectation(tree: TreeNode, x, known: Iterable[int],
                            target_class: Optional[int] = None) -> float:
    """Expected tree output given only the features in `known` are fixed at x.

    Splits on known features follow x; splits on unknown features descend
    both children weighted by cover.
    """
    x = as_vector(x, "x")
    known = frozenset(known)

    def walk(node: TreeNode) -> float:
        if isinstance(node, Leaf):
            return _leaf_scalar(node, target_class)
        if node.feature in known:
            child = node.left if x[node.feature] <= node.threshold else node.right
            return walk(child)
        wl = node.left.cover / node.cover
        wr = node.right.cover / node.cover
        return wl * walk(node.left) + wr * walk(node.right)

    return walk(tree)


def _used_features(node: TreeNode, acc: set) -> set:
    if isinstance(node, Internal):
        acc.add(node.feature)
        _used_features(node.left, acc)
        _used_features(node.right, acc)
    return acc


def _tree_exact_shapley(tree: TreeNode, x: np.ndarray, p: int,
                        target_class: Optional[int]) -> np.ndarray:
    phi = np.zeros(p)
    used = sorted(_used_features(tree, set()))
    m = len(used)
    if m == 0:
        return phi
    # Features the tree never touches are null players: dropping them from
    # the permutation average leaves the remaining values unchanged.
    values = np.empty(1 << m)
    for mask in range(1 << m):
        known = [used[b] for b in range(m) if (mask >> b) & 1]
        values[mask] = conditional_expectation(tree, x, known, target_class)
    fact = [math.factorial(k) for k in range(m + 1)]
    weight = [fact[s] * fact[m - s - 1] / fact[m] for s in range(m)]
    for b, j in enumerate(used):
        bit = 1 << b
        total = 0.0
        for mask in range(1 << m):
            if mask & bit:
                continue
            s = (mask).bit_count()
            total += weight[s] * (values[mask | bit] - values[mask])
        phi[j] = total
    return phi


def exact_shapley(model: Union[TreeNode, Forest], x,
                  target_class: Optional[int] = None) -> np.ndarray:
    """Subset-enumeration Shapley values of the cover-conditioned game.

    Exponential in the number of features; use tree_shap beyond
    MAX_EXACT_FEATURES features.
    """
    x = as_vector(x, "x")
    p = x.size
    if p > MAX_EXACT_FEATURES:
        raise DataValidationError(
            f"exact enumeration is limited to {MAX_EXACT_FEATURES} features; "
            "use tree_shap for larger models"
        )
    trees = model.trees if isinstance(model, Forest) else [model]
    if isinstance(model, Forest):
        check_arity(x, model.p, "x")
        _check_target(model, target_class)
    phi = np.zeros(p)
    for tree in trees:
        phi += _tree_exact_shapley(tree, x, p, target_class)
    return phi / len(trees)


# --- fast path ---------------------------------------------------------------
#
# The recursion walks every root-to-leaf path once for the whole batch,
# maintaining one entry per unique feature on the path: the cover fraction
# (scalar: product of that feature's child-cover ratios, identical for every
# observation) and the indicator fraction (per observation, 0/1: does the
# observation satisfy every split on that feature so far). The subset sums of
# the conditional-expectation game factor over these entries, so each leaf's
# Shapley mass is a polynomial in the entries evaluated against the
# permutation kernel. Observations sharing a satisfied-split pattern get
# identical leaf mass, so the kernel arithmetic runs once per distinct
# pattern and is scattered back to the batch.


def _shapley_kernel(k: int) -> np.ndarray:
    fact = [math.factorial(i) for i in range(k + 1)]
    return np.array([fact[s] * fact[k - 1 - s] / fact[k] for s in range(k)])


def _pattern_codes(os: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Distinct satisfied-split patterns and each observation's pattern index."""
    k = len(os)
    if k <= 16:
        code = os[0].astype(np.int64)
        for i in range(1, k):
            code |= os[i].astype(np.int64) << i
        counts = np.bincount(code, minlength=1 << k)
        pats = np.nonzero(counts)[0]
        lut = np.zeros(1 << k, dtype=np.int64)
        lut[pats] = np.arange(pats.size)
        bits = (pats[:, None] >> np.arange(k)[None, :]) & 1
        return bits.astype(np.float64), lut[code]
    stacked = np.stack(os, axis=1)
    pats, inverse = np.unique(stacked, axis=0, return_inverse=True)
    return pats.astype(np.float64), inverse.reshape(-1)


def _leaf_multipliers(B: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Per-pattern, per-entry Shapley mass (o_i - z_i) * sum_S w(|S|) prod(...).

    B is the (patterns, k) 0/1 indicator matrix, z the (k,) cover fractions.
    Builds the subset-product polynomial of all entries, then removes each
    entry in turn: dividing out a constant z_i for unsatisfied entries, or
    synthetically dividing by (y + z_i) for satisfied ones.
    """
    P, k = B.shape
    w = _shapley_kernel(k)
    q = np.zeros((P, k + 1))
    q[:, 0] = 1.0
    for i in range(k):
        q[:, 1:i + 2] = z[i] * q[:, 1:i + 2] + B[:, i:i + 1] * q[:, 0:i + 1]
        q[:, 0] *= z[i]
    unsat_total = q[:, :k] @ w
    qp = np.repeat(q[:, k:], k, axis=1)
    sat_total = np.zeros((P, k))
    for s in range(k - 1, -1, -1):
        sat_total += w[s] * qp
        if s > 0:
            qp = q[:, s:s + 1] - qp * z[None, :]
    totals = np.where(B == 1.0, sat_total, unsat_total[:, None] / z[None, :])
    return totals * (B - z[None, :])


class _PathAttribution:
    """One tree's attribution pass over a batch of observations."""

    def __init__(self, tree: FlatTree, X: np.ndarray, phi: np.ndarray):
        self.t = tree
        self.X = X
        self.phi = phi  # (n, p, C), accumulated in place

    def run(self) -> None:
        self._descend(0, [], [], [])

    def _descend(self, node: int, feats: list, zs: list, os: list) -> None:
        t = self.t
        if t.feature[node] < 0:
            if feats:
                self._accumulate(node, feats, zs, os)
            return
        f = int(t.feature[node])
        left, right = int(t.left[node]), int(t.right[node])
        cover = t.cover[node]
        goes = self.X[:, f] <= t.threshold[node]
        try:
            i = feats.index(f)
        except ValueError:
            i = -1
        for child, hot in ((left, goes), (right, ~goes)):
            ratio = t.cover[child] / cover
            if i >= 0:
                child_zs = zs[:i] + [zs[i] * ratio] + zs[i + 1:]
                child_os = os[:i] + [os[i] & hot] + os[i + 1:]
                self._descend(child, feats, child_zs, child_os)
            else:
                self._descend(child, feats + [f], zs + [ratio], os + [hot])

    def _accumulate(self, node: int, feats: list, zs: list, os: list) -> None:
        B, inverse = _pattern_codes(os)
        mult = _leaf_multipliers(B, np.asarray(zs))
        value = self.t.value[node]  # (C,)
        contrib = mult[inverse]     # (n, k)
        self.phi[:, feats, :] += contrib[:, :, None] * value[None, None, :]


def _forest_shap_batch(f: Forest, X: np.ndarray) -> np.ndarray:
    """Attributions for every observation and output channel: (n, p, C)."""
    X = check_arity(as_matrix(X, "X"), f.p, "X")
    n = X.shape[0]
    phi = np.zeros((n, f.p, f.n_values))
    for tree in f.flat():
        _PathAttribution(tree, X, phi).run()
    phi /= len(f.trees)
    return phi


def _check_target(f: Forest, target_class: Optional[int]) -> None:
    if f.task == "regression":
        if target_class is not None:
            raise DataValidationError("target_class is only valid for classification")
    else:
        if target_class is None:
            raise DataValidationError("classification requires a target_class")
        if not 0 <= target_class < f.n_classes:
            raise DataValidationError(
                f"target_class {target_class} out of range for {f.n_classes} classes"
            )


def tree_shap(f: Forest, x, target_class: Optional[int] = None) -> np.ndarray:
    """Fast path-dependent attribution of one observation, averaged over trees."""
    x = check_arity(as_vector(x, "x"), f.p, "x")
    _check_target(f, target_class)
    phi = _forest_shap_batch(f, x[None, :])[0]
    return phi[:, 0] if f.task == "regression" else phi[:, target_class]


def class_score(probs: np.ndarray) -> np.ndarray:
    """Probability-weighted class index; equals P(second level) for 2 classes."""
    return probs @ np.arange(probs.shape[1], dtype=np.float64)


def attribution_matrix(f: Forest, ds: Union[Dataset, np.ndarray]) -> AttributionMatrix:
    """Attribution rows for every observation of the dataset."""
    X = ds.x if isinstance(ds, Dataset) else as_matrix(ds, "X")
    check_arity(X, f.p, "X")
    margins = predict_matrix(f, X)
    phi = _forest_shap_batch(f, X)
    if f.task == "regression":
        return AttributionMatrix(
            values=phi[:, :, 0],
            baseline=float(margins.mean()),
            target="predicted value",
        )
    pred = np.argmax(margins, axis=1)
    weights = np.arange(f.n_values, dtype=np.float64)
    if f.n_values == 2:
        target = f"predicted probability of '{f.class_levels[1]}'"
    else:
        target = "class score (probability-weighted class index)"
    return AttributionMatrix(
        values=phi @ weights,
        baseline=float(class_score(margins).mean()),
        target=target,
        explained_class=pred,
    )


def _forest_value(f: Forest, x: np.ndarray, known: Iterable[int],
                  target_class: Optional[int]) -> float:
    known = list(known)
    total = 0.0
    for tree in f.trees:
        total += conditional_expectation(tree, x, known, target_class)
    return total / len(f.trees)


def breakdown(f: Forest, x, order: Sequence[int],
              target_class: Optional[int] = None) -> BreakdownResult:
    """Sequential contributions when features enter in the given order."""
    x = check_arity(as_vector(x, "x"), f.p, "x")
    _check_target(f, target_class)
    order = [int(j) for j in order]
    if sorted(order) != list(range(f.p)):
        raise DataValidationError(f"order must be a permutation of 0..{f.p - 1}")
    contributions = np.zeros(f.p)
    known: list[int] = []
    prev = _forest_value(f, x, known, target_class)
    for j in order:
        known.append(j)
        cur = _forest_value(f, x, known, target_class)
        contributions[j] = cur - prev
        prev = cur
    return BreakdownResult(order=tuple(order), contributions=contributions)


def sampled_shap(f: Forest, x, n_sequences: int = 25, seed: int = 0,
                 target_class: Optional[int] = None,
                 orders: Optional[np.ndarray] = None) -> SampledShap:
    """Breakdowns over seeded random feature orderings, with mean and median.

    Pass explicit `orders` (rows of permutations) to aggregate a chosen set
    of sequences instead of sampling them.
    """
    if orders is not None:
        orders = np.asarray(orders, dtype=np.int64)
    else:
        if n_sequences < 1:
            raise DataValidationError("n_sequences must be at least 1")
        rng = np.random.Generator(np.random.PCG64(seed))
        orders = np.stack([rng.permutation(f.p) for _ in range(n_sequences)])
    rows = np.stack([
        breakdown(f, x, order, target_class).contributions for order in orders
    ])
    return SampledShap(
        sequences=rows,
        orders=orders,
        mean=rows.mean(axis=0),
        median=np.median(rows, axis=0),
    )
