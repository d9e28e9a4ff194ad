"""From-scratch classifiers and the classifier x feature-count grid.

All three classifiers resolve exact ties to label 0 (phishing).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, discretize, project, split_dataset, standardize
from .selection import CHI_SQUARED, IG, combine_top_n, rank_features

log = logging.getLogger(__name__)

NAIVE_BAYES = "Naive-Bayes"
LINEAR_SVC = "LinearSVC"
KNN = "K-Nearest-Neighbours"
CLASSIFIERS = (NAIVE_BAYES, LINEAR_SVC, KNN)

SELECT_ON_TRAIN = "select-on-train"
SELECT_BEFORE_SPLIT = "select-before-split"
PROTOCOLS = (SELECT_ON_TRAIN, SELECT_BEFORE_SPLIT)


class TrainingError(RuntimeError):
    pass


class SingleClassTraining(TrainingError):
    pass


class NonFiniteLoss(TrainingError):
    pass


class DimensionMismatch(ValueError):
    pass


def _check_dim(x: np.ndarray, n_features: int) -> None:
    if x.shape[-1] != n_features:
        raise DimensionMismatch(f"expected {n_features} features, got {x.shape[-1]}")


def _require_both_classes(y: np.ndarray) -> None:
    if len(y) == 0 or len(np.unique(y)) < 2:
        raise SingleClassTraining("training data must contain both classes")


# --- Gaussian naive Bayes -------------------------------------------------


@dataclass(frozen=True)
class GaussianNBModel:
    priors: np.ndarray      # (2,) indexed by label
    means: np.ndarray       # (2, n_features)
    variances: np.ndarray   # (2, n_features)
    var_floor: float

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def log_posteriors(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        _check_dim(X, self.n_features)
        joint = np.empty((X.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            ll = -0.5 * (np.log(2 * np.pi * var) + (X - self.means[c]) ** 2 / var)
            joint[:, c] = np.log(self.priors[c]) + ll.sum(axis=1)
        top = joint.max(axis=1, keepdims=True)
        return joint - (top + np.log(np.exp(joint - top).sum(axis=1, keepdims=True)))

    def predict(self, X) -> np.ndarray:
        lp = self.log_posteriors(X)
        return (lp[:, 1] > lp[:, 0]).astype(np.int64)


def train_naive_bayes(train: Dataset, floor_scale: float = 1e-9) -> GaussianNBModel:
    """Fit class priors and per-class Gaussian feature parameters.

    Variances are floored at ``floor_scale`` times the largest feature
    variance of the training data so constant features stay usable.
    """
    X, y = train.X, train.y
    _require_both_classes(y)
    max_var = float(X.var(axis=0).max()) if X.size else 0.0
    floor = floor_scale * max_var if max_var > 0 else floor_scale
    priors = np.array([np.mean(y == 0), np.mean(y == 1)])
    means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.vstack([np.maximum(X[y == c].var(axis=0), floor) for c in (0, 1)])
    return GaussianNBModel(priors, means, variances, floor)


def predict_naive_bayes(m: GaussianNBModel, x) -> tuple[int, tuple[float, float]]:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("expected a single feature vector")
    lp = m.log_posteriors(x)[0]
    post = np.exp(lp)
    return int(lp[1] > lp[0]), (float(post[0]), float(post[1]))


# --- k nearest neighbours -------------------------------------------------


@dataclass(frozen=True)
class KnnModel:
    X: np.ndarray
    y: np.ndarray
    k: int = 5

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"k must be a positive odd integer, got {self.k}")
        if self.k > len(self.y):
            raise ValueError(f"k={self.k} exceeds training size {len(self.y)}")

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def neighbours(self, x) -> np.ndarray:
        """Indices of the k nearest rows; equal distances go to the lower index."""
        x = np.asarray(x, dtype=float)
        _check_dim(x, self.n_features)
        d = ((self.X - x) ** 2).sum(axis=1)
        return self._nearest(d)

    def _nearest(self, d: np.ndarray) -> np.ndarray:
        k = self.k
        if k < d.size:
            cutoff = np.partition(d, k - 1)[k - 1]
            cand = np.flatnonzero(d <= cutoff)
        else:
            cand = np.arange(d.size)
        return cand[np.argsort(d[cand], kind="stable")][:k]

    def predict(self, X, chunk: int = 512) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        _check_dim(X, self.n_features)
        out = np.empty(X.shape[0], dtype=np.int64)
        sq_train = (self.X**2).sum(axis=1)
        for start in range(0, X.shape[0], chunk):
            block = X[start:start + chunk]
            sq_block = (block**2).sum(axis=1)
            # BLAS expansion only screens candidates; the final order uses
            # exact differences so equal distances really compare equal
            approx = sq_block[:, None] + sq_train[None, :] - 2.0 * block @ self.X.T
            tol = 1e-9 * (sq_block[:, None] + sq_train.max()) + 1e-12
            kth = np.partition(approx, self.k - 1, axis=1)[:, self.k - 1 : self.k]
            for i, row in enumerate(approx <= kth + 2 * tol):
                cand = np.flatnonzero(row)
                exact = ((self.X[cand] - block[i]) ** 2).sum(axis=1)
                nearest = cand[np.argsort(exact, kind="stable")][: self.k]
                out[start + i] = int(2 * self.y[nearest].sum() > self.k)
        return out


def train_knn(train: Dataset, k: int = 5) -> KnnModel:
    return KnnModel(np.array(train.X), np.array(train.y), k)


def knn_classify(m: KnnModel, x) -> int:
    votes = m.y[m.neighbours(x)].sum()
    return int(2 * votes > m.k)


# --- linear max-margin ----------------------------------------------------


@dataclass(frozen=True)
class LinearHyper:
    reg: float = 1e-4
    epochs: int = 50
    step0: float = 0.01
    decay: float = 0.01

    def step(self, t: int) -> float:
        return self.step0 / (1.0 + self.decay * t)


@dataclass(frozen=True)
class LinearModel:
    w: np.ndarray
    b: float
    hyper: LinearHyper = LinearHyper()
    seed: int = 42
    objective: float = float("nan")
    history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def n_features(self) -> int:
        return self.w.shape[0]

    def decision(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        _check_dim(X, self.n_features)
        return X @ self.w + self.b

    def predict(self, X) -> np.ndarray:
        return (self.decision(X) > 0).astype(np.int64)


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, s: np.ndarray, reg: float) -> float:
    """Mean hinge loss plus (reg / 2) * ||w||^2, with labels ``s`` in {-1, +1}."""
    margins = s * (X @ w + b)
    return float(np.maximum(0.0, 1.0 - margins).mean() + 0.5 * reg * np.dot(w, w))


def train_linear_svc(train: Dataset, hyper: LinearHyper = LinearHyper(), seed: int = 42) -> LinearModel:
    """Per-row hinge-loss subgradient descent, rows reshuffled every epoch.

    The step size decays by epoch (``hyper.step(epoch)``). The returned
    weights are the best-objective iterate seen at an epoch boundary, so
    ``history`` (best-so-far objective per epoch) is non-increasing.
    """
    X, y = train.X, train.y
    _require_both_classes(y)
    s = np.where(y == 1, 1.0, -1.0)
    n, p = X.shape
    w = np.zeros(p)
    b = 0.0
    rng = np.random.default_rng(seed)
    best_w, best_b = w.copy(), b
    best = svm_objective(w, b, X, s, hyper.reg)
    history = []
    # overflow surfaces as NonFiniteLoss below rather than as numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(hyper.epochs):
            eta = hyper.step(epoch)
            for i in rng.permutation(n):
                xi = X[i]
                if s[i] * (xi @ w + b) < 1.0:
                    w = w - eta * (hyper.reg * w - s[i] * xi)
                    b += eta * s[i]
                else:
                    w = w - eta * hyper.reg * w
            obj = svm_objective(w, b, X, s, hyper.reg)
            if not np.isfinite(obj):
                raise NonFiniteLoss(f"objective diverged at epoch {epoch} (step {eta})")
            if obj < best:
                best, best_w, best_b = obj, w.copy(), b
            history.append(best)
    return LinearModel(best_w, float(best_b), hyper, seed, best, tuple(history))


def predict_linear(m: LinearModel, x) -> int:
    return int(m.decision(x)[0] > 0)


# --- evaluation -----------------------------------------------------------


@dataclass(frozen=True)
class Evaluation:
    accuracy: float
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def evaluate(model, test: Dataset) -> Evaluation:
    """Accuracy and confusion counts; label 1 (legitimate) is the positive class."""
    if len(test) == 0:
        raise ValueError("empty test set")
    pred = model.predict(test.X)
    y = test.y
    tp = int(((pred == 1) & (y == 1)).sum())
    tn = int(((pred == 0) & (y == 0)).sum())
    fp = int(((pred == 1) & (y == 0)).sum())
    fn = int(((pred == 0) & (y == 1)).sum())
    return Evaluation((tp + tn) / len(y), tp, tn, fp, fn)


@dataclass(frozen=True)
class GridCell:
    classifier: str
    n_features: int
    feature_list: tuple[str, ...]
    result: Evaluation


@dataclass(frozen=True)
class EvaluationReport:
    cells: tuple[GridCell, ...]
    seed: int
    train_fraction: float
    protocol: str
    bins: int
    k: int
    hyper: LinearHyper
    n_train: int
    n_test: int

    def cell(self, classifier: str, n_features: int) -> GridCell:
        for c in self.cells:
            if c.classifier == classifier and c.n_features == n_features:
                return c
        raise KeyError((classifier, n_features))

    def accuracy(self, classifier: str, n_features: int) -> float:
        return self.cell(classifier, n_features).result.accuracy

    @property
    def columns(self) -> list[int]:
        return list(dict.fromkeys(c.n_features for c in self.cells))


def feature_sets(d: Dataset, feature_counts, bins: int = 10) -> dict[int, list[str]]:
    """Combined top-n feature list for each n, ranked on ``d``."""
    dd = discretize(d, bins)
    ig, chi = rank_features(dd, IG), rank_features(dd, CHI_SQUARED)
    return {n: combine_top_n(ig, chi, n) for n in feature_counts}


def run_experiment_grid(
    d: Dataset,
    feature_counts=(10, 15, 20),
    seed: int = 42,
    train_fraction: float = 0.7,
    protocol: str = SELECT_ON_TRAIN,
    bins: int = 10,
    k: int = 5,
    hyper: LinearHyper = LinearHyper(),
) -> EvaluationReport:
    """Train and score all three classifiers on every feature set.

    The first column always uses every feature; then one column per n in
    ``feature_counts`` with the combined IG/chi-squared top-n list. One
    split is shared by all cells. ``protocol`` decides whether ranking sees
    the full data or the training split only.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}")
    n_all = len(d.schema)
    counts = [int(n) for n in feature_counts]
    if any(not 1 <= n <= n_all for n in counts):
        raise ValueError(f"feature counts must lie in [1, {n_all}], got {counts}")

    train, test = split_dataset(d, train_fraction, seed)
    ranked_on = d if protocol == SELECT_BEFORE_SPLIT else train
    columns = {n_all: list(d.schema.names)}
    columns.update((n, f) for n, f in feature_sets(ranked_on, counts, bins).items() if n not in columns)

    cells = []
    for n, features in columns.items():
        tr, te = project(train, features), project(test, features)
        tr_z, te_z, _ = standardize(tr, te)
        log.info("grid column n=%d (%d features)", n, len(features))
        models = (
            (NAIVE_BAYES, train_naive_bayes(tr), te),
            (LINEAR_SVC, train_linear_svc(tr_z, hyper, seed), te_z),
            (KNN, train_knn(tr_z, k), te_z),
        )
        for name, model, test_view in models:
            cells.append(GridCell(name, n, tuple(features), evaluate(model, test_view)))
    order = {name: i for i, name in enumerate(CLASSIFIERS)}
    cells.sort(key=lambda c: order[c.classifier])
    return EvaluationReport(
        tuple(cells), seed, train_fraction, protocol, bins, k, hyper, len(train), len(test)
    )
