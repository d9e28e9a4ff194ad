"""Filter-style feature scoring: entropy, information gain, chi-squared.

Features are scored on categorical columns, so continuous columns go
through :func:`phishlens.dataset.discretize` first. Summations run in a
fixed order so scores do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, DiscreteDataset, UnknownFeature

IG = "IG"
CHI_SQUARED = "ChiSquared"
METHODS = (IG, CHI_SQUARED)


@dataclass(frozen=True)
class LabelCounts:
    phishing: int
    legitimate: int

    @property
    def total(self) -> int:
        return self.phishing + self.legitimate


@dataclass(frozen=True)
class ContingencyTable:
    """Observed counts, one row per feature bin and one column per class."""

    observed: np.ndarray

    @classmethod
    def from_columns(cls, feature_bins, labels) -> ContingencyTable:
        b = np.asarray(feature_bins)
        y = np.asarray(labels)
        if b.shape != y.shape:
            raise ValueError("feature_bins and labels must have equal length")
        _, bi = np.unique(b, return_inverse=True)
        classes, yi = np.unique(y, return_inverse=True)
        nb = int(bi.max()) + 1 if bi.size else 0
        nc = max(len(classes), 1)
        obs = np.bincount(bi.ravel() * nc + yi.ravel(), minlength=nb * nc).reshape(nb, nc)
        return cls(obs)

    @property
    def n(self) -> int:
        return int(self.observed.sum())

    @property
    def row_totals(self) -> np.ndarray:
        return self.observed.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.observed.sum(axis=0)

    @property
    def expected(self) -> np.ndarray:
        n = self.n
        if n == 0:
            raise ValueError("expected counts undefined for an empty table")
        return np.outer(self.row_totals, self.col_totals) / n


@dataclass(frozen=True)
class FeatureScore:
    feature: str
    method: str
    value: float


@dataclass(frozen=True)
class Ranking:
    method: str
    scores: tuple[FeatureScore, ...]
    tie_break: str = "feature-name-ascending"

    def names(self) -> list[str]:
        return [s.feature for s in self.scores]

    def top(self, n: int) -> list[str]:
        return self.names()[:n]

    def rank_of(self, feature: str) -> int:
        """1-based position of ``feature``."""
        return self.names().index(feature) + 1


@dataclass(frozen=True)
class CorrelationMatrix:
    features: tuple[str, ...]
    matrix: np.ndarray
    constant: tuple[str, ...] = ()

    def get(self, a: str, b: str) -> float:
        try:
            i, j = self.features.index(a), self.features.index(b)
        except ValueError as exc:
            raise UnknownFeature(str(exc)) from None
        return float(self.matrix[i, j])


def entropy(counts) -> float:
    """Shannon entropy in bits of a class-count vector (or LabelCounts)."""
    if isinstance(counts, LabelCounts):
        counts = (counts.phishing, counts.legitimate)
    c = np.asarray(counts, dtype=float).ravel()
    total = c.sum()
    if total <= 0:
        return 0.0
    h = 0.0
    for k in c:
        if k > 0:
            p = k / total
            h -= p * np.log2(p)
    return float(h)


def _entropy_rows(obs: np.ndarray) -> np.ndarray:
    tot = obs.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(tot > 0, obs / np.where(tot > 0, tot, 1), 0.0)
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=1)


def ig_from_table(table: ContingencyTable) -> float:
    obs = table.observed.astype(float)
    n = obs.sum()
    if n == 0:
        return 0.0
    parent = entropy(obs.sum(axis=0))
    weights = obs.sum(axis=1) / n
    children = float(np.dot(weights, _entropy_rows(obs)))
    return max(parent - children, 0.0)


def chi2_from_table(table: ContingencyTable) -> float:
    obs = table.observed.astype(float)
    if obs.sum() == 0:
        return 0.0
    exp = table.expected
    mask = exp > 0
    return float((((obs - exp) ** 2)[mask] / exp[mask]).sum())


def information_gain(feature_bins, labels, feature: str = "") -> FeatureScore:
    table = ContingencyTable.from_columns(feature_bins, labels)
    if table.n == 0:
        raise ValueError("information gain needs at least one row")
    return FeatureScore(feature, IG, ig_from_table(table))


def chi_squared(feature_bins, labels, feature: str = "") -> FeatureScore:
    table = ContingencyTable.from_columns(feature_bins, labels)
    if table.n == 0:
        raise ValueError("chi-squared needs at least one row")
    return FeatureScore(feature, CHI_SQUARED, chi2_from_table(table))


_SCORERS = {IG: information_gain, CHI_SQUARED: chi_squared}


def rank_features(d: DiscreteDataset, method: str) -> Ranking:
    """Score every feature and sort by descending score, then feature name."""
    if method not in _SCORERS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if len(d) == 0:
        raise ValueError("cannot rank features of an empty dataset")
    score = _SCORERS[method]
    scores = [score(d.codes[:, j], d.y, name) for j, name in enumerate(d.schema.names)]
    scores.sort(key=lambda s: (-s.value, s.feature))
    return Ranking(method, tuple(scores))


def combine_top_n(ig_ranking: Ranking, chi_ranking: Ranking, n: int) -> list[str]:
    """Union of both top-n lists ordered by best rank, then name."""
    best: dict[str, int] = {}
    for ranking in (ig_ranking, chi_ranking):
        for pos, name in enumerate(ranking.top(n)):
            best[name] = min(pos, best.get(name, pos))
    return sorted(best, key=lambda name: (best[name], name))


def select_top_n_combined(d: DiscreteDataset, n: int) -> list[str]:
    if not 1 <= n <= len(d.schema):
        raise ValueError(f"n must be in [1, {len(d.schema)}], got {n}")
    return combine_top_n(rank_features(d, IG), rank_features(d, CHI_SQUARED), n)


def correlation_matrix(d: Dataset, features) -> CorrelationMatrix:
    """Pearson coefficients over raw column values.

    Constant columns get 0 against everything else (1 on the diagonal) and
    are listed in ``constant``.
    """
    features = tuple(features)
    if len(features) < 2:
        raise ValueError("need at least two features")
    idx = [d.schema.index(f) for f in features]
    X = d.X[:, idx]
    centered = X - X.mean(axis=0)
    norms = np.sqrt((centered**2).sum(axis=0))
    constant = np.ptp(X, axis=0) == 0
    safe = np.where(constant, 1.0, norms)
    Z = centered / safe
    Z[:, constant] = 0.0
    M = np.clip(Z.T @ Z, -1.0, 1.0)
    M = (M + M.T) / 2
    np.fill_diagonal(M, 1.0)
    return CorrelationMatrix(features, M, tuple(f for f, c in zip(features, constant) if c))
