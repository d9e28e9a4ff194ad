"""Tabular dataset handling: CSV ingestion, splitting, binning, projection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

LABEL_COLUMN = "CLASS_LABEL"
ID_COLUMN = "id"
KINDS = ("binary", "ternary", "count", "fraction")

# Column order of the 48-feature Mendeley phishing dataset.
REFERENCE_FEATURES = (
    "NumDots", "SubdomainLevel", "PathLevel", "UrlLength", "NumDash",
    "NumDashInHostname", "AtSymbol", "TildeSymbol", "NumUnderscore",
    "NumPercent", "NumQueryComponents", "NumAmpersand", "NumHash",
    "NumNumericChars", "NoHttps", "RandomString", "IpAddress",
    "DomainInSubdomains", "DomainInPaths", "HttpsInHostname",
    "HostnameLength", "PathLength", "QueryLength", "DoubleSlashInPath",
    "NumSensitiveWords", "EmbeddedBrandName", "PctExtHyperlinks",
    "PctExtResourceUrls", "ExtFavicon", "InsecureForms", "RelativeFormAction",
    "ExtFormAction", "AbnormalFormAction", "PctNullSelfRedirectHyperlinks",
    "FrequentDomainNameMismatch", "FakeLinkInStatusBar", "RightClickDisabled",
    "PopUpWindow", "SubmitInfoToEmail", "IframeOrFrame", "MissingTitle",
    "ImagesOnlyInForm", "SubdomainLevelRT", "UrlLengthRT",
    "PctExtResourceUrlsRT", "AbnormalExtFormActionR", "ExtMetaScriptLinkRT",
    "PctExtNullSelfRedirectHyperlinksRT",
)

_BINARY = {
    "AtSymbol", "TildeSymbol", "NoHttps", "RandomString", "IpAddress",
    "DomainInSubdomains", "DomainInPaths", "HttpsInHostname",
    "DoubleSlashInPath", "EmbeddedBrandName", "ExtFavicon", "InsecureForms",
    "RelativeFormAction", "ExtFormAction", "AbnormalFormAction",
    "FrequentDomainNameMismatch", "FakeLinkInStatusBar", "RightClickDisabled",
    "PopUpWindow", "SubmitInfoToEmail", "IframeOrFrame", "MissingTitle",
    "ImagesOnlyInForm",
}
_FRACTION = {"PctExtHyperlinks", "PctExtResourceUrls", "PctNullSelfRedirectHyperlinks"}


def _reference_kind(name: str) -> str:
    if name in _BINARY:
        return "binary"
    if name in _FRACTION:
        return "fraction"
    if name.endswith("RT") or name.endswith("R"):
        return "ternary"
    return "count"


REFERENCE_KINDS = {name: _reference_kind(name) for name in REFERENCE_FEATURES}


class DatasetError(ValueError):
    pass


class SchemaMismatch(DatasetError):
    pass


class BadLabel(DatasetError):
    pass


class BadValue(DatasetError):
    pass


class EmptyDataset(DatasetError):
    pass


class UnknownFeature(KeyError):
    pass


@dataclass(frozen=True)
class FeatureSchema:
    names: tuple[str, ...]
    kinds: tuple[str, ...]
    label: str = LABEL_COLUMN

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise SchemaMismatch("duplicate feature names")
        if len(self.kinds) != len(self.names):
            raise SchemaMismatch("one kind per feature required")
        if self.label in self.names:
            raise SchemaMismatch(f"label column {self.label!r} listed as a feature")
        bad = set(self.kinds) - set(KINDS)
        if bad:
            raise SchemaMismatch(f"unknown feature kinds {sorted(bad)}")

    def __len__(self):
        return len(self.names)

    def kind(self, name: str) -> str:
        return self.kinds[self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownFeature(name) from None

    def subset(self, names) -> FeatureSchema:
        return FeatureSchema(tuple(names), tuple(self.kind(n) for n in names), self.label)


REFERENCE_SCHEMA = FeatureSchema(
    REFERENCE_FEATURES, tuple(REFERENCE_KINDS[n] for n in REFERENCE_FEATURES)
)


@dataclass(frozen=True)
class Example:
    id: str | None
    features: dict[str, float]
    label: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix ``X`` (rows x features) with labels (1 legitimate, 0 phishing)."""

    schema: FeatureSchema
    X: np.ndarray
    y: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float).reshape(-1, len(self.schema))
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise DatasetError("row count mismatch between features and labels")
        if y.size and not np.isin(y, (0, 1)).all():
            raise BadLabel("labels must be 0 or 1")
        if self.ids is not None and len(self.ids) != y.shape[0]:
            raise DatasetError("one id per row required")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.ids == other.ids
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.schema.names

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.schema.index(name)]

    def example(self, i: int) -> Example:
        row = dict(zip(self.schema.names, self.X[i].tolist()))
        return Example(self.ids[i] if self.ids else None, row, int(self.y[i]))

    def class_counts(self) -> tuple[int, int]:
        """(phishing, legitimate) row counts."""
        legit = int(self.y.sum())
        return len(self) - legit, legit

    def take(self, rows) -> Dataset:
        rows = np.asarray(rows, dtype=np.int64)
        ids = tuple(self.ids[i] for i in rows) if self.ids is not None else None
        return Dataset(self.schema, self.X[rows], self.y[rows], ids)

    def with_inverted_labels(self) -> Dataset:
        return Dataset(self.schema, self.X, 1 - self.y, self.ids)


@dataclass(frozen=True, eq=False)
class DiscreteDataset:
    schema: FeatureSchema
    codes: np.ndarray
    y: np.ndarray
    bin_edges: dict[str, np.ndarray] = field(default_factory=dict)
    bin_counts: tuple[int, ...] = ()

    def __len__(self):
        return self.y.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.codes[:, self.schema.index(name)]


def infer_kind(values: np.ndarray) -> str:
    vals = set(np.unique(values).tolist())
    if vals <= {0.0, 1.0}:
        return "binary"
    if vals <= {-1.0, 0.0, 1.0}:
        return "ternary"
    if all(0.0 <= v <= 1.0 for v in vals):
        return "fraction"
    return "count"


def _parse_cell(text: str, row: int, col: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise BadValue(f"row {row}, column {col!r}: non-numeric value {text!r}") from None
    if not math.isfinite(value):
        raise BadValue(f"row {row}, column {col!r}: non-finite value {text!r}")
    return value


def load_csv(path, schema: FeatureSchema | None = None, invert_labels: bool = False) -> Dataset:
    """Read a comma-separated feature file with a header row.

    The header may start with an ``id`` column and must contain the label
    column. With ``schema=None`` the feature columns are taken from the
    header, using the reference kinds for known names and inferring the rest
    from the data. Row numbers in error messages are 1-based file lines.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaMismatch(f"{path}: missing header row") from None
        rows = list(reader)

    label = schema.label if schema is not None else LABEL_COLUMN
    if label not in header:
        raise SchemaMismatch(f"row 1, column {label!r}: label column missing")
    has_id = bool(header) and header[0] == ID_COLUMN
    feature_cols = [h for h in header if h != label and not (has_id and h == ID_COLUMN)]
    if len(set(header)) != len(header):
        dup = next(h for h in header if header.count(h) > 1)
        raise SchemaMismatch(f"row 1, column {dup!r}: duplicated column")

    if schema is not None:
        missing = [n for n in schema.names if n not in feature_cols]
        extra = [n for n in feature_cols if n not in schema.names]
        if missing:
            raise SchemaMismatch(f"row 1, column {missing[0]!r}: missing column")
        if extra:
            raise SchemaMismatch(f"row 1, column {extra[0]!r}: unexpected column")
        names = schema.names
    else:
        names = tuple(feature_cols)

    col_at = {h: i for i, h in enumerate(header)}
    X = np.empty((len(rows), len(names)))
    y = np.empty(len(rows), dtype=np.int64)
    ids = [] if has_id else None
    for r, cells in enumerate(rows):
        line = r + 2
        if len(cells) != len(header):
            raise SchemaMismatch(f"row {line}: expected {len(header)} cells, got {len(cells)}")
        for j, name in enumerate(names):
            cell = cells[col_at[name]].strip()
            if cell == "":
                raise BadValue(f"row {line}, column {name!r}: missing value")
            X[r, j] = _parse_cell(cell, line, name)
        lab = cells[col_at[label]].strip()
        try:
            lab_value = float(lab)
        except ValueError:
            lab_value = math.nan
        if lab_value not in (0.0, 1.0):
            raise BadLabel(f"row {line}, column {label!r}: label {lab!r} not in {{0, 1}}")
        y[r] = int(lab_value)
        if ids is not None:
            ids.append(cells[col_at[ID_COLUMN]].strip())

    if schema is None:
        kinds = tuple(
            REFERENCE_KINDS.get(n) or infer_kind(X[:, j]) for j, n in enumerate(names)
        )
        schema = FeatureSchema(names, kinds, label)
    d = Dataset(schema, X, y, tuple(ids) if ids is not None else None)
    return d.with_inverted_labels() if invert_labels else d


def _format_value(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_csv(d: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ([ID_COLUMN] if d.ids is not None else []) + list(d.schema.names) + [d.schema.label]
        w.writerow(header)
        for i in range(len(d)):
            row = [d.ids[i]] if d.ids is not None else []
            row += [_format_value(v) for v in d.X[i]]
            row.append(str(int(d.y[i])))
            w.writerow(row)


def split_dataset(d: Dataset, train_fraction: float = 0.7, seed: int = 42) -> tuple[Dataset, Dataset]:
    """Shuffle with ``numpy.random.default_rng(seed)`` and cut at floor(fraction * n)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(d)
    if n < 2:
        raise EmptyDataset(f"need at least 2 rows to split, got {n}")
    # guard against 0.29 * 100 == 28.999999999999996
    n_train = math.floor(train_fraction * n + 1e-9)
    if n_train == 0 or n_train == n:
        raise EmptyDataset(f"split of {n} rows at {train_fraction} leaves an empty side")
    order = np.random.default_rng(seed).permutation(n)
    return d.take(order[:n_train]), d.take(order[n_train:])


def equal_frequency_edges(values: np.ndarray, bins: int) -> np.ndarray:
    """Interior cut points so each bin holds about len(values) / bins rows."""
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    if n == 0:
        return np.empty(0)
    cuts = [v[(k * n) // bins] for k in range(1, bins)]
    edges = np.unique(np.asarray(cuts))
    return edges[edges > v[0]]


def discretize(d: Dataset, bins: int = 10) -> DiscreteDataset:
    """Replace every cell with a small bin index.

    Binary and ternary columns keep one bin per distinct value; count and
    fraction columns get equal-frequency bins over the column.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    codes = np.empty(d.X.shape, dtype=np.int64)
    edges: dict[str, np.ndarray] = {}
    counts = []
    for j, (name, kind) in enumerate(zip(d.schema.names, d.schema.kinds)):
        col = d.X[:, j]
        if kind in ("binary", "ternary"):
            cats, idx = np.unique(col, return_inverse=True)
            codes[:, j] = idx.reshape(-1)
            edges[name] = cats
            counts.append(max(len(cats), 1))
        else:
            e = equal_frequency_edges(col, bins)
            codes[:, j] = np.searchsorted(e, col, side="right")
            edges[name] = e
            counts.append(len(e) + 1)
    codes.setflags(write=False)
    return DiscreteDataset(d.schema, codes, d.y, edges, tuple(counts))


def project(d: Dataset, features) -> Dataset:
    features = list(features)
    idx = [d.schema.index(f) for f in features]
    return Dataset(d.schema.subset(features), d.X[:, idx], d.y, d.ids)


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        safe = np.where(self.scale > 0, self.scale, 1.0)
        Z = (np.asarray(X, dtype=float) - self.mean) / safe
        Z[:, self.scale == 0] = 0.0
        return Z


def standardize(train: Dataset, test: Dataset | None = None):
    """z-score both splits with mean and (population) spread from ``train``.

    Zero-spread features map to 0. Returns ``(train', test', params)``.
    """
    if len(train) == 0:
        raise EmptyDataset("cannot standardize on an empty training set")
    # ptp test: a constant column's float std can come out as 1e-17, not 0
    spread = np.where(np.ptp(train.X, axis=0) > 0, train.X.std(axis=0), 0.0)
    params = Standardizer(train.X.mean(axis=0), spread)
    tr = Dataset(train.schema, params.transform(train.X), train.y, train.ids)
    te = None
    if test is not None:
        te = Dataset(test.schema, params.transform(test.X), test.y, test.ids)
    return tr, te, params
