"""Binary-class datasets: CSV loading, scaling, class split, folds, synthetic fixtures."""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from ._atomic import atomic_write_text
from .errors import EmptyClass, MissingValue, NotBinary, ParseError, TooFewSamples

MISSING_TOKENS = frozenset({"", "?", "na", "nan", "null"})


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray | None
    name: str = "dataset"
    feature_names: list | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain NaN or Inf")
        object.__setattr__(self, "features", X)
        if self.labels is not None:
            y = np.asarray(self.labels).astype(int)
            if y.shape != (X.shape[0],):
                raise ValueError(f"{y.shape[0]} labels for {X.shape[0]} rows")
            if not np.isin(y, (1, 2)).all():
                raise ValueError("labels must be 1 or 2")
            object.__setattr__(self, "labels", y)

    @property
    def m(self):
        return self.features.shape[0]

    @property
    def n(self):
        return self.features.shape[1]

    def subset(self, index):
        labels = None if self.labels is None else self.labels[index]
        return replace(self, features=self.features[index], labels=labels)


def _parse_float(token, line, column, missing):
    tok = token.strip()
    if tok.lower() in MISSING_TOKENS:
        if missing == "drop":
            return None
        raise MissingValue("missing value", line=line, column=column)
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"cannot parse {tok!r} as a number", line=line, column=column) from None


def load_csv(path, delimiter=",", header=False, label_column="last", label_map=None,
             drop_columns=(), missing="error", name=None):
    """Read a delimited text file into a :class:`Dataset`.

    Parameters
    ----------
    label_column : int, "last" or None
        Column holding the class label. ``None`` loads an unlabeled dataset.
    label_map : dict, optional
        Raw label string to ``1`` or ``2``. Without it the two distinct raw
        labels are mapped in sorted order (numerically when both parse).
    drop_columns : iterable of int
        Columns to ignore (e.g. a sample id). Indices refer to the raw file.
    missing : {"error", "drop"}
        Raise :class:`MissingValue` on a missing feature, or drop that row.
    """
    if missing not in ("error", "drop"):
        raise ValueError(f"missing must be 'error' or 'drop', got {missing!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh, delimiter=delimiter), start=1)
                if any(c.strip() for c in r)]
    names = None
    if header and rows:
        names = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")

    width = len(rows[0][1])
    if label_column == "last":
        label_idx = width - 1
    elif label_column is None:
        label_idx = None
    else:
        label_idx = int(label_column) % width
    dropped = {int(c) % width for c in drop_columns}
    feat_cols = [j for j in range(width) if j != label_idx and j not in dropped]

    features, raw_labels = [], []
    for lineno, row in rows:
        if len(row) != width:
            raise ParseError(f"expected {width} columns, found {len(row)}", line=lineno)
        values = [_parse_float(row[j], lineno, j + 1, missing) for j in feat_cols]
        if any(v is None for v in values):
            continue
        features.append(values)
        if label_idx is not None:
            raw = row[label_idx].strip()
            if raw.lower() in MISSING_TOKENS:
                if missing == "drop":
                    features.pop()
                    continue
                raise MissingValue("missing label", line=lineno, column=label_idx + 1)
            raw_labels.append(raw)

    labels = None
    if label_idx is not None:
        labels = _map_labels(raw_labels, label_map)
    feature_names = [names[j] for j in feat_cols] if names else None
    return Dataset(np.array(features, dtype=float).reshape(len(features), len(feat_cols)),
                   labels, name or str(path), feature_names)


def _map_labels(raw, label_map):
    if label_map is not None:
        mapping = {str(k): int(v) for k, v in label_map.items()}
        unknown = sorted(set(raw) - set(mapping))
        if unknown:
            raise NotBinary(f"labels {unknown} are not in label_map")
        if set(mapping.values()) - {1, 2}:
            raise ValueError("label_map values must be 1 or 2")
        return np.array([mapping[r] for r in raw], dtype=int)
    distinct = sorted(set(raw))
    if len(distinct) != 2:
        raise NotBinary(f"expected 2 distinct labels, found {len(distinct)}: {distinct[:5]}")
    try:
        distinct.sort(key=float)
    except ValueError:
        pass
    mapping = {distinct[0]: 1, distinct[1]: 2}
    return np.array([mapping[r] for r in raw], dtype=int)


def save_csv(path, data, delimiter=","):
    """Write features (and labels, last column) losslessly."""
    lines = []
    for i in range(data.m):
        cells = [repr(float(v)) for v in data.features[i]]
        if data.labels is not None:
            cells.append(str(int(data.labels[i])))
        lines.append(delimiter.join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


# -- scaling -------------------------------------------------------------------

@dataclass(frozen=True)
class NormParams:
    kind: str
    shift: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "shift", np.asarray(self.shift, dtype=float))
        object.__setattr__(self, "scale", np.asarray(self.scale, dtype=float))

    def apply(self, X):
        return (np.asarray(X, dtype=float) - self.shift) / self.scale


def normalize_fit(train, kind="minmax"):
    """Per-feature scaling statistics from training rows only.

    ``minmax`` maps the training range onto ``[0, 1]``, ``zscore`` centers and
    divides by the standard deviation, ``none`` is the identity. Constant
    features map to 0 under both non-trivial schemes.
    """
    X = train.features if isinstance(train, Dataset) else np.asarray(train, dtype=float)
    if X.shape[0] < 1:
        raise EmptyClass("cannot fit normalization on an empty dataset")
    n = X.shape[1]
    if kind == "none":
        return NormParams(kind, np.zeros(n), np.ones(n))
    if kind == "minmax":
        lo, hi = X.min(axis=0), X.max(axis=0)
        span = hi - lo
        return NormParams(kind, lo, np.where(span > 0, span, 1.0))
    if kind == "zscore":
        mu, sd = X.mean(axis=0), X.std(axis=0)
        return NormParams(kind, mu, np.where(sd > 0, sd, 1.0))
    raise ValueError(f"unknown normalization {kind!r}")


def normalize_apply(params, data):
    if isinstance(data, Dataset):
        return replace(data, features=params.apply(data.features))
    return params.apply(data)


# -- class split and folds -------------------------------------------------------

def split_classes(data):
    """Rows of class 1 and class 2, each in original order."""
    if data.labels is None:
        raise EmptyClass("dataset is unlabeled")
    A = data.features[data.labels == 1]
    B = data.features[data.labels == 2]
    if len(A) == 0 or len(B) == 0:
        raise EmptyClass(f"class sizes {len(A)} and {len(B)}; both must be non-empty")
    return A, B


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray = field(repr=False)

    def train_test(self, fold):
        test = np.flatnonzero(self.assignments == fold)
        train = np.flatnonzero(self.assignments != fold)
        return train, test

    def to_tsv(self):
        lines = ["sample_index\tfold"]
        lines += [f"{i}\t{f}" for i, f in enumerate(self.assignments)]
        return "\n".join(lines) + "\n"


def make_folds(data, k=10, seed=0):
    """Stratified ``k``-fold assignment.

    Each class is shuffled and dealt round-robin over the folds; the deal for
    class 2 continues where class 1 stopped, so total fold sizes differ by at
    most one and every class is spread as evenly as possible.
    """
    m = data.m
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if m < k:
        raise TooFewSamples(f"{m} samples cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    labels = data.labels if data.labels is not None else np.ones(m, dtype=int)
    assignments = np.empty(m, dtype=int)
    offset = 0
    for cls in (1, 2):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        assignments[idx] = (offset + np.arange(len(idx))) % k
        offset = (offset + len(idx)) % k
    return FoldPlan(k, assignments)


# -- synthetic fixtures -----------------------------------------------------------

def synth_cross_planes(points_per_class=50, noise_sd=0.0, seed=0, extent=1.0):
    """Class 1 along ``y = x``, class 2 along ``y = -x``, symmetric about the origin."""
    rng = np.random.default_rng(seed)
    t = np.linspace(-extent, extent, points_per_class)
    A = np.column_stack([t, t])
    B = np.column_stack([t, -t])
    if noise_sd > 0:
        A = A + rng.normal(0.0, noise_sd, A.shape)
        B = B + rng.normal(0.0, noise_sd, B.shape)
    labels = np.r_[np.ones(points_per_class, dtype=int), np.full(points_per_class, 2)]
    return Dataset(np.vstack([A, B]), labels, "cross_planes")


def synth_blobs(points_per_class=50, n_features=2, separation=10.0, sd=1.0, seed=0):
    """Two isotropic Gaussian clusters whose centers are ``separation * sd`` apart."""
    rng = np.random.default_rng(seed)
    center = np.zeros(n_features)
    center[0] = separation * sd
    A = rng.normal(0.0, sd, (points_per_class, n_features))
    B = center + rng.normal(0.0, sd, (points_per_class, n_features))
    labels = np.r_[np.ones(points_per_class, dtype=int), np.full(points_per_class, 2)]
    return Dataset(np.vstack([A, B]), labels, "blobs")


def synth_xor(points_per_quadrant=1, noise_sd=0.0, seed=0):
    """Four-quadrant XOR: class 1 at (1, 1) and (-1, -1), class 2 at (1, -1) and (-1, 1)."""
    rng = np.random.default_rng(seed)
    protos_a = np.array([[1.0, 1.0], [-1.0, -1.0]])
    protos_b = np.array([[1.0, -1.0], [-1.0, 1.0]])
    A = np.repeat(protos_a, points_per_quadrant, axis=0)
    B = np.repeat(protos_b, points_per_quadrant, axis=0)
    if noise_sd > 0:
        A = A + rng.normal(0.0, noise_sd, A.shape)
        B = B + rng.normal(0.0, noise_sd, B.shape)
    labels = np.r_[np.ones(len(A), dtype=int), np.full(len(B), 2)]
    return Dataset(np.vstack([A, B]), labels, "xor")
