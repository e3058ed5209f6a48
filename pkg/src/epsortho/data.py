"""Dataset ingestion and preparation: IDX image files, schema-driven CSV
tables, stratified train/validation splitting, per-class subsampling, and a
synthetic separable generator for optimizer sanity checks.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, replace

import numpy as np

from .initializers import RngStream

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


class IdxParseError(ValueError):
    """Malformed IDX file (bad magic, truncation, or count mismatch)."""


class CsvParseError(ValueError):
    """Malformed tabular file (missing column or non-numeric cell)."""


@dataclass(frozen=True)
class CsvSchema:
    feature_columns: tuple
    label_column: str


IRIS_SCHEMA = CsvSchema(
    feature_columns=("sepal_length", "sepal_width", "petal_length", "petal_width"),
    label_column="species",
)

WINE_SCHEMA = CsvSchema(
    feature_columns=(
        "fixed acidity",
        "volatile acidity",
        "citric acid",
        "residual sugar",
        "chlorides",
        "free sulfur dioxide",
        "total sulfur dioxide",
        "density",
        "pH",
        "sulphates",
        "alcohol",
    ),
    label_column="quality",
)


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    num_classes: int
    train_idx: np.ndarray
    val_idx: np.ndarray
    stratified: bool = True

    def __post_init__(self):
        if not np.all(np.isfinite(self.features)):
            raise ValueError("dataset features contain non-finite values")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise ValueError("labels out of range")
        joint = np.concatenate([self.train_idx, self.val_idx])
        if len(np.unique(joint)) != len(joint):
            raise ValueError("train/validation splits overlap")

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SubsampleSpec:
    per_class: object = "all"  # positive int or "all"
    seed: int = 0

    def __post_init__(self):
        if self.per_class != "all" and (
            not isinstance(self.per_class, int) or self.per_class < 1
        ):
            raise ValueError(f"per_class must be a positive int or 'all'")


def _unsplit(features, labels, num_classes) -> Dataset:
    return Dataset(
        features=features,
        labels=labels,
        num_classes=num_classes,
        train_idx=np.arange(len(labels)),
        val_idx=np.arange(0),
    )


def _read_idx_header(fh, path, expected_magic, kind):
    head = fh.read(4)
    if len(head) < 4:
        raise IdxParseError(f"{path}: truncated before magic number")
    (magic,) = struct.unpack(">i", head)
    if magic != expected_magic:
        raise IdxParseError(
            f"{path}: bad {kind} magic number 0x{magic:08x}, "
            f"expected 0x{expected_magic:08x}"
        )
    ndim = magic & 0xFF
    raw = fh.read(4 * ndim)
    if len(raw) < 4 * ndim:
        raise IdxParseError(f"{path}: truncated dimension header")
    return struct.unpack(f">{ndim}i", raw)


def load_idx(images_path, labels_path) -> Dataset:
    """Load an IDX image/label pair; pixels scaled to [0, 1], labels 0-9.

    The result is unsplit (all rows in the training index); apply split()
    afterwards.
    """
    with open(images_path, "rb") as fh:
        count, rows, cols = _read_idx_header(fh, images_path, IDX_IMAGES_MAGIC, "image")
        body = fh.read(count * rows * cols)
        if len(body) < count * rows * cols:
            raise IdxParseError(f"{images_path}: truncated pixel data")
        pixels = np.frombuffer(body, dtype=np.uint8).reshape(count, rows * cols)
    with open(labels_path, "rb") as fh:
        (label_count,) = _read_idx_header(fh, labels_path, IDX_LABELS_MAGIC, "label")
        body = fh.read(label_count)
        if len(body) < label_count:
            raise IdxParseError(f"{labels_path}: truncated label data")
        labels = np.frombuffer(body, dtype=np.uint8).astype(np.int64)
    if label_count != count:
        raise IdxParseError(
            f"label count {label_count} does not match image count {count}"
        )
    return _unsplit(pixels.astype(np.float64) / 255.0, labels, 10)


def load_csv(
    path,
    schema: CsvSchema,
    val_fraction: float = 0.15,
    seed: int = 0,
    standardize: bool = True,
) -> Dataset:
    """Load a header-row CSV per the schema.

    Labels are densely re-indexed in sorted order of the distinct raw
    values. The dataset is split stratified by class, then each feature is
    standardized to zero mean / unit variance over the training rows
    (constant features map to zeros).
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (*schema.feature_columns, schema.label_column):
            if col not in header:
                raise CsvParseError(f"{path}: missing column {col!r}")
        features = []
        raw_labels = []
        for rownum, row in enumerate(reader, start=2):
            vals = []
            for col in schema.feature_columns:
                try:
                    vals.append(float(row[col]))
                except (TypeError, ValueError):
                    raise CsvParseError(
                        f"{path}: non-numeric cell at row {rownum}, column {col!r}: "
                        f"{row[col]!r}"
                    ) from None
            features.append(vals)
            raw_labels.append(row[schema.label_column])
    if not features:
        raise CsvParseError(f"{path}: no data rows")
    distinct = sorted(set(raw_labels))
    label_map = {v: i for i, v in enumerate(distinct)}
    ds = _unsplit(
        np.asarray(features, dtype=np.float64),
        np.asarray([label_map[v] for v in raw_labels], dtype=np.int64),
        len(distinct),
    )
    ds = split(ds, val_fraction=val_fraction, seed=seed)
    if standardize:
        ds = standardize_by_train(ds)
    return ds


def standardize_by_train(dataset: Dataset) -> Dataset:
    """Zero-mean unit-variance per feature, statistics from the training split."""
    train = dataset.features[dataset.train_idx]
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    feats = (dataset.features - mean) / scale
    feats[:, std == 0] = 0.0
    return replace(dataset, features=feats)


def split(dataset: Dataset, val_fraction: float = 0.15, seed: int = 0) -> Dataset:
    """Stratified random train/validation split over all rows.

    The total validation size is round(val_fraction * n); class quotas are
    apportioned by largest remainder so each class's share is within one
    sample of val_fraction. Classes with fewer than 2 samples trigger an
    unstratified fallback, flagged on the result.
    """
    if not 0 < val_fraction < 1:
        raise ValueError(f"val_fraction must be in (0, 1), got {val_fraction}")
    n = len(dataset.labels)
    n_val = int(round(val_fraction * n))
    rng = RngStream(seed, 17)
    counts = np.bincount(dataset.labels, minlength=dataset.num_classes)
    if np.any(counts[counts > 0] < 2):
        order = rng.permutation(n)
        return replace(
            dataset, val_idx=np.sort(order[:n_val]), train_idx=np.sort(order[n_val:]),
            stratified=False,
        )
    quotas = val_fraction * counts
    take = np.floor(quotas).astype(int)
    remainder = quotas - take
    shortfall = n_val - take.sum()
    if shortfall > 0:
        for cls in np.argsort(-remainder, kind="stable")[:shortfall]:
            take[cls] += 1
    elif shortfall < 0:
        for cls in np.argsort(remainder, kind="stable")[: -shortfall]:
            if take[cls] > 0:
                take[cls] -= 1
    val_parts = []
    train_parts = []
    for cls in range(dataset.num_classes):
        rows = np.flatnonzero(dataset.labels == cls)
        order = rows[rng.permutation(len(rows))]
        val_parts.append(order[: take[cls]])
        train_parts.append(order[take[cls] :])
    return replace(
        dataset,
        val_idx=np.sort(np.concatenate(val_parts)),
        train_idx=np.sort(np.concatenate(train_parts)),
        stratified=True,
    )


def subsample(dataset: Dataset, spec: SubsampleSpec) -> Dataset:
    """Reduce the training split to k seeded rows per class; validation
    rows are untouched."""
    if spec.per_class == "all":
        return dataset
    rng = RngStream(spec.seed, 23)
    kept = []
    train_labels = dataset.labels[dataset.train_idx]
    for cls in range(dataset.num_classes):
        rows = dataset.train_idx[np.flatnonzero(train_labels == cls)]
        order = rows[rng.permutation(len(rows))]
        kept.append(order[: spec.per_class])
    return replace(dataset, train_idx=np.sort(np.concatenate(kept)))


def synth_separable(n: int, dim: int, margin: float, seed: int = 0) -> Dataset:
    """Two unit-variance Gaussian blobs centered +-margin apart along a
    seeded random direction; labels 0/1. Unsplit."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not margin > 0:
        raise ValueError(f"margin must be > 0, got {margin}")
    rng = RngStream(seed, 31)
    direction = rng.normal(1.0, dim)
    direction /= np.linalg.norm(direction)
    labels = np.arange(n) % 2
    noise = rng.normal(1.0, (n, dim))
    signs = np.where(labels == 0, -1.0, 1.0)
    features = noise + margin * signs[:, None] * direction
    return _unsplit(features, labels.astype(np.int64), 2)


def save_split_csv(dataset: Dataset, path, which: str = "train") -> None:
    """Write one split as CSV (f0..fD-1 feature columns plus label), with
    17-significant-digit values for exact round trips."""
    idx = dataset.train_idx if which == "train" else dataset.val_idx
    with open(path, "w") as fh:
        cols = [f"f{i}" for i in range(dataset.feature_dim)]
        fh.write(",".join(cols + ["label"]) + "\n")
        for i in idx:
            row = ",".join(f"{x:.17g}" for x in dataset.features[i])
            fh.write(f"{row},{dataset.labels[i]}\n")


def load_split_csv(path) -> Dataset:
    """Reload a file written by save_split_csv, without standardization."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    if header[-1] != "label":
        raise CsvParseError(f"{path}: expected trailing 'label' column")
    features = np.asarray([[float(x) for x in r[:-1]] for r in rows])
    labels = np.asarray([int(r[-1]) for r in rows], dtype=np.int64)
    return _unsplit(features, labels, int(labels.max()) + 1)
