"""Shared fixtures: a generated iris CSV, an IDX-format digits pair built
from the 8x8 digits set, and discovery of optional full-size IDX files under
fixtures/mnist/."""

import struct
from pathlib import Path

import numpy as np
import pytest
from sklearn.datasets import load_digits, load_iris

REPO_ROOT = Path(__file__).resolve().parent.parent
MNIST_DIR = REPO_ROOT / "fixtures" / "mnist"

IRIS_COLUMNS = ("sepal_length", "sepal_width", "petal_length", "petal_width")


def write_idx_pair(images: np.ndarray, labels: np.ndarray, out_dir: Path):
    """Write a (n, rows, cols) uint8 image array and labels as an IDX pair;
    returns the two file paths."""
    n, rows, cols = images.shape
    out_dir.mkdir(parents=True, exist_ok=True)
    images_path = out_dir / "train-images-idx3-ubyte"
    labels_path = out_dir / "train-labels-idx1-ubyte"
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">iiii", 0x00000803, n, rows, cols))
        fh.write(images.astype(np.uint8).tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">ii", 0x00000801, n))
        fh.write(labels.astype(np.uint8).tobytes())
    return images_path, labels_path


@pytest.fixture(scope="session")
def iris_csv(tmp_path_factory) -> Path:
    bundle = load_iris()
    names = [str(t) for t in bundle.target_names]
    path = tmp_path_factory.mktemp("iris") / "iris.csv"
    with open(path, "w") as fh:
        fh.write(",".join((*IRIS_COLUMNS, "species")) + "\n")
        for row, target in zip(bundle.data, bundle.target):
            cells = ",".join(f"{x:g}" for x in row)
            fh.write(f"{cells},{names[target]}\n")
    return path


@pytest.fixture(scope="session")
def digits_idx_dir(tmp_path_factory) -> Path:
    bundle = load_digits()
    images = np.round(bundle.images * (255.0 / 16.0)).astype(np.uint8)
    out_dir = tmp_path_factory.mktemp("digits")
    write_idx_pair(images, bundle.target, out_dir)
    return out_dir


def mnist_paths():
    """Paths of user-supplied full-size IDX files, or None when absent."""
    images = MNIST_DIR / "train-images-idx3-ubyte"
    labels = MNIST_DIR / "train-labels-idx1-ubyte"
    if images.exists() and labels.exists():
        return images, labels
    return None
