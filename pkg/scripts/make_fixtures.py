#!/usr/bin/env python3
"""Build the local dataset fixtures used by the test suite and the
experiment scripts.

Writes, under fixtures/:
  iris.csv                      four-feature iris table with a species column
  digits/train-images-idx3-ubyte  8x8 digits as an IDX image file
  digits/train-labels-idx1-ubyte  matching IDX label file

The digits pair is a small stand-in with the same on-disk format as the
standard handwritten-digit benchmark; drop the real IDX files under
fixtures/mnist/ to enable the full-size experiments.
"""

import struct
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits, load_iris

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

IRIS_COLUMNS = ("sepal_length", "sepal_width", "petal_length", "petal_width")


def write_idx(images: np.ndarray, labels: np.ndarray, out_dir: Path) -> None:
    n, rows, cols = images.shape
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "train-images-idx3-ubyte", "wb") as fh:
        fh.write(struct.pack(">iiii", 0x00000803, n, rows, cols))
        fh.write(images.astype(np.uint8).tobytes())
    with open(out_dir / "train-labels-idx1-ubyte", "wb") as fh:
        fh.write(struct.pack(">ii", 0x00000801, n))
        fh.write(labels.astype(np.uint8).tobytes())


def make_iris_csv(path: Path) -> None:
    bundle = load_iris()
    names = [str(t) for t in bundle.target_names]
    with open(path, "w") as fh:
        fh.write(",".join((*IRIS_COLUMNS, "species")) + "\n")
        for row, target in zip(bundle.data, bundle.target):
            cells = ",".join(f"{x:g}" for x in row)
            fh.write(f"{cells},{names[target]}\n")


def make_digits_idx(out_dir: Path) -> None:
    bundle = load_digits()
    # pixels are 0..16; scale onto the byte range the IDX loader expects
    images = np.round(bundle.images * (255.0 / 16.0)).astype(np.uint8)
    write_idx(images, bundle.target, out_dir)


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    make_iris_csv(FIXTURES / "iris.csv")
    make_digits_idx(FIXTURES / "digits")
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
