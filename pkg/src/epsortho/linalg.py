"""Dense matrix helpers: the ones-plus-epsilon family, classical Gram-Schmidt QR,
Sylvester Hadamard matrices, and plain-text CSV interchange.

All matrices are 2-D float64 numpy arrays, treated as immutable by every
public function here (inputs are never modified, outputs are fresh arrays).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_HADAMARD_ORDER = 14


class DimensionError(ValueError):
    """Incompatible or invalid matrix dimensions."""


class DegenerateInputError(ValueError):
    """Input matrix is rank deficient (pivot norm below threshold)."""


RANK_TOLERANCE = 1e-12


@dataclass(frozen=True)
class QrPair:
    """QR factors with the positive-diagonal sign convention.

    q has orthonormal columns; r is upper triangular with strictly positive
    diagonal, which makes the factorization unique and reproducible.
    """

    q: np.ndarray
    r: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Validate and convert input to a 2-D float64 array."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def j_epsilon(m: int, eps: float) -> np.ndarray:
    """All-ones m x m matrix with eps added on the diagonal.

    Positive definite for eps > 0: eigenvalues are m + eps (once) and eps
    (m - 1 times).
    """
    if m < 1:
        raise DimensionError(f"m must be >= 1, got {m}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    return np.ones((m, m)) + eps * np.eye(m)


def gram_schmidt_qr(a) -> QrPair:
    """Classical Gram-Schmidt QR of a square full-rank matrix.

    Columns are orthogonalized in order against the already-normalized q
    vectors with one reorthogonalization pass (CGS2), which keeps the loss
    of orthogonality at machine-precision level even for ill-conditioned
    inputs. No sign flips are applied, so a positive definite input yields
    R with a strictly positive diagonal. Raises DegenerateInputError when a
    pivot norm falls below RANK_TOLERANCE.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m != n:
        raise DimensionError(f"square matrix required, got {m}x{n}")
    q = np.zeros((m, n))
    r = np.zeros((n, n))
    for j in range(n):
        coeff = q[:, :j].T @ a[:, j]
        v = a[:, j] - q[:, :j] @ coeff
        extra = q[:, :j].T @ v
        v -= q[:, :j] @ extra
        r[:j, j] = coeff + extra
        norm = np.linalg.norm(v)
        if norm < RANK_TOLERANCE:
            raise DegenerateInputError(
                f"column {j} is numerically dependent on previous columns "
                f"(residual norm {norm:.3e})"
            )
        r[j, j] = norm
        q[:, j] = v / norm
    return QrPair(q=q, r=r)


def hadamard(p: int) -> np.ndarray:
    """Sylvester-construction Hadamard matrix of order 2**p.

    Built in integer arithmetic (H H^T == 2**p I exactly) and returned as
    float64.
    """
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    if p > MAX_HADAMARD_ORDER:
        raise DimensionError(f"p={p} exceeds the size cap 2**{MAX_HADAMARD_ORDER}")
    h = np.array([[1]], dtype=np.int64)
    base = np.array([[1, 1], [1, -1]], dtype=np.int64)
    for _ in range(p):
        h = np.kron(base, h)
    return h.astype(np.float64)


def save_matrix_csv(a, path) -> None:
    """Write a matrix as CSV, one row per line, 17 significant digits."""
    a = as_matrix(a)
    with open(path, "w") as fh:
        for row in a:
            fh.write(",".join(f"{x:.17g}" for x in row))
            fh.write("\n")


def load_matrix_csv(path) -> np.ndarray:
    """Read a matrix written by save_matrix_csv."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    return as_matrix(rows)
