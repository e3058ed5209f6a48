"""Numerical checks for the structural claims about the epsilon-orthogonal
weights: orthogonality, column-sum bounds, near-constant row/column sums,
angle preservation, and the positive-signal-propagation experiment.

Every check returns a PropReport; checks that combine several bounds report
the largest slack-normalized violation against a bound of 1.0, with the raw
components in metadata.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .initializers import RngStream, q_epsilon_fast, random_orthogonal, w_epsilon
from .linalg import DimensionError, as_matrix

FIGURE1_ROWS = 200
FIGURE1_COLS = 100
FIGURE1_TRIALS = 25
FIGURE1_GAUSS_W_STD = 0.1

PROP_FIELDS = ("name", "max_violation", "bound", "passed", "metadata")
SIGNAL_FIELDS = ("positive_fraction", "mean_in", "mean_out", "cos_in", "cos_out")


@dataclass(frozen=True)
class PropReport:
    name: str
    max_violation: float
    bound: float
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.bound

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_violation": self.max_violation,
            "bound": self.bound,
            "passed": self.passed,
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class SignalStats:
    positive_fraction: float
    mean_in: float
    mean_out: float
    cos_in: float
    cos_out: float

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in SIGNAL_FIELDS}


def harmonic(k: int) -> float:
    return sum(1.0 / i for i in range(1, k + 1))


def check_orthogonality(w, bound: float = 1e-9) -> PropReport:
    """Gram residual of the taller orientation of w against the identity."""
    w = as_matrix(w)
    g = w if w.shape[0] >= w.shape[1] else w.T
    resid = np.max(np.abs(g.T @ g - np.eye(g.shape[1])))
    return PropReport(
        name="orthogonality",
        max_violation=float(resid),
        bound=bound,
        metadata={"rows": w.shape[0], "cols": w.shape[1]},
    )


def check_q_column_sums(m: int, eps: float) -> PropReport:
    """Column sums of the orthogonal factor.

    The first column sum equals (m + eps)/sqrt(eps^2 + 2*eps + m) (checked
    to 1e-10); every later column sum is bounded by eps, with the refined
    bound eps/sqrt(j - 1).
    """
    if m < 2:
        raise DimensionError(f"m must be >= 2, got {m}")
    q = q_epsilon_fast(m, eps)
    sums = q.sum(axis=0)
    closed_form = (m + eps) / math.sqrt(eps * eps + 2.0 * eps + m)
    first_dev = abs(sums[0] - closed_form)
    j = np.arange(2, m + 1)
    tail = np.abs(sums[1:])
    ratio_plain = float(np.max(tail / eps))
    ratio_refined = float(np.max(tail * np.sqrt(j - 1) / eps))
    violation = max(first_dev / 1e-10, ratio_plain, ratio_refined)
    return PropReport(
        name="q_column_sums",
        max_violation=violation,
        bound=1.0,
        metadata={
            "m": m,
            "eps": eps,
            "first_column_sum": float(sums[0]),
            "closed_form": closed_form,
            "first_deviation": float(first_dev),
            "max_tail_sum": float(np.max(tail)),
        },
    )


def check_w_sum_constancy(m: int, n: int, eps: float) -> PropReport:
    """Row and column sums of the weight matrix stay within eps*sqrt(H_{s-1})
    of their rank-one leading term."""
    s = min(m, n)
    if s < 2:
        raise DimensionError(f"min(m, n) must be >= 2, got {s}")
    w = w_epsilon(m, n, eps)
    q1 = q_epsilon_fast(m, eps)[:, 0]
    qh1 = q_epsilon_fast(n, eps)[:, 0]
    slack = eps * math.sqrt(harmonic(s - 1))
    col_dev = np.max(np.abs(w.sum(axis=0) - qh1 * q1.sum()))
    row_dev = np.max(np.abs(w.sum(axis=1) - q1 * qh1.sum()))
    violation = float(max(col_dev, row_dev) / slack)
    return PropReport(
        name="w_sum_constancy",
        max_violation=violation,
        bound=1.0,
        metadata={
            "m": m,
            "n": n,
            "eps": eps,
            "column_deviation": float(col_dev),
            "row_deviation": float(row_dev),
            "slack": slack,
        },
    )


def check_a_column_angle(m: int, eps: float) -> PropReport:
    """Angle between any column of the ones-plus-epsilon matrix and the ones
    vector: closed form (m + eps)/(sqrt(m) sqrt(m + 2*eps + eps^2)) within
    1e-12, and its second-order expansion 1 - (m-1)/(2 m^2) eps^2 within a
    10*eps^3 slack."""
    if m < 1:
        raise DimensionError(f"m must be >= 1, got {m}")
    a = np.ones(m)
    a[0] += eps
    computed = (a @ np.ones(m)) / (np.linalg.norm(a) * math.sqrt(m))
    closed_form = (m + eps) / (math.sqrt(m) * math.sqrt(m + 2.0 * eps + eps * eps))
    expansion = 1.0 - (m - 1) / (2.0 * m * m) * eps * eps
    dev_closed = abs(computed - closed_form)
    dev_expansion = abs(computed - expansion)
    violation = max(dev_closed / 1e-12, dev_expansion / (10.0 * eps**3))
    return PropReport(
        name="a_column_angle",
        max_violation=float(violation),
        bound=1.0,
        metadata={
            "m": m,
            "eps": eps,
            "computed": float(computed),
            "closed_form": closed_form,
            "expansion": expansion,
        },
    )


def signal_propagate(w, x) -> SignalStats:
    """Means, cosines against the ones vector, and the strictly-positive
    fraction of the mapped signal."""
    w = as_matrix(w)
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if w.shape[1] != x.shape[0]:
        raise DimensionError(
            f"matrix has {w.shape[1]} columns but signal has dim {x.shape[0]}"
        )
    y = w @ x
    n_in, n_out = x.shape[0], y.shape[0]
    norm_x = np.linalg.norm(x)
    norm_y = np.linalg.norm(y)
    return SignalStats(
        positive_fraction=float(np.count_nonzero(y > 0) / n_out),
        mean_in=float(x.sum() / n_in),
        mean_out=float(y.sum() / n_out),
        cos_in=float(x.sum() / (norm_x * math.sqrt(n_in))) if norm_x > 0 else 0.0,
        cos_out=float(y.sum() / (norm_y * math.sqrt(n_out))) if norm_y > 0 else 0.0,
    )


def _figure1_matrices(eps: float, seed: int) -> dict:
    gauss = RngStream(seed, 1).normal(FIGURE1_GAUSS_W_STD, (FIGURE1_ROWS, FIGURE1_COLS))
    orth = random_orthogonal(FIGURE1_ROWS, FIGURE1_COLS, RngStream(seed, 2))
    return {
        "proposed": w_epsilon(FIGURE1_ROWS, FIGURE1_COLS, eps),
        "gaussian": gauss,
        "orthogonal": orth,
    }


def run_figure1(eps: float = 0.1, seed: int = 0) -> list[dict]:
    """Positive-signal-propagation grid: three 200x100 matrices, two input
    distributions, 25 trials each.

    Returns one row per trial with keys matrix, distribution, trial, and the
    SignalStats fields. Per-trial signals come from streams split on
    (seed, matrix, distribution, trial).
    """
    rows = []
    matrices = _figure1_matrices(eps, seed)
    for mi, (mname, w) in enumerate(matrices.items()):
        for di, dist in enumerate(("gaussian", "uniform")):
            for trial in range(FIGURE1_TRIALS):
                rng = RngStream(seed, 100 + mi, di, trial)
                if dist == "gaussian":
                    x = rng.normal(0.25, FIGURE1_COLS) + 0.5
                else:
                    x = rng.uniform(FIGURE1_COLS)
                stats = signal_propagate(w, x)
                rows.append(
                    {"matrix": mname, "distribution": dist, "trial": trial}
                    | stats.to_dict()
                )
    return rows


def write_reports_jsonl(reports, path) -> None:
    with open(path, "w") as fh:
        for rep in reports:
            fh.write(json.dumps(rep.to_dict()))
            fh.write("\n")


def write_rows_csv(rows, fieldnames, path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(row[f]) for f in fieldnames) + "\n")


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)
