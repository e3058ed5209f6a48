"""Weight initializers: the deterministic epsilon-orthogonal construction and
seven baselines (Xavier, He, random orthogonal, identity, ZerO, RAI, GSM)
behind a single dispatch.

Stochastic initializers draw from counter-based Philox streams so that a
given (seed, layer) pair reproduces bit-identical matrices on any platform.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .linalg import DimensionError, gram_schmidt_qr, hadamard, j_epsilon

KINDS = ("proposed", "xavier", "he", "orthogonal", "identity", "zero", "rai", "gsm")
DETERMINISTIC_KINDS = ("proposed", "identity", "zero")

DEFAULT_EPS = 0.1

# sigma of the RAI gaussian component: -(2*sqrt(2))/(3*sqrt(pi)) + sqrt(1 + 8/(9*pi))
RAI_STD = -(2.0 * math.sqrt(2.0)) / (3.0 * math.sqrt(math.pi)) + math.sqrt(
    1.0 + 8.0 / (9.0 * math.pi)
)


class ConfigError(ValueError):
    """Malformed initializer specification string."""


@dataclass(frozen=True)
class InitMethod:
    kind: str
    eps: float = DEFAULT_EPS
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown initializer kind {self.kind!r}")
        if self.kind == "proposed" and not self.eps > 0:
            raise ConfigError(f"eps must be > 0, got {self.eps}")

    @property
    def deterministic(self) -> bool:
        return self.kind in DETERMINISTIC_KINDS


_METHOD_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*(.*?)\s*\))?\s*$")


def parse_method(text: str) -> InitMethod:
    """Parse strings like ``proposed(eps=0.1)``, ``he(seed=42)``, ``zero``."""
    m = _METHOD_RE.match(text.lower())
    if not m:
        raise ConfigError(f"cannot parse initializer spec {text!r}")
    kind, args = m.group(1), m.group(2)
    kwargs = {}
    if args:
        for pair in args.split(","):
            if "=" not in pair:
                raise ConfigError(f"expected key=value in {text!r}, got {pair!r}")
            key, value = (tok.strip() for tok in pair.split("=", 1))
            if key == "eps":
                kwargs["eps"] = float(value)
            elif key == "seed":
                kwargs["seed"] = int(value)
            else:
                raise ConfigError(f"unknown parameter {key!r} in {text!r}")
    return InitMethod(kind=kind, **kwargs)


def method_label(method: InitMethod) -> str:
    """Inverse of parse_method, used when writing experiment rows."""
    if method.kind == "proposed":
        return f"proposed(eps={method.eps:g})"
    if method.deterministic:
        return method.kind
    return f"{method.kind}(seed={method.seed})"


class RngStream:
    """Counter-based random stream, splittable by an integer path.

    Wraps Philox keyed on (seed, path hash). Gaussian variates use the
    inverse normal CDF applied to 53-bit uniforms, so the sequence is
    reproducible bit-for-bit across platforms.
    """

    def __init__(self, seed: int, *path: int):
        sub = np.uint64(0x9E3779B97F4A7C15)
        for p in path:
            sub = np.uint64((int(sub) * 0x100000001B3 + int(p) + 1) % (1 << 64))
        self._gen = np.random.Generator(
            np.random.Philox(key=np.array([seed % (1 << 64), int(sub)], dtype=np.uint64))
        )

    def uniform(self, size=None) -> np.ndarray:
        """Uniforms strictly inside (0, 1)."""
        bits = self._gen.integers(0, 1 << 53, size=size, dtype=np.int64)
        return (bits + 0.5) / float(1 << 53)

    def normal(self, std: float, size=None) -> np.ndarray:
        return std * ndtri(self.uniform(size))

    def beta21(self, size=None) -> np.ndarray:
        # Beta(2,1) has CDF x^2 on [0,1]
        return np.sqrt(self.uniform(size))

    def integers(self, high: int, size=None):
        return self._gen.integers(0, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def q_epsilon_naive(m: int, eps: float) -> np.ndarray:
    """Orthogonal factor of the ones-plus-epsilon matrix via Gram-Schmidt QR."""
    return gram_schmidt_qr(j_epsilon(m, eps)).q


def q_epsilon_fast(m: int, eps: float) -> np.ndarray:
    """Same orthogonal factor in O(m^2) work.

    The Gram-Schmidt recurrence for this family,

        u_1 = 1 + eps*e_1,
        u_j = (1 - <u_{j-1}, 1 + eps*e_j> / <u_{j-1}, u_{j-1}>) u_{j-1}
              + eps*(e_j - e_{j-1}),

    preserves the pattern u_j = (a, ..., a, b, c, ..., c) with j-1 leading
    a's, and solving the recurrence for the three scalars gives

        c = eps^2 / (k*m + 2*k*eps + eps^2),  k = j - 1,
        b = c + eps,
        a = c + eps*(c - 1)/k.

    Evaluating the closed form per column avoids the cancellation that makes
    the literal vector recurrence lose accuracy at small eps.
    """
    if m < 1:
        raise DimensionError(f"m must be >= 1, got {m}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    q = np.empty((m, m))
    u1 = np.ones(m)
    u1[0] += eps
    q[:, 0] = u1 / np.linalg.norm(u1)
    for j in range(2, m + 1):
        k = j - 1
        c = eps * eps / (k * m + 2.0 * k * eps + eps * eps)
        b = c + eps
        a = c + eps * (c - 1.0) / k
        norm = math.sqrt(k * a * a + b * b + (m - j) * c * c)
        q[: j - 1, j - 1] = a / norm
        q[j - 1, j - 1] = b / norm
        q[j:, j - 1] = c / norm
    return q


def w_epsilon(m: int, n: int, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Deterministic m x n epsilon-orthogonal weight matrix.

    Sum of rank-one products of the first min(m, n) columns of the two
    orthogonal factors, with the sign of the last term flipped for
    rectangular shapes. The flip matches the Householder-QR sign convention
    used to produce the published reference matrices; it leaves
    orthogonality, near-constant row/column sums, and the composition
    identity intact.
    """
    if m < 1 or n < 1:
        raise DimensionError(f"dimensions must be >= 1, got {m}x{n}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if m == n:
        return np.eye(m)
    s = min(m, n)
    qm = q_epsilon_fast(m, eps)[:, :s]
    qn = q_epsilon_fast(n, eps)[:, :s]
    w = qm @ qn.T
    if s > 1:
        w -= 2.0 * np.outer(qm[:, s - 1], qn[:, s - 1])
    return w


def identity_init(m: int, n: int) -> np.ndarray:
    w = np.zeros((m, n))
    np.fill_diagonal(w, 1.0)
    return w


def zero_init(m: int, n: int) -> np.ndarray:
    """Deterministic identity/Hadamard baseline.

    Partial identity when not expanding (m <= n); otherwise the first n
    columns of the order-2**p Hadamard matrix scaled by 2**(-(p-1)/2), with
    p = ceil(log2(m)), clipped to m rows.
    """
    if m <= n:
        return identity_init(m, n)
    p = max(1, math.ceil(math.log2(m)))
    h = hadamard(p)
    return 2.0 ** (-(p - 1) / 2.0) * h[:m, :n]


def xavier_init(m: int, n: int, rng: RngStream) -> np.ndarray:
    return rng.normal(math.sqrt(2.0 / (m + n)), (m, n))


def he_init(m: int, n: int, rng: RngStream) -> np.ndarray:
    return rng.normal(math.sqrt(2.0 / n), (m, n))


def rai_init(m: int, n: int, rng: RngStream) -> np.ndarray:
    """Gaussian weights with one asymmetric Beta(2,1) entry per row."""
    w = rng.normal(RAI_STD, (m, n))
    cols = rng.integers(n, size=m)
    w[np.arange(m), cols] = rng.beta21(m)
    return w


def gsm_init(m: int, n: int, rng: RngStream) -> np.ndarray:
    """Sign-paired block duplication [[W0, -W0], [-W0, W0]] of a He submatrix.

    Blocks are built at ceil(m/2) x ceil(n/2) and cropped for odd dims.
    """
    mh, nh = (m + 1) // 2, (n + 1) // 2
    w0 = he_init(mh, nh, rng)
    full = np.block([[w0, -w0], [-w0, w0]])
    return full[:m, :n]


def random_orthogonal(m: int, n: int, rng: RngStream) -> np.ndarray:
    """QR-based random matrix with orthonormal columns (rows when n > m)."""
    if n > m:
        return random_orthogonal(n, m, rng).T
    g = rng.normal(1.0, (m, n))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def init_weights(method: InitMethod, m: int, n: int) -> np.ndarray:
    """Build an m x n weight matrix for the given method.

    Stochastic methods derive their stream from (method.seed, m, n) so that
    distinct layer shapes in one network get independent draws.
    """
    if m < 1 or n < 1:
        raise DimensionError(f"dimensions must be >= 1, got {m}x{n}")
    kind = method.kind
    if kind == "proposed":
        return w_epsilon(m, n, method.eps)
    if kind == "identity":
        return identity_init(m, n)
    if kind == "zero":
        return zero_init(m, n)
    rng = RngStream(method.seed, m, n)
    if kind == "xavier":
        return xavier_init(m, n, rng)
    if kind == "he":
        return he_init(m, n, rng)
    if kind == "orthogonal":
        return random_orthogonal(m, n, rng)
    if kind == "rai":
        return rai_init(m, n, rng)
    if kind == "gsm":
        return gsm_init(m, n, rng)
    raise ConfigError(f"unsupported initializer kind {kind!r}")
