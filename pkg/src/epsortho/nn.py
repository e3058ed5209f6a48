"""Minimal feedforward network with manual backpropagation.

Samples are rows. Layer l maps activations A to A @ W_l^T + b_l with
W_l of shape (N_l, N_{l-1}); hidden layers apply the configured elementwise
activation and the output layer applies softmax with mean cross-entropy
loss. Training is plain mini-batch Adam, single-threaded for determinism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit, ndtr

from .initializers import InitMethod, RngStream, init_weights
from .linalg import DimensionError

ACTIVATIONS = ("relu", "tanh", "sigmoid", "selu", "gelu")

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772

REPORT_FIELDS = ("epoch", "train_loss", "train_acc", "val_acc", "dead_unit_fraction")


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch: int, batch: int, loss: float):
        super().__init__(
            f"non-finite loss {loss} at epoch {epoch}, batch {batch}"
        )
        self.epoch = epoch
        self.batch = batch


@dataclass(frozen=True)
class NetworkConfig:
    layer_dims: tuple
    activation: str = "relu"
    init: InitMethod = InitMethod("proposed")

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        object.__setattr__(self, "layer_dims", dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ValueError(f"layer_dims must be >= 2 positive entries, got {dims}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


@dataclass
class Network:
    config: NetworkConfig
    weights: list
    biases: list


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    learning_rate: float = 0.001
    batch_size: int = 100
    beta1: float = 0.9
    beta2: float = 0.999
    eps_hat: float = 1e-7
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("invalid training configuration")


@dataclass
class TrainReport:
    rows: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(REPORT_FIELDS) + "\n")
            for row in self.rows:
                fh.write(
                    f"{row['epoch']},{row['train_loss']:.17g},"
                    f"{row['train_acc']:.17g},{row['val_acc']:.17g},"
                    f"{row['dead_unit_fraction']:.17g}\n"
                )


def activation_apply(kind: str, z: np.ndarray) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    if kind == "sigmoid":
        return expit(z)
    if kind == "selu":
        return SELU_LAMBDA * np.where(z > 0, z, SELU_ALPHA * np.expm1(z))
    if kind == "gelu":
        return z * ndtr(z)
    raise ValueError(f"unknown activation {kind!r}")


def activation_grad(kind: str, z: np.ndarray) -> np.ndarray:
    if kind == "relu":
        return (z > 0).astype(np.float64)
    if kind == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    if kind == "sigmoid":
        s = expit(z)
        return s * (1.0 - s)
    if kind == "selu":
        return SELU_LAMBDA * np.where(z > 0, 1.0, SELU_ALPHA * np.exp(z))
    if kind == "gelu":
        return ndtr(z) + z * np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    raise ValueError(f"unknown activation {kind!r}")


def build(config: NetworkConfig) -> Network:
    """Initialize weights per the configured method; biases start at zero.

    Stochastic methods get a per-layer seed derived from (seed, layer index)
    so equal-shaped layers draw independent weights.
    """
    dims = config.layer_dims
    weights = []
    biases = []
    for layer in range(len(dims) - 1):
        method = config.init
        if not method.deterministic:
            method = replace(method, seed=method.seed * 1000003 + layer)
        weights.append(init_weights(method, dims[layer + 1], dims[layer]))
        biases.append(np.zeros(dims[layer + 1]))
    return Network(config=config, weights=weights, biases=biases)


def softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(net: Network, batch: np.ndarray):
    """Run the cascade; returns (pre_activations, activations).

    activations[0] is the input batch; the final activation is the softmax
    probability matrix.
    """
    batch = np.atleast_2d(np.asarray(batch, dtype=np.float64))
    if batch.shape[1] != net.config.layer_dims[0]:
        raise DimensionError(
            f"batch has {batch.shape[1]} features, network expects "
            f"{net.config.layer_dims[0]}"
        )
    kind = net.config.activation
    pre = []
    acts = [batch]
    last = len(net.weights) - 1
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = acts[-1] @ w.T + b
        pre.append(z)
        acts.append(softmax_rows(z) if layer == last else activation_apply(kind, z))
    return pre, acts


def backward(net: Network, pre, acts, labels):
    """Gradients of mean cross-entropy w.r.t. every weight and bias.

    Expects the (pre, acts) pair from forward() on the same batch; labels
    are integer class indices.
    """
    labels = np.asarray(labels)
    batch_size = acts[0].shape[0]
    kind = net.config.activation
    delta = acts[-1].copy()
    delta[np.arange(batch_size), labels] -= 1.0
    delta /= batch_size
    grad_w = [None] * len(net.weights)
    grad_b = [None] * len(net.weights)
    for layer in range(len(net.weights) - 1, -1, -1):
        grad_w[layer] = delta.T @ acts[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ net.weights[layer]) * activation_grad(kind, pre[layer - 1])
    return grad_w, grad_b


@dataclass
class AdamState:
    m_w: list
    v_w: list
    m_b: list
    v_b: list


def adam_state_init(net: Network) -> AdamState:
    return AdamState(
        m_w=[np.zeros_like(w) for w in net.weights],
        v_w=[np.zeros_like(w) for w in net.weights],
        m_b=[np.zeros_like(b) for b in net.biases],
        v_b=[np.zeros_like(b) for b in net.biases],
    )


def adam_step(net: Network, grads, state: AdamState, t: int, cfg: TrainConfig) -> None:
    """One in-place Adam update with bias correction; t counts from 1."""
    if t < 1:
        raise ValueError(f"step index must be >= 1, got {t}")
    grad_w, grad_b = grads
    b1, b2, lr, eps = cfg.beta1, cfg.beta2, cfg.learning_rate, cfg.eps_hat
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for i in range(len(net.weights)):
        state.m_w[i] = b1 * state.m_w[i] + (1 - b1) * grad_w[i]
        state.v_w[i] = b2 * state.v_w[i] + (1 - b2) * grad_w[i] ** 2
        net.weights[i] -= lr * (state.m_w[i] / c1) / (np.sqrt(state.v_w[i] / c2) + eps)
        state.m_b[i] = b1 * state.m_b[i] + (1 - b1) * grad_b[i]
        state.v_b[i] = b2 * state.v_b[i] + (1 - b2) * grad_b[i] ** 2
        net.biases[i] -= lr * (state.m_b[i] / c1) / (np.sqrt(state.v_b[i] / c2) + eps)


def cross_entropy(probs: np.ndarray, labels) -> float:
    picked = probs[np.arange(probs.shape[0]), np.asarray(labels)]
    return float(-np.mean(np.log(np.maximum(picked, 1e-300))))


def evaluate(net: Network, features, labels):
    """Mean cross-entropy and accuracy; argmax ties resolve to the lowest index."""
    _, acts = forward(net, features)
    probs = acts[-1]
    preds = probs.argmax(axis=1)
    acc = float(np.mean(preds == np.asarray(labels)))
    return cross_entropy(probs, labels), acc


def dead_unit_fraction(net: Network, features) -> float:
    """Fraction of hidden units whose activation is exactly zero on every sample."""
    _, acts = forward(net, features)
    hidden = acts[1:-1]
    if not hidden:
        return 0.0
    dead = 0
    total = 0
    for a in hidden:
        dead += int(np.sum(np.all(a == 0.0, axis=0)))
        total += a.shape[1]
    return dead / total


def train(net: Network, dataset, cfg: TrainConfig) -> TrainReport:
    """Shuffled mini-batch Adam over the dataset's training split.

    The report starts with an epoch-0 row evaluating the untrained network,
    then one row per epoch. The last partial batch is kept. Deterministic
    given the dataset, configuration, and seeds.
    """
    x_train = dataset.features[dataset.train_idx]
    y_train = dataset.labels[dataset.train_idx]
    x_val = dataset.features[dataset.val_idx]
    y_val = dataset.labels[dataset.val_idx]

    report = TrainReport()

    def record(epoch: int) -> None:
        train_loss, train_acc = evaluate(net, x_train, y_train)
        _, val_acc = evaluate(net, x_val, y_val)
        report.rows.append(
            {
                "epoch": epoch,
                "train_loss": train_loss,
                "train_acc": train_acc,
                "val_acc": val_acc,
                "dead_unit_fraction": dead_unit_fraction(net, x_train),
            }
        )

    record(0)
    state = adam_state_init(net)
    t = 0
    n = x_train.shape[0]
    for epoch in range(1, cfg.epochs + 1):
        order = RngStream(cfg.shuffle_seed, epoch).permutation(n)
        for bi, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            pre, acts = forward(net, x_train[idx])
            loss = cross_entropy(acts[-1], y_train[idx])
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch, bi, loss)
            grads = backward(net, pre, acts, y_train[idx])
            t += 1
            adam_step(net, grads, state, t, cfg)
        record(epoch)
    return report
