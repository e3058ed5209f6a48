"""Deterministic epsilon-orthogonal weight initialization for deep and
narrow feedforward ReLU networks, plus baseline initializers, numerical
property checks, and a small training harness."""

from .initializers import (
    InitMethod,
    RngStream,
    init_weights,
    parse_method,
    q_epsilon_fast,
    q_epsilon_naive,
    w_epsilon,
)
from .linalg import QrPair, gram_schmidt_qr, hadamard, j_epsilon, matmul
from .nn import Network, NetworkConfig, TrainConfig, build, train
from .props import PropReport, SignalStats, run_figure1, signal_propagate

__all__ = [
    "InitMethod",
    "Network",
    "NetworkConfig",
    "PropReport",
    "QrPair",
    "RngStream",
    "SignalStats",
    "TrainConfig",
    "build",
    "gram_schmidt_qr",
    "hadamard",
    "init_weights",
    "j_epsilon",
    "matmul",
    "parse_method",
    "q_epsilon_fast",
    "q_epsilon_naive",
    "run_figure1",
    "signal_propagate",
    "train",
    "w_epsilon",
]

__version__ = "0.1.0"
