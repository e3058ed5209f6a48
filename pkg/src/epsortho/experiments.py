"""Experiment grids: a small spec format (key=value sections), built-in
grids mirroring the benchmark tables and figures, and a runner that trains
every (method, network, per-class size, seed) cell and writes a sorted
summary CSV.
"""

from __future__ import annotations

import configparser
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import data as data_mod
from .initializers import ConfigError, InitMethod, RngStream, method_label, parse_method
from .nn import Network, NetworkConfig, TrainConfig, TrainingDivergedError, build, train

RESULT_FIELDS = (
    "method",
    "network",
    "activation",
    "per_class",
    "seed",
    "epoch",
    "train_loss",
    "train_acc",
    "val_acc",
    "dead_unit_fraction",
)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    dataset: str
    methods: tuple
    networks: tuple  # hidden-layout strings, e.g. "16", "0", "10-6x100"
    activations: tuple = ("relu",)
    per_class: tuple = ("all",)
    seeds: tuple = (0,)
    epochs: int = 10
    learning_rate: float = 0.001
    batch_size: int = 100
    val_fraction: float = 0.15
    split_seed: int = 0
    train_cap: int = 0  # 0 means uncapped
    val_cap: int = 0

    def cells(self):
        for method in self.methods:
            for network in self.networks:
                for activation in self.activations:
                    for k in self.per_class:
                        for seed in self.seeds:
                            yield (method, network, activation, k, seed)


def parse_hidden_layout(text: str) -> tuple:
    """Hidden-layer layout grammar: dash-separated widths with an optional
    xN repeat, e.g. '16', '0' (no hidden layers), '10-6x100'."""
    text = text.strip().lower()
    if "x" in text:
        base, _, rep = text.partition("x")
        repeat = int(rep)
    else:
        base, repeat = text, 1
    dims = tuple(int(tok) for tok in base.split("-"))
    if dims == (0,):
        return ()
    if any(d < 1 for d in dims) or repeat < 1:
        raise ConfigError(f"bad hidden layout {text!r}")
    return dims * repeat


def load_spec_file(path) -> ExperimentSpec:
    """Read an experiment spec from a key=value file with an [experiment]
    section."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read or "experiment" not in parser:
        raise ConfigError(f"{path}: missing [experiment] section")
    sec = parser["experiment"]

    def split_list(key, default=None):
        if key not in sec:
            return default
        return tuple(tok.strip() for tok in sec[key].split(";") if tok.strip())

    try:
        methods = tuple(parse_method(tok) for tok in split_list("methods"))
        per_class = tuple(
            "all" if tok == "all" else int(tok)
            for tok in (split_list("per_class") or ("all",))
        )
        return ExperimentSpec(
            name=sec.get("name", "experiment"),
            dataset=sec.get("dataset", ""),
            methods=methods,
            networks=split_list("networks"),
            activations=split_list("activations") or ("relu",),
            per_class=per_class,
            seeds=tuple(int(t) for t in (split_list("seeds") or ("0",))),
            epochs=sec.getint("epochs", 10),
            learning_rate=sec.getfloat("learning_rate", 0.001),
            batch_size=sec.getint("batch_size", 100),
            val_fraction=sec.getfloat("val_fraction", 0.15),
            split_seed=sec.getint("split_seed", 0),
            train_cap=sec.getint("train_cap", 0),
            val_cap=sec.getint("val_cap", 0),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _cap_indices(idx: np.ndarray, cap: int, seed: int) -> np.ndarray:
    if cap <= 0 or len(idx) <= cap:
        return idx
    order = RngStream(seed, 41).permutation(len(idx))
    return np.sort(idx[order[:cap]])


def load_spec_dataset(spec: ExperimentSpec) -> data_mod.Dataset:
    """Resolve the spec's dataset string.

    Forms: 'idx:<images>:<labels>', 'csv:iris:<path>', 'csv:wine:<path>',
    'synth:<n>:<dim>:<margin>'.
    """
    kind, _, rest = spec.dataset.partition(":")
    if kind == "idx":
        images, _, labels = rest.partition(":")
        ds = data_mod.load_idx(images, labels)
        ds = data_mod.split(ds, spec.val_fraction, spec.split_seed)
    elif kind == "csv":
        flavor, _, path = rest.partition(":")
        schema = {"iris": data_mod.IRIS_SCHEMA, "wine": data_mod.WINE_SCHEMA}.get(flavor)
        if schema is None:
            raise ConfigError(f"unknown csv flavor {flavor!r}")
        ds = data_mod.load_csv(path, schema, spec.val_fraction, spec.split_seed)
    elif kind == "synth":
        n, dim, margin = rest.split(":")
        ds = data_mod.synth_separable(int(n), int(dim), float(margin), spec.split_seed)
        ds = data_mod.split(ds, spec.val_fraction, spec.split_seed)
    else:
        raise ConfigError(f"unknown dataset spec {spec.dataset!r}")
    ds = replace(
        ds,
        train_idx=_cap_indices(ds.train_idx, spec.train_cap, spec.split_seed),
        val_idx=_cap_indices(ds.val_idx, spec.val_cap, spec.split_seed + 1),
    )
    return ds


def run_cell(spec: ExperimentSpec, dataset, cell) -> list:
    """Train one grid cell and return its per-epoch result rows."""
    method, network, activation, per_class, seed = cell
    if not method.deterministic:
        method = replace(method, seed=seed)
    if per_class != "all":
        dataset = data_mod.subsample(dataset, data_mod.SubsampleSpec(per_class, seed))
    dims = (dataset.feature_dim, *parse_hidden_layout(network), dataset.num_classes)
    net = build(NetworkConfig(layer_dims=dims, activation=activation, init=method))
    cfg = TrainConfig(
        epochs=spec.epochs,
        learning_rate=spec.learning_rate,
        batch_size=spec.batch_size,
        shuffle_seed=seed,
    )
    base = {
        "method": method_label(method),
        "network": network,
        "activation": activation,
        "per_class": per_class,
        "seed": seed,
    }
    try:
        report = train(net, dataset, cfg)
    except TrainingDivergedError as exc:
        return [base | {
            "epoch": exc.epoch, "train_loss": float("nan"), "train_acc": float("nan"),
            "val_acc": float("nan"), "dead_unit_fraction": float("nan"),
        }]
    return [base | row for row in report.rows]


def _cell_worker(args):
    return run_cell(*args)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list:
    """Execute the full grid; rows are sorted by cell key and epoch.

    Cells are independent single-threaded runs; a diverged cell contributes
    a NaN row instead of aborting the grid.
    """
    dataset = load_spec_dataset(spec)
    cells = list(spec.cells())
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_cell_worker, [(spec, dataset, c) for c in cells]))
    else:
        chunks = [run_cell(spec, dataset, c) for c in cells]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(
        key=lambda r: (
            r["method"], r["network"], r["activation"], str(r["per_class"]),
            r["seed"], r["epoch"],
        )
    )
    return rows


def write_results_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(RESULT_FIELDS) + "\n")
        for row in rows:
            cells = []
            for f in RESULT_FIELDS:
                v = row[f]
                cells.append(f"{v:.17g}" if isinstance(v, float) else str(v))
            fh.write(",".join(cells) + "\n")


def builtin_spec(name: str, data_path: str) -> ExperimentSpec:
    """Built-in desk-scale grids. data_path points at the dataset: a
    directory holding IDX files for the image specs, or a CSV file for the
    tabular specs."""
    all_methods = tuple(
        parse_method(t)
        for t in ("proposed", "orthogonal", "xavier", "he", "zero", "identity", "rai", "gsm")
    )
    deep_methods = tuple(
        parse_method(t) for t in ("proposed", "zero", "orthogonal", "rai", "he")
    )
    idx = f"idx:{data_path}/train-images-idx3-ubyte:{data_path}/train-labels-idx1-ubyte"
    if name == "table1-smoke":
        return ExperimentSpec(
            name=name, dataset=idx, methods=all_methods,
            networks=("0", "512", "16"), per_class=(1, 2, 4, "all"),
            seeds=(0, 1, 2, 3, 4), epochs=10, train_cap=10000, val_cap=2000,
        )
    if name == "fig2-depth":
        return ExperimentSpec(
            name=name, dataset=idx, methods=deep_methods,
            networks=tuple(f"10-6x{d // 2}" for d in (10, 20, 40, 50, 80, 100, 120)),
            seeds=(0, 1, 2), epochs=10, train_cap=10000, val_cap=2000,
        )
    if name == "fig34-width":
        widths = (2, 4, 8, 16, 32, 64)
        return ExperimentSpec(
            name=name, dataset=idx, methods=all_methods,
            networks=tuple(f"{a}-{b}" for a in widths for b in widths),
            seeds=(0,), epochs=10, train_cap=10000, val_cap=2000,
        )
    if name == "table2-activation":
        return ExperimentSpec(
            name=name, dataset=idx, methods=all_methods,
            networks=("10-6x60",),
            activations=("relu", "tanh", "sigmoid", "selu", "gelu"),
            seeds=(0,), epochs=10, train_cap=10000, val_cap=2000,
        )
    if name == "iris-deep":
        return ExperimentSpec(
            name=name, dataset=f"csv:iris:{data_path}", methods=deep_methods,
            networks=("10-6x100",), seeds=(0, 1, 2, 3, 4), epochs=100,
        )
    if name == "wine-deep":
        return ExperimentSpec(
            name=name, dataset=f"csv:wine:{data_path}", methods=deep_methods,
            networks=("10-6x60",), seeds=(0, 1, 2, 3, 4), epochs=200,
        )
    raise ConfigError(f"unknown built-in experiment {name!r}")

BUILTIN_SPECS = (
    "table1-smoke", "fig2-depth", "fig34-width", "table2-activation",
    "iris-deep", "wine-deep",
)
