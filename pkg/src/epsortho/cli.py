"""Command-line entry point.

Subcommands: gen-matrix, verify, propagate, train, experiment. Exit codes:
0 success, 1 verification/training/IO failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments, props
from .initializers import ConfigError, DEFAULT_EPS, w_epsilon
from .linalg import save_matrix_csv
from .nn import REPORT_FIELDS

VERIFY_DIMS = (1, 2, 3, 5, 8, 16, 64, 200)
VERIFY_EPS = (1e-4, 0.1)
SUM_EPS = (1e-4, 1e-2, 0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epsortho",
        description="Deterministic epsilon-orthogonal weight initialization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-matrix", help="write a weight matrix as CSV")
    gen.add_argument("m", type=int)
    gen.add_argument("n", type=int)
    gen.add_argument("eps", type=float, nargs="?", default=DEFAULT_EPS)
    gen.add_argument("--out", default=None)

    ver = sub.add_parser("verify", help="run the numerical property checks")
    ver.add_argument("--eps", type=float, action="append", default=None)
    ver.add_argument("--json", action="store_true")
    ver.add_argument("--out", default=None)

    prop = sub.add_parser("propagate", help="positive signal propagation grid")
    prop.add_argument("--eps", type=float, default=DEFAULT_EPS)
    prop.add_argument("--seed", type=int, default=0)
    prop.add_argument("--out", default="figure1.csv")

    tr = sub.add_parser("train", help="single training run from a spec file")
    tr.add_argument("--spec", required=True)
    tr.add_argument("--out", default="train_report.csv")

    ex = sub.add_parser("experiment", help="run a full experiment grid")
    ex.add_argument("--spec", required=True,
                    help=f"built-in name ({', '.join(experiments.BUILTIN_SPECS)}) "
                         "or a spec file path")
    ex.add_argument("--data", default="",
                    help="dataset path for built-in specs (IDX directory or CSV file)")
    ex.add_argument("--out", default="results.csv")
    ex.add_argument("--workers", type=int, default=1)
    return parser


def cmd_gen_matrix(args) -> int:
    w = w_epsilon(args.m, args.n, args.eps)
    out = args.out or f"w_epsilon_{args.m}x{args.n}.csv"
    save_matrix_csv(w, out)
    print(f"wrote {args.m}x{args.n} matrix (eps={args.eps:g}) to {out}")
    return 0


def default_verify_reports(eps_grid=None):
    eps_grid = tuple(eps_grid or VERIFY_EPS)
    reports = []
    for eps in eps_grid:
        for m in VERIFY_DIMS:
            for n in VERIFY_DIMS:
                reports.append(props.check_orthogonality(w_epsilon(m, n, eps)))
                if min(m, n) >= 2:
                    reports.append(props.check_w_sum_constancy(m, n, eps))
    for eps in SUM_EPS:
        for m in range(2, 65):
            reports.append(props.check_q_column_sums(m, eps))
        for m in (1, 2, 4, 8, 64):
            reports.append(props.check_a_column_angle(m, eps))
    return reports


def cmd_verify(args) -> int:
    reports = default_verify_reports(args.eps)
    lines = []
    for rep in reports:
        if args.json:
            lines.append(json.dumps(rep.to_dict()))
        else:
            status = "PASS" if rep.passed else "FAIL"
            lines.append(
                f"{status} {rep.name} violation={rep.max_violation:.3e} "
                f"bound={rep.bound:.3e} {rep.metadata}"
            )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in reports if not r.passed]
    if failed:
        for rep in failed:
            print(f"FAILED: {rep.name} {rep.metadata}", file=sys.stderr)
        return 1
    return 0


def cmd_propagate(args) -> int:
    rows = props.run_figure1(eps=args.eps, seed=args.seed)
    fields = ("matrix", "distribution", "trial", *props.SIGNAL_FIELDS)
    props.write_rows_csv(rows, fields, args.out)
    print(f"wrote {len(rows)} signal-propagation rows to {args.out}")
    return 0


def cmd_train(args) -> int:
    spec = experiments.load_spec_file(args.spec)
    cells = list(spec.cells())
    if len(cells) != 1:
        raise ConfigError(
            f"train expects a single-combination spec, got {len(cells)} cells"
        )
    dataset = experiments.load_spec_dataset(spec)
    rows = experiments.run_cell(spec, dataset, cells[0])
    if any(not _finite(row["train_loss"]) for row in rows):
        print("training diverged (non-finite loss)", file=sys.stderr)
        return 1
    with open(args.out, "w") as fh:
        fh.write(",".join(REPORT_FIELDS) + "\n")
        for row in rows:
            fh.write(
                f"{row['epoch']},{row['train_loss']:.17g},{row['train_acc']:.17g},"
                f"{row['val_acc']:.17g},{row['dead_unit_fraction']:.17g}\n"
            )
    print(f"wrote training report to {args.out}")
    return 0


def _finite(x) -> bool:
    return x == x and abs(x) != float("inf")


def cmd_experiment(args) -> int:
    if args.spec in experiments.BUILTIN_SPECS:
        spec = experiments.builtin_spec(args.spec, args.data)
    else:
        spec = experiments.load_spec_file(args.spec)
    rows = experiments.run_experiment(spec, workers=args.workers)
    experiments.write_results_csv(rows, args.out)
    print(f"wrote {len(rows)} result rows to {args.out}")
    return 0


COMMANDS = {
    "gen-matrix": cmd_gen_matrix,
    "verify": cmd_verify,
    "propagate": cmd_propagate,
    "train": cmd_train,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
