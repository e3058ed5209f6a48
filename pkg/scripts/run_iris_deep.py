#!/usr/bin/env python3
"""Run the deep-narrow iris benchmark (100 alternating 10/6 hidden layers,
ReLU, Adam, 100 epochs, 5 seeds) and print the final-epoch median validation
accuracy per initializer.

Requires fixtures/iris.csv (see scripts/make_fixtures.py).
"""

import argparse
from collections import defaultdict
from pathlib import Path
from statistics import median

from epsortho import experiments

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default=str(ROOT / "fixtures" / "iris.csv"))
    parser.add_argument("--out", default="iris_deep.csv")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    spec = experiments.builtin_spec("iris-deep", args.data)
    rows = experiments.run_experiment(spec, workers=args.workers)
    experiments.write_results_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}\n")

    finals = defaultdict(list)
    for row in rows:
        if row["epoch"] == spec.epochs:
            # pool seeds: group by initializer kind, not the seeded label
            finals[row["method"].split("(")[0]].append(row["val_acc"])
    print(f"{'method':<22} {'median val_acc':>14}")
    for method, accs in sorted(finals.items()):
        print(f"{method:<22} {median(accs):14.4f}")


if __name__ == "__main__":
    main()
