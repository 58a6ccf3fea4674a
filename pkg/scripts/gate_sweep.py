"""Gate counts and wall time per stage across n, averaged over random instances.

    python3 scripts/gate_sweep.py --n-max 8 --samples 5 > gates.csv
"""
import argparse
import sys
from collections import defaultdict

import numpy as np

from qss.harness import RunConfig, bench, rows_to_csv

NUMERIC = ("t", "qubits", "qpe_gates", "aa_iterations", "max_amplifications", "total_gates", "wall_total")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--bits", type=int, default=4, help="element bit width")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    acc = defaultdict(lambda: defaultdict(list))
    for k in range(args.samples):
        cfg = RunConfig(seed=args.seed + k)
        for row in bench(cfg, range(args.n_min, args.n_max + 1), bits=args.bits):
            for key in NUMERIC:
                acc[row["n"]][key].append(row[key])
            acc[row["n"]]["agree"].append(bool(row["oracle_agrees"]))
    rows = []
    for n in sorted(acc):
        row = {"n": n, "samples": args.samples}
        row.update({f"mean_{key}": float(np.mean(acc[n][key])) for key in NUMERIC})
        row["oracle_agreement"] = float(np.mean(acc[n]["agree"]))
        rows.append(row)
    sys.stdout.write(rows_to_csv(rows))


if __name__ == "__main__":
    main()
