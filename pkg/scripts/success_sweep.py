"""Empirical success rate of the full pipeline as a function of retries and mode.

Draws random instances, checks each answer against the brute-force oracle and
writes one CSV row per (mode, retries) cell.

    python3 scripts/success_sweep.py --instances 200 --retries 1,2,3,t > sweep.csv
"""
import argparse
import sys

import numpy as np

from qss.encoding import ProblemInstance
from qss.harness import RunConfig, rows_to_csv, solve_instance


def draw(rng, n_min, n_max, x_max):
    n = int(rng.integers(n_min, n_max + 1))
    elements = tuple(int(x) for x in rng.integers(1, x_max + 1, size=n))
    target = int(rng.integers(0, sum(elements) + 1))
    return ProblemInstance(elements, target)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--x-max", type=int, default=31)
    p.add_argument("--retries", default="1,2,3,t", help="comma list; 't' means one per phase bit")
    p.add_argument("--modes", default="exact-count,blind")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    instances = [draw(rng, args.n_min, args.n_max, args.x_max) for _ in range(args.instances)]
    rows = []
    for mode in args.modes.split(","):
        for tag in args.retries.split(","):
            retries = None if tag == "t" else int(tag)
            cfg = RunConfig(mode=mode, retries=retries)
            correct = yes = false_yes = exhausted = 0
            for i, inst in enumerate(instances):
                r = solve_instance(inst, cfg, seed=args.seed + i)
                exhausted += r.status == "aa_exhausted"
                correct += bool(r.oracle["agrees"])
                yes += r.decision
                false_yes += r.decision and not r.witness_verified
            rows.append(
                {
                    "mode": mode,
                    "retries": tag,
                    "instances": len(instances),
                    "success_rate": correct / len(instances),
                    "yes": yes,
                    "false_yes": false_yes,
                    "aa_exhausted": exhausted,
                }
            )
            print(f"{mode:12s} retries={tag:>2s}  success {correct}/{len(instances)}", file=sys.stderr)
    sys.stdout.write(rows_to_csv(rows))


if __name__ == "__main__":
    main()
