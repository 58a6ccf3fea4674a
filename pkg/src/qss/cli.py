"""Command line entry point: ``qss {solve,oracle,batch,bench,trace}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from . import harness
from .classical import brute_force, dp_solve
from .harness import EXIT_INVALID, EXIT_OK, RunConfig


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _stages(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _add_run_options(p: argparse.ArgumentParser, inline: bool = True) -> None:
    if inline:
        p.add_argument("--set", dest="elements", type=_int_list, required=True, help="e.g. 3,5,8")
        p.add_argument("--target", type=int, required=True)
    p.add_argument("--t-bits", dest="t_override", type=int, default=None)
    p.add_argument("--mode", choices=["exact-count", "blind"], default="exact-count")
    p.add_argument(
        "--retries", type=int, default=None,
        help="max-search retries per phase qubit (default: 3; 0 means use t)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--output", choices=["json", "csv"], default="json")
    p.add_argument("--max-restarts", type=int, default=harness.DEFAULT_MAX_RESTARTS)


def _config(args: argparse.Namespace, **extra) -> RunConfig:
    retries = args.retries
    if retries is None:
        retries = harness.DEFAULT_RETRIES
    elif retries == 0:
        retries = None
    return RunConfig(
        elements=getattr(args, "elements", None),
        target=getattr(args, "target", None),
        t_override=args.t_override,
        mode=args.mode,
        retries=retries,
        seed=args.seed,
        repetitions=args.reps,
        output=args.output,
        max_restarts=args.max_restarts,
        **extra,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qss", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the simulated pipeline on one instance")
    _add_run_options(p)
    p.add_argument("--trace", type=_stages, default=(), help="comma list of qpe,aa,max")
    p.add_argument("--trace-dir", default=".", help="directory for trace CSV files")

    p = sub.add_parser("oracle", help="classical answer as JSON")
    p.add_argument("--set", dest="elements", type=_int_list, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--method", choices=["brute", "dp"], default="brute")

    p = sub.add_parser("batch", help="solve every instance of a JSON-lines file")
    p.add_argument("file")
    _add_run_options(p, inline=False)

    p = sub.add_parser("bench", help="gate counts and timings over a sweep of n")
    _add_run_options(p, inline=False)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--bits", type=int, default=4, help="bit width of the random elements")

    p = sub.add_parser("trace", help="dump one stage of the pipeline as CSV")
    _add_run_options(p)
    p.add_argument("--stage", choices=list(harness.TRACE_STAGES), required=True)
    return parser


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except (ValueError, TypeError, MemoryError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "oracle":
        from .encoding import ProblemInstance

        instance = ProblemInstance(args.elements, args.target)
        answer = brute_force(instance) if args.method == "brute" else dp_solve(instance)
        _emit(json.dumps(answer.to_dict(), sort_keys=True))
        return EXIT_OK

    if args.command == "solve":
        config = _config(args, trace=args.trace)
        reports = harness.solve(config)
        if config.output == "json":
            payload = [r.to_dict() for r in reports]
            _emit(json.dumps(payload[0] if len(payload) == 1 else payload, sort_keys=True))
        else:
            rows = [
                {
                    "seed": r.seed,
                    "status": r.status,
                    "decision": r.decision,
                    "max_sum": r.max_sum,
                    "witness": " ".join(map(str, r.witness or [])),
                    "aa_iterations": r.aa_iterations,
                    "retries": sum(r.retries_per_qubit),
                    "oracle_agrees": bool(r.oracle and r.oracle.get("agrees")),
                }
                for r in reports
            ]
            _emit(harness.rows_to_csv(rows))
        for r in reports:
            for path in harness.write_traces(r, args.trace_dir):
                print(f"wrote {path}", file=sys.stderr)
        return max(r.exit_code for r in reports)

    if args.command == "batch":
        summary = harness.batch(_config(args), args.file)
        if args.output == "json":
            _emit(json.dumps(summary.to_dict(), sort_keys=True))
        else:
            _emit(harness.rows_to_csv(summary.rows) or "line\n")
        return EXIT_OK

    if args.command == "bench":
        rows = harness.bench(_config(args), range(args.n_min, args.n_max + 1), bits=args.bits)
        if args.output == "json":
            _emit(json.dumps(rows, sort_keys=True))
        else:
            _emit(harness.rows_to_csv(rows))
        return EXIT_OK

    if args.command == "trace":
        rows = harness.trace(_config(args), args.stage)
        _emit(harness.rows_to_csv(rows, harness.TRACE_COLUMNS[args.stage]))
        return EXIT_OK

    raise AssertionError(args.command)
