"""Experiment runner: solve, batch, bench and trace on top of the simulated pipeline."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from . import statevector as sv
from .amplify import (
    DEFAULT_MAX_RESTARTS,
    MODES,
    amplify_good,
    analytic_good_mass,
    count_good,
    good_mass,
    grover_iterate,
)
from .classical import BRUTE_FORCE_MAX_N, brute_force, verify
from .encoding import (
    DEFAULT_MAX_ELEMENTS,
    ProblemInstance,
    ScaledInstance,
    instance_from_dict,
    iter_instance_file,
    scale_instance,
)
from .maxsearch import DEFAULT_RETRIES, WitnessAnomaly, decode_solution, find_max_phase
from .qpe import run_qpe, stage_counts

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_EXHAUSTED = 1
EXIT_INVALID = 2

TRACE_STAGES = ("qpe", "aa", "max")


@dataclass
class RunConfig:
    elements: Optional[tuple[int, ...]] = None
    target: Optional[int] = None
    instance_file: Optional[str] = None
    t_override: Optional[int] = None
    mode: str = "exact-count"
    retries: Optional[int] = DEFAULT_RETRIES  # None means "use t"
    seed: int = 0
    repetitions: int = 1
    output: str = "json"
    trace: tuple[str, ...] = ()
    max_restarts: int = DEFAULT_MAX_RESTARTS
    max_elements: int = DEFAULT_MAX_ELEMENTS

    def __post_init__(self):
        if self.elements is not None:
            self.elements = tuple(self.elements)
        self.trace = tuple(self.trace)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.retries is not None and self.retries < 1:
            raise ValueError("retries must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.output not in ("json", "csv"):
            raise ValueError("output must be 'json' or 'csv'")
        bad = set(self.trace) - set(TRACE_STAGES)
        if bad:
            raise ValueError(f"unknown trace stages {sorted(bad)}")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be non-negative")

    def instance(self) -> ProblemInstance:
        if self.elements is None or self.target is None:
            raise ValueError("an inline instance needs both elements and target")
        return ProblemInstance(self.elements, self.target)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["elements"] = list(self.elements) if self.elements is not None else None
        d["trace"] = list(self.trace)
        return d


@dataclass
class SolveReport:
    config: dict
    version: str
    seed: int
    status: str  # "ok" | "aa_exhausted" | "anomaly"
    decision: bool
    max_sum: Optional[int]
    witness: Optional[list[int]]
    witness_verified: Optional[bool]
    n: int
    phase_bits: int
    phase_bits_read: list[int]
    gate_counts: dict
    aa_iterations: int
    aa_restarts: int
    aa_schedule: list[int]
    retries_per_qubit: list[int]
    oracle: Optional[dict]
    timings: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)
    message: str = ""

    def to_dict(self, include_timings: bool = True) -> dict:
        d = asdict(self)
        if not include_timings:
            d.pop("timings")
        d.pop("traces")
        return d

    def to_json(self, include_timings: bool = True) -> str:
        return json.dumps(self.to_dict(include_timings), sort_keys=True)

    @property
    def exit_code(self) -> int:
        return EXIT_EXHAUSTED if self.status == "aa_exhausted" else EXIT_OK


def _psi_rows(state: sv.QuantumState, threshold: float = 0.0) -> list[dict]:
    probs = state.probabilities()
    rows = []
    for k in np.flatnonzero(probs > threshold):
        a = state.amplitudes[k]
        rows.append(
            {
                "index": int(k),
                "r1": int(k >> state.n),
                "r2": int(k & ((1 << state.n) - 1)),
                "re": float(a.real),
                "im": float(a.imag),
                "prob": float(probs[k]),
            }
        )
    return rows


def aa_trace_rows(qpe_state: sv.QuantumState, scaled: ScaledInstance, max_k: Optional[int] = None) -> list[dict]:
    summary = count_good(scaled)
    if max_k is None:
        max_k = max(2 * summary.optimal_k, 1)
    state = qpe_state.copy(keep_log=False)
    rows = []
    for k in range(max_k + 1):
        if k:
            grover_iterate(state, qpe_state, scaled.scaled_target)
        rows.append(
            {
                "k": k,
                "good_mass": good_mass(state, scaled.scaled_target),
                "analytic": analytic_good_mass(summary.theta, k),
            }
        )
    return rows


def solve_instance(
    instance: ProblemInstance,
    config: RunConfig,
    seed: Optional[int] = None,
    t_override: Optional[int] = None,
) -> SolveReport:
    """Run scale -> QPE -> AA -> max search -> decode -> verify once."""
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    timings: dict[str, float] = {}
    traces: dict[str, list[dict]] = {}
    t_override = config.t_override if t_override is None else t_override

    t0 = time.perf_counter()
    scaled = scale_instance(instance, t_override, max_elements=config.max_elements)
    t, n = scaled.phase_bits, scaled.n
    retries = t if config.retries is None else config.retries
    timings["scale"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    qpe_out = run_qpe(scaled)
    timings["qpe"] = time.perf_counter() - t0
    if "qpe" in config.trace:
        traces["qpe"] = _psi_rows(qpe_out.state, 1e-12)
    if "aa" in config.trace:
        traces["aa"] = aa_trace_rows(qpe_out.state, scaled)

    t0 = time.perf_counter()
    amp = amplify_good(qpe_out, scaled, mode=config.mode, rng=rng, max_restarts=config.max_restarts)
    timings["aa"] = time.perf_counter() - t0
    qpe_gates = stage_counts(qpe_out)
    qpe_out = None  # psi_1 is no longer needed; free it before max search

    oracle = None
    if n <= BRUTE_FORCE_MAX_N:
        ans = brute_force(instance)
        oracle = {
            "decision": ans.decision,
            "max_reachable_leq_target": ans.max_reachable_leq_target,
            "good_count": ans.good_count,
        }

    aa_gates = {
        "oracle": amp.iterations,
        "diffusion": amp.iterations,
        "comparator_measurements": len(amp.schedule),
    }
    common = dict(
        config=config.to_dict(),
        version=__version__,
        seed=seed,
        n=n,
        phase_bits=t,
        aa_iterations=amp.iterations,
        aa_restarts=amp.restarts,
        aa_schedule=list(amp.schedule),
        oracle=oracle,
        timings=timings,
        traces=traces,
    )
    if not amp.success:
        if oracle is not None:
            oracle["agrees"] = False
        return SolveReport(
            status="aa_exhausted",
            decision=False,
            max_sum=None,
            witness=None,
            witness_verified=None,
            phase_bits_read=[],
            gate_counts={"qpe": qpe_gates, "aa": aa_gates, "max": {}},
            retries_per_qubit=[],
            message=f"comparator never reported a good branch in {amp.restarts + 1} attempts",
            **common,
        )

    t0 = time.perf_counter()
    result = find_max_phase(amp.state, retries=retries, rng=rng)
    amp = None
    timings["max"] = time.perf_counter() - t0
    if "max" in config.trace:
        traces["max"] = [
            {"i": s.index, "p_one": s.p_one, "retries": s.retries, "bit": s.bit} for s in result.steps
        ]
    max_gates = {
        "z": result.amplifications,
        "reflections": result.amplifications,
        "measurements": t + sum(result.retries_used),
    }

    t0 = time.perf_counter()
    status, message = "ok", ""
    try:
        witness = decode_solution(result, scaled.numerators, rng)
        verified = verify(instance, witness)
    except WitnessAnomaly as exc:
        witness, verified, status, message = None, False, "anomaly", str(exc)
    timings["decode"] = time.perf_counter() - t0
    max_gates["measurements"] += n

    decision = bool(status == "ok" and result.max_sum == instance.target and verified)
    if oracle is not None:
        oracle["agrees"] = (
            decision == oracle["decision"] and result.max_sum == oracle["max_reachable_leq_target"]
        )
    return SolveReport(
        status=status,
        decision=decision,
        max_sum=result.max_sum,
        witness=witness,
        witness_verified=verified,
        phase_bits_read=list(result.bits),
        gate_counts={"qpe": qpe_gates, "aa": aa_gates, "max": max_gates},
        retries_per_qubit=list(result.retries_used),
        message=message,
        **common,
    )


def solve(config: RunConfig) -> list[SolveReport]:
    """Solve the inline instance ``config.repetitions`` times with seeds seed, seed+1, ..."""
    instance = config.instance()
    return [solve_instance(instance, config, seed=config.seed + r) for r in range(config.repetitions)]


@dataclass
class BatchSummary:
    processed: int = 0
    malformed: int = 0
    correct: int = 0
    yes_count: int = 0
    false_positives: int = 0
    exhausted: int = 0
    mean_retries: float = 0.0
    mean_aa_iterations: float = 0.0
    success_rate: Optional[float] = None
    rows: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("rows")
        return d


def batch(config: RunConfig, path: Optional[str] = None) -> BatchSummary:
    """Solve every line of a JSON-lines instance file and aggregate against the oracle."""
    path = path or config.instance_file
    if path is None:
        raise ValueError("batch needs an instance file")
    summary = BatchSummary()
    retries_total = 0
    iterations_total = 0
    for lineno, text, obj in iter_instance_file(path):
        try:
            if obj is None:
                raise ValueError("not valid JSON")
            instance, t = instance_from_dict(obj)
            report = solve_instance(instance, config, seed=config.seed + summary.processed, t_override=t)
        except (ValueError, TypeError) as exc:
            log.warning("line %d skipped: %s", lineno, exc)
            summary.malformed += 1
            continue
        summary.processed += 1
        agrees = bool(report.oracle and report.oracle.get("agrees"))
        correct = report.oracle is not None and report.decision == report.oracle["decision"]
        summary.correct += int(correct)
        summary.yes_count += int(report.decision)
        summary.false_positives += int(report.decision and not report.witness_verified)
        summary.exhausted += int(report.status == "aa_exhausted")
        retries_total += sum(report.retries_per_qubit)
        iterations_total += report.aa_iterations
        summary.rows.append(
            {
                "line": lineno,
                "set": " ".join(map(str, instance.elements)),
                "target": instance.target,
                "status": report.status,
                "decision": report.decision,
                "max_sum": report.max_sum,
                "witness": " ".join(map(str, report.witness or [])),
                "oracle_decision": report.oracle["decision"] if report.oracle else None,
                "oracle_max": report.oracle["max_reachable_leq_target"] if report.oracle else None,
                "agrees": agrees,
                "aa_iterations": report.aa_iterations,
                "retries": sum(report.retries_per_qubit),
            }
        )
    if summary.processed:
        summary.success_rate = summary.correct / summary.processed
        summary.mean_retries = retries_total / summary.processed
        summary.mean_aa_iterations = iterations_total / summary.processed
    return summary


def random_instance(n: int, bits: int, rng: np.random.Generator) -> ProblemInstance:
    """n elements of exactly ``bits`` bits; target is the sum of a random subset."""
    lo, hi = 1 << (bits - 1), (1 << bits) - 1
    elements = tuple(int(x) for x in rng.integers(lo, hi + 1, size=n))
    mask = rng.integers(0, 2, size=n)
    return ProblemInstance(elements, int(np.dot(mask, elements)))


def bench(config: RunConfig, n_values: Iterable[int], bits: int = 4) -> list[dict]:
    """Gate counts and wall-clock per stage for one random instance per n.

    Raises ValueError before running anything if any n would exceed the
    qubit cap.
    """
    rng = np.random.default_rng(config.seed)
    instances = []
    for n in n_values:
        inst = random_instance(n, bits, rng)
        scaled = scale_instance(inst, max_elements=config.max_elements)
        if scaled.phase_bits + n > sv.max_qubits():
            raise ValueError(
                f"n={n} needs {scaled.phase_bits + n} qubits, above the cap of {sv.max_qubits()}"
            )
        instances.append(inst)
    rows = []
    for inst in instances:
        report = solve_instance(inst, config)
        q = report.gate_counts["qpe"]
        a = report.gate_counts["aa"]
        m = report.gate_counts["max"]
        qpe_total = sum(q.values())
        rows.append(
            {
                "n": report.n,
                "t": report.phase_bits,
                "qubits": report.n + report.phase_bits,
                "qpe_gates": qpe_total,
                "qft_h": q["qft_h"],
                "qft_cphase": q["qft_cphase"],
                "qft_swap": q["qft_swap"],
                "controlled_powers": q["controlled_powers"],
                "aa_iterations": report.aa_iterations,
                "aa_gates": a["oracle"] + a["diffusion"],
                "max_amplifications": m["z"],
                "max_measurements": m["measurements"],
                "total_gates": qpe_total + a["oracle"] + a["diffusion"] + m["z"] + m["reflections"],
                "decision": report.decision,
                "oracle_agrees": bool(report.oracle and report.oracle["agrees"]),
                "wall_qpe": report.timings.get("qpe", 0.0),
                "wall_aa": report.timings.get("aa", 0.0),
                "wall_max": report.timings.get("max", 0.0),
                "wall_total": sum(report.timings.values()),
            }
        )
    return rows


def trace(config: RunConfig, stage: str) -> list[dict]:
    if stage not in TRACE_STAGES:
        raise ValueError(f"unknown stage {stage!r}, expected one of {TRACE_STAGES}")
    instance = config.instance()
    if stage == "max":
        cfg = RunConfig(**{**config.to_dict(), "elements": instance.elements, "trace": ("max",)})
        return solve_instance(instance, cfg).traces.get("max", [])
    scaled = scale_instance(instance, config.t_override, max_elements=config.max_elements)
    qpe_out = run_qpe(scaled)
    if stage == "qpe":
        return _psi_rows(qpe_out.state, 1e-12)
    return aa_trace_rows(qpe_out.state, scaled)


def rows_to_csv(rows: list[dict], columns: Optional[list[str]] = None) -> str:
    buf = io.StringIO()
    if not rows and not columns:
        return ""
    columns = columns or list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


TRACE_COLUMNS = {
    "qpe": ["index", "r1", "r2", "re", "im", "prob"],
    "aa": ["k", "good_mass", "analytic"],
    "max": ["i", "p_one", "retries", "bit"],
}


def write_traces(report: SolveReport, directory: str | Path) -> list[Path]:
    out = []
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for stage, rows in report.traces.items():
        path = directory / f"trace_{stage}_seed{report.seed}.csv"
        path.write_text(rows_to_csv(rows, TRACE_COLUMNS[stage]))
        out.append(path)
    return out
