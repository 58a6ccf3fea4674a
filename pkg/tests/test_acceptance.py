"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines
inline; they also appear in the captured output of ``pytest -v``.
"""
import math
import time
import tracemalloc

import numpy as np
import pytest

from qss import statevector as sv
from qss.amplify import (
    amplify_good,
    analytic_good_mass,
    count_good,
    diffusion,
    good_mass,
    grover_iterate,
)
from qss.classical import brute_force, verify
from qss.encoding import ProblemInstance, build_diagonal, kron_diagonal, scale_instance
from qss.harness import RunConfig, bench, solve_instance
from qss.maxsearch import find_max_phase
from qss.qpe import off_support_mass, run_qpe, support_amplitudes

from conftest import (
    H,
    all_subset_sums,
    dense_controlled_power,
    dense_inverse_qft,
    dense_single,
    random_state,
)

SEED = 20261015


@pytest.fixture
def report(capsys):
    def emit(number, name, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, detail

    return emit


def draw_instance(rng, n_lo, n_hi, x_hi=31):
    n = int(rng.integers(n_lo, n_hi + 1))
    elements = tuple(int(x) for x in rng.integers(1, x_hi + 1, size=n))
    return elements


def test_criterion_1_diagonal_equivalence(report):
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        scaled = scale_instance(ProblemInstance(draw_instance(rng, 1, 6, 63), 0))
        direct = build_diagonal(scaled).phases
        mismatches += kron_diagonal(scaled) != list(direct)
    elapsed = time.perf_counter() - start
    report(
        1, "diagonal equivalence", mismatches == 0 and elapsed < 5.0,
        f"{mismatches} mismatches over 200 instances, {elapsed:.3f} s (limit 5 s)",
    )


def test_criterion_2_qpe_exactness(report):
    rng = np.random.default_rng(SEED + 2)
    cases = [scale_instance(ProblemInstance((3, 5, 8), 8), 5)]
    cases += [scale_instance(ProblemInstance(draw_instance(rng, 1, 5), 0)) for _ in range(50)]
    worst_off, worst_amp = 0.0, 0.0
    for scaled in cases:
        out = run_qpe(scaled)
        worst_off = max(worst_off, off_support_mass(out.state, out.diagonal))
        amp = support_amplitudes(out.state, out.diagonal)
        worst_amp = max(worst_amp, float(np.max(np.abs(amp - 1 / math.sqrt(2**scaled.n)))))
    report(
        2, "QPE exactness", worst_off < 1e-9 and worst_amp < 1e-9,
        f"{len(cases)} instances, max off-support mass {worst_off:.2e}, "
        f"max amplitude error {worst_amp:.2e} (tol 1e-9)",
    )


def test_criterion_3_rotation_law(report):
    rng = np.random.default_rng(SEED + 3)
    worst, checked, bound_ok, used = 0.0, 0, True, 0
    while used < 50:
        elements = draw_instance(rng, 1, 6)
        target = int(rng.integers(0, sum(elements)))
        scaled = scale_instance(ProblemInstance(elements, target))
        summary = count_good(scaled)
        if not 1 <= summary.good_count < 2**scaled.n:
            continue
        used += 1
        out = run_qpe(scaled)
        s = out.state.copy()
        for k in range(2 * summary.optimal_k + 1):
            if k:
                grover_iterate(s, out.state, target)
            worst = max(worst, abs(good_mass(s, target) - analytic_good_mass(summary.theta, k)))
            checked += 1
        bound = (math.pi / 4 + 1) * math.sqrt(2**scaled.n / summary.good_count)
        bound_ok &= summary.optimal_k <= bound
    report(
        3, "Grover rotation law", worst < 1e-9 and bound_ok,
        f"50 instances, {checked} (instance, k) points, max deviation {worst:.2e} (tol 1e-9), "
        f"iteration bound (pi/4+1)sqrt(2^n/|L|) {'respected' if bound_ok else 'violated'}",
    )


def dense_preparation(elements, t):
    n = len(elements)
    nq = t + n
    sums = all_subset_sums(elements)
    a = np.eye(2**nq, dtype=complex)
    for q in range(nq):
        a = dense_single(H, q, nq) @ a
    for j in range(t):
        a = dense_controlled_power(sums, t, n, j) @ a
    return dense_inverse_qft(t, n) @ a


def test_criterion_4_diffusion_equivalence(report):
    rng = np.random.default_rng(SEED + 4)
    cases = [((1,), None), ((3, 5), None), ((3, 5, 8), None), ((1, 2, 4), None), ((1, 1, 1, 1), 4)]
    worst = 0.0
    for elements, t in cases:
        scaled = scale_instance(ProblemInstance(elements, 0), t)
        t, n = scaled.phase_bits, scaled.n
        assert t + n <= 8
        out = run_qpe(scaled)
        a = dense_preparation(elements, t)
        u0_perp = -np.eye(2 ** (t + n), dtype=complex)
        u0_perp[0, 0] = 1  # 2|0><0| - I
        dense = a @ u0_perp @ a.conj().T
        for _ in range(5):
            psi = random_state(t + n, rng)
            s = sv.QuantumState(t, n, psi.copy())
            sv.reflect_about(s, out.state)
            expected = dense @ psi
            # fix the global phase on the largest expected amplitude
            i = int(np.argmax(np.abs(expected)))
            phase = s.amplitudes[i] / expected[i]
            worst = max(worst, float(np.max(np.abs(s.amplitudes - phase * expected))), abs(abs(phase) - 1))
            # the diffusion step used inside amplification is this same reflection
            d = sv.QuantumState(t, n, psi.copy())
            diffusion(d, out.state)
            worst = max(worst, float(np.max(np.abs(d.amplitudes - expected))))
    report(
        4, "diffusion construction", worst < 1e-9,
        f"{len(cases)} instances with t+n <= 8, max per-amplitude deviation {worst:.2e} (tol 1e-9)",
    )


def solvable_instances(rng, count, want_yes):
    out = []
    while len(out) < count:
        elements = draw_instance(rng, 2, 6)
        if want_yes:
            mask = rng.integers(0, 2, size=len(elements))
            target = int(np.dot(mask, elements))
        else:
            target = int(rng.integers(0, sum(elements) + 1))
        inst = ProblemInstance(elements, target)
        ans = brute_force(inst)
        if ans.decision == want_yes:
            out.append((inst, ans))
    return out


def test_criterion_5_end_to_end_soundness(report):
    rng = np.random.default_rng(SEED + 5)
    cfg = RunConfig(mode="exact-count", retries=None)
    yes_ok = false_yes = 0
    for seed, (inst, _) in enumerate(solvable_instances(rng, 100, True)):
        r = solve_instance(inst, cfg, seed=seed)
        if r.decision:
            if r.witness is not None and verify(inst, r.witness):
                yes_ok += 1
            else:
                false_yes += 1
    no_said_no = no_max_ok = 0
    for seed, (inst, ans) in enumerate(solvable_instances(rng, 100, False)):
        r = solve_instance(inst, cfg, seed=1000 + seed)
        if r.decision and not (r.witness is not None and verify(inst, r.witness)):
            false_yes += 1
        no_said_no += not r.decision
        no_max_ok += r.max_sum == ans.max_reachable_leq_target
    ok = yes_ok >= 95 and false_yes == 0 and no_said_no == 100 and no_max_ok >= 95
    report(
        5, "end-to-end soundness", ok,
        f"yes-instances verified {yes_ok}/100 (need >= 95), non-verifying yes {false_yes} (need 0), "
        f"no-instances answered no {no_said_no}/100 (need 100), max_sum = oracle {no_max_ok}/100 (need >= 95)",
    )


def test_criterion_6_prefix_invariant(report):
    rng = np.random.default_rng(SEED + 6)
    steps, violations, worst = 0, 0, 0.0
    run = 0
    while steps < 1000:
        elements = draw_instance(rng, 1, 6)
        target = int(rng.integers(0, sum(elements) + 1))
        scaled = scale_instance(ProblemInstance(elements, target))
        t = scaled.phase_bits
        amp = amplify_good(run_qpe(scaled), scaled, rng=np.random.default_rng(run))
        run += 1
        if not amp.success:
            continue

        def observer(i, bits, state):
            nonlocal steps, violations, worst
            prefix = int("".join(map(str, bits)), 2)
            rows = np.arange(1 << t)
            outside = state.matrix()[(rows >> (t - i)) != prefix]
            mass = float(np.sum(np.abs(outside) ** 2))
            worst = max(worst, mass)
            violations += mass > 1e-9 or abs(state.norm() - 1) > 1e-9
            steps += 1

        find_max_phase(amp.state, retries=t, rng=np.random.default_rng(run), observer=observer)
    report(
        6, "prefix-support invariant", violations == 0,
        f"{steps} logged steps over {run} runs, {violations} violations, "
        f"max mass outside prefix {worst:.2e} (tol 1e-9)",
    )


def test_criterion_7_scale(report):
    rng = np.random.default_rng(SEED + 7)
    elements = tuple(int(x) for x in rng.integers(1, 64, size=8))
    inst = ProblemInstance(elements, sum(elements) // 2)
    cfg = RunConfig(t_override=12, seed=SEED)
    state_bytes = sv.new_state(12, 8).amplitudes.nbytes
    tracemalloc.start()
    start = time.perf_counter()
    r = solve_instance(inst, cfg)
    elapsed = time.perf_counter() - start
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    mib = 2**20
    ok = elapsed < 10.0 and state_bytes < 64 * mib and r.status == "ok"
    report(
        7, "scale n=8, t=12", ok,
        f"2^20 amplitudes, {elapsed:.2f} s (limit 10 s), state vector {state_bytes / mib:.0f} MiB "
        f"(limit 64 MiB), whole-pipeline traced peak {peak / mib:.1f} MiB, "
        f"answer agrees with oracle: {r.oracle['agrees']}",
    )


def test_criterion_8_excluded_runtime_claims(report):
    rows = bench(RunConfig(seed=SEED), range(2, 9), bits=4)
    counted = all(r["qpe_gates"] > 0 and "aa_iterations" in r for r in rows)
    report(
        8, "runtime claims (excluded)", counted,
        "asymptotic runtime claims are not reproduced; substituted by bench gate counts "
        f"for n = 2..8 (qpe gates {[r['qpe_gates'] for r in rows]}) and the success rates of criterion 5",
    )
