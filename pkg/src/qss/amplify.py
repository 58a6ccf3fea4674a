"""Amplitude amplification of the subset branches whose sum is at most the target.

The oracle negates every amplitude whose phase-register value r1 (the raw
subset sum) is <= s; the diffusion step reflects about the prepared state
psi_1.  After the iterations, a comparator measurement (is r1 <= s?) filters
the state onto the good subspace; on failure the state is re-prepared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import statevector as sv
from .encoding import ScaledInstance, subset_sums
from .qpe import QpeOutput
from .statevector import QuantumState

MODES = ("exact-count", "blind")
BLIND_GROWTH = 6 / 5
DEFAULT_MAX_RESTARTS = 64


@dataclass(frozen=True)
class GoodSetSummary:
    good_count: int
    bad_count: int
    theta: float
    optimal_k: int

    @property
    def good_fraction(self) -> float:
        return self.good_count / (self.good_count + self.bad_count)


def grover_angle(good: int, total: int) -> float:
    return math.asin(math.sqrt(good / total))


def optimal_iterations(good: int, total: int) -> int:
    """floor(pi / (4 theta)), or 0 once the good fraction is already >= 1/2.

    At good/total = 1/2 the rotation is a fixed point (sin^2((2k+1) pi/4) = 1/2)
    and above it any iteration overshoots, so no iteration is taken.
    """
    if 2 * good >= total:
        return 0
    return int(math.floor(math.pi / (4 * grover_angle(good, total))))


def count_good(scaled: ScaledInstance, s: Optional[int] = None) -> GoodSetSummary:
    s = scaled.scaled_target if s is None else s
    sums = subset_sums(scaled.numerators)
    good = int(np.count_nonzero(sums <= s))
    total = sums.size
    return GoodSetSummary(good, total - good, grover_angle(good, total), optimal_iterations(good, total))


def _last_good_row(state: QuantumState, s: int) -> int:
    return min(s, (1 << state.t) - 1)


def oracle_flip_leq(state: QuantumState, s: int) -> None:
    """Negate every amplitude with phase-register value r1 <= s.

    r1 is the high part of the basis index, so the good rows form one
    contiguous block of the (r1, r2) matrix.
    """
    state.matrix()[: _last_good_row(state, s) + 1] *= -1
    state.log.append(sv.Gate("oracle_leq", (), s))


def diffusion(state: QuantumState, reference: QuantumState) -> None:
    """2|psi_1><psi_1| - I."""
    sv.reflect_about(state, reference)


def grover_iterate(state: QuantumState, reference: QuantumState, s: int) -> None:
    oracle_flip_leq(state, s)
    diffusion(state, reference)


def good_mass(state: QuantumState, s: int) -> float:
    block = state.matrix()[: _last_good_row(state, s) + 1]
    return float(np.sum(block.real**2 + block.imag**2))


def analytic_good_mass(theta: float, k: int) -> float:
    return math.sin((2 * k + 1) * theta) ** 2


@dataclass
class AmplifyResult:
    state: Optional[QuantumState]
    success: bool
    mode: str
    iterations: int
    restarts: int
    summary: Optional[GoodSetSummary]
    # good mass just before each comparator measurement
    pre_measure_mass: list[float] = field(default_factory=list)
    schedule: list[int] = field(default_factory=list)


def _filter(state: QuantumState, s: int, rng: np.random.Generator) -> tuple[bool, float]:
    """Measure the comparator r1 <= s; collapse onto the observed side."""
    p = good_mass(state, s)
    ok = bool(rng.random() < p)
    sv.project_rows(state, _last_good_row(state, s), keep_lower=ok)
    state.log.append(sv.Gate("measure_leq", (), (s, ok)))
    return ok, p


def amplify_good(
    qpe_out: QpeOutput,
    scaled: ScaledInstance,
    s: Optional[int] = None,
    mode: str = "exact-count",
    rng: Optional[np.random.Generator] = None,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
) -> AmplifyResult:
    """Produce psi_2, the uniform superposition over good branches.

    ``exact-count`` knows |L| classically and applies the optimal number of
    iterations before each comparator measurement.  ``blind`` follows the
    randomized schedule with growth factor 6/5 and never looks at |L|.
    Each failed comparator measurement costs a fresh copy of psi_1.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    s = scaled.scaled_target if s is None else s
    rng = np.random.default_rng() if rng is None else rng
    reference = qpe_out.state
    result = AmplifyResult(None, False, mode, 0, 0, None)
    if mode == "exact-count":
        result.summary = count_good(scaled, s)
    total = reference.dim >> reference.t
    m = 1
    m_cap = max(1, math.ceil(math.sqrt(total)))
    for attempt in range(max_restarts + 1):
        if mode == "exact-count":
            k = result.summary.optimal_k
        else:
            k = int(rng.integers(0, m))
            m = min(math.ceil(BLIND_GROWTH * m), m_cap)
        state = reference.copy(keep_log=False)
        for _ in range(k):
            grover_iterate(state, reference, s)
        result.iterations += k
        result.schedule.append(k)
        ok, p = _filter(state, s, rng)
        result.pre_measure_mass.append(p)
        if ok:
            result.state, result.success, result.restarts = state, True, attempt
            return result
        del state
    result.restarts = max_restarts
    return result
