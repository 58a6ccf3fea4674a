"""Most-significant-first readout of the largest good subset sum.

Each phase digit is measured in turn.  When a digit reads 0 while retries
remain, the pre-measurement state is amplified towards its |1> branch with
G_i = S_i (Z on digit i), S_i being the reflection about that state, and the
digit is measured again; retry r sees r applications of G_i.  If the |1>
branch already holds at least half the mass, retries re-measure without
amplifying.  A digit that never shows 1 is accepted as 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import statevector as sv
from .classical import mask_to_indices
from .statevector import QuantumState

DEFAULT_RETRIES = 3
# |1>-mass below this is rounding residue from the phase-estimation circuit
NOISE_FLOOR = 1e-20


class WitnessAnomaly(RuntimeError):
    """Register 2 collapsed to a subset whose sum differs from the measured phase."""


@dataclass
class BitStep:
    index: int
    p_one: float
    retries: int
    bit: int


@dataclass
class MaxSearchResult:
    bits: list[int]
    max_sum: int
    retries_used: list[int]
    final_state: QuantumState
    steps: list[BitStep] = field(default_factory=list)
    amplifications: int = 0


def conditional_amplify_bit(state: QuantumState, qubit: int, snapshot: QuantumState) -> None:
    """One G_i: phase-mark the |1> branch of ``qubit``, then reflect about ``snapshot``."""
    sv.apply_z(state, qubit)
    sv.reflect_about(state, snapshot)


def amplified_p_one(p: float, rounds: int = 1) -> float:
    """|1>-mass after ``rounds`` applications of G_i starting from mass p."""
    return math.sin((2 * rounds + 1) * math.asin(math.sqrt(min(max(p, 0.0), 1.0)))) ** 2


def find_max_phase(
    psi2: QuantumState,
    retries: int = DEFAULT_RETRIES,
    rng: Optional[np.random.Generator] = None,
    observer: Optional[Callable[[int, list[int], QuantumState], None]] = None,
) -> MaxSearchResult:
    """Read digits b_1..b_t of the largest phase present in ``psi2``.

    ``psi2`` is consumed (collapsed in place).  ``observer`` is called after
    every accepted digit with (digit index, digits so far, current state).
    """
    if retries < 1:
        raise ValueError("retries must be at least 1")
    rng = np.random.default_rng() if rng is None else rng
    state = psi2
    bits: list[int] = []
    retries_used: list[int] = []
    steps: list[BitStep] = []
    amplifications = 0
    for i in range(1, state.t + 1):
        q = state.phase_qubit(i)
        p_one = sv.marginal_probability(state, q, 1)
        # Outcomes are drawn from the marginal and only the accepted one is
        # collapsed; discarded |0> readings leave no trace on the untouched copy,
        # so this matches measure / re-prepare in distribution with at most two
        # vectors alive.
        bit = sv.sample_qubit(state, q, rng)
        used = 0
        amplified = None
        # with no |1> component G_i only changes the global phase
        while bit == 0 and used < retries and p_one > NOISE_FLOOR:
            used += 1
            if p_one >= 0.5:
                # G_i is a fixed point at 1/2 and overshoots above it: re-measure as is
                bit = sv.sample_qubit(state, q, rng)
            else:
                if amplified is None:
                    amplified = state.copy(keep_log=False)
                conditional_amplify_bit(amplified, q, state)
                amplifications += 1
                bit = sv.sample_qubit(amplified, q, rng)
        if amplified is not None:
            # the last reading, accepted or not, was taken on the amplified copy
            state.amplitudes[:] = amplified.amplitudes
        del amplified
        sv.collapse_qubit(state, q, bit)
        bits.append(bit)
        retries_used.append(used)
        steps.append(BitStep(i, p_one, used, bit))
        if observer is not None:
            observer(i, list(bits), state)
    max_sum = int("".join(map(str, bits)), 2)
    return MaxSearchResult(bits, max_sum, retries_used, state, steps, amplifications)


def decode_solution(
    result: MaxSearchResult,
    elements: tuple[int, ...],
    rng: Optional[np.random.Generator] = None,
) -> list[int]:
    """Measure Register 2 of the collapsed state and return the witness indices.

    The witness sum is re-checked against ``result.max_sum``; a mismatch
    raises :class:`WitnessAnomaly`.
    """
    rng = np.random.default_rng() if rng is None else rng
    state = result.final_state
    for i in range(state.n):
        sv.measure_qubit(state, state.subset_qubit(i), rng)
    k = int(np.argmax(np.abs(state.amplitudes)))
    mask = k & ((1 << state.n) - 1)
    witness = mask_to_indices(mask)
    total = sum(elements[i] for i in witness)
    if total != result.max_sum:
        raise WitnessAnomaly(
            f"witness {witness} sums to {total} but the phase register reads {result.max_sum}"
        )
    return witness
