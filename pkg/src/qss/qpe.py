"""Phase estimation over the subset-sum diagonal unitary.

With dyadic scaling every eigenphase has exactly t binary digits, so the
output state is sum_j |sum(j)> |j> / sqrt(2**n) with no estimation error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import statevector as sv
from .encoding import DiagonalUnitary, ScaledInstance, build_diagonal
from .statevector import QuantumState


@dataclass
class QpeOutput:
    state: QuantumState
    log: list[sv.Gate]
    diagonal: DiagonalUnitary

    def gate_counts(self) -> dict[str, int]:
        return sv.gate_counts(self.log)


def prepare_initial(t: int, n: int) -> QuantumState:
    """|0>^t (x) H^n |0>^n."""
    state = sv.new_state(t, n)
    for q in range(n):
        sv.apply_hadamard(state, state.subset_qubit(q))
    return state


def apply_qpe_circuit(state: QuantumState, diag: DiagonalUnitary) -> None:
    """Hadamard the phase register, apply the controlled powers, then QFT^-1.

    The phase qubit with integer weight 2**j (bit position n + j) controls
    U**(2**j); equivalently digit b_{t-j} of 0.b_1...b_t.
    """
    for i in range(1, state.t + 1):
        sv.apply_hadamard(state, state.phase_qubit(i))
    for j in range(state.t):
        sv.apply_controlled_diagonal_power(state, state.n + j, diag, 2**j)
    sv.apply_inverse_qft(state)


def run_qpe(scaled: ScaledInstance) -> QpeOutput:
    diag = build_diagonal(scaled)
    state = prepare_initial(scaled.phase_bits, scaled.n)
    apply_qpe_circuit(state, diag)
    return QpeOutput(state, list(state.log), diag)


def stage_counts(out: QpeOutput) -> dict[str, int]:
    """Gate counts split into preparation, controlled powers and the inverse QFT."""
    t, n = out.state.t, out.state.n
    prep, rest = out.log[:n], out.log[n:]
    ladder, qft = rest[: 2 * t], rest[2 * t :]
    q = sv.gate_counts(qft)
    return {
        "prep_h": len(prep),
        "phase_h": sum(g.kind == "h" for g in ladder),
        "controlled_powers": sum(g.kind == "cdiag" for g in ladder),
        "qft_h": q.get("h", 0),
        "qft_cphase": q.get("cphase", 0),
        "qft_swap": q.get("swap", 0),
    }


def apply_preparation(state: QuantumState, diag: DiagonalUnitary) -> None:
    """The full preparation map A = U_QPE (I (x) H^n) applied to an arbitrary state."""
    for q in range(state.n):
        sv.apply_hadamard(state, state.subset_qubit(q))
    apply_qpe_circuit(state, diag)


def off_support_mass(state: QuantumState, diag: DiagonalUnitary) -> float:
    """Probability outside the ideal support {(sum(j), j)}."""
    mat = state.matrix()
    rows = np.asarray(diag.numerators, dtype=np.int64) % (1 << state.t)
    cols = np.arange(1 << state.n)
    on = mat[rows, cols]
    return max(0.0, state.norm() - float(np.sum(np.abs(on) ** 2)))


def support_amplitudes(state: QuantumState, diag: DiagonalUnitary) -> np.ndarray:
    rows = np.asarray(diag.numerators, dtype=np.int64) % (1 << state.t)
    return state.matrix()[rows, np.arange(1 << state.n)]
