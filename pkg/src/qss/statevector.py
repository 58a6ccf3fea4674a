"""In-place state-vector kernel for a two-register (phase, subset) system.

Basis index layout: ``k = (r1 << n) | r2``.  ``r1`` is the t-bit phase
register and ``r2`` the n-bit subset register.  Qubits are addressed by their
bit position in ``k`` (0 = least significant), so the subset qubit for
element i sits at position i and phase-register qubit number i (1-based,
most significant first, i.e. the digit b_i of 0.b_1 b_2 ... b_t) sits at
position ``n + t - i``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .encoding import DiagonalUnitary

DEFAULT_MAX_QUBITS = 24
NORM_TOL = 1e-9
_CHUNK = 1 << 16
_SQRT_HALF = 1.0 / math.sqrt(2.0)


def max_qubits() -> int:
    return int(os.environ.get("QSS_MAX_QUBITS", DEFAULT_MAX_QUBITS))


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: object = None


@dataclass
class QuantumState:
    t: int
    n: int
    amplitudes: np.ndarray
    log: list[Gate] = field(default_factory=list)

    @property
    def num_qubits(self) -> int:
        return self.t + self.n

    @property
    def dim(self) -> int:
        return 1 << (self.t + self.n)

    def copy(self, keep_log: bool = True) -> "QuantumState":
        return QuantumState(
            self.t, self.n, self.amplitudes.copy(), list(self.log) if keep_log else []
        )

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def matrix(self) -> np.ndarray:
        """View of the amplitudes as a (2**t, 2**n) array indexed [r1, r2]."""
        return self.amplitudes.reshape(1 << self.t, 1 << self.n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def phase_qubit(self, i: int) -> int:
        """Bit position of phase-register digit b_i, 1 <= i <= t."""
        if not 1 <= i <= self.t:
            raise IndexError(f"phase qubit {i} outside [1, {self.t}]")
        return self.n + self.t - i

    def subset_qubit(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"subset qubit {i} outside [0, {self.n})")
        return i


def new_state(t: int, n: int) -> QuantumState:
    if t < 1 or n < 1:
        raise ValueError(f"both registers need at least one qubit (t={t}, n={n})")
    cap = max_qubits()
    if t + n > cap:
        raise ValueError(f"t+n={t + n} qubits exceeds the cap of {cap} (QSS_MAX_QUBITS)")
    amps = np.zeros(1 << (t + n), dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(t, n, amps)


def _check_qubit(state: QuantumState, q: int) -> None:
    if not 0 <= q < state.num_qubits:
        raise IndexError(f"qubit {q} outside [0, {state.num_qubits})")


def _split(state: QuantumState, q: int) -> np.ndarray:
    return state.amplitudes.reshape(1 << (state.num_qubits - 1 - q), 2, 1 << q)


def apply_single(state: QuantumState, qubit: int, matrix: np.ndarray, kind: str = "u") -> None:
    _check_qubit(state, qubit)
    view = _split(state, qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    m = np.asarray(matrix, dtype=np.complex128)
    view[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    view[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1
    state.log.append(Gate(kind, (qubit,), m.tobytes() if kind == "u" else None))


def apply_hadamard(state: QuantumState, qubit: int) -> None:
    _check_qubit(state, qubit)
    view = _split(state, qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    a0 += a1
    view[:, 1, :] = a0 - 2 * a1
    view[:, 0, :] = a0
    view *= _SQRT_HALF
    state.log.append(Gate("h", (qubit,)))


def apply_x(state: QuantumState, qubit: int) -> None:
    _check_qubit(state, qubit)
    view = _split(state, qubit)
    view[:, [0, 1], :] = view[:, [1, 0], :]
    state.log.append(Gate("x", (qubit,)))


def apply_z(state: QuantumState, qubit: int) -> None:
    _check_qubit(state, qubit)
    _split(state, qubit)[:, 1, :] *= -1
    state.log.append(Gate("z", (qubit,)))


def apply_controlled_phase(state: QuantumState, control: int, target: int, angle: float) -> None:
    """Multiply by exp(i*angle) wherever both bits are 1 (symmetric in its qubits)."""
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    nq = state.num_qubits
    tensor = state.amplitudes.reshape((2,) * nq)
    index = [slice(None)] * nq
    index[nq - 1 - control] = 1
    index[nq - 1 - target] = 1
    tensor[tuple(index)] *= np.exp(1j * angle)
    state.log.append(Gate("cphase", (control, target), float(angle)))


def apply_swap(state: QuantumState, a: int, b: int) -> None:
    _check_qubit(state, a)
    _check_qubit(state, b)
    if a == b:
        return
    nq = state.num_qubits
    tensor = state.amplitudes.reshape((2,) * nq)
    i01 = [slice(None)] * nq
    i10 = [slice(None)] * nq
    i01[nq - 1 - a], i01[nq - 1 - b] = 0, 1
    i10[nq - 1 - a], i10[nq - 1 - b] = 1, 0
    tmp = tensor[tuple(i01)].copy()
    tensor[tuple(i01)] = tensor[tuple(i10)]
    tensor[tuple(i10)] = tmp
    state.log.append(Gate("swap", (a, b)))


def apply_controlled_diagonal_power(
    state: QuantumState, control_qubit: int, diag: DiagonalUnitary, power: int
) -> None:
    """Controlled-U**power with U diagonal on the subset register.

    The phase exponent is reduced modulo the denominator in integers, so
    U**(2**j) costs one pass over the amplitudes regardless of j.
    """
    _check_qubit(state, control_qubit)
    if control_qubit < state.n:
        raise ValueError("the control must be a phase-register qubit")
    if power < 1 or power & (power - 1):
        raise ValueError(f"power must be a positive power of two, got {power}")
    if len(diag) != 1 << state.n:
        raise ValueError("diagonal size does not match the subset register")
    m = (np.asarray(diag.numerators, dtype=np.int64) * power) % diag.denominator
    phase = np.exp(2j * np.pi * m / diag.denominator)
    j = control_qubit - state.n
    view = state.amplitudes.reshape(1 << (state.t - 1 - j), 2, 1 << j, 1 << state.n)
    view[:, 1] *= phase
    state.log.append(Gate("cdiag", (control_qubit,), (power, diag.numerators, diag.denominator)))


def _phase_register(state: QuantumState) -> list[int]:
    return [state.phase_qubit(i) for i in range(1, state.t + 1)]


def apply_qft(state: QuantumState) -> None:
    """Forward QFT on the phase register: |x> -> 2**(-t/2) sum_y exp(2 pi i x y / 2**t) |y>."""
    qs = _phase_register(state)
    t = len(qs)
    for i in range(t):
        apply_hadamard(state, qs[i])
        for k in range(i + 1, t):
            apply_controlled_phase(state, qs[k], qs[i], 2 * math.pi / 2 ** (k - i + 1))
    for a in range(t // 2):
        apply_swap(state, qs[a], qs[t - 1 - a])


def apply_inverse_qft(state: QuantumState) -> None:
    """Exact inverse of :func:`apply_qft`: gate order reversed, angles negated."""
    qs = _phase_register(state)
    t = len(qs)
    for a in range(t // 2):
        apply_swap(state, qs[a], qs[t - 1 - a])
    for i in reversed(range(t)):
        for k in reversed(range(i + 1, t)):
            apply_controlled_phase(state, qs[k], qs[i], -2 * math.pi / 2 ** (k - i + 1))
        apply_hadamard(state, qs[i])


def marginal_probability(state: QuantumState, qubit: int, bit_value: int) -> float:
    _check_qubit(state, qubit)
    part = _split(state, qubit)[:, bit_value, :]
    return float(np.sum(part.real**2 + part.imag**2))


def conditional_distribution(
    state: QuantumState, register: str, given: Optional[tuple[str, int]] = None
) -> np.ndarray:
    """Distribution of register ``"r1"`` or ``"r2"``, optionally conditioned on the other.

    ``given=("r2", j)`` conditions on the subset register holding j.
    """
    probs = np.abs(state.matrix()) ** 2
    if given is not None:
        other, value = given
        if other == "r2":
            probs = probs[:, value : value + 1]
        elif other == "r1":
            probs = probs[value : value + 1, :]
        else:
            raise ValueError(f"unknown register {other!r}")
    total = probs.sum()
    if total <= 0:
        raise ValueError("conditioning event has zero probability")
    axis = {"r1": 1, "r2": 0}[register]
    return probs.sum(axis=axis) / total


def _collapse(state: QuantumState, view_keep: np.ndarray, view_drop: np.ndarray, p: float) -> None:
    if p <= 0:
        raise FloatingPointError("measured outcome has zero probability (numerical corruption)")
    view_drop[...] = 0
    view_keep /= math.sqrt(p)


def sample_qubit(state: QuantumState, qubit: int, rng: np.random.Generator) -> int:
    """Draw a Born-rule outcome for ``qubit`` without touching the state."""
    p1 = marginal_probability(state, qubit, 1)
    p0 = marginal_probability(state, qubit, 0)
    return int(rng.random() * (p0 + p1) < p1)


def collapse_qubit(state: QuantumState, qubit: int, bit: int) -> None:
    """Project ``qubit`` onto ``bit`` and renormalize."""
    view = _split(state, qubit)
    _collapse(state, view[:, bit, :], view[:, 1 - bit, :], marginal_probability(state, qubit, bit))
    state.log.append(Gate("measure", (qubit,), bit))


def measure_qubit(state: QuantumState, qubit: int, rng: np.random.Generator) -> int:
    bit = sample_qubit(state, qubit, rng)
    collapse_qubit(state, qubit, bit)
    return bit


def project_rows(state: QuantumState, upper: int, keep_lower: bool) -> None:
    """Project onto r1 <= upper (``keep_lower``) or r1 > upper and renormalize."""
    mat = state.matrix()
    lo, hi = mat[: upper + 1], mat[upper + 1 :]
    keep, drop = (lo, hi) if keep_lower else (hi, lo)
    p = float(np.sum(keep.real**2 + keep.imag**2))
    _collapse(state, keep, drop, p)


def reflect_zero(state: QuantumState, register_mask: int) -> None:
    """I - 2|0><0| on the masked qubits: negate amplitudes whose masked bits are all 0."""
    if register_mask <= 0 or register_mask >> state.num_qubits:
        raise ValueError("mask must select at least one valid qubit")
    idx = np.arange(state.dim, dtype=np.int64)
    state.amplitudes[(idx & register_mask) == 0] *= -1
    state.log.append(Gate("reflect_zero", (), register_mask))


def full_mask(state: QuantumState) -> int:
    return (1 << state.num_qubits) - 1


def reflect_about(state: QuantumState, reference: QuantumState | np.ndarray) -> None:
    """psi <- 2 <ref|psi> ref - psi, done in chunks to avoid a full-size temporary."""
    ref = reference.amplitudes if isinstance(reference, QuantumState) else reference
    psi = state.amplitudes
    if ref.shape != psi.shape:
        raise ValueError(f"dimension mismatch: {ref.shape} vs {psi.shape}")
    c = 2 * np.vdot(ref, psi)
    for start in range(0, psi.size, _CHUNK):
        block = psi[start : start + _CHUNK]
        np.negative(block, out=block)
        block += c * ref[start : start + _CHUNK]
    state.log.append(Gate("reflect", ()))


def replay(log: Sequence[Gate], t: int, n: int) -> QuantumState:
    """Rebuild a state by applying ``log`` to |0...0>.

    Reflections about arbitrary reference states carry no reference and
    cannot be replayed.
    """
    state = new_state(t, n)
    for g in log:
        if g.kind == "h":
            apply_hadamard(state, g.qubits[0])
        elif g.kind == "x":
            apply_x(state, g.qubits[0])
        elif g.kind == "z":
            apply_z(state, g.qubits[0])
        elif g.kind == "u":
            apply_single(state, g.qubits[0], np.frombuffer(g.param, dtype=np.complex128).reshape(2, 2))
        elif g.kind == "cphase":
            apply_controlled_phase(state, g.qubits[0], g.qubits[1], g.param)
        elif g.kind == "swap":
            apply_swap(state, *g.qubits)
        elif g.kind == "cdiag":
            power, numerators, denominator = g.param
            apply_controlled_diagonal_power(
                state, g.qubits[0], DiagonalUnitary(numerators, denominator), power
            )
        elif g.kind == "reflect_zero":
            reflect_zero(state, g.param)
        elif g.kind == "measure":
            view = _split(state, g.qubits[0])
            bit = g.param
            keep = view[:, bit, :]
            _collapse(state, keep, view[:, 1 - bit, :], float(np.sum(np.abs(keep) ** 2)))
            state.log.append(g)
        else:
            raise ValueError(f"gate kind {g.kind!r} cannot be replayed")
    return state


def gate_counts(log: Sequence[Gate]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for g in log:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    return counts
