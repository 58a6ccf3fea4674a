"""Dense-matrix reference constructions shared by the test modules.

These build full 2**N x 2**N operators with np.kron so that every in-place
kernel routine can be checked against an independent matrix-vector product.
"""
import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from qss.encoding import ProblemInstance

I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
Z = np.diag([1, -1]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)


def dense_single(gate, qubit, num_qubits):
    """Kronecker product with ``gate`` at bit position ``qubit`` (MSB factor first)."""
    out = np.eye(1, dtype=complex)
    for pos in reversed(range(num_qubits)):
        out = np.kron(out, gate if pos == qubit else I2)
    return out


def dense_controlled_phase(a, b, angle, num_qubits):
    k = np.arange(2**num_qubits)
    both = ((k >> a) & 1) & ((k >> b) & 1)
    return np.diag(np.where(both == 1, np.exp(1j * angle), 1.0))


def dense_inverse_qft(t, n):
    dim = 2**t
    x = np.arange(dim)
    f_inv = np.exp(-2j * np.pi * np.outer(x, x) / dim) / np.sqrt(dim)
    return np.kron(f_inv, np.eye(2**n))


def dense_controlled_power(sums, t, n, j):
    """Controlled-U**(2**j), U = diag(exp(2 pi i sums / 2**t)), control = bit n + j."""
    k = np.arange(2 ** (t + n))
    r2 = k & (2**n - 1)
    ctrl = (k >> (n + j)) & 1
    phase = np.exp(2j * np.pi * (np.asarray(sums)[r2] * 2**j) / 2**t)
    return np.diag(np.where(ctrl == 1, phase, 1.0))


def all_subset_sums(elements):
    """Enumerate subsets with itertools, independent of encoding.subset_sums."""
    n = len(elements)
    sums = [0] * 2**n
    for bits in itertools.product([0, 1], repeat=n):
        idx = sum(b << i for i, b in enumerate(bits))
        sums[idx] = sum(x for x, b in zip(elements, bits) if b)
    return sums


def random_state(num_qubits, rng):
    v = rng.normal(size=2**num_qubits) + 1j * rng.normal(size=2**num_qubits)
    return v / np.linalg.norm(v)


@st.composite
def instances(draw, min_n=1, max_n=6, max_value=31):
    n = draw(st.integers(min_n, max_n))
    elements = draw(st.lists(st.integers(1, max_value), min_size=n, max_size=n))
    target = draw(st.integers(0, sum(elements) + 2))
    return ProblemInstance(tuple(elements), target)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
