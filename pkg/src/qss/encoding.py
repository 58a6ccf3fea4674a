"""Dyadic eigenphase encoding of subset sums.

Every element x_i becomes the phase x_i / 2**t of a single-qubit rotation
R_i = diag(1, exp(2 pi i x_i / 2**t)).  The Kronecker product of the R_i is a
diagonal unitary whose eigenphases are exactly the 2**n subset sums divided
by 2**t, so a t-bit phase register reads raw integer sums with no rounding.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

DEFAULT_MAX_ELEMENTS = 10


@dataclass(frozen=True)
class ProblemInstance:
    elements: tuple[int, ...]
    target: int

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise ValueError("the element set must not be empty")
        for x in elements:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise TypeError(f"elements must be integers, got {x!r}")
            if x < 1:
                raise ValueError(f"elements must be positive integers, got {x}")
        if isinstance(self.target, bool) or not isinstance(self.target, (int, np.integer)):
            raise TypeError(f"target must be an integer, got {self.target!r}")
        if self.target < 0:
            raise ValueError(f"target must be non-negative, got {self.target}")
        object.__setattr__(self, "elements", tuple(int(x) for x in elements))
        object.__setattr__(self, "target", int(self.target))

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def total(self) -> int:
        return sum(self.elements)


@dataclass(frozen=True)
class ScaledInstance:
    """Elements as numerators over the common denominator 2**phase_bits."""

    numerators: tuple[int, ...]
    phase_bits: int
    scaled_target: int

    def __post_init__(self):
        n, t = len(self.numerators), self.phase_bits
        if n == 0:
            raise ValueError("the element set must not be empty")
        if t < n:
            raise ValueError(f"phase_bits={t} must be at least n={n}")
        if 2 * sum(self.numerators) > 2**t:
            raise ValueError(
                f"sum of elements {sum(self.numerators)} exceeds 2**(t-1) = {2 ** (t - 1)}"
            )

    @property
    def n(self) -> int:
        return len(self.numerators)

    @property
    def denominator(self) -> int:
        return 2**self.phase_bits

    @property
    def scaled_elements(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.denominator) for x in self.numerators)


@dataclass(frozen=True)
class DiagonalUnitary:
    """Diagonal of U stored as integer phase numerators over ``denominator``.

    ``numerators[j]`` is the raw subset sum of subset index j, bit i of j
    selecting element i.
    """

    numerators: tuple[int, ...]
    denominator: int

    @property
    def phases(self) -> list[Fraction]:
        return [Fraction(m, self.denominator) for m in self.numerators]

    def __len__(self) -> int:
        return len(self.numerators)

    def as_array(self) -> np.ndarray:
        """Complex diagonal entries exp(2 pi i phi_j)."""
        m = np.asarray(self.numerators, dtype=np.int64) % self.denominator
        return np.exp(2j * np.pi * m / self.denominator)


def default_phase_bits(elements: Sequence[int]) -> int:
    total = sum(elements)
    # ceil(log2(total)) computed exactly on integers
    return max(len(elements), (total - 1).bit_length() + 1)


def scale_instance(
    instance: ProblemInstance,
    t_override: Optional[int] = None,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> ScaledInstance:
    if instance.n > max_elements:
        raise ValueError(f"n={instance.n} exceeds the configured maximum of {max_elements}")
    t = default_phase_bits(instance.elements) if t_override is None else int(t_override)
    if t < 1:
        raise ValueError(f"phase_bits must be positive, got {t}")
    return ScaledInstance(instance.elements, t, instance.target)


def phase_of(scaled: ScaledInstance, subset_index: int) -> Fraction:
    if not 0 <= subset_index < 2**scaled.n:
        raise IndexError(f"subset index {subset_index} outside [0, {2 ** scaled.n})")
    total = sum(x for i, x in enumerate(scaled.numerators) if subset_index >> i & 1)
    return Fraction(total, scaled.denominator)


def subset_sums(elements: Sequence[int]) -> np.ndarray:
    """Raw sums of all 2**n subsets, indexed by membership bitmask."""
    sums = np.zeros(1, dtype=np.int64)
    for x in elements:
        sums = np.concatenate([sums, sums + x])
    return sums


def build_diagonal(scaled: ScaledInstance) -> DiagonalUnitary:
    sums = subset_sums(scaled.numerators)
    return DiagonalUnitary(tuple(int(v) for v in sums), scaled.denominator)


def kron_diagonal(scaled: ScaledInstance) -> list[Fraction]:
    """Phases of R_{n-1} (x) ... (x) R_0 by explicit Kronecker products.

    Works on phases (exponents) so the product of diagonal entries becomes a
    sum of exact fractions.  Kept separate from :func:`build_diagonal` so the
    two constructions can be checked against each other.
    """
    result = [Fraction(0)]
    for x in scaled.scaled_elements:
        factor = [Fraction(0), x]
        # result <- kron(R_j, result); kron(a, b)[i*len(b) + k] = a[i] * b[k], phases add
        result = [a + b for a in factor for b in result]
    return [p % 1 for p in result]


def instance_from_dict(data: dict) -> tuple[ProblemInstance, Optional[int]]:
    """Parse one instance record ``{"set": [...], "target": s, "t": optional}``."""
    if not isinstance(data, dict):
        raise ValueError("instance record must be a JSON object")
    try:
        elements, target = data["set"], data["target"]
    except KeyError as exc:
        raise ValueError(f"instance record missing key {exc}") from None
    if not isinstance(elements, list):
        raise ValueError("'set' must be a list of integers")
    t = data.get("t")
    return ProblemInstance(tuple(elements), target), t


def iter_instance_file(path: str | Path) -> Iterator[tuple[int, str, Optional[dict]]]:
    """Yield (line number, raw text, parsed object or None) for each non-blank line."""
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError:
                obj = None
            yield lineno, text, obj
