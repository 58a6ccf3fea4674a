"""Classical ground truth for subset-sum: enumeration, DP with witness, verification."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .encoding import ProblemInstance, subset_sums

BRUTE_FORCE_MAX_N = 20
DP_DEFAULT_BUDGET = 50_000_000


@dataclass(frozen=True)
class OracleAnswer:
    decision: bool
    witness: Optional[list[int]]
    max_reachable_leq_target: int
    good_count: int

    def to_dict(self) -> dict:
        return asdict(self)


def mask_to_indices(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def indices_to_mask(indices: Sequence[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def brute_force(instance: ProblemInstance, max_n: int = BRUTE_FORCE_MAX_N) -> OracleAnswer:
    if instance.n > max_n:
        raise ValueError(f"n={instance.n} exceeds the brute-force cap of {max_n}")
    sums = subset_sums(instance.elements)
    s = instance.target
    good = sums <= s
    hits = np.flatnonzero(sums == s)
    witness = mask_to_indices(int(hits[0])) if hits.size else None
    return OracleAnswer(
        decision=bool(hits.size),
        witness=witness,
        max_reachable_leq_target=int(sums[good].max()),
        good_count=int(good.sum()),
    )


def dp_solve(instance: ProblemInstance, budget: int = DP_DEFAULT_BUDGET) -> OracleAnswer:
    """Reachability over sums 0..s with a back-pointer per newly reached sum.

    ``good_count`` is the number of subsets with sum <= s, counted by a
    second table of subset multiplicities.
    """
    s, xs = instance.target, instance.elements
    if (s + 1) * instance.n > budget:
        raise MemoryError(f"DP table (s+1)*n = {(s + 1) * instance.n} exceeds budget {budget}")
    # parent[v] = index of the element whose addition first reached v, -1 for v=0
    parent = np.full(s + 1, -2, dtype=np.int64)
    parent[0] = -1
    counts = np.zeros(s + 1, dtype=object)
    counts[0] = 1
    for i, x in enumerate(xs):
        if x > s:
            continue
        reached = parent[: s + 1 - x] != -2
        newly = reached & (parent[x:] == -2)
        parent[x:][newly] = i
        counts[x:] = counts[x:] + counts[: s + 1 - x]
    reachable = np.flatnonzero(parent != -2)
    best = int(reachable.max())
    witness = None
    if parent[s] != -2:
        witness, v = [], s
        while v > 0:
            i = int(parent[v])
            witness.append(i)
            v -= xs[i]
        witness.sort()
    return OracleAnswer(
        decision=witness is not None,
        witness=witness,
        max_reachable_leq_target=best,
        good_count=int(sum(counts)),
    )


def verify(instance: ProblemInstance, subset: Sequence[int]) -> bool:
    subset = list(subset)
    if len(set(subset)) != len(subset):
        raise ValueError(f"duplicate index in subset {subset}")
    for i in subset:
        if not 0 <= i < instance.n:
            raise IndexError(f"element index {i} outside [0, {instance.n})")
    return sum(instance.elements[i] for i in subset) == instance.target
