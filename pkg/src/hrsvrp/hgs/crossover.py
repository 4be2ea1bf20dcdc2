from __future__ import annotations

from typing import Sequence

import numpy as np


def ox_crossover(p1: Sequence[int], p2: Sequence[int], rng: np.random.Generator | None = None,
                 cuts: tuple[int, int] | None = None) -> list[int]:
    """Order crossover.

    The child keeps ``p1[start:end + 1]`` in place and fills the remaining
    positions, starting right after ``end`` and wrapping around, with the
    customers of ``p2`` read in order from the same position.
    """
    n = len(p1)
    if cuts is None:
        start, end = sorted(rng.integers(0, n, size=2))
    else:
        start, end = cuts
    child = [0] * n
    kept = set()
    for k in range(start, end + 1):
        child[k] = p1[k]
        kept.add(p1[k])
    k = (end + 1) % n
    for t in range(n):
        c = p2[(end + 1 + t) % n]
        if c in kept:
            continue
        child[k] = c
        k = (k + 1) % n
    return child
