"""One-sided Mann-Whitney U test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

EXACT_MAX_N = 20


@dataclass(frozen=True)
class MannWhitneyResult:
    p_value: float
    u_statistic: float
    tied: bool
    method: str


@lru_cache(maxsize=None)
def u_distribution(n: int, m: int) -> tuple[int, ...]:
    """Counts of arrangements with ``U = 0..n*m`` for samples of size ``n`` and ``m``.

    Built with the recursion ``c(n, m, u) = c(n-1, m, u-m) + c(n, m-1, u)``.
    Total is ``C(n+m, n)``.
    """
    # table[j][u] holds counts for (i, j) while sweeping i
    table = [[1] + [0] * (n * m) for _ in range(m + 1)]
    for i in range(1, n + 1):
        row = [[0] * (n * m + 1) for _ in range(m + 1)]
        row[0][0] = 1
        for j in range(1, m + 1):
            prev_i = table[j]
            prev_j = row[j - 1]
            cur = row[j]
            for u in range(i * j + 1):
                c = prev_j[u]
                if u >= j:
                    c += prev_i[u - j]
                cur[u] = c
        table = row
    return tuple(table[m])


def u_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """Pairs with ``a > b``, ties counting one half."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = a[:, None] - b[None, :]
    return float((diff > 0).sum() + 0.5 * (diff == 0).sum())


def significance(a: Sequence[float], b: Sequence[float]) -> MannWhitneyResult:
    """P-value for the alternative that ``a`` is stochastically larger than ``b``.

    Exact null distribution when both samples have at most 20 values (ties
    are scored as one half and then treated as if absent), normal
    approximation with tie and continuity corrections otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, m = a.size, b.size
    if n < 1 or m < 1:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    u = u_statistic(a, b)
    if np.all(pooled == pooled[0]) or (n == m and np.array_equal(np.sort(a), np.sort(b))):
        # identical samples carry no evidence either way
        return MannWhitneyResult(0.5, u, True, "degenerate")
    tied = len(np.unique(pooled)) < pooled.size

    if n <= EXACT_MAX_N and m <= EXACT_MAX_N:
        counts = u_distribution(n, m)
        total = math.comb(n + m, n)
        start = math.ceil(u)  # half-integer U from ties rounds towards the tail
        p = sum(counts[start:]) / total
        return MannWhitneyResult(float(p), u, tied, "exact")

    mean = n * m / 2.0
    _, tie_counts = np.unique(pooled, return_counts=True)
    N = n + m
    tie_term = float(((tie_counts**3) - tie_counts).sum()) / (N * (N - 1))
    var = n * m / 12.0 * ((N + 1) - tie_term)
    z = (u - mean - 0.5) / math.sqrt(var)
    p = 0.5 * math.erfc(z / math.sqrt(2.0))
    return MannWhitneyResult(float(p), u, tied, "normal")
