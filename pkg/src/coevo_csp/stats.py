"""Mann-Whitney U test and Vargha-Delaney A effect size."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from typing import NamedTuple

EXACT_MAX_POOLED = 16


class MWUResult(NamedTuple):
    U: float
    p: float
    u_a: float
    u_b: float
    exact: bool


def midranks(values) -> list:
    """1-based ranks with ties sharing the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


def _exact_p(ranks2, na, observed_dev2):
    """Two-sided exact p from the permutation law of the doubled rank sum.

    ``ranks2`` are doubled midranks (integers); ``observed_dev2`` is the
    doubled |U - mean| of the observed split.
    """
    total = len(ranks2)
    # ways[k][s]: subsets of size k with doubled rank sum s
    ways = [dict() for _ in range(na + 1)]
    ways[0][0] = 1
    for r in ranks2:
        for k in range(min(na, total) - 1, -1, -1):
            row = ways[k]
            nxt = ways[k + 1]
            for s, c in row.items():
                nxt[s + r] = nxt.get(s + r, 0) + c
    nb = total - na
    offset2 = na * (na + 1)  # doubled na(na+1)/2
    mean2 = na * nb
    extreme = 0
    for s, c in ways[na].items():
        if abs((s - offset2) - mean2) >= observed_dev2:
            extreme += c
    return extreme / math.comb(total, na)


def _normal_p(pooled_ranks, na, nb, u_a):
    n = na + nb
    counts = {}
    for r in pooled_ranks:
        counts[r] = counts.get(r, 0) + 1
    ties = sum(t ** 3 - t for t in counts.values())
    var = na * nb / 12.0 * ((n + 1) - ties / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return 1.0
    dev = abs(u_a - na * nb / 2.0) - 0.5
    if dev <= 0:
        return 1.0
    z = dev / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def mann_whitney_u(a, b, method: str = "auto") -> MWUResult:
    """Two-sided Mann-Whitney U test.

    ``method`` is ``"auto"`` (exact when the pooled size is at most 16),
    ``"exact"`` or ``"normal"`` (tie-corrected, with continuity correction).
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise ValueError("Mann-Whitney U needs two non-empty samples")
    na, nb = len(a), len(b)
    ranks = midranks(a + b)
    r_a = sum(ranks[:na])
    u_a = r_a - na * (na + 1) / 2.0
    u_b = na * nb - u_a
    if method == "auto":
        method = "exact" if na + nb <= EXACT_MAX_POOLED else "normal"
    if method == "exact":
        ranks2 = [int(round(2 * r)) for r in ranks]
        dev2 = abs(int(round(2 * u_a)) - na * nb)
        p = _exact_p(ranks2, na, dev2)
    elif method == "normal":
        p = _normal_p(ranks, na, nb, u_a)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MWUResult(min(u_a, u_b), min(1.0, p), u_a, u_b, method == "exact")


def vargha_delaney_a(a, b) -> float:
    """Probability that a draw from ``a`` exceeds one from ``b`` (ties count half)."""
    a, b = list(a), list(b)
    if not a or not b:
        raise ValueError("Vargha-Delaney A needs two non-empty samples")
    ordered = sorted(b)
    greater = ties = 0
    for x in a:
        lo = bisect_left(ordered, x)
        hi = bisect_right(ordered, x)
        greater += lo
        ties += hi - lo
    return (2 * greater + ties) / (2 * len(a) * len(b))
