"""Betti numbers of a chain complex from cell counts and boundary ranks."""

from __future__ import annotations

from typing import Sequence


class BettiError(ValueError):
    pass


def betti_numbers(counts: Sequence[int], ranks: Sequence[int]) -> list[int]:
    """``b_j = n_j - rank(d_j) - rank(d_{j+1})``.

    ``ranks[k]`` is the rank of the boundary from dimension ``k + 1`` to ``k``,
    so ``len(ranks) == len(counts) - 1``; the outer ranks are zero.
    """
    if len(ranks) != len(counts) - 1:
        raise BettiError(f"need {len(counts) - 1} ranks for {len(counts)} cell counts, got {len(ranks)}")
    full = [0, *ranks, 0]
    out = []
    for j, n in enumerate(counts):
        b = n - full[j] - full[j + 1]
        if b < 0:
            raise BettiError(f"negative Betti number b_{j} = {b}")
        out.append(b)
    return out
