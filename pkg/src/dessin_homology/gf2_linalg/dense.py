"""Bit-packed dense Gaussian elimination over GF(2)."""

from __future__ import annotations

import numba
import numpy as np

from .matrix import SparseBoolMatrix

DEFAULT_DENSE_CAP = 10**8  # bits


class DenseCapExceeded(MemoryError):
    pass


def pack_rows(m: SparseBoolMatrix) -> np.ndarray:
    """Rows as ``uint64`` words, bit ``j % 64`` of word ``j // 64``."""
    words = (m.n_cols + 63) // 64
    out = np.zeros((m.n_rows, max(words, 1)), dtype=np.uint64)
    r = m.row_ids()
    c = m.indices.astype(np.int64)
    np.bitwise_or.at(out, (r, c >> 6), np.left_shift(np.uint64(1), (c & 63).astype(np.uint64)))
    return out


@numba.njit(cache=True)
def _eliminate(work):
    n_rows, n_words = work.shape
    rank = 0
    for w in range(n_words):
        for b in range(64):
            if rank == n_rows:
                return rank
            bit = np.uint64(1) << np.uint64(b)
            pivot = -1
            for i in range(rank, n_rows):
                if work[i, w] & bit:
                    pivot = i
                    break
            if pivot < 0:
                continue
            if pivot != rank:
                for k in range(w, n_words):
                    tmp = work[pivot, k]
                    work[pivot, k] = work[rank, k]
                    work[rank, k] = tmp
            for i in range(rank + 1, n_rows):
                if work[i, w] & bit:
                    for k in range(w, n_words):
                        work[i, k] ^= work[rank, k]
            rank += 1
    return rank


def rank_dense(m: SparseBoolMatrix, cap: int = DEFAULT_DENSE_CAP) -> int:
    """Exact GF(2) rank by row reduction on packed 64-bit words."""
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    if m.n_rows * m.n_cols > cap:
        raise DenseCapExceeded(f"{m.n_rows}x{m.n_cols} exceeds dense cap of {cap} bits")
    if m.n_cols > m.n_rows:
        m = m.transpose()
    return int(_eliminate(pack_rows(m)))
