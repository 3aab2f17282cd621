"""
Exact rank over GF(2) (and small extensions GF(2^k)) by sparse structured
Gaussian elimination.

Rows are sorted column lists kept in one growable arena; each column keeps a
list of the rows that may contain it (entries go stale and are filtered on
use).  Rows and columns sit in buckets by current weight, and each pivot is
chosen Markowitz style: among a few candidates from the lightest row and the
lightest column buckets, the entry with the smallest ``(r - 1)(c - 1)``
fill estimate.  Singleton rows and columns cost nothing, so the sparse
phase removes most of a boundary matrix cheaply.  Once every pivot would be
expensive and the remaining active block fits under the dense cap, it is
finished by dense elimination on packed words.

Besides the rank, the elimination reports the original rows that served as
pivots.  They index a nonsingular ``rank x rank`` minor, which is what the
chain-complex clearing in :func:`chain_ranks` needs.
"""

from __future__ import annotations

import logging
import time

import numba
import numpy as np

from .dense import DEFAULT_DENSE_CAP
from .field import FieldMatrix, GF2k
from .matrix import SparseBoolMatrix

log = logging.getLogger(__name__)

__all__ = ["EliminationResult", "rank_elimination", "chain_ranks"]

# kernel exit codes
_DONE = 0
_GROW_ROWS = 1
_GROW_COLS = 2
_DENSE = 3
_PROGRESS = 4

_CANDIDATES = 4


class EliminationResult:
    __slots__ = ("rank", "pivot_rows", "sparse_pivots", "dense_shape", "peak_nnz", "seconds")

    def __init__(self, rank, pivot_rows, sparse_pivots, dense_shape, peak_nnz, seconds):
        self.rank = int(rank)
        self.pivot_rows = pivot_rows
        self.sparse_pivots = int(sparse_pivots)
        self.dense_shape = tuple(dense_shape)
        self.peak_nnz = int(peak_nnz)
        self.seconds = float(seconds)

    def __repr__(self) -> str:
        return (
            f"EliminationResult(rank={self.rank}, sparse_pivots={self.sparse_pivots}, "
            f"dense_shape={self.dense_shape}, peak_nnz={self.peak_nnz})"
        )


@numba.njit(cache=True, inline="always")
def _contains(pool, start, length, x):
    lo = start
    hi = start + length
    while lo < hi:
        mid = (lo + hi) >> 1
        v = pool[mid]
        if v < x:
            lo = mid + 1
        elif v > x:
            hi = mid
        else:
            return True
    return False


@numba.njit(cache=True, inline="always")
def _bucket_remove(c, key, head, nxt, prv):
    p = prv[c]
    q = nxt[c]
    if p >= 0:
        nxt[p] = q
    else:
        head[key[c]] = q
    if q >= 0:
        prv[q] = p


@numba.njit(cache=True, inline="always")
def _bucket_insert(c, key, head, nxt, prv):
    q = head[key[c]]
    nxt[c] = q
    prv[c] = -1
    if q >= 0:
        prv[q] = c
    head[key[c]] = c


@numba.njit(cache=True)
def _init_buckets(key, head, nxt, prv):
    for c in range(key.shape[0] - 1, -1, -1):
        if key[c] > 0:
            _bucket_insert(c, key, head, nxt, prv)


@numba.njit(cache=True)
def _compact(start, length, cap, alive, pool, top):
    """Slide the live segments down to the front of ``pool``."""
    n = start.shape[0]
    ids = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        if alive[i]:
            ids[k] = i
            k += 1
        else:
            length[i] = 0
            cap[i] = 0
    ids = ids[:k]
    order = np.argsort(start[ids])
    pos = 0
    for t in range(k):
        i = ids[order[t]]
        s = start[i]
        for j in range(length[i]):
            pool[pos + j] = pool[s + j]
        start[i] = pos
        cap[i] = length[i]
        pos += length[i]
    top[0] = pos


@numba.njit(cache=True)
def _compact_rows(start, length, cap, alive, pool, vals, top):
    n = start.shape[0]
    ids = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        if alive[i]:
            ids[k] = i
            k += 1
        else:
            length[i] = 0
            cap[i] = 0
    ids = ids[:k]
    order = np.argsort(start[ids])
    pos = 0
    for t in range(k):
        i = ids[order[t]]
        s = start[i]
        for j in range(length[i]):
            pool[pos + j] = pool[s + j]
            vals[pos + j] = vals[s + j]
        start[i] = pos
        cap[i] = length[i]
        pos += length[i]
    top[0] = pos


@numba.njit(cache=True, inline="always")
def _position(pool, start, length, x):
    lo = start
    hi = start + length
    while lo < hi:
        mid = (lo + hi) >> 1
        v = pool[mid]
        if v < x:
            lo = mid + 1
        elif v > x:
            hi = mid
        else:
            return mid
    return -1


@numba.njit(cache=True)
def _gather(c, cstart, clen, cpool, rstart, rlen, rpool, row_alive, stamp, stamp_now, buf):
    """Live rows of column ``c`` into ``buf``; the column list is rewritten
    without stale entries.  Returns the count."""
    stamp_now[0] += 1
    st = stamp_now[0]
    k = 0
    cs = cstart[c]
    for t in range(clen[c]):
        r = cpool[cs + t]
        if row_alive[r] and stamp[r] != st and _contains(rpool, rstart[r], rlen[r], c):
            stamp[r] = st
            buf[k] = r
            k += 1
    for t in range(k):
        cpool[cs + t] = buf[t]
    clen[c] = k
    return k


@numba.njit(cache=True, inline="always")
def _col_append(b, r, cstart, clen, ccap, cpool, ctop):
    if clen[b] == ccap[b]:
        newcap = 2 * ccap[b] + 4
        ns = ctop[0]
        for u in range(clen[b]):
            cpool[ns + u] = cpool[cstart[b] + u]
        cstart[b] = ns
        ccap[b] = newcap
        ctop[0] = ns + newcap
    cpool[cstart[b] + clen[b]] = r
    clen[b] += 1


@numba.njit(cache=True)
def _kernel(
    rstart, rlen, rcap, rpool, rval, rtop, row_alive, rhead, rnxt, rprv,
    cstart, clen, ccap, cpool, ctop, col_alive, count, chead, cnxt, cprv,
    stamp, stamp_now, pivots, n_piv, nnz_now, peak, active,
    dense_cells, dense_min_cost, report_every, mul, inv,
):
    scratch = np.empty(16, dtype=np.int32)
    sval = np.empty(16, dtype=np.uint8)
    rows_buf = np.empty(16, dtype=np.int64)
    steps = 0
    while True:
        if steps >= report_every:
            return _PROGRESS
        wc = 1
        while wc < chead.shape[0] and chead[wc] < 0:
            wc += 1
        if wc >= chead.shape[0]:
            return _DONE
        wr = 1
        while wr < rhead.shape[0] and rhead[wr] < 0:
            wr += 1
        # --- choose the pivot (p, c) ------------------------------------
        p = -1
        c = -1
        if wr == 1:
            p = rhead[1]
            c = rpool[rstart[p]]
        elif wc == 1:
            c = chead[1]
        else:
            best_cost = 1 << 62
            # lightest columns: their shortest row
            cand = chead[wc]
            for _ in range(_CANDIDATES):
                if cand < 0:
                    break
                if rows_buf.shape[0] < clen[cand]:
                    rows_buf = np.empty(2 * clen[cand] + 16, dtype=np.int64)
                k = _gather(cand, cstart, clen, cpool, rstart, rlen, rpool, row_alive, stamp, stamp_now, rows_buf)
                for t in range(k):
                    r = rows_buf[t]
                    cost = (wc - 1) * (rlen[r] - 1)
                    if cost < best_cost:
                        best_cost = cost
                        p = r
                        c = cand
                cand = cnxt[cand]
            # lightest rows: their lightest column
            cand = rhead[wr]
            for _ in range(_CANDIDATES):
                if cand < 0:
                    break
                rs = rstart[cand]
                for t in range(rlen[cand]):
                    x = rpool[rs + t]
                    cost = (wr - 1) * (count[x] - 1)
                    if cost < best_cost:
                        best_cost = cost
                        p = cand
                        c = x
                cand = rnxt[cand]
            if best_cost >= dense_min_cost and active[0] * active[1] <= dense_cells:
                return _DENSE
        # --- rows of column c -----------------------------------------------
        if rows_buf.shape[0] < clen[c]:
            rows_buf = np.empty(2 * clen[c] + 16, dtype=np.int64)
        k = _gather(c, cstart, clen, cpool, rstart, rlen, rpool, row_alive, stamp, stamp_now, rows_buf)
        if k != count[c]:
            raise RuntimeError("column count out of sync")
        if p < 0:
            p = rows_buf[0]
        pl = rlen[p]
        # --- arena room ------------------------------------------------------
        need = 0
        for t in range(k):
            r = rows_buf[t]
            if r != p and rlen[r] + pl > rcap[r]:
                need += (3 * (rlen[r] + pl)) // 2 + 8
        if rtop[0] + need > rpool.shape[0]:
            _compact_rows(rstart, rlen, rcap, row_alive, rpool, rval, rtop)
            if rtop[0] + need > rpool.shape[0]:
                return _GROW_ROWS
        need_c = 0
        for j in range(pl):
            x = rpool[rstart[p] + j]
            need_c += 4 * (ccap[x] + k) + 8
        if ctop[0] + need_c > cpool.shape[0]:
            _compact(cstart, clen, ccap, col_alive, cpool, ctop)
            if ctop[0] + need_c > cpool.shape[0]:
                return _GROW_COLS
        ps = rstart[p]
        pinv = inv[rval[_position(rpool, ps, pl, c)]]
        # --- eliminate c from every other row: r <- r - (a_rc / a_pc) p ----
        for t in range(k):
            r = rows_buf[t]
            if r == p:
                continue
            rs = rstart[r]
            rl = rlen[r]
            f = mul[rval[_position(rpool, rs, rl, c)], pinv]
            if scratch.shape[0] < rl + pl:
                scratch = np.empty(2 * (rl + pl), dtype=np.int32)
                sval = np.empty(2 * (rl + pl), dtype=np.uint8)
            i = 0
            j = 0
            o = 0
            while i < rl or j < pl:
                if j == pl or (i < rl and rpool[rs + i] < rpool[ps + j]):
                    scratch[o] = rpool[rs + i]
                    sval[o] = rval[rs + i]
                    o += 1
                    i += 1
                elif i == rl or rpool[ps + j] < rpool[rs + i]:
                    b = rpool[ps + j]
                    scratch[o] = b
                    sval[o] = mul[f, rval[ps + j]]
                    o += 1
                    j += 1
                    _bucket_remove(b, count, chead, cnxt, cprv)
                    count[b] += 1
                    _bucket_insert(b, count, chead, cnxt, cprv)
                    _col_append(b, r, cstart, clen, ccap, cpool, ctop)
                else:
                    a = rpool[rs + i]
                    v = rval[rs + i] ^ mul[f, rval[ps + j]]
                    if v:
                        scratch[o] = a
                        sval[o] = v
                        o += 1
                    else:
                        _bucket_remove(a, count, chead, cnxt, cprv)
                        count[a] -= 1
                        _bucket_insert(a, count, chead, cnxt, cprv)
                    i += 1
                    j += 1
            nnz_now[0] += o - rl
            _bucket_remove(r, rlen, rhead, rnxt, rprv)
            if o > rcap[r]:
                newcap = o + (o >> 1) + 4
                rstart[r] = rtop[0]
                rcap[r] = newcap
                rtop[0] += newcap
            rs = rstart[r]
            for u in range(o):
                rpool[rs + u] = scratch[u]
                rval[rs + u] = sval[u]
            rlen[r] = o
            if o == 0:
                row_alive[r] = False
                active[0] -= 1
            else:
                _bucket_insert(r, rlen, rhead, rnxt, rprv)
        # --- retire the pivot row and column ---------------------------------
        _bucket_remove(p, rlen, rhead, rnxt, rprv)
        for j in range(pl):
            x = rpool[ps + j]
            _bucket_remove(x, count, chead, cnxt, cprv)
            count[x] -= 1
            if x != c:
                _bucket_insert(x, count, chead, cnxt, cprv)
        nnz_now[0] -= pl
        row_alive[p] = False
        active[0] -= 1
        col_alive[c] = False
        count[c] = -1
        active[1] -= 1
        pivots[n_piv[0]] = p
        n_piv[0] += 1
        steps += 1
        if nnz_now[0] > peak[0]:
            peak[0] = nnz_now[0]
        # columns that became empty leave the active set
        while chead[0] >= 0:
            z = chead[0]
            _bucket_remove(z, count, chead, cnxt, cprv)
            count[z] = -1
            col_alive[z] = False
            active[1] -= 1


@numba.njit(cache=True)
def _dense_pivot_rows(work, ids):
    """Row-reduce packed GF(2) ``work``; return the entries of ``ids`` used as pivots."""
    n_rows, n_words = work.shape
    rank = 0
    out = np.empty(min(n_rows, n_words * 64), dtype=np.int64)
    order = ids.copy()
    for wd in range(n_words):
        for b in range(64):
            if rank == n_rows:
                return out[:rank]
            bit = np.uint64(1) << np.uint64(b)
            piv = -1
            for i in range(rank, n_rows):
                if work[i, wd] & bit:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for k in range(wd, n_words):
                    tmp = work[piv, k]
                    work[piv, k] = work[rank, k]
                    work[rank, k] = tmp
                t = order[piv]
                order[piv] = order[rank]
                order[rank] = t
            for i in range(rank + 1, n_rows):
                if work[i, wd] & bit:
                    for k in range(wd, n_words):
                        work[i, k] ^= work[rank, k]
            out[rank] = order[rank]
            rank += 1
    return out[:rank]


@numba.njit(cache=True, inline="always")
def _gf4_scaled(lo, hi, code):
    # multiply x = lo + hi*w by 1, w or w^2 = w + 1 (codes 1, 2, 3)
    if code == 1:
        return lo, hi
    if code == 2:
        return hi, lo ^ hi
    return lo ^ hi, lo


@numba.njit(cache=True)
def _dense_pivot_rows_gf4(lo, hi, ids):
    """Row reduction over GF(4) on bit-sliced planes ``lo + w * hi``."""
    n_rows, n_words = lo.shape
    rank = 0
    out = np.empty(min(n_rows, n_words * 64), dtype=np.int64)
    order = ids.copy()
    inv = np.array([0, 1, 3, 2], dtype=np.int64)
    for wd in range(n_words):
        for b in range(64):
            if rank == n_rows:
                return out[:rank]
            sh = np.uint64(b)
            bit = np.uint64(1) << sh
            piv = -1
            for i in range(rank, n_rows):
                if (lo[i, wd] | hi[i, wd]) & bit:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for k in range(wd, n_words):
                    t0 = lo[piv, k]
                    lo[piv, k] = lo[rank, k]
                    lo[rank, k] = t0
                    t1 = hi[piv, k]
                    hi[piv, k] = hi[rank, k]
                    hi[rank, k] = t1
                t = order[piv]
                order[piv] = order[rank]
                order[rank] = t
            alpha = ((lo[rank, wd] >> sh) & np.uint64(1)) | (((hi[rank, wd] >> sh) & np.uint64(1)) << np.uint64(1))
            s = inv[alpha]
            for k in range(wd, n_words):
                lo[rank, k], hi[rank, k] = _gf4_scaled(lo[rank, k], hi[rank, k], s)
            for i in range(rank + 1, n_rows):
                beta = ((lo[i, wd] >> sh) & np.uint64(1)) | (((hi[i, wd] >> sh) & np.uint64(1)) << np.uint64(1))
                if beta:
                    for k in range(wd, n_words):
                        a, c = _gf4_scaled(lo[rank, k], hi[rank, k], beta)
                        lo[i, k] ^= a
                        hi[i, k] ^= c
            out[rank] = order[rank]
            rank += 1
    return out[:rank]


@numba.njit(cache=True)
def _dense_pivot_rows_bytes(a, ids, mul, inv):
    """Row reduction over any small GF(2^k) on a byte matrix."""
    n_rows, n_cols = a.shape
    rank = 0
    out = np.empty(min(n_rows, n_cols), dtype=np.int64)
    order = ids.copy()
    for c in range(n_cols):
        if rank == n_rows:
            break
        piv = -1
        for i in range(rank, n_rows):
            if a[i, c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(c, n_cols):
                t = a[piv, k]
                a[piv, k] = a[rank, k]
                a[rank, k] = t
            t2 = order[piv]
            order[piv] = order[rank]
            order[rank] = t2
        s = inv[a[rank, c]]
        for k in range(c, n_cols):
            a[rank, k] = mul[s, a[rank, k]]
        for i in range(rank + 1, n_rows):
            f = a[i, c]
            if f:
                for k in range(c, n_cols):
                    a[i, k] ^= mul[f, a[rank, k]]
        out[rank] = order[rank]
        rank += 1
    return out[:rank]


@numba.njit(cache=True)
def _fill_planes(lo, hi, rows, rstart, rlen, rpool, rval, cmap):
    for i in range(rows.shape[0]):
        r = rows[i]
        for t in range(rlen[r]):
            c = cmap[rpool[rstart[r] + t]]
            if c < 0:
                raise RuntimeError("dense core references a retired column")
            bit = np.uint64(1) << np.uint64(c & 63)
            v = rval[rstart[r] + t]
            if v & 1:
                lo[i, c >> 6] |= bit
            if v & 2:
                hi[i, c >> 6] |= bit


@numba.njit(cache=True)
def _fill_bytes(a, rows, rstart, rlen, rpool, rval, cmap):
    for i in range(rows.shape[0]):
        r = rows[i]
        for t in range(rlen[r]):
            a[i, cmap[rpool[rstart[r] + t]]] = rval[rstart[r] + t]


def _dense_core(s: "_State", field: GF2k, n_cols: int):
    rows = np.flatnonzero(s.row_alive)
    cols = np.flatnonzero(s.col_alive)
    cmap = np.full(n_cols, -1, dtype=np.int64)
    cmap[cols] = np.arange(len(cols))
    ids = rows.astype(np.int64)
    words = max((len(cols) + 63) // 64, 1)
    if field.bits <= 2:
        lo = np.zeros((len(rows), words), dtype=np.uint64)
        hi = np.zeros((len(rows), words), dtype=np.uint64)
        _fill_planes(lo, hi, rows, s.rstart, s.rlen, s.rpool, s.rval, cmap)
        if field.bits == 1:
            del hi
            piv = _dense_pivot_rows(lo, ids)
        else:
            piv = _dense_pivot_rows_gf4(lo, hi, ids)
    else:
        a = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        _fill_bytes(a, rows, s.rstart, s.rlen, s.rpool, s.rval, cmap)
        piv = _dense_pivot_rows_bytes(a, ids, field.mul, field.inv)
    return piv, (len(rows), len(cols))


class _State:
    """Arrays the kernel works on; the arenas grow between kernel calls."""

    def __init__(self, m: FieldMatrix, slack: float):
        n_rows, n_cols = m.shape
        nnz = m.nnz
        self.rstart = m.indptr[:-1].copy()
        self.rlen = np.diff(m.indptr)
        self.rcap = self.rlen.copy()
        size = int(nnz * slack) + 1024
        self.rpool = np.zeros(size, dtype=np.int32)
        self.rpool[:nnz] = m.indices
        self.rval = np.zeros(size, dtype=np.uint8)
        self.rval[:nnz] = m.values
        self.rtop = np.array([nnz], dtype=np.int64)
        self.row_alive = self.rlen > 0
        self.rhead = np.full(n_cols + 2, -1, dtype=np.int64)
        self.rnxt = np.full(n_rows, -1, dtype=np.int64)
        self.rprv = np.full(n_rows, -1, dtype=np.int64)
        _init_buckets(self.rlen, self.rhead, self.rnxt, self.rprv)
        rows = np.repeat(np.arange(n_rows, dtype=np.int64), np.diff(m.indptr))
        order = np.argsort(m.indices, kind="stable")
        self.cstart = np.zeros(n_cols, dtype=np.int64)
        self.clen = np.bincount(m.indices, minlength=n_cols).astype(np.int64)
        self.cstart[1:] = np.cumsum(self.clen)[:-1]
        self.ccap = self.clen.copy()
        self.cpool = np.zeros(size, dtype=np.int32)
        self.cpool[:nnz] = rows[order]
        self.ctop = np.array([nnz], dtype=np.int64)
        self.count = self.clen.copy()
        self.col_alive = self.count > 0
        self.count[~self.col_alive] = -1
        self.chead = np.full(n_rows + 2, -1, dtype=np.int64)
        self.cnxt = np.full(n_cols, -1, dtype=np.int64)
        self.cprv = np.full(n_cols, -1, dtype=np.int64)
        _init_buckets(self.count, self.chead, self.cnxt, self.cprv)
        self.stamp = np.zeros(n_rows, dtype=np.int64)
        self.stamp_now = np.zeros(1, dtype=np.int64)
        self.pivots = np.empty(min(n_rows, n_cols), dtype=np.int64)
        self.n_piv = np.zeros(1, dtype=np.int64)
        self.nnz_now = np.array([nnz], dtype=np.int64)
        self.peak = np.array([nnz], dtype=np.int64)
        self.active = np.array([self.row_alive.sum(), self.col_alive.sum()], dtype=np.int64)
        self.mul = m.field.mul.astype(np.uint8)
        self.inv = m.field.inv.astype(np.uint8)

    def run(self, dense_cells, dense_min_cost, report_every):
        return _kernel(
            self.rstart, self.rlen, self.rcap, self.rpool, self.rval, self.rtop, self.row_alive,
            self.rhead, self.rnxt, self.rprv,
            self.cstart, self.clen, self.ccap, self.cpool, self.ctop, self.col_alive,
            self.count, self.chead, self.cnxt, self.cprv,
            self.stamp, self.stamp_now, self.pivots, self.n_piv, self.nnz_now, self.peak,
            self.active, dense_cells, dense_min_cost, report_every, self.mul, self.inv,
        )

    @staticmethod
    def grown(pool, top, extra):
        out = np.zeros(max(2 * len(pool), int(top) + extra), dtype=pool.dtype)
        out[:top] = pool[:top]
        return out


def rank_elimination(
    m: SparseBoolMatrix | FieldMatrix,
    dense_cap: int = DEFAULT_DENSE_CAP,
    dense_min_cost: int = 64,
    slack: float = 2.0,
    report_every: int = 200_000,
) -> EliminationResult:
    """Exact rank, and original pivot rows, of a sparse matrix over GF(2)
    (or over GF(2^k) for a :class:`FieldMatrix`).

    ``dense_cap`` bounds the size of the dense core in field entries; the
    sparse phase hands over once the cheapest pivot has a fill estimate of
    at least ``dense_min_cost`` and the active block fits.
    """
    start = time.perf_counter()
    if isinstance(m, SparseBoolMatrix):
        m = FieldMatrix.from_bool(m)
    if m.nnz == 0:
        return EliminationResult(0, np.zeros(0, dtype=np.int64), 0, (0, 0), 0, 0.0)
    s = _State(m, slack)
    while True:
        code = s.run(dense_cap, dense_min_cost, report_every)
        if code == _GROW_ROWS:
            s.rpool = s.grown(s.rpool, s.rtop[0], 1 << 20)
            s.rval = s.grown(s.rval, s.rtop[0], 1 << 20)
            log.debug("row arena grown to %d", len(s.rpool))
        elif code == _GROW_COLS:
            s.cpool = s.grown(s.cpool, s.ctop[0], 1 << 20)
            log.debug("column arena grown to %d", len(s.cpool))
        elif code == _PROGRESS:
            log.info(
                "%d pivots, active %dx%d, nnz %d (%.0fs)",
                s.n_piv[0], s.active[0], s.active[1], s.nnz_now[0], time.perf_counter() - start,
            )
        else:
            break
    sparse_piv = int(s.n_piv[0])
    pivots = [s.pivots[:sparse_piv].copy()]
    dense_shape = (0, 0)
    if code == _DENSE:
        del s.cpool
        piv, dense_shape = _dense_core(s, m.field, m.n_cols)
        log.info("dense core %dx%d after %d sparse pivots", *dense_shape, sparse_piv)
        pivots.append(piv)
    piv = np.concatenate(pivots)
    return EliminationResult(
        len(piv), piv, sparse_piv, dense_shape, int(s.peak[0]), time.perf_counter() - start
    )


def _drop_columns(m, drop):
    keep = np.ones(m.n_cols, dtype=bool)
    keep[drop] = False
    cols = np.flatnonzero(keep)
    if isinstance(m, SparseBoolMatrix):
        return m.submatrix(np.arange(m.n_rows), cols)
    return m.submatrix_cols(cols)


def chain_ranks(mats, clearing: bool = True, **kwargs) -> list[EliminationResult]:
    """Ranks of the boundary matrices ``d_1 .. d_k`` of a chain complex.

    ``mats[j - 1]`` maps j-chains (columns) to (j-1)-chains (rows).  With
    clearing, the matrices are processed from the top down and the columns
    of ``d_j`` indexed by pivot rows of ``d_{j+1}`` are dropped first: the
    image of ``d_{j+1}`` lies in the kernel of ``d_j`` and is nonsingular on
    those rows, so each dropped column is a combination of kept ones.
    """
    results: list[EliminationResult | None] = [None] * len(mats)
    drop = None
    for j in range(len(mats) - 1, -1, -1):
        m = mats[j]
        if clearing and drop is not None and len(drop):
            m = _drop_columns(m, drop)
        res = rank_elimination(m, **kwargs)
        log.debug("d_%d %s: %r (%.1fs)", j + 1, m.shape, res, res.seconds)
        results[j] = res
        drop = res.pivot_rows
    return results  # type: ignore[return-value]
