"""
Black-box rank of a sparse GF(2) matrix by Wiedemann's method.

The Krylov sequence is computed over the extension field GF(2^20): a 0/1
matrix acts on GF(2^20)-vectors by XOR, so a matrix-vector product costs one
word XOR per nonzero.  For ``A`` (rows >= cols, transposing if needed) the
trial matrix is

    C = D1 A^T D2 A D1

with random diagonal ``D1``, ``D2``.  ``rank(C) = rank(A)`` unless a random
polynomial in the diagonal entries vanishes.  Each trial projects the
sequence ``C^i v`` onto a block of random left vectors, runs Berlekamp-Massey
on every projection and reads ``deg - valuation`` of the minimal polynomial.
That number never exceeds ``rank(A)``, so estimates can only err low; trials
are repeated until the two largest estimates agree.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import numba
import numpy as np

from .dense import DEFAULT_DENSE_CAP, rank_dense
from .matrix import SparseBoolMatrix

__all__ = [
    "FIELD_BITS",
    "RankCertificate",
    "RankDisagreement",
    "field_tables",
    "berlekamp_massey",
    "rank_wiedemann",
]

FIELD_BITS = 20
_MODULUS_POLY = (1 << 20) | (1 << 3) | 1  # x^20 + x^3 + 1, primitive
_ORDER = (1 << FIELD_BITS) - 1


class RankDisagreement(RuntimeError):
    def __init__(self, candidates):
        super().__init__(f"Wiedemann trials did not agree: {sorted(candidates)}")
        self.candidates = list(candidates)


@dataclass
class RankCertificate:
    rank: int
    method: str  # "dense", "wiedemann" or "elimination"
    trials: int
    failure_probability_bound: Fraction
    seed: int
    shape: tuple[int, int] = (0, 0)
    estimates: tuple[int, ...] = ()
    dense_verified: bool = False
    seconds: float = 0.0

    def to_json(self) -> dict:
        out = asdict(self)
        out["failure_probability_bound"] = str(self.failure_probability_bound)
        out["shape"] = list(self.shape)
        out["estimates"] = list(self.estimates)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RankCertificate":
        data = dict(data)
        data["failure_probability_bound"] = Fraction(data["failure_probability_bound"])
        data["shape"] = tuple(data["shape"])
        data["estimates"] = tuple(data["estimates"])
        return cls(**data)


# ---------------------------------------------------------------------------
# GF(2^20) arithmetic
# ---------------------------------------------------------------------------

@numba.njit(cache=True)
def _build_tables(poly, bits):
    order = (1 << bits) - 1
    exp = np.zeros(2 * order + 2, dtype=np.int32)
    log = np.zeros(order + 1, dtype=np.int32)
    x = 1
    for i in range(order):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x >> bits:
            x ^= poly
    for i in range(order, 2 * order + 2):
        exp[i] = exp[i - order]
    return exp, log, x


@lru_cache(maxsize=None)
def field_tables() -> tuple[np.ndarray, np.ndarray]:
    """``(exp, log)`` tables; ``exp`` is doubled so log sums need no reduction."""
    exp, log, last = _build_tables(_MODULUS_POLY, FIELD_BITS)
    if last != 1 or len(np.unique(exp[:_ORDER])) != _ORDER:
        raise RuntimeError("field modulus is not primitive")
    return exp, log


@numba.njit(inline="always")
def _mul(a, b, exp, log):
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


@numba.njit(inline="always")
def _inv(a, exp, log):
    return exp[_ORDER - log[a]]


# ---------------------------------------------------------------------------
# Berlekamp-Massey
# ---------------------------------------------------------------------------

@numba.njit(cache=True)
def _bm_step(s, N, C, B, T, state, exp, log):
    """Feed term ``s[N]``; ``state = [L, shift, b, zero_run, len(B)]``."""
    L = state[0]
    d = s[N]
    for i in range(1, L + 1):
        d ^= _mul(C[i], s[N - i], exp, log)
    if d == 0:
        state[1] += 1
        state[3] += 1
        return
    state[3] = 0
    coef = _mul(d, _inv(state[2], exp, log), exp, log)
    shift = state[1]
    blen = state[4]
    if 2 * L <= N:
        T[: L + 1] = C[: L + 1]
        for i in range(blen):
            if B[i]:
                C[i + shift] ^= _mul(coef, B[i], exp, log)
        state[0] = N + 1 - L
        B[: L + 1] = T[: L + 1]
        state[4] = L + 1
        state[2] = d
        state[1] = 1
    else:
        for i in range(blen):
            if B[i]:
                C[i + shift] ^= _mul(coef, B[i], exp, log)
        state[1] += 1


def berlekamp_massey(seq) -> np.ndarray:
    """Connection polynomial ``[1, c1, ..., cL]`` of a GF(2^20) sequence.

    The minimal polynomial is ``x^L + c1 x^(L-1) + ... + cL``.
    """
    exp, log = field_tables()
    s = np.asarray(seq, dtype=np.int64)
    n = len(s)
    C = np.zeros(n + 2, dtype=np.int64)
    B = np.zeros(n + 2, dtype=np.int64)
    T = np.zeros(n + 2, dtype=np.int64)
    C[0] = B[0] = 1
    state = np.array([0, 1, 1, 0, 1], dtype=np.int64)
    for N in range(n):
        _bm_step(s, N, C, B, T, state, exp, log)
    return C[: state[0] + 1].copy()


# ---------------------------------------------------------------------------
# one trial
# ---------------------------------------------------------------------------

@numba.njit(cache=True)
def _xor_matvec(indptr, indices, x, out):
    for r in range(out.shape[0]):
        acc = 0
        for k in range(indptr[r], indptr[r + 1]):
            acc ^= x[indices[k]]
        out[r] = acc


@numba.njit(cache=True)
def _scale(d, x, out, exp, log):
    for i in range(x.shape[0]):
        out[i] = _mul(d[i], x[i], exp, log)


@numba.njit(cache=True)
def _trial(indptr, indices, tindptr, tindices, n_rows, n, d1, d2, v, logUt, max_len, tau, exp, log):
    width = logUt.shape[1]
    acc = np.zeros(width, dtype=np.int64)
    seqs = np.zeros((width, max_len), dtype=np.int64)
    Cs = np.zeros((width, max_len + 2), dtype=np.int64)
    Bs = np.zeros((width, max_len + 2), dtype=np.int64)
    tmp = np.zeros(max_len + 2, dtype=np.int64)
    states = np.zeros((width, 5), dtype=np.int64)
    for t in range(width):
        Cs[t, 0] = 1
        Bs[t, 0] = 1
        states[t, 1] = 1
        states[t, 2] = 1
        states[t, 4] = 1
    w = v.copy()
    x = np.zeros(n, dtype=np.int64)
    y = np.zeros(n_rows, dtype=np.int64)
    used = max_len
    for N in range(max_len):
        done = True
        acc[:] = 0
        for j in range(n):
            if w[j]:
                lw = log[w[j]]
                for t in range(width):
                    acc[t] ^= exp[logUt[j, t] + lw]
        for t in range(width):
            seqs[t, N] = acc[t]
            _bm_step(seqs[t], N, Cs[t], Bs[t], tmp, states[t], exp, log)
            if not (states[t, 3] >= tau and N + 1 >= 2 * states[t, 0] + tau):
                done = False
        if done:
            used = N + 1
            break
        # w <- D1 A^T D2 A D1 w
        _scale(d1, w, x, exp, log)
        _xor_matvec(indptr, indices, x, y)
        _scale(d2, y, y, exp, log)
        _xor_matvec(tindptr, tindices, y, x)
        _scale(d1, x, w, exp, log)
    est = 0
    for t in range(width):
        L = states[t, 0]
        val = 0
        while val < L and Cs[t, L - val] == 0:
            val += 1
        if L - val > est:
            est = L - val
    return est, used


def _trial_bound(n: int) -> Fraction:
    # Schwartz-Zippel style budget: diagonal scaling (degree <= 3n) plus
    # the two random projections (degree <= n each), over a field of size q.
    q = 1 << FIELD_BITS
    return Fraction(min(q, 5 * max(n, 1)), q)


def rank_wiedemann(
    m: SparseBoolMatrix,
    seed: int = 0,
    target_failure: float = 1e-9,
    block: int = 32,
    max_trials: int = 8,
    early_termination: int = 24,
    dense_cap: int = DEFAULT_DENSE_CAP,
) -> RankCertificate:
    """GF(2) rank with failure probability at most ``target_failure`` (heuristic bound).

    Runs independent trials (at least two) until the largest estimate has
    been reached twice and the combined bound meets ``target_failure``.
    Matrices under ``dense_cap`` are re-checked by elimination.
    """
    start = time.perf_counter()
    shape = m.shape
    if m.nnz == 0:
        return RankCertificate(0, "wiedemann", 0, Fraction(0), seed, shape, (), False, 0.0)
    if m.n_cols > m.n_rows:
        m = m.transpose()
    At = m.transpose()
    n = m.n_cols
    exp, log = field_tables()
    rng = np.random.default_rng(seed)
    max_len = 2 * n + 2 * early_termination + 4
    eps = _trial_bound(n)
    estimates: list[int] = []
    rank = None
    trials = 0
    while trials < max_trials:
        d1 = rng.integers(1, 1 << FIELD_BITS, size=n, dtype=np.int64)
        d2 = rng.integers(1, 1 << FIELD_BITS, size=m.n_rows, dtype=np.int64)
        v = rng.integers(0, 1 << FIELD_BITS, size=n, dtype=np.int64)
        U = rng.integers(1, 1 << FIELD_BITS, size=(n, block), dtype=np.int64)
        est, _ = _trial(
            m.indptr, m.indices, At.indptr, At.indices, m.n_rows, n,
            d1, d2, v, log[U].astype(np.int64), max_len, early_termination, exp, log,
        )
        estimates.append(int(est))
        trials += 1
        best = max(estimates)
        agreeing = estimates.count(best)
        if agreeing >= 2 and float(eps ** agreeing) <= target_failure:
            rank = best
            break
    if rank is None:
        raise RankDisagreement(estimates)
    verified = False
    if m.n_rows * m.n_cols <= dense_cap:
        exact = rank_dense(m, cap=dense_cap)
        if exact != rank:
            raise RankDisagreement([rank, exact])
        verified = True
    return RankCertificate(
        rank=rank,
        method="wiedemann",
        trials=trials,
        failure_probability_bound=eps ** estimates.count(rank),
        seed=seed,
        shape=shape,
        estimates=tuple(estimates),
        dense_verified=verified,
        seconds=time.perf_counter() - start,
    )
