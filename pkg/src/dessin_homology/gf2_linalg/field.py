"""
Small binary extension fields GF(2^k) and sparse matrices over them.

Elements are encoded as integers ``0 .. 2^k - 1`` in the polynomial basis,
so addition is XOR.  These fields appear when a chain complex over GF(2)
is split into character components of an odd-order abelian symmetry group.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matrix import MatrixFormatError, SparseBoolMatrix

__all__ = ["GF2k", "gf2k", "FieldMatrix"]

# primitive polynomials, bit i = coefficient of x^i
_PRIMITIVE = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011, 5: 0b100101, 6: 0b1000011, 8: 0b100011101}


@dataclass(frozen=True)
class GF2k:
    bits: int
    mul: np.ndarray  # (q, q) uint8
    inv: np.ndarray  # (q,) uint8, inv[0] = 0
    exp: np.ndarray  # (q - 1,) powers of the generator

    @property
    def order(self) -> int:
        return 1 << self.bits

    def root_of_unity(self, n: int) -> int:
        """A primitive n-th root of unity (n must divide q - 1)."""
        q1 = self.order - 1
        if q1 % n:
            raise ValueError(f"GF({self.order}) has no primitive {n}-th root of unity")
        return int(self.exp[q1 // n])

    def power(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e % (self.order - 1)):
            out = int(self.mul[out, a])
        return out


@lru_cache(maxsize=None)
def gf2k(bits: int) -> GF2k:
    if bits not in _PRIMITIVE:
        raise ValueError(f"no field table for GF(2^{bits})")
    poly = _PRIMITIVE[bits]
    q = 1 << bits
    exp = np.zeros(q - 1, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & q:
            x ^= poly
    if len(set(exp.tolist())) != q - 1:
        raise RuntimeError("field polynomial is not primitive")
    a = np.arange(q)
    la = log[a]
    mul = exp[(la[:, None] + la[None, :]) % (q - 1)]
    mul[0, :] = 0
    mul[:, 0] = 0
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = exp[(-log[1:]) % (q - 1)]
    return GF2k(bits, mul.astype(np.uint8), inv.astype(np.uint8), exp.astype(np.uint8))


class FieldMatrix:
    """Sparse matrix over GF(2^k): rows of strictly increasing column
    indices with nonzero values."""

    __slots__ = ("n_rows", "n_cols", "indptr", "indices", "values", "field")

    def __init__(self, n_rows, n_cols, indptr, indices, values, field: GF2k):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.values = np.ascontiguousarray(values, dtype=np.uint8)
        self.field = field
        if len(self.values) != len(self.indices) or np.any(self.values == 0):
            raise MatrixFormatError("values must be nonzero and match the index array")
        if np.any(self.values >= field.order):
            raise MatrixFormatError("value outside the field")

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def nnz(self) -> int:
        return len(self.indices)

    @classmethod
    def from_coo(cls, rows, cols, vals, shape, field: GF2k) -> "FieldMatrix":
        """Repeated (row, col) entries are added in the field; zeros dropped."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.uint8)
        n_rows, n_cols = shape
        key = rows * n_cols + cols
        order = np.argsort(key, kind="stable")
        key, vals = key[order], vals[order]
        if len(key):
            first = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
            summed = np.bitwise_xor.reduceat(vals, first)
            key = key[first]
            keep = summed != 0
            key, summed = key[keep], summed[keep]
        else:
            summed = vals
        r = key // n_cols
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.add.at(indptr, r + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n_rows, n_cols, indptr, key % n_cols, summed, field)

    @classmethod
    def from_bool(cls, m: SparseBoolMatrix, field: GF2k | None = None) -> "FieldMatrix":
        field = field or gf2k(1)
        return cls(m.n_rows, m.n_cols, m.indptr, m.indices, np.ones(m.nnz, dtype=np.uint8), field)

    @classmethod
    def from_dense(cls, dense, field: GF2k) -> "FieldMatrix":
        dense = np.asarray(dense)
        r, c = np.nonzero(dense)
        return cls.from_coo(r, c, dense[r, c], dense.shape, field)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        rows = np.repeat(np.arange(self.n_rows), np.diff(self.indptr))
        out[rows, self.indices] = self.values
        return out

    def submatrix_cols(self, cols) -> "FieldMatrix":
        cols = np.asarray(cols, dtype=np.int64)
        cmap = np.full(self.n_cols, -1, dtype=np.int64)
        cmap[cols] = np.arange(len(cols))
        rows = np.repeat(np.arange(self.n_rows), np.diff(self.indptr))
        c = cmap[self.indices]
        keep = c >= 0
        return FieldMatrix.from_coo(rows[keep], c[keep], self.values[keep], (self.n_rows, len(cols)), self.field)

    def __repr__(self) -> str:
        return f"FieldMatrix(GF({self.field.order}), {self.n_rows}x{self.n_cols}, nnz={self.nnz})"


def rank_dense_field(dense: np.ndarray, field: GF2k) -> int:
    """Plain Gaussian elimination over GF(2^k) (small matrices, tests)."""
    a = np.array(dense, dtype=np.uint8) % field.order
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank] = field.mul[field.inv[a[rank, c]]][a[rank]]
        for i in range(rows):
            if i != rank and a[i, c]:
                a[i] ^= field.mul[a[i, c]][a[rank]]
        rank += 1
        if rank == rows:
            break
    return rank
