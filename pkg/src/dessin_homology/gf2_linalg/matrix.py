"""Sparse 0/1 matrices over GF(2) in compressed-row form, plus SMS I/O."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = ["SparseBoolMatrix", "MatrixFormatError"]


class MatrixFormatError(ValueError):
    pass


class SparseBoolMatrix:
    """GF(2) matrix: for each row, strictly increasing column indices.

    Duplicate entries are rejected; use :meth:`from_coo` with
    ``duplicates="mod2"`` to fold repeated entries by parity explicitly.
    """

    __slots__ = ("n_rows", "n_cols", "indptr", "indices")

    def __init__(self, n_rows: int, n_cols: int, indptr, indices, check: bool = True):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        if check:
            self.validate()

    def validate(self) -> None:
        if self.indptr.shape != (self.n_rows + 1,) or self.indptr[0] != 0:
            raise MatrixFormatError("bad row pointer array")
        if self.indptr[-1] != len(self.indices) or np.any(np.diff(self.indptr) < 0):
            raise MatrixFormatError("row pointers inconsistent with index array")
        if len(self.indices):
            if self.indices.min() < 0 or self.indices.max() >= self.n_cols:
                raise MatrixFormatError("column index out of range")
            step = np.diff(self.indices.astype(np.int64))
            starts = self.indptr[1:-1]
            inner = np.ones(len(step), dtype=bool)
            inner[starts[(starts > 0) & (starts < len(self.indices))] - 1] = False
            if np.any(step[inner] <= 0):
                raise MatrixFormatError("column indices not strictly increasing within a row")

    # --- construction ----------------------------------------------------

    @classmethod
    def from_coo(cls, rows, cols, shape, duplicates: str = "forbid") -> "SparseBoolMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        n_rows, n_cols = shape
        key = rows * n_cols + cols
        key.sort(kind="stable")
        if len(key):
            uniq, counts = np.unique(key, return_counts=True)
        else:
            uniq, counts = key, key
        if duplicates == "forbid":
            if np.any(counts > 1):
                raise MatrixFormatError("duplicate (row, col) entries")
            kept = uniq
        elif duplicates == "mod2":
            kept = uniq[counts % 2 == 1]
        else:
            raise ValueError(duplicates)
        r = kept // n_cols
        c = kept % n_cols
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.add.at(indptr, r + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n_rows, n_cols, indptr, c, check=False)

    @classmethod
    def from_dense(cls, dense) -> "SparseBoolMatrix":
        dense = np.asarray(dense) % 2
        r, c = np.nonzero(dense)
        return cls.from_coo(r, c, dense.shape)

    @classmethod
    def identity(cls, n: int) -> "SparseBoolMatrix":
        return cls(n, n, np.arange(n + 1), np.arange(n))

    @classmethod
    def from_scipy(cls, mat) -> "SparseBoolMatrix":
        coo = sp.coo_matrix(mat)
        mask = (coo.data.astype(np.int64) % 2) == 1
        return cls.from_coo(coo.row[mask], coo.col[mask], coo.shape)

    # --- basic views -----------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def row(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def row_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.indptr))

    def to_scipy(self, dtype=np.int32) -> sp.csr_matrix:
        data = np.ones(self.nnz, dtype=dtype)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=self.shape)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        out[self.row_ids(), self.indices] = 1
        return out

    def transpose(self) -> "SparseBoolMatrix":
        return SparseBoolMatrix.from_coo(self.indices, self.row_ids(), (self.n_cols, self.n_rows))

    @property
    def T(self) -> "SparseBoolMatrix":
        return self.transpose()

    def column_weights(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.n_cols)

    def row_weights(self) -> np.ndarray:
        return np.diff(self.indptr)

    def permute(self, row_perm=None, col_perm=None) -> "SparseBoolMatrix":
        """Row ``i`` moves to ``row_perm[i]``, column ``j`` to ``col_perm[j]``."""
        r = self.row_ids()
        c = self.indices.astype(np.int64)
        if row_perm is not None:
            r = np.asarray(row_perm, dtype=np.int64)[r]
        if col_perm is not None:
            c = np.asarray(col_perm, dtype=np.int64)[c]
        return SparseBoolMatrix.from_coo(r, c, self.shape)

    def submatrix(self, rows, cols) -> "SparseBoolMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        rmap = np.full(self.n_rows, -1, dtype=np.int64)
        rmap[rows] = np.arange(len(rows))
        cmap = np.full(self.n_cols, -1, dtype=np.int64)
        cmap[cols] = np.arange(len(cols))
        r = rmap[self.row_ids()]
        c = cmap[self.indices]
        keep = (r >= 0) & (c >= 0)
        return SparseBoolMatrix.from_coo(r[keep], c[keep], (len(rows), len(cols)))

    def matmul(self, other: "SparseBoolMatrix") -> "SparseBoolMatrix":
        """Product over GF(2)."""
        if self.n_cols != other.n_rows:
            raise ValueError("shape mismatch")
        prod = self.to_scipy(np.int32) @ other.to_scipy(np.int32)
        return SparseBoolMatrix.from_scipy(prod)

    def __matmul__(self, other: "SparseBoolMatrix") -> "SparseBoolMatrix":
        return self.matmul(other)

    def is_zero(self) -> bool:
        return self.nnz == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBoolMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self) -> str:
        return f"SparseBoolMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"

    # --- SMS format --------------------------------------------------------

    def write_sms(self, path) -> None:
        """Write ``rows cols M``, 1-based triples ``i j 1``, then ``0 0 0``.

        The file is written to a temporary name and renamed into place.
        """
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        r = self.row_ids() + 1
        c = self.indices.astype(np.int64) + 1
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write(f"{self.n_rows} {self.n_cols} M\n")
            chunk = 1 << 20
            for s in range(0, self.nnz, chunk):
                block = np.column_stack([r[s:s + chunk], c[s:s + chunk]])
                fh.write("".join(f"{i} {j} 1\n" for i, j in block.tolist()))
            fh.write("0 0 0\n")
        os.replace(tmp, path)

    @classmethod
    def read_sms(cls, path) -> "SparseBoolMatrix":
        with open(path, encoding="ascii") as fh:
            header = fh.readline().split()
            if len(header) != 3 or header[2] != "M":
                raise MatrixFormatError(f"bad SMS header: {header}")
            n_rows, n_cols = int(header[0]), int(header[1])
            data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
        if data.size == 0 or tuple(data[-1]) != (0, 0, 0):
            raise MatrixFormatError("missing SMS terminator")
        data = data[:-1]
        if np.any(data[:, 2] % 2 != 1):
            raise MatrixFormatError("SMS values must be odd over GF(2)")
        return cls.from_coo(data[:, 0] - 1, data[:, 1] - 1, (n_rows, n_cols))
