"""Small dense linear algebra over Z/p for prime p (used with p = 2, 3)."""

from __future__ import annotations

import numpy as np

__all__ = ["rref", "rank", "inverse", "solve_left", "nullspace", "det"]


def _inv_scalar(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return pow(a, p - 2, p)


def rref(A, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``A`` mod ``p`` and its pivot columns."""
    M = np.array(A, dtype=np.int64) % p
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = (M[r] * _inv_scalar(int(M[r, c]), p)) % p
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A, p: int) -> int:
    return len(rref(A, p)[1])


def det(A, p: int) -> int:
    M = np.array(A, dtype=np.int64) % p
    n = M.shape[0]
    out = 1
    for c in range(n):
        nz = np.nonzero(M[c:, c])[0]
        if nz.size == 0:
            return 0
        k = c + nz[0]
        if k != c:
            M[[c, k]] = M[[k, c]]
            out = -out
        out = (out * int(M[c, c])) % p
        inv = _inv_scalar(int(M[c, c]), p)
        for i in range(c + 1, n):
            if M[i, c]:
                M[i] = (M[i] - M[i, c] * inv * M[c]) % p
    return out % p


def inverse(A, p: int) -> np.ndarray:
    A = np.array(A, dtype=np.int64) % p
    n = A.shape[0]
    R, piv = rref(np.hstack([A, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular mod p")
    return R[:, n:]


def solve_left(A, B, p: int) -> np.ndarray:
    """Return ``X`` with ``X @ A = B`` (mod p); rows of ``A`` must be independent
    and every row of ``B`` must lie in their span."""
    A = np.array(A, dtype=np.int64) % p
    B = np.atleast_2d(np.array(B, dtype=np.int64) % p)
    k = A.shape[0]
    # row-reduce [A^T | B^T]
    R, piv = rref(np.hstack([A.T, B.T]), p)
    if piv[:k] != list(range(k)) or any(c >= k for c in piv):
        raise ValueError("system X A = B has no (unique) solution")
    return R[:k, k:].T % p


def nullspace(A, p: int) -> np.ndarray:
    """Basis (as rows) of ``{x : A @ x = 0 mod p}``."""
    A = np.array(A, dtype=np.int64) % p
    n = A.shape[1]
    R, piv = rref(A, p)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-R[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), n)
