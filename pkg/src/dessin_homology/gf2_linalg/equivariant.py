"""
Rank of a chain complex with a symmetry of odd order, one character at a time.

Let an abelian group ``H = (Z/p)^r``, ``p`` an odd prime, permute the rows
and columns of a GF(2) matrix ``M`` so that ``M[h.x, h.y] = M[x, y]``.  Over
a field ``F = GF(2^b)`` containing the p-th roots of unity the group algebra
is semisimple (|H| is odd), so ``F^n`` splits into eigenspaces ``V_chi`` of
the characters ``chi(h) = w^(k . s(h))`` and ``M`` is block diagonal.  The
eigenspace ``V_chi`` has one basis vector per orbit ``O`` on which ``chi`` is
trivial on the stabilizer, namely ``v_O = sum over y in O of chi(h_y)^-1 y``
where ``y = h_y . x_O`` for the orbit representative ``x_O``.  In that basis
the block of ``M`` has entries

    B[O', O] = sum over y in O with M[x_O', y] = 1 of chi(h_y)^-1,

read straight off the rows of the representatives.  The blocks of ``chi`` and
``chi^2`` are conjugate under Frobenius and so have equal rank, and the
trivial character has a 0/1 block that can be eliminated over GF(2).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .elimination import EliminationResult, chain_ranks
from .field import FieldMatrix, GF2k, gf2k
from .matrix import SparseBoolMatrix

log = logging.getLogger(__name__)

__all__ = ["Orbits", "orbits_from_permutations", "CharacterClass", "character_classes",
           "component_matrix", "character_block_ranks", "equivariant_chain_ranks"]


@dataclass
class Orbits:
    """Orbits of ``H`` on one index set.

    ``orbit_of[y]`` numbers orbits in order of their smallest element,
    ``h_of[y]`` is a group element taking the representative to ``y``, and
    ``stab[o]`` is a bit mask of the stabilizer of representative ``o``.
    """

    orbit_of: np.ndarray  # (n,) int64
    h_of: np.ndarray  # (n,) int16
    reps: np.ndarray  # (n_orbits,) int64
    stab: np.ndarray  # (n_orbits,) int64 bit masks over H

    @property
    def n_orbits(self) -> int:
        return len(self.reps)

    @staticmethod
    def concatenate(parts: list["Orbits"], sizes: list[int]) -> "Orbits":
        """Orbits of a disjoint union of invariant blocks of the given sizes."""
        offs = np.concatenate([[0], np.cumsum(sizes)])
        ocount = np.concatenate([[0], np.cumsum([p.n_orbits for p in parts])])
        return Orbits(
            np.concatenate([p.orbit_of + ocount[i] for i, p in enumerate(parts)]),
            np.concatenate([p.h_of for p in parts]),
            np.concatenate([p.reps + offs[i] for i, p in enumerate(parts)]),
            np.concatenate([p.stab for p in parts]),
        )


def orbits_from_permutations(perms: np.ndarray) -> Orbits:
    """Orbit data from the images ``perms[h, y] = h . y`` of every group element."""
    perms = np.asarray(perms, dtype=np.int64)
    n_h, n = perms.shape
    if n_h > 62:
        raise ValueError("stabilizer masks hold at most 62 group elements")
    rep_of = perms.min(axis=0)
    reps, orbit_of = np.unique(rep_of, return_inverse=True)
    h_of = np.full(n, -1, dtype=np.int16)
    for h in range(n_h):
        hit = (perms[h, rep_of] == np.arange(n)) & (h_of < 0)
        h_of[hit] = h
    if np.any(h_of < 0):
        raise ValueError("permutations do not form a group action")
    fixed = perms[:, reps] == reps[None, :]
    stab = (fixed.astype(np.int64) << np.arange(n_h, dtype=np.int64)[:, None]).sum(axis=0)
    return Orbits(orbit_of.astype(np.int64), h_of, reps.astype(np.int64), stab)


@dataclass(frozen=True)
class CharacterClass:
    """A character ``k`` standing for its Frobenius orbit of size ``weight``."""

    k: tuple[int, ...]
    weight: int

    @property
    def trivial(self) -> bool:
        return not any(self.k)


def character_classes(r: int, p: int) -> list[CharacterClass]:
    """Frobenius orbits ``k -> 2k`` on the characters of ``(Z/p)^r``."""
    seen: set[tuple[int, ...]] = set()
    out = []
    for flat in range(p**r):
        k = tuple((flat // p**i) % p for i in range(r))
        if k in seen:
            continue
        orbit = {k}
        x = tuple(2 * a % p for a in k)
        while x not in orbit:
            orbit.add(x)
            x = tuple(2 * a % p for a in x)
        seen |= orbit
        out.append(CharacterClass(k, len(orbit)))
    return out


def _field_for(p: int) -> GF2k:
    bits = 1
    while (2**bits - 1) % p:
        bits += 1
    return gf2k(bits)


def component_matrix(
    m: SparseBoolMatrix,
    row_orbits: Orbits,
    col_orbits: Orbits,
    exponents: np.ndarray,
    k: tuple[int, ...],
    p: int,
) -> SparseBoolMatrix | FieldMatrix:
    """Block of ``m`` on the ``k``-eigenspaces, in the orbit bases above."""
    exponents = np.asarray(exponents, dtype=np.int64)
    chi = exponents @ np.asarray(k, dtype=np.int64) % p  # (|H|,)
    kernel = int(((chi == 0).astype(np.int64) << np.arange(len(chi), dtype=np.int64)).sum())
    row_ok = (row_orbits.stab & ~kernel) == 0
    col_ok = (col_orbits.stab & ~kernel) == 0
    row_index = np.flatnonzero(row_ok)
    col_new = np.full(col_orbits.n_orbits, -1, dtype=np.int64)
    col_new[col_ok] = np.arange(int(col_ok.sum()))
    reps = row_orbits.reps[row_index]
    starts, ends = m.indptr[reps], m.indptr[reps + 1]
    lengths = ends - starts
    rows = np.repeat(np.arange(len(reps), dtype=np.int64), lengths)
    pos = np.repeat(starts - np.cumsum(np.r_[0, lengths[:-1]]), lengths) + np.arange(lengths.sum())
    y = m.indices[pos].astype(np.int64)
    cols = col_new[col_orbits.orbit_of[y]]
    keep = cols >= 0
    rows, cols, y = rows[keep], cols[keep], y[keep]
    shape = (len(reps), int(col_ok.sum()))
    if not any(k):
        return SparseBoolMatrix.from_coo(rows, cols, shape, duplicates="mod2")
    field = _field_for(p)
    w = field.root_of_unity(p)
    powers = np.array([field.power(w, e) for e in range(p)], dtype=np.uint8)
    vals = powers[(-chi[col_orbits.h_of[y]]) % p]
    return FieldMatrix.from_coo(rows, cols, vals, shape, field)


def character_block_ranks(
    mats: list[SparseBoolMatrix],
    orbits: list[Orbits],
    exponents: np.ndarray,
    p: int,
    k: tuple[int, ...],
    **kwargs,
) -> tuple[list[int], list[EliminationResult]]:
    """Dimensions of the ``k``-eigenspaces of every chain group, and the
    elimination results of the blocks of ``mats`` (with clearing)."""
    blocks = [component_matrix(m, orbits[j], orbits[j + 1], exponents, k, p) for j, m in enumerate(mats)]
    dims = [blocks[0].n_rows] + [b.n_cols for b in blocks]
    return dims, chain_ranks(blocks, **kwargs)


def equivariant_chain_ranks(
    mats: list[SparseBoolMatrix],
    orbits: list[Orbits],
    exponents: np.ndarray,
    p: int,
    **kwargs,
) -> tuple[list[int], list[tuple[CharacterClass, list[EliminationResult]]]]:
    """GF(2) ranks of ``mats`` (``mats[j - 1]``: chains of degree j to j - 1)
    by splitting into characters of ``H``.

    ``orbits[j]`` describes the action on degree-j chains and ``exponents``
    gives each group element as a vector in ``(Z/p)^r``.  Returns the total
    ranks and, per character class, the elimination results of its blocks.
    """
    if len(orbits) != len(mats) + 1:
        raise ValueError("need orbit data for every chain group")
    if p % 2 == 0:
        raise ValueError("the symmetry group must have odd order")
    exponents = np.asarray(exponents, dtype=np.int64)
    totals = [0] * len(mats)
    dims = [0] * len(orbits)
    detail = []
    for cls in character_classes(exponents.shape[1], p):
        d, results = character_block_ranks(mats, orbits, exponents, p, cls.k, **kwargs)
        for j, x in enumerate(d):
            dims[j] += cls.weight * x
        for j, res in enumerate(results):
            totals[j] += cls.weight * res.rank
        log.info("character %s (x%d): ranks %s", cls.k, cls.weight, [r.rank for r in results])
        detail.append((cls, results))
    expected = [len(o.orbit_of) for o in orbits]
    if dims != expected:
        raise RuntimeError(f"character blocks have total dimensions {dims}, expected {expected}")
    return totals, detail
