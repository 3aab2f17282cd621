"""
The cell complex dual to the stratification of the level-m cover.

A j-cell is an isomorphism class of a one-face dessin with ``(6g - 3) - j``
edges together with a symplectic basis of H_1(Z/m).  For a fixed dessin the
bases form a torsor under Sp(2g, Z/m): with a reference frame ``R`` every
basis is ``G @ R`` for a unique ``G``.  Automorphisms act by ``G -> G A`` and
edge contraction by ``G -> G T`` for fixed matrices ``A`` and ``T``, so cells
and boundary maps are computed on group indices in bulk.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import modp
from .gf2_linalg import SparseBoolMatrix
from .gf2_linalg.equivariant import Orbits, orbits_from_permutations
from .ribbon import (
    Dessin,
    automorphisms,
    canonical_form,
    closure_under_contraction,
    contract_edge,
    contractible_edges,
    enumerate_trivalent_one_face,
)
from .surface_homology import (
    HomologyError,
    SymplecticGroup,
    automorphism_matrix,
    coordinates,
    edge_vector,
    symplectic_frame,
    standard_form,
    symplectic_group,
)

log = logging.getLogger(__name__)

__all__ = [
    "ComplexError",
    "DessinCells",
    "ComplexLevels",
    "default_modulus",
    "build_complex",
    "boundary_matrix",
    "boundary_matrices",
    "euler_characteristic",
    "check_chain_complex",
    "SymmetrySubgroup",
    "symmetry_subgroup",
    "cell_orbits",
    "cell_poset_g1",
    "build_flag_complex_g1",
    "simplicial_betti_gf2",
]


class ComplexError(RuntimeError):
    pass


def default_modulus(genus: int) -> int:
    return 2 if genus == 1 else 3


def basis_keys(frame_edges: np.ndarray, group: SymplecticGroup) -> np.ndarray:
    """Integer key of every basis ``G @ R``: its edge values read as base-m
    digits, most significant first, cycle by cycle.  Key order is the
    lexicographic order of serialized bases."""
    m = group.modulus
    B = np.einsum("nij,je->nie", group.elements.astype(np.int64), frame_edges) % m
    flat = B.reshape(len(B), -1)
    L = flat.shape[1]
    if m ** L >= 2**63:
        raise ComplexError("serialized basis does not fit in a 64-bit key")
    weights = m ** np.arange(L - 1, -1, -1, dtype=np.int64)
    return flat @ weights


def serialize_key(key: int, m: int, n_cycles: int, n_edges: int) -> str:
    digits = []
    for _ in range(n_cycles * n_edges):
        digits.append(key % m)
        key //= m
    digits.reverse()
    return "|".join(
        "".join(str(x) for x in digits[i * n_edges:(i + 1) * n_edges]) for i in range(n_cycles)
    )


@dataclass
class DessinCells:
    """Cells carried by one canonical dessin."""

    code: tuple[int, ...]
    dessin: Dessin
    frame: np.ndarray  # (2g, n_darts) symplectic reference basis
    aut_order: int  # |Aut(D)|
    action_order: int  # size of the image of Aut(D) in GL(H_1)
    keys: np.ndarray  # (|Sp|,) int64 key of G @ frame
    cell_of: np.ndarray  # (|Sp|,) int32 local cell id of each group element
    reps: np.ndarray  # (n_cells,) group index of each cell's minimal representative
    offset: int = 0

    @property
    def n_cells(self) -> int:
        return len(self.reps)

    @property
    def n_edges(self) -> int:
        return self.dessin.n_edges


@dataclass
class ComplexLevels:
    genus: int
    modulus: int
    group: SymplecticGroup
    top_edges: int
    levels: list[list[DessinCells]] = field(default_factory=list)  # indexed by dim

    @property
    def counts(self) -> list[int]:
        return [sum(dc.n_cells for dc in lev) for lev in self.levels]

    @property
    def max_dim(self) -> int:
        return len(self.levels) - 1

    def entry(self, dim: int, code: tuple[int, ...]) -> DessinCells:
        return self._index[dim][code]

    def __post_init__(self) -> None:
        self._index: list[dict] = []

    def reindex(self) -> None:
        self._index = [{dc.code: dc for dc in lev} for lev in self.levels]

    def cell_rows(self, dim: int):
        """Yield ``(index, dessin code, serialized basis)`` in matrix order."""
        g2 = 2 * self.genus
        for dc in self.levels[dim]:
            for k, rep in enumerate(dc.reps):
                key = int(dc.keys[rep])
                yield dc.offset + k, dc.code, serialize_key(key, self.modulus, g2, dc.n_edges)


def _cells_for(dessin: Dessin, code, group: SymplecticGroup, m: int) -> DessinCells:
    frame = symplectic_frame(dessin, m)
    frame_edges = edge_vector(dessin, frame) % m
    keys = basis_keys(frame_edges, group)
    auts = automorphisms(dessin)
    mats = {}
    for sigma in auts:
        A = automorphism_matrix(dessin, sigma, frame, m) % m
        mats.setdefault(A.tobytes(), A)
    action_order = len(mats)
    if m >= 3 and action_order != len(auts):
        # a nontrivial automorphism acting trivially would fix every basis
        raise HomologyError(f"automorphism group acts non-freely on bases of {dessin}")
    orbit_min = keys.copy()
    for A in mats.values():
        np.minimum(orbit_min, keys[group.right_action(A)], out=orbit_min)
    uniq, cell_of = np.unique(orbit_min, return_inverse=True)
    order = np.argsort(keys)
    reps = order[np.searchsorted(keys, uniq, sorter=order)]
    counts = np.bincount(cell_of)
    if np.any(counts != action_order):
        raise HomologyError("basis orbits of unequal size")
    return DessinCells(
        code=code,
        dessin=dessin,
        frame=frame,
        aut_order=len(auts),
        action_order=action_order,
        keys=keys,
        cell_of=cell_of.astype(np.int32),
        reps=reps.astype(np.int64),
    )


def build_complex(genus: int, m: int | None = None) -> ComplexLevels:
    """All cells, every dimension ``0 .. 4g - 3``, in canonical order.

    Dessins within a dimension are ordered by canonical code and cells within
    a dessin by serialized basis, which fixes matrix row/column order.
    """
    if m is None:
        m = default_modulus(genus)
    group = symplectic_group(genus, m)
    tops = enumerate_trivalent_one_face(genus)
    by_edges = closure_under_contraction(tops.values())
    top = 6 * genus - 3
    cx = ComplexLevels(genus, m, group, top)
    for k in range(top, 2 * genus - 1, -1):
        level = []
        offset = 0
        for code, dessin in by_edges.get(k, {}).items():
            dc = _cells_for(dessin, code, group, m)
            dc.offset = offset
            offset += dc.n_cells
            level.append(dc)
        log.info("edges=%d dessins=%d cells=%d", k, len(level), offset)
        cx.levels.append(level)
    cx.reindex()
    return cx


def _contraction_action(cx: ComplexLevels, parent: DessinCells, e: int):
    """Child cell entry and the permutation ``G -> G T`` for contracting ``e``."""
    m = cx.modulus
    child, dart_map = contract_edge(parent.dessin, e)
    code, canon, labels = canonical_form(child)
    dim = cx.top_edges - canon.n_edges
    target = cx.entry(dim, code)
    moved = np.zeros((parent.frame.shape[0], canon.n_darts), dtype=np.int64)
    for x in range(parent.dessin.n_darts):
        if dart_map[x] >= 0:
            moved[:, labels[dart_map[x]]] = parent.frame[:, x]
    T = coordinates(target.frame, moved, m) % m
    try:
        perm = cx.group.right_action(T)
    except HomologyError as exc:
        raise HomologyError(f"contraction of edge {e} of {parent.dessin} does not preserve the pairing") from exc
    return target, perm


def boundary_matrix(cx: ComplexLevels, j: int) -> SparseBoolMatrix:
    """Boundary from dimension ``j`` to ``j - 1`` over GF(2).

    Rows are (j-1)-cells, columns j-cells; entry (r, c) counts, mod 2, the
    contractible edges of cell r whose contraction gives cell c.
    """
    if not 1 <= j <= cx.max_dim:
        raise ValueError(f"boundary index {j} outside 1..{cx.max_dim}")
    rows_out, cols_out = [], []
    for parent in cx.levels[j - 1]:
        rows = parent.offset + np.arange(parent.n_cells, dtype=np.int64)
        for e in contractible_edges(parent.dessin):
            target, perm = _contraction_action(cx, parent, e)
            cols = target.offset + target.cell_of[perm[parent.reps]].astype(np.int64)
            rows_out.append(rows)
            cols_out.append(cols)
    n_rows = sum(dc.n_cells for dc in cx.levels[j - 1])
    n_cols = sum(dc.n_cells for dc in cx.levels[j])
    if rows_out:
        r = np.concatenate(rows_out)
        c = np.concatenate(cols_out)
    else:
        r = c = np.zeros(0, dtype=np.int64)
    mat = SparseBoolMatrix.from_coo(r, c, (n_rows, n_cols), duplicates="mod2")
    if len(r) and len(np.unique(r * n_cols + c)) != len(r):
        log.warning("boundary %d: repeated incidences folded mod 2", j)
    return mat


def boundary_matrices(cx: ComplexLevels) -> list[SparseBoolMatrix]:
    return [boundary_matrix(cx, j) for j in range(1, cx.max_dim + 1)]


def check_chain_complex(mats: list[SparseBoolMatrix]) -> list[int]:
    """Return the ``j`` (1-based, for the pair d_j d_{j+1}) where ``d d != 0``."""
    bad = []
    for j in range(len(mats) - 1):
        if not (mats[j] @ mats[j + 1]).is_zero():
            bad.append(j + 1)
    return bad


def euler_characteristic(cx_or_counts, group_order: int | None = None) -> tuple[int, Fraction]:
    """``(chi, chi / |Sp|)`` for a complex or a list of cell counts."""
    if isinstance(cx_or_counts, ComplexLevels):
        counts = cx_or_counts.counts
        group_order = len(cx_or_counts.group)
    else:
        counts = list(cx_or_counts)
    if not counts or sum(counts) == 0:
        raise ComplexError("Euler characteristic of an empty complex")
    chi = sum((-1) ** j * n for j, n in enumerate(counts))
    if group_order is None:
        raise ValueError("group order required with bare counts")
    return chi, Fraction(chi, group_order)


# ---------------------------------------------------------------------------
# an odd-order symmetry: Sp(2g, Z/m) acting on the left of every basis
# ---------------------------------------------------------------------------

@dataclass
class SymmetrySubgroup:
    """An elementary abelian subgroup ``(Z/p)^r`` of Sp(2g, Z/m), ``p`` odd.

    ``elements[i]`` is the product of the generators raised to
    ``exponents[i]``.
    """

    p: int
    generators: np.ndarray  # (r, 2g, 2g)
    elements: np.ndarray  # (p^r, 2g, 2g)
    exponents: np.ndarray  # (p^r, r)


def _transvection(v, g: int, m: int) -> np.ndarray:
    J = standard_form(g)
    v = np.asarray(v, dtype=np.int64)
    return (np.eye(2 * g, dtype=np.int64) + np.outer(J @ v, v)) % m


def symmetry_subgroup(group: SymplecticGroup) -> SymmetrySubgroup:
    """Commuting generators of order 3 (m = 2) or m (odd m).

    For odd m these are the transvections along ``a_i`` and ``a_i + a_j`` in
    the Lagrangian spanned by the ``a``'s, which generate the unipotent
    radical of its stabilizer, of order ``m^(g(g+1)/2)``.  For m = 2 each
    handle contributes an element of order 3 of SL(2, Z/2).
    """
    g, m = group.genus, group.modulus
    n = 2 * g
    eye = np.eye(n, dtype=np.int64)
    if m == 2:
        p = 3
        gens = []
        for i in range(g):
            x = eye.copy()
            x[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[0, 1], [1, 1]]
            gens.append(x)
    else:
        p = m
        a = [eye[2 * i] for i in range(g)]
        vecs = a + [a[i] + a[j] for i in range(g) for j in range(i + 1, g)]
        gens = [_transvection(v, g, m) for v in vecs]
    gens = np.array(gens, dtype=np.int64)
    r = len(gens)
    for x in gens:
        for y in gens:
            if np.any((x @ y - y @ x) % m):
                raise HomologyError("symmetry generators do not commute")
    exps = np.array(np.meshgrid(*[np.arange(p)] * r, indexing="ij")).reshape(r, -1).T
    elements = []
    for e in exps:
        x = eye
        for gen, k in zip(gens, e):
            x = x @ np.linalg.matrix_power(gen, int(k)) % m
        elements.append(x)
    elements = np.array(elements)
    idx = group.index(elements)
    if len(np.unique(idx)) != len(exps):
        raise HomologyError("symmetry subgroup is smaller than expected")
    return SymmetrySubgroup(p, gens, elements, exps.astype(np.int64))


def cell_orbits(cx: ComplexLevels, sub: SymmetrySubgroup) -> list[Orbits]:
    """Orbits of ``sub`` acting by ``h . (D, G) = (D, h G)`` on every level.

    Left and right multiplication commute, so this action is well defined on
    cells and commutes with the boundary maps.
    """
    grp = cx.group
    elems = grp.elements.astype(np.int64)
    left = np.stack([grp.index(np.einsum("ij,njk->nik", h, elems) % cx.modulus) for h in sub.elements])
    out = []
    for level in cx.levels:
        parts = []
        for dc in level:
            perms = dc.cell_of[left[:, dc.reps]]
            parts.append(orbits_from_permutations(perms))
        out.append(Orbits.concatenate(parts, [dc.n_cells for dc in level]))
    return out


# ---------------------------------------------------------------------------
# genus-1 spine cross-check
# ---------------------------------------------------------------------------

def cell_poset_g1(cx: ComplexLevels) -> tuple[list[tuple[int, int]], list[tuple[tuple[int, int], tuple[int, int]]]]:
    """Cells ``(dim, index)`` and the cover relations given by contraction."""
    if cx.genus != 1:
        raise ValueError("the flag-complex cross-check is implemented for genus 1 only")
    cells = [(dim, i) for dim, n in enumerate(cx.counts) for i in range(n)]
    mats = boundary_matrices(cx)
    covers = []
    for j, mat in enumerate(mats, start=1):
        for r, c in zip(mat.row_ids(), mat.indices):
            covers.append(((j - 1, int(r)), (j, int(c))))
    return cells, covers


def build_flag_complex_g1(cx: ComplexLevels) -> list[list[tuple]]:
    """Simplices (by dimension) of the flag complex of the genus-1 cell poset.

    A flag is a chain of dessins-with-basis each obtained from the previous
    by contracting edges.
    """
    cells, covers = cell_poset_g1(cx)
    up: dict = {c: [] for c in cells}
    for lo, hi in covers:
        up[lo].append(hi)
    chains = [[(c,) for c in cells]]
    while True:
        nxt = [ch + (h,) for ch in chains[-1] for h in up[ch[-1]]]
        if not nxt:
            break
        chains.append(nxt)
    return chains


def simplicial_betti_gf2(simplices: list[list[tuple]]) -> list[int]:
    """GF(2) Betti numbers of an abstract simplicial complex (small, dense)."""
    index = [{s: i for i, s in enumerate(level)} for level in simplices]
    ranks = []
    for k in range(1, len(simplices)):
        M = np.zeros((len(simplices[k - 1]), len(simplices[k])), dtype=np.int64)
        for j, s in enumerate(simplices[k]):
            for drop in range(len(s)):
                face = s[:drop] + s[drop + 1:]
                M[index[k - 1][face], j] ^= 1
        ranks.append(modp.rank(M, 2))
    full = [0, *ranks, 0]
    return [len(lev) - full[k] - full[k + 1] for k, lev in enumerate(simplices)]
