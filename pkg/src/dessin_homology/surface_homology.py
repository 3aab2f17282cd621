"""
First homology of the surface carried by a one-face dessin, over Z/m.

A cycle is stored as an integer array of per-dart values: ``c[rho1 d] = -c[d]``
and the values leaving each vertex sum to zero mod m.  Because the dessin
has a single face, these graph cycles are exactly H_1 of the surface.

Bases are arrays of shape ``(2g, n_darts)`` ordered ``a1, b1, ..., ag, bg``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np

from . import modp
from .ribbon import Dessin, DessinError, contract_edge

__all__ = [
    "HomologyError",
    "load_omega",
    "is_cycle",
    "edge_vector",
    "cycle_from_edge_vector",
    "cycle_space_basis",
    "all_cycles",
    "omega_sum",
    "pushoff_intersection",
    "intersection_number",
    "pairing_matrix",
    "standard_form",
    "symplectic_frame",
    "sp_order",
    "SymplecticGroup",
    "symplectic_group",
    "enumerate_symplectic_bases",
    "coordinates",
    "automorphism_matrix",
    "transport_contract",
    "transport_automorphism",
]


class HomologyError(RuntimeError):
    """Internal inconsistency in homology data (never a user input error)."""


# ---------------------------------------------------------------------------
# cycles
# ---------------------------------------------------------------------------

def _check_modulus(m: int) -> None:
    if m not in (2, 3):
        raise ValueError(f"modulus must be 2 or 3, got {m}")


def is_cycle(d: Dessin, values, m: int) -> bool:
    c = np.asarray(values, dtype=np.int64) % m
    if c.shape != (d.n_darts,):
        return False
    if np.any((c + c[list(d.rho1)]) % m):
        return False
    return all(int(c[list(v)].sum()) % m == 0 for v in d.vertices)


def edge_vector(d: Dessin, values) -> np.ndarray:
    """Values on the low dart of each edge, in edge-id order."""
    c = np.asarray(values, dtype=np.int64)
    return c[..., [a for a, _ in d.edges]]


def cycle_from_edge_vector(d: Dessin, vec, m: int) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.int64) % m
    out = np.zeros(vec.shape[:-1] + (d.n_darts,), dtype=np.int64)
    for k, (a, b) in enumerate(d.edges):
        out[..., a] = vec[..., k]
        out[..., b] = (-vec[..., k]) % m
    return out


def cycle_space_basis(d: Dessin, m: int) -> np.ndarray:
    """Spanning set of size ``E - V + 1`` (= 2g) for the cycle space.

    A BFS spanning tree is chosen; each non-tree edge is seeded with value 1
    on its low dart and tree values are fixed by peeling leaves.
    """
    _check_modulus(m)
    if d.n_faces != 1:
        raise DessinError("cycle space equals surface homology only for one-face dessins")
    nv = d.n_vertices
    parent_dart = [-1] * nv  # dart at v pointing toward the parent
    order = [0]
    seen = [False] * nv
    seen[0] = True
    tree = set()
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for x in d.vertices[v]:
            w = d.vertex_of(d.rho1[x])
            if not seen[w]:
                seen[w] = True
                parent_dart[w] = d.rho1[x]
                tree.add(d.edge_of[x])
                order.append(w)
    basis = []
    for k, (a, b) in enumerate(d.edges):
        if k in tree:
            continue
        c = np.zeros(d.n_darts, dtype=np.int64)
        c[a] = 1
        c[b] = m - 1
        for v in reversed(order[1:]):
            p = parent_dart[v]
            s = int(sum(c[x] for x in d.vertices[v] if x != p)) % m
            c[p] = (-s) % m
            c[d.rho1[p]] = s
        basis.append(c % m)
    out = np.array(basis, dtype=np.int64).reshape(len(basis), d.n_darts)
    if len(basis) != 2 * d.genus:
        raise HomologyError("cycle space dimension differs from 2g")
    return out


def all_cycles(d: Dessin, basis, m: int) -> np.ndarray:
    """Every linear combination of ``basis`` (``m ** len(basis)`` rows)."""
    basis = np.asarray(basis, dtype=np.int64)
    k = basis.shape[0]
    coeffs = np.array(np.meshgrid(*[np.arange(m)] * k, indexing="ij")).reshape(k, -1).T
    return (coeffs @ basis) % m


# ---------------------------------------------------------------------------
# intersection form
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def load_omega() -> dict[tuple[tuple[int, int], tuple[int, int]], Fraction]:
    """Omega table keyed by ``((a_i, a_{i-1}), (b_i, b_{i-1}))`` in {0, 1, -1}."""
    raw = json.loads(resources.files(__package__).joinpath("data/omega.json").read_text())

    def parse(label: str) -> tuple[int, int]:
        x, y = label.split("x")
        return int(x), int(y)

    cols = [parse(s) for s in raw["labels"]]
    table = {}
    for row_label, entries in raw["rows"].items():
        r = parse(row_label)
        for c, val in zip(cols, entries):
            table[(r, c)] = Fraction(val)
    return table


def _lift(v: int, m: int) -> int:
    v %= m
    return v - m if 2 * v > m else v


def omega_sum(d: Dessin, a, b, m: int) -> Fraction:
    """Exact (unreduced) corner sum of the Omega table over the polygon.

    The polygon sides are the darts along the single face in ``rho2``
    order; corner ``i`` sits between side ``i - 1`` and side ``i``.
    """
    if d.n_faces != 1 or any(v != 3 for v in d.valencies()):
        raise DessinError("the Omega table applies to trivalent one-face dessins")
    omega = load_omega()
    face = d.faces[0]
    total = Fraction(0)
    prev = face[-1]
    for cur in face:
        row = (_lift(int(a[cur]), m), _lift(int(a[prev]), m))
        col = (_lift(int(b[cur]), m), _lift(int(b[prev]), m))
        total += omega[(row, col)]
        prev = cur
    return total


def pushoff_intersection(d: Dessin, a, b, m: int) -> int:
    """Intersection number via a push-off of ``b`` into the face.

    ``b`` is moved to run beside each edge on the left of the edge's low dart;
    inside a small disc around each vertex its strands are joined through a
    hub just before the first dart, and each hub-to-strand arc is counted
    against the radial segments of ``a`` it sweeps counterclockwise.
    Works for any valency.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    total = 0
    for v in d.vertices:
        k = len(v)
        strands = [0] * k
        for i, x in enumerate(v):
            if x < d.rho1[x]:
                strands[i] += int(b[x])
            else:
                strands[(i - 1) % k] += int(b[x])
        swept = 0
        for j in range(k):
            swept += int(a[v[j]])
            total += strands[j] * swept
    return total % m


def intersection_number(d: Dessin, a, b, m: int) -> int:
    """Intersection pairing of two cycles, reduced mod ``m``.

    Trivalent dessins use the Omega corner sum, accumulated exactly and
    required to be integral; other dessins use :func:`pushoff_intersection`.
    """
    _check_modulus(m)
    if d.n_faces == 1 and all(v == 3 for v in d.valencies()):
        total = omega_sum(d, a, b, m)
        if total.denominator != 1:
            raise HomologyError(f"non-integral Omega sum {total}")
        return int(total) % m
    return pushoff_intersection(d, a, b, m)


def pairing_matrix(d: Dessin, basis, m: int, check: bool = True) -> np.ndarray:
    basis = np.asarray(basis, dtype=np.int64)
    k = basis.shape[0]
    M = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(i + 1, k):
            M[i, j] = intersection_number(d, basis[i], basis[j], m)
            M[j, i] = (-M[i, j]) % m
    if check:
        for i in range(k):
            if intersection_number(d, basis[i], basis[i], m):
                raise HomologyError("self-intersection of a cycle is nonzero")
        if modp.det(M, m) == 0:
            raise HomologyError("degenerate intersection pairing")
    return M


# ---------------------------------------------------------------------------
# symplectic frames and the group Sp(2g, Z/m)
# ---------------------------------------------------------------------------

def standard_form(g: int) -> np.ndarray:
    J = np.zeros((2 * g, 2 * g), dtype=np.int64)
    for i in range(g):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = -1
    return J


def symplectic_frame(d: Dessin, m: int) -> np.ndarray:
    """A deterministic symplectic basis of the cycle space."""
    V = cycle_space_basis(d, m)
    M = pairing_matrix(d, V, m)
    k = V.shape[0]
    coords = list(np.eye(k, dtype=np.int64))

    def form(x, y):
        return int(x @ M @ y) % m

    out = []
    while coords:
        a = coords.pop(0)
        j = next((j for j, c in enumerate(coords) if form(a, c)), None)
        if j is None:
            raise HomologyError("degenerate intersection pairing")
        b = coords.pop(j)
        b = (b * pow(form(a, b), m - 2, m)) % m
        coords = [(c - form(c, b) * a + form(c, a) * b) % m for c in coords]
        out.extend([a, b])
    frame = (np.array(out) @ V) % m
    return frame


def sp_order(g: int, m: int) -> int:
    order = m ** (g * g)
    for i in range(1, g + 1):
        order *= m ** (2 * i) - 1
    return order


def _encode(mats: np.ndarray, m: int) -> np.ndarray:
    flat = mats.reshape(mats.shape[0], -1).astype(np.int64)
    weights = m ** np.arange(flat.shape[1], dtype=np.int64)
    return flat @ weights


@dataclass
class SymplecticGroup:
    """All matrices ``G`` with ``G J G^T = J`` mod ``m``, sorted by code."""

    genus: int
    modulus: int
    elements: np.ndarray  # (N, 2g, 2g) int8
    codes: np.ndarray  # (N,) int64, strictly increasing

    def __len__(self) -> int:
        return len(self.codes)

    def index(self, mats: np.ndarray) -> np.ndarray:
        codes = _encode(np.asarray(mats) % self.modulus, self.modulus)
        idx = np.searchsorted(self.codes, codes)
        idx = np.minimum(idx, len(self.codes) - 1)
        if np.any(self.codes[idx] != codes):
            raise HomologyError("matrix is not symplectic")
        return idx

    def right_action(self, T) -> np.ndarray:
        """Permutation ``i -> index(elements[i] @ T)``."""
        prod = np.einsum("nij,jk->nik", self.elements.astype(np.int64), np.asarray(T, dtype=np.int64))
        return self.index(prod % self.modulus)


@lru_cache(maxsize=None)
def symplectic_group(g: int, m: int) -> SymplecticGroup:
    """Enumerate Sp(2g, Z/m) by closing the identity under transvections.

    Generators are the transvections ``x -> x + <x, v> v`` for ``v`` a
    standard basis vector or a sum of two of them.
    """
    _check_modulus(m)
    n = 2 * g
    J = standard_form(g)
    vecs = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    vecs += [vecs[i] + vecs[j] for i in range(n) for j in range(i + 1, n)]
    gens = [(np.eye(n, dtype=np.int64) + np.outer(J @ v, v)) % m for v in vecs]
    seen = {int(_encode(np.eye(n, dtype=np.int64)[None], m)[0])}
    frontier = np.eye(n, dtype=np.int64)[None]
    found = [frontier]
    while len(frontier):
        new = []
        for T in gens:
            prod = np.einsum("nij,jk->nik", frontier, T) % m
            codes = _encode(prod, m)
            _, first = np.unique(codes, return_index=True)
            keep = [i for i in first if int(codes[i]) not in seen]
            seen.update(int(codes[i]) for i in keep)
            if keep:
                new.append(prod[keep])
        frontier = np.concatenate(new) if new else np.zeros((0, n, n), dtype=np.int64)
        if len(frontier):
            found.append(frontier)
    elements = np.concatenate(found) % m
    codes = _encode(elements, m)
    order = np.argsort(codes)
    elements, codes = elements[order], codes[order]
    if len(codes) != sp_order(g, m):
        raise HomologyError(f"transvection closure has {len(codes)} elements, expected {sp_order(g, m)}")
    check = np.einsum("nij,jk,nlk->nil", elements, J, elements) % m
    if np.any(check != J % m):
        raise HomologyError("non-symplectic element produced")
    return SymplecticGroup(g, m, elements.astype(np.int8), codes)


def enumerate_symplectic_bases(d: Dessin, m: int, frame=None) -> np.ndarray:
    """All symplectic bases, as an array ``(|Sp|, 2g, n_darts)``.

    They are the images of one seed basis (``frame``) under Sp(2g, Z/m).
    """
    if frame is None:
        frame = symplectic_frame(d, m)
    group = symplectic_group(d.genus, m)
    return np.einsum("nij,jd->nid", group.elements.astype(np.int64), frame) % m


def coordinates(frame, cycles, m: int) -> np.ndarray:
    """Coefficients ``X`` with ``X @ frame = cycles`` (mod m)."""
    return modp.solve_left(frame, cycles, m)


def automorphism_matrix(d: Dessin, sigma: Sequence[int], frame, m: int) -> np.ndarray:
    """Matrix ``A`` with ``sigma_* frame = A @ frame``."""
    return coordinates(frame, transport_automorphism(d, sigma, frame, m), m)


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------

def transport_contract(d: Dessin, e: int, basis, m: int) -> tuple[Dessin, np.ndarray]:
    """Restrict cycles to the darts surviving the contraction of edge ``e``."""
    child, dart_map = contract_edge(d, e)
    basis = np.asarray(basis, dtype=np.int64)
    keep = [x for x in range(d.n_darts) if dart_map[x] >= 0]
    out = np.zeros(basis.shape[:-1] + (child.n_darts,), dtype=np.int64)
    out[..., [dart_map[x] for x in keep]] = basis[..., keep]
    return child, out % m


def transport_automorphism(d: Dessin, sigma: Sequence[int], basis, m: int) -> np.ndarray:
    """Push cycles forward along ``sigma``: the new value on ``sigma(x)`` is
    the old value on ``x``."""
    basis = np.asarray(basis, dtype=np.int64)
    out = np.empty_like(basis)
    out[..., list(sigma)] = basis
    return out % m
