"""
Dessins d'enfants encoded as pairs of permutations on darts.

A dart is a directed edge. ``rho0`` rotates a dart counterclockwise about its
origin vertex, ``rho1`` reverses its direction, and the face permutation
``rho2`` is derived from ``rho2 rho1 rho0 = 1`` (composition right to left),
so that ``rho2(d) = rho0^{-1}(rho1(d))`` follows the boundary of the face
lying to the left of ``d``.

Edges are the ``rho1`` orbits.  In canonical form ``rho1`` pairs ``2i`` with
``2i + 1`` and edge ``i`` is carried by its even dart ``2i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

__all__ = [
    "Dessin",
    "DessinError",
    "canonical_code",
    "canonical_form",
    "automorphisms",
    "euler_data",
    "contractible_edges",
    "contract_edge",
    "enumerate_trivalent_one_face",
    "closure_under_contraction",
    "symmetry_table",
    "theta_graph",
    "figure_eight",
]


class DessinError(ValueError):
    """Raised for malformed permutations or invalid dessin operations."""


def _cycles(perm: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm[x]
        out.append(tuple(cyc))
    return out


def _inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


@dataclass(frozen=True)
class Dessin:
    """Connected oriented ribbon graph given by ``rho0`` and ``rho1``."""

    rho0: tuple[int, ...]
    rho1: tuple[int, ...]
    _vertex_of: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        rho0 = tuple(int(x) for x in self.rho0)
        rho1 = tuple(int(x) for x in self.rho1)
        object.__setattr__(self, "rho0", rho0)
        object.__setattr__(self, "rho1", rho1)
        n = len(rho0)
        if n == 0 or n % 2:
            raise DessinError(f"number of darts must be positive and even, got {n}")
        if len(rho1) != n:
            raise DessinError("rho0 and rho1 act on different dart sets")
        if sorted(rho0) != list(range(n)):
            raise DessinError("rho0 is not a permutation")
        if sorted(rho1) != list(range(n)):
            raise DessinError("rho1 is not a permutation")
        for d in range(n):
            if rho1[d] == d:
                raise DessinError(f"rho1 fixes dart {d}")
            if rho1[rho1[d]] != d:
                raise DessinError("rho1 is not an involution")
        # connectedness
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in (rho0[x], rho1[x]):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n:
            raise DessinError("rho0 and rho1 do not act transitively")
        vertex_of = [0] * n
        for k, cyc in enumerate(_cycles(rho0)):
            for d in cyc:
                vertex_of[d] = k
        object.__setattr__(self, "_vertex_of", tuple(vertex_of))
        g2 = 2 - self.n_vertices + self.n_edges - self.n_faces
        if g2 < 0 or g2 % 2:
            raise DessinError("inconsistent Euler characteristic")
        if (g2 // 2, self.n_faces) in ((0, 1), (0, 2)):
            raise DessinError("(genus, faces) in {(0, 1), (0, 2)} is excluded")

    # --- constructors ---------------------------------------------------

    @classmethod
    def from_rotations(cls, rotations: Iterable[Sequence[int]]) -> "Dessin":
        """Build from the counterclockwise dart cycles at each vertex.

        ``rho1`` is the standard pairing ``2i <-> 2i + 1``.
        """
        rotations = [list(r) for r in rotations]
        n = sum(len(r) for r in rotations)
        rho0 = [-1] * n
        for r in rotations:
            for a, b in zip(r, r[1:] + r[:1]):
                rho0[a] = b
        if -1 in rho0:
            raise DessinError("rotations do not cover every dart exactly once")
        rho1 = [d ^ 1 for d in range(n)]
        return cls(tuple(rho0), tuple(rho1))

    @classmethod
    def from_gluing(cls, pairs: Iterable[tuple[int, int]]) -> "Dessin":
        """Build the one-face dessin obtained by gluing polygon sides.

        Sides ``0 .. 2n-1`` are listed counterclockwise along the polygon
        boundary, so the face permutation is ``i -> i + 1``.
        """
        pairs = list(pairs)
        n = 2 * len(pairs)
        rho1 = [-1] * n
        for a, b in pairs:
            if rho1[a] != -1 or rho1[b] != -1 or a == b:
                raise DessinError("invalid side pairing")
            rho1[a] = b
            rho1[b] = a
        rho0 = tuple(rho1[(d - 1) % n] for d in range(n))
        return cls(rho0, tuple(rho1))

    # --- basic data ------------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.rho0)

    @property
    def n_edges(self) -> int:
        return len(self.rho0) // 2

    @cached_property
    def rho2(self) -> tuple[int, ...]:
        inv0 = _inverse(self.rho0)
        return tuple(inv0[self.rho1[d]] for d in range(self.n_darts))

    @cached_property
    def vertices(self) -> list[tuple[int, ...]]:
        return _cycles(self.rho0)

    @cached_property
    def faces(self) -> list[tuple[int, ...]]:
        return _cycles(self.rho2)

    @property
    def n_vertices(self) -> int:
        return max(self._vertex_of) + 1

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def genus(self) -> int:
        return (2 - self.n_vertices + self.n_edges - self.n_faces) // 2

    def vertex_of(self, dart: int) -> int:
        """Index (into :attr:`vertices`) of the origin vertex of ``dart``."""
        return self._vertex_of[dart]

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(low dart, high dart)`` pairs, sorted by low dart.

        The position in this list is the edge id; the low dart fixes the
        reference orientation used for edge-value vectors.
        """
        return sorted((d, self.rho1[d]) for d in range(self.n_darts) if d < self.rho1[d])

    @cached_property
    def edge_of(self) -> tuple[int, ...]:
        out = [0] * self.n_darts
        for k, (a, b) in enumerate(self.edges):
            out[a] = out[b] = k
        return tuple(out)

    def valencies(self) -> list[int]:
        return [len(v) for v in self.vertices]

    def relabel(self, labels: Sequence[int]) -> "Dessin":
        """Return the dessin with dart ``d`` renamed to ``labels[d]``."""
        n = self.n_darts
        rho0 = [0] * n
        rho1 = [0] * n
        for d in range(n):
            rho0[labels[d]] = labels[self.rho0[d]]
            rho1[labels[d]] = labels[self.rho1[d]]
        return Dessin(tuple(rho0), tuple(rho1))

    # --- serialization ---------------------------------------------------

    def serialize(self) -> str:
        """One-line ASCII form: ``n_darts; rho0 cycles; rho1 pairs``."""
        cyc = " ".join("(" + ",".join(map(str, c)) + ")" for c in self.vertices)
        prs = " ".join(f"({a},{b})" for a, b in self.edges)
        return f"{self.n_darts}; {cyc}; {prs}"

    @classmethod
    def deserialize(cls, line: str) -> "Dessin":
        n_str, cyc_str, pair_str = (s.strip() for s in line.split(";"))
        n = int(n_str)
        rho0 = [-1] * n
        for chunk in cyc_str.replace(")", "").split("("):
            chunk = chunk.strip()
            if not chunk:
                continue
            cyc = [int(x) for x in chunk.split(",")]
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                rho0[a] = b
        rho1 = [-1] * n
        for chunk in pair_str.replace(")", "").split("("):
            chunk = chunk.strip()
            if not chunk:
                continue
            a, b = (int(x) for x in chunk.split(","))
            rho1[a] = b
            rho1[b] = a
        return cls(tuple(rho0), tuple(rho1))

    def __str__(self) -> str:
        return self.serialize()


# ---------------------------------------------------------------------------
# canonical labelling
# ---------------------------------------------------------------------------

def _bfs_labelling(rho0: Sequence[int], rho1: Sequence[int], start: int) -> list[int]:
    """Label darts in discovery order, giving each dart and its reverse
    consecutive labels (so the relabelled ``rho1`` is ``2i <-> 2i + 1``)."""
    n = len(rho0)
    labels = [-1] * n
    order = [start, rho1[start]]
    labels[start] = 0
    labels[rho1[start]] = 1
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        y = rho0[x]
        if labels[y] < 0:
            k = len(order)
            labels[y] = k
            labels[rho1[y]] = k + 1
            order.append(y)
            order.append(rho1[y])
    return labels


def _code_from_labels(rho0: Sequence[int], labels: Sequence[int]) -> tuple[int, ...]:
    n = len(rho0)
    code = [0] * n
    for d in range(n):
        code[labels[d]] = labels[rho0[d]]
    return tuple(code)


def _min_labellings(d: Dessin) -> tuple[tuple[int, ...], list[list[int]]]:
    best: tuple[int, ...] | None = None
    winners: list[list[int]] = []
    for s in range(d.n_darts):
        labels = _bfs_labelling(d.rho0, d.rho1, s)
        code = _code_from_labels(d.rho0, labels)
        if best is None or code < best:
            best = code
            winners = [labels]
        elif code == best:
            winners.append(labels)
    assert best is not None
    return best, winners


def canonical_code(d: Dessin) -> tuple[int, ...]:
    """Relabelling-invariant code; equal codes iff isomorphic dessins.

    The code is the relabelled ``rho0`` under the lexicographically smallest
    breadth-first labelling; ``rho1`` is implicit (standard pairing).
    """
    return _min_labellings(d)[0]


def canonical_form(d: Dessin) -> tuple[tuple[int, ...], Dessin, list[int]]:
    """Return ``(code, canonical dessin, labels)``.

    ``labels[x]`` is the dart of the canonical dessin corresponding to dart
    ``x`` of ``d``; the map is an isomorphism.
    """
    code, winners = _min_labellings(d)
    labels = winners[0]
    rho1 = tuple(x ^ 1 for x in range(d.n_darts))
    return code, Dessin(code, rho1), labels


def automorphisms(d: Dessin) -> list[tuple[int, ...]]:
    """All dart permutations commuting with ``rho0`` and ``rho1``.

    Each automorphism is determined by the image of a single dart, so these
    are read off from the starting darts that reach the minimal code.
    """
    _, winners = _min_labellings(d)
    base_inv = _inverse(winners[0])
    return [tuple(base_inv[lab[x]] for x in range(d.n_darts)) for lab in winners]


# ---------------------------------------------------------------------------
# Euler data and contraction
# ---------------------------------------------------------------------------

def euler_data(d: Dessin) -> tuple[int, int, int, int]:
    """``(V, E, F, genus)`` with ``V - E + F = 2 - 2 genus``."""
    return d.n_vertices, d.n_edges, d.n_faces, d.genus


def contractible_edges(d: Dessin) -> list[int]:
    """Ids of the non-loop edges (endpoints on distinct vertices)."""
    return [k for k, (a, b) in enumerate(d.edges) if d.vertex_of(a) != d.vertex_of(b)]


def contract_edge(d: Dessin, e: int) -> tuple[Dessin, list[int]]:
    """Contract non-loop edge ``e``; return the new dessin and the dart map.

    The dart map sends each surviving dart of ``d`` to its label in the
    result and removed darts to ``-1``.  Surviving darts keep their relative
    order, so a standard ``rho1`` stays standard.
    """
    x, y = d.edges[e]
    if d.vertex_of(x) == d.vertex_of(y):
        raise DessinError(f"edge {e} is a loop and cannot be contracted")
    rho0 = d.rho0

    def around(start: int) -> list[int]:
        seq = []
        z = rho0[start]
        while z != start:
            seq.append(z)
            z = rho0[z]
        return seq

    merged = around(x) + around(y)
    new_rho0 = list(rho0)
    for a, b in zip(merged, merged[1:] + merged[:1]):
        new_rho0[a] = b
    keep = [z for z in range(d.n_darts) if z not in (x, y)]
    dart_map = [-1] * d.n_darts
    for k, z in enumerate(keep):
        dart_map[z] = k
    out0 = tuple(dart_map[new_rho0[z]] for z in keep)
    out1 = tuple(dart_map[d.rho1[z]] for z in keep)
    return Dessin(out0, out1), dart_map


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _trivalent_pairings(n: int):
    """Yield fixed-point-free involutions ``rho1`` on the sides of an
    ``n``-gon such that every vertex of the glued surface is trivalent.

    With face permutation ``i -> i + 1`` the vertex rotation is
    ``rho0(d) = rho1(d - 1)``; partial rotations are pruned as soon as a
    cycle closes with length other than 3 or a chain exceeds 3 darts.
    """
    rho1 = [-1] * n

    def ok() -> bool:
        for d in range(n):
            x = d
            for k in range(1, 4):
                nxt = rho1[(x - 1) % n]
                if nxt < 0:
                    break
                x = nxt
                if x == d and k < 3:
                    return False
                if k == 3 and x != d:
                    return False
        return True

    def rec(first: int):
        while first < n and rho1[first] >= 0:
            first += 1
        if first == n:
            yield tuple(rho1)
            return
        for j in range(first + 1, n):
            if rho1[j] >= 0:
                continue
            rho1[first] = j
            rho1[j] = first
            if ok():
                yield from rec(first + 1)
            rho1[first] = -1
            rho1[j] = -1

    yield from rec(0)


def enumerate_trivalent_one_face(genus: int) -> dict[tuple[int, ...], Dessin]:
    """Isomorphism classes of trivalent one-face dessins of ``genus``.

    Returns canonical code -> canonical dessin.  These are the gluings of a
    ``(12 genus - 6)``-gon with all vertices trivalent.
    """
    if genus < 1:
        raise DessinError("genus must be at least 1")
    n = 12 * genus - 6
    found: dict[tuple[int, ...], Dessin] = {}
    for rho1 in _trivalent_pairings(n):
        rho0 = tuple(rho1[(d - 1) % n] for d in range(n))
        d = Dessin(rho0, rho1)
        if d.genus != genus:
            continue
        code, canon, _ = canonical_form(d)
        found.setdefault(code, canon)
    return dict(sorted(found.items()))


def closure_under_contraction(
    tops: Iterable[Dessin],
) -> dict[int, dict[tuple[int, ...], Dessin]]:
    """Classes reachable by repeated single non-loop contractions.

    Returns ``{edge count: {code: canonical dessin}}`` from the top edge
    count down to the one-vertex level.
    """
    tops = list(tops)
    if not tops:
        return {}
    levels: dict[int, dict[tuple[int, ...], Dessin]] = {}
    current: dict[tuple[int, ...], Dessin] = {}
    for t in tops:
        code, canon, _ = canonical_form(t)
        current.setdefault(code, canon)
    k = max(t.n_edges for t in tops)
    while current:
        levels[k] = dict(sorted(current.items()))
        nxt: dict[tuple[int, ...], Dessin] = {}
        for d in current.values():
            for e in contractible_edges(d):
                child, _ = contract_edge(d, e)
                code, canon, _ = canonical_form(child)
                nxt.setdefault(code, canon)
        current = nxt
        k -= 1
    return levels


def symmetry_table(levels: dict[int, dict[tuple[int, ...], Dessin]]) -> list[tuple[int, int, int]]:
    """Rows ``(edges, symmetry order, count)``, edges descending."""
    rows = []
    for k in sorted(levels, reverse=True):
        counts: dict[int, int] = {}
        for d in levels[k].values():
            r = len(automorphisms(d))
            counts[r] = counts.get(r, 0) + 1
        for r in sorted(counts):
            rows.append((k, r, counts[r]))
    return rows


# ---------------------------------------------------------------------------
# small named examples
# ---------------------------------------------------------------------------

def theta_graph() -> Dessin:
    """The theta graph on the torus: two trivalent vertices, one face."""
    # edges 0:(0,1) 1:(2,3) 2:(4,5); darts 0,2,4 leave vertex A
    return Dessin.from_rotations([(0, 2, 4), (1, 3, 5)])


def figure_eight() -> Dessin:
    """One vertex with two interleaved loops (the torus bouquet)."""
    return Dessin.from_rotations([(0, 2, 1, 3)])
