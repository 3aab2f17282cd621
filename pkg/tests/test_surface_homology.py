import random

import numpy as np
import pytest

from dessin_homology import modp
from dessin_homology.ribbon import (
    Dessin,
    DessinError,
    automorphisms,
    contract_edge,
    contractible_edges,
    enumerate_trivalent_one_face,
    figure_eight,
    theta_graph,
)
from dessin_homology.surface_homology import (
    all_cycles,
    cycle_space_basis,
    edge_vector,
    enumerate_symplectic_bases,
    intersection_number,
    is_cycle,
    omega_sum,
    pairing_matrix,
    pushoff_intersection,
    sp_order,
    standard_form,
    symplectic_frame,
    symplectic_group,
    transport_automorphism,
    transport_contract,
)

from oracles import brute_force_cycles, chord_intersection

TOPS = list(enumerate_trivalent_one_face(2).values())


def random_cycle(d, m, rng):
    basis = cycle_space_basis(d, m)
    return rng.integers(0, m, basis.shape[0]) @ basis % m


def theta_cycles():
    d = theta_graph()
    return d, all_cycles(d, cycle_space_basis(d, 2), 2)


# --- cycle spaces -------------------------------------------------------------

def test_theta_cycle_space():
    d, cycles = theta_cycles()
    got = {tuple(edge_vector(d, c) % 2) for c in cycles}
    assert got == {(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)}


def test_figure_eight_dimension():
    assert cycle_space_basis(figure_eight(), 2).shape[0] == 2


@pytest.mark.parametrize("idx", range(len(TOPS)))
def test_genus2_cycle_space_matches_brute_force(idx):
    d = TOPS[idx]
    basis = cycle_space_basis(d, 3)
    assert basis.shape[0] == 4
    ours = {tuple(c) for c in all_cycles(d, basis, 3)}
    assert len(ours) == 81
    assert ours == {tuple(np.asarray(c) % 3) for c in brute_force_cycles(d, 3)}
    assert all(is_cycle(d, c, 3) for c in all_cycles(d, basis, 3))


def test_cycle_space_rejects_two_faces():
    # the planar theta graph has three faces
    with pytest.raises(DessinError):
        cycle_space_basis(Dessin.from_rotations([(0, 2, 4), (1, 5, 3)]), 2)


def test_rejects_bad_modulus():
    with pytest.raises(ValueError):
        cycle_space_basis(theta_graph(), 4)


# --- intersection form ----------------------------------------------------------

def test_theta_pairing():
    d, cycles = theta_cycles()
    by_edges = {tuple(edge_vector(d, c) % 2): c for c in cycles}
    e1, e2 = by_edges[(1, 1, 0)], by_edges[(0, 1, 1)]
    assert intersection_number(d, e1, e2, 2) == 1
    assert pairing_matrix(d, [e1, e2], 2).tolist() == [[0, 1], [1, 0]]


@pytest.mark.parametrize("idx", range(len(TOPS)))
def test_omega_matches_chord_oracle(idx):
    d = TOPS[idx]
    rng = np.random.default_rng(idx)
    for _ in range(1000):
        a, b = random_cycle(d, 3, rng), random_cycle(d, 3, rng)
        total = omega_sum(d, a, b, 3)
        assert total.denominator == 1
        assert int(total) % 3 == chord_intersection(d, a, b, 3)


@pytest.mark.parametrize("idx", range(len(TOPS)))
def test_bilinear_and_antisymmetric(idx):
    d = TOPS[idx]
    rng = np.random.default_rng(100 + idx)
    for _ in range(200):
        a, a2, b = (random_cycle(d, 3, rng) for _ in range(3))
        ab = intersection_number(d, a, b, 3)
        assert intersection_number(d, (a + a2) % 3, b, 3) == (ab + intersection_number(d, a2, b, 3)) % 3
        assert intersection_number(d, b, a, 3) == (-ab) % 3
        assert intersection_number(d, a, a, 3) == 0
        assert pushoff_intersection(d, a, b, 3) == ab


def test_pairing_nondegenerate_on_every_scheme():
    for d in TOPS:
        M = pairing_matrix(d, cycle_space_basis(d, 3), 3)
        assert np.all((M + M.T) % 3 == 0)
        assert modp.det(M, 3) != 0


# --- symplectic bases ---------------------------------------------------------------

def test_group_orders():
    assert sp_order(1, 2) == 6 and len(symplectic_group(1, 2)) == 6
    assert sp_order(2, 3) == 51840 and len(symplectic_group(2, 3)) == 51840


def test_theta_bases_are_the_six_ordered_pairs():
    d = theta_graph()
    bases = enumerate_symplectic_bases(d, 2)
    got = {tuple(tuple(edge_vector(d, c) % 2) for c in basis) for basis in bases}
    nonzero = [(1, 1, 0), (0, 1, 1), (1, 0, 1)]
    assert got == {(x, y) for x in nonzero for y in nonzero if x != y}


def test_frames_are_symplectic():
    for d, m in [(theta_graph(), 2), (figure_eight(), 2)] + [(d, 3) for d in TOPS]:
        frame = symplectic_frame(d, m)
        assert np.array_equal(pairing_matrix(d, frame, m), standard_form(d.genus) % m)


@pytest.mark.parametrize("idx", [0, 4, 8])
def test_51840_bases_per_scheme(idx):
    d = TOPS[idx]
    bases = enumerate_symplectic_bases(d, 3)
    assert len({b.tobytes() for b in bases}) == 51840
    rng = np.random.default_rng(idx)
    for b in bases[rng.choice(len(bases), 30, replace=False)]:
        assert np.array_equal(pairing_matrix(d, b, 3), standard_form(2) % 3)


def _orbit_count(d, bases, auts, m):
    seen = set()
    count = 0
    for b in bases:
        key = b.tobytes()
        if key in seen:
            continue
        count += 1
        for s in auts:
            seen.add((transport_automorphism(d, s, b, m)).astype(b.dtype).tobytes())
    return count


def test_basis_orbits_on_top_schemes():
    for d in TOPS:
        auts = automorphisms(d)
        bases = enumerate_symplectic_bases(d, 3)
        assert _orbit_count(d, bases, auts, 3) == 51840 // len(auts)


def test_theta_rotation_gives_two_orbits_of_three():
    d = theta_graph()
    ident = tuple(range(6))
    rotations = [s for s in automorphisms(d) if tuple(s[s[s[x]]] for x in range(6)) == ident]
    assert len(rotations) == 3
    bases = enumerate_symplectic_bases(d, 2)
    orbits = {frozenset(transport_automorphism(d, s, b, 2).tobytes() for s in rotations) for b in bases}
    assert sorted(len(o) for o in orbits) == [3, 3]


def test_identity_automorphism_fixes_bases():
    d = TOPS[0]
    frame = symplectic_frame(d, 3)
    assert np.array_equal(transport_automorphism(d, tuple(range(d.n_darts)), frame, 3), frame)


def test_automorphisms_preserve_the_pairing():
    for d in TOPS:
        frame = symplectic_frame(d, 3)
        for s in automorphisms(d):
            moved = transport_automorphism(d, s, frame, 3)
            assert np.array_equal(pairing_matrix(d, moved, 3), standard_form(2) % 3)


# --- transport along contraction --------------------------------------------------------

def test_theta_transport_gives_cycles_on_figure_eight():
    d, cycles = theta_cycles()
    for e in contractible_edges(d):
        child, moved = transport_contract(d, e, cycles, 2)
        assert all(is_cycle(child, c, 2) for c in moved)


def test_contraction_preserves_pairing():
    rng = np.random.default_rng(5)
    for d in TOPS:
        bases = enumerate_symplectic_bases(d, 3)
        J = pairing_matrix(d, bases[0], 3)
        for e in contractible_edges(d):
            for b in bases[rng.choice(len(bases), 100, replace=False)]:
                child, moved = transport_contract(d, e, b, 3)
                assert all(is_cycle(child, c, 3) for c in moved)
                assert np.array_equal(pairing_matrix(child, moved, 3, check=False), J)


def test_transport_is_order_independent():
    rng = random.Random(2)
    for d in TOPS:
        basis = symplectic_frame(d, 3)
        edges = contractible_edges(d)
        e, f = rng.sample(edges, 2)
        # contract e then f, and f then e, by restriction of the same darts
        c1, m1 = contract_edge(d, e)
        c2, m2 = contract_edge(d, f)
        fx = c1.edge_of[m1[d.edges[f][0]]]
        ex = c2.edge_of[m2[d.edges[e][0]]]
        if fx not in contractible_edges(c1) or ex not in contractible_edges(c2):
            continue
        _, b1 = transport_contract(d, e, basis, 3)
        g1, b1 = transport_contract(c1, fx, b1, 3)
        _, b2 = transport_contract(d, f, basis, 3)
        g2, b2 = transport_contract(c2, ex, b2, 3)
        # both results live on darts that survive both contractions; compare per original dart
        surv = [x for x in range(d.n_darts) if m1[x] >= 0 and m2[x] >= 0]
        _, mm1 = contract_edge(c1, fx)
        _, mm2 = contract_edge(c2, ex)
        for x in surv:
            y1, y2 = mm1[m1[x]], mm2[m2[x]]
            if y1 >= 0 and y2 >= 0:
                assert np.array_equal(b1[:, y1], b2[:, y2])
