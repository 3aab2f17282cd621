import random
from collections import Counter

import pytest

from dessin_homology.ribbon import (
    Dessin,
    DessinError,
    automorphisms,
    canonical_code,
    canonical_form,
    closure_under_contraction,
    contract_edge,
    contractible_edges,
    enumerate_trivalent_one_face,
    euler_data,
    figure_eight,
    symmetry_table,
    theta_graph,
)

from oracles import brute_force_automorphism_count, brute_force_isomorphic


@pytest.fixture(scope="module")
def genus2_levels():
    return closure_under_contraction(enumerate_trivalent_one_face(2).values())


def octagon():
    # a b a^-1 b^-1 c d c^-1 d^-1: sides 0..7, side i glued to its partner
    return Dessin.from_gluing([(0, 2), (1, 3), (4, 6), (5, 7)])


def random_relabel(d, rng):
    labels = list(range(d.n_darts))
    rng.shuffle(labels)
    return d.relabel(labels)


# --- construction ---------------------------------------------------------

def test_rejects_rho1_with_fixed_point():
    with pytest.raises(DessinError):
        Dessin((1, 0, 2, 3), (0, 1, 3, 2))


def test_rejects_non_involution():
    with pytest.raises(DessinError):
        Dessin((0, 1, 2, 3), (1, 2, 3, 0))


def test_rejects_disconnected():
    with pytest.raises(DessinError):
        Dessin((0, 1, 2, 3), (1, 0, 3, 2))


def test_rejects_sphere_with_one_or_two_faces():
    # a single edge on the sphere has one face; a loop on the sphere two
    with pytest.raises(DessinError):
        Dessin.from_rotations([(0,), (1,)])
    with pytest.raises(DessinError):
        Dessin.from_rotations([(0, 1)])


def test_serialize_round_trip(genus2_levels):
    for level in genus2_levels.values():
        for d in level.values():
            assert Dessin.deserialize(d.serialize()) == d


# --- euler data -------------------------------------------------------------

def test_euler_data_examples():
    assert euler_data(theta_graph()) == (2, 3, 1, 1)
    assert euler_data(figure_eight()) == (1, 2, 1, 1)
    assert euler_data(octagon()) == (1, 4, 1, 2)


# --- canonical codes --------------------------------------------------------

def test_canonical_code_invariant_under_random_relabelings(genus2_levels):
    rng = random.Random(7)
    samples = [theta_graph(), figure_eight(), octagon()]
    samples += [next(iter(level.values())) for level in genus2_levels.values()]
    for d in samples:
        code = canonical_code(d)
        for _ in range(1000 if d.n_darts <= 8 else 200):
            assert canonical_code(random_relabel(d, rng)) == code


def test_canonical_code_distinguishes():
    assert canonical_code(theta_graph()) != canonical_code(figure_eight())


def test_distinct_codes_mean_non_isomorphic(genus2_levels):
    # brute force over all dart bijections is affordable at 8 darts
    small = list(genus2_levels[4].values())
    for i, a in enumerate(small):
        for b in small[i + 1:]:
            assert not brute_force_isomorphic(a, b)
        rng = random.Random(i)
        assert brute_force_isomorphic(a, random_relabel(a, rng))


def test_canonical_form_is_isomorphism(genus2_levels):
    for level in genus2_levels.values():
        for d in level.values():
            code, canon, labels = canonical_form(d)
            assert d.relabel(labels) == canon


def test_enumeration_independent_of_numbering(genus2_levels):
    rng = random.Random(3)
    tops = [random_relabel(d, rng) for d in enumerate_trivalent_one_face(2).values()]
    again = closure_under_contraction(tops)
    assert {k: set(v) for k, v in again.items()} == {k: set(v) for k, v in genus2_levels.items()}


# --- automorphisms ----------------------------------------------------------

def test_theta_automorphisms():
    d = theta_graph()
    auts = automorphisms(d)
    assert len(auts) == 6
    # elements of order 3 permute the three edges cyclically
    order3 = [s for s in auts if s != tuple(range(6)) and tuple(s[s[s[x]]] for x in range(6)) == tuple(range(6))]
    assert len(order3) == 2
    for s in order3:
        edge_img = {d.edge_of[x]: d.edge_of[s[x]] for x in range(6)}
        assert sorted(edge_img.values()) == [0, 1, 2]
        assert all(edge_img[e] != e for e in range(3))


def test_automorphisms_are_a_group_commuting_with_rho(genus2_levels):
    for level in genus2_levels.values():
        for d in level.values():
            auts = automorphisms(d)
            n = d.n_darts
            assert n % len(auts) == 0
            assert len(auts) == brute_force_automorphism_count(d)
            group = set(auts)
            for s in auts:
                assert all(s[d.rho0[x]] == d.rho0[s[x]] and s[d.rho1[x]] == d.rho1[s[x]] for x in range(n))
                for t in auts[:3]:
                    assert tuple(s[t[x]] for x in range(n)) in group


# --- contraction ------------------------------------------------------------

def test_contractible_edges_examples(genus2_levels):
    assert contractible_edges(theta_graph()) == [0, 1, 2]
    assert contractible_edges(figure_eight()) == []
    for d in genus2_levels[4].values():
        assert contractible_edges(d) == []


def test_theta_contracts_to_figure_eight():
    target = canonical_code(figure_eight())
    for e in range(3):
        child, _ = contract_edge(theta_graph(), e)
        assert canonical_code(child) == target


def test_contracting_a_loop_is_rejected():
    with pytest.raises(DessinError):
        contract_edge(figure_eight(), 0)


def test_contraction_preserves_genus_and_faces(genus2_levels):
    for level in genus2_levels.values():
        for d in level.values():
            V, E, F, g = euler_data(d)
            for e in contractible_edges(d):
                child, dart_map = contract_edge(d, e)
                assert euler_data(child) == (V - 1, E - 1, F, g)
                assert sorted(x for x in dart_map if x >= 0) == list(range(child.n_darts))


def test_contraction_order_independent(genus2_levels):
    rng = random.Random(11)
    for d in genus2_levels[9].values():
        edges = contractible_edges(d)
        for _ in range(5):
            e, f = rng.sample(edges, 2)
            x, y = d.edges[f]
            c1, m1 = contract_edge(d, e)
            # f survives the first contraction if it did not become a loop
            f1 = c1.edge_of[m1[x]]
            if f1 not in contractible_edges(c1):
                continue
            c2, m2 = contract_edge(d, f)
            e2 = c2.edge_of[m2[d.edges[e][0]]]
            if e2 not in contractible_edges(c2):
                continue
            assert canonical_code(contract_edge(c1, f1)[0]) == canonical_code(contract_edge(c2, e2)[0])


# --- enumeration --------------------------------------------------------------

def test_genus1_enumeration():
    tops = enumerate_trivalent_one_face(1)
    assert list(tops) == [canonical_code(theta_graph())]
    levels = closure_under_contraction(tops.values())
    assert {k: len(v) for k, v in levels.items()} == {3: 1, 2: 1}


def test_genus2_trivalent_schemes():
    tops = enumerate_trivalent_one_face(2)
    assert len(tops) == 9
    for d in tops.values():
        assert euler_data(d) == (6, 9, 1, 2)
        assert d.valencies() == [3] * 6
    assert Counter(len(automorphisms(d)) for d in tops.values()) == {1: 3, 2: 5, 3: 1}


def test_genus2_level_counts(genus2_levels):
    assert {k: len(v) for k, v in genus2_levels.items()} == {9: 9, 8: 29, 7: 52, 6: 45, 5: 21, 4: 4}
    for k, level in genus2_levels.items():
        for d in level.values():
            assert euler_data(d)[1:] == (k, 1, 2)


def test_genus2_symmetry_rows(genus2_levels):
    table = {(k, r): c for k, r, c in symmetry_table(genus2_levels)}
    assert {r: c for (k, r), c in table.items() if k == 4} == {1: 2, 2: 1, 8: 1}
    assert {r: c for (k, r), c in table.items() if k == 5} == {1: 14, 2: 5, 5: 1, 10: 1}
