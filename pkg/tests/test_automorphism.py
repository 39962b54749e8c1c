from itertools import combinations, permutations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from rigidsat.automorphism import (
    Embedding,
    automorphisms,
    compose,
    extension_square,
    format_perm,
    ge_group,
    inverse,
    is_automorphism,
    is_rigid,
    parse_perm,
)
from rigidsat.errors import ContractError, SizeCapError
from rigidsat.graph import Graph, binary_rado

from test_graph import graphs

K3 = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
P3 = Graph.from_edges(3, [(0, 1), (1, 2)])


def petersen():
    return Graph.from_edges(
        10,
        [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] + [(5 + i, 5 + (i + 2) % 5) for i in range(5)],
    )


def nx_aut(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return sorted(tuple(m[v] for v in range(g.n)) for m in GraphMatcher(h, h).isomorphisms_iter())


def test_small_orders():
    assert automorphisms(K3).order == 6
    assert automorphisms(P3).order == 2
    assert automorphisms(petersen()).order == 120


@given(graphs(max_n=8))
def test_matches_networkx(g):
    assert list(automorphisms(g)) == nx_aut(g)


@given(graphs(max_n=8))
def test_backends_agree_on_groups(g):
    from conftest import BACKENDS

    groups = {b: list(automorphisms(g, backend=b)) for b in BACKENDS}
    assert len({tuple(v) for v in groups.values()}) == 1


@given(graphs(max_n=7))
def test_aut_is_a_group_preserving_degrees(g):
    aut = automorphisms(g)
    assert aut.contains_identity() and aut.is_group()
    for p in aut:
        assert all(g.degree(p[v]) == g.degree(v) for v in range(g.n))


def test_limit_stops_early():
    assert automorphisms(K3, limit=2).order == 2


def test_cap_enforced():
    with pytest.raises(SizeCapError):
        automorphisms(binary_rado(30))
    assert automorphisms(binary_rado(30), cap=30).order >= 1


def test_is_rigid():
    assert is_rigid(Graph.from_edges(1, []))
    assert not is_rigid(K3)


def test_compose_and_inverse():
    p, q = (1, 2, 0), (0, 2, 1)
    assert compose(p, q) == tuple(p[q[i]] for i in range(3))
    assert compose(p, inverse(p)) == (0, 1, 2)


def test_is_automorphism_rejects_non_bijections():
    assert not is_automorphism(K3, (0, 0, 1))
    assert not is_automorphism(P3, (1, 0, 2))


def test_embedding_must_be_induced():
    with pytest.raises(ContractError):
        Embedding(P3, K3, (0, 1, 2))


def test_extension_square_identity_is_least():
    g = petersen()
    e = Embedding.inclusion(g.induced(range(5)), g)
    assert extension_square(e, tuple(range(5))) == tuple(range(10))


def test_extension_square_disjoint_edges():
    k2 = Graph.from_edges(2, [(0, 1)])
    two = Graph.from_edges(4, [(0, 1), (2, 3)])
    e = Embedding.inclusion(k2, two)
    assert extension_square(e, (1, 0)) == (1, 0, 2, 3)


def test_extension_square_rejects_non_automorphism():
    with pytest.raises(ContractError):
        extension_square(Embedding.inclusion(P3, P3), (1, 0, 2))


def brute_square(e, alpha):
    t = e.target
    for beta in permutations(range(t.n)):
        if is_automorphism(t, beta) and all(beta[e.map[v]] == e.map[alpha[v]] for v in range(e.source.n)):
            return beta
    return None


@given(graphs(max_n=6), st.data())
def test_extension_square_matches_brute_force(g, data):
    k = data.draw(st.integers(1, g.n))
    sub = sorted(data.draw(st.permutations(range(g.n)))[:k])
    e = Embedding(g.induced(sub), g, tuple(sub))
    for a in automorphisms(e.source):
        assert extension_square(e, a) == brute_square(e, a)


def test_ge_group_examples():
    aut = automorphisms(petersen())
    assert list(ge_group(Embedding.inclusion(petersen(), petersen()))) == list(aut)
    iso = Graph.from_edges(1, [])
    k2_plus = Graph.from_edges(3, [(0, 1)])
    e = Embedding(iso, k2_plus, (2,))
    assert list(ge_group(e)) == [(0,)]


@given(graphs(max_n=6), st.data())
def test_ge_group_is_subgroup(g, data):
    k = data.draw(st.integers(1, g.n))
    sub = sorted(data.draw(st.permutations(range(g.n)))[:k])
    e = Embedding(g.induced(sub), g, tuple(sub))
    assert ge_group(e).is_group()


def test_perm_text_round_trip():
    assert format_perm((2, 0, 1)) == "2 0 1"
    assert parse_perm("2 0 1") == (2, 0, 1)


def test_k7_group_closure():
    k7 = Graph.from_edges(7, list(combinations(range(7), 2)))
    aut = automorphisms(k7)
    assert aut.order == 5040 and aut.is_group()


def test_is_group_rejects_non_subgroups():
    from rigidsat.automorphism import AutSet

    assert not AutSet(((0, 1, 2), (1, 2, 0)), 3).is_group()
    assert not AutSet(((1, 0, 2),), 3).is_group()
    assert AutSet(((0, 1, 2), (1, 2, 0), (2, 0, 1)), 3).is_group()
