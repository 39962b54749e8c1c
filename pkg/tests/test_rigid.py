from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidsat.automorphism import automorphisms, is_rigid
from rigidsat.errors import ConstructionError, ContractError, ScheduleError
from rigidsat.graph import Graph, binary_rado, degree_within, saturate
from rigidsat.rigid import (
    DegreeSchedule,
    audit_tower,
    build_fingerprint,
    build_tower,
    format_tower,
    pair_enumeration,
    parse_tower_layers,
    rigidify,
    rigidify_extension_failures,
    tower_rigidity_failures,
)

FAMILY = [DegreeSchedule.parse(s) for s in ("2,3,4,5,6,7", "2,4,5,6,7,8", "3,4,5,6,7,8")]


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


schedules = st.lists(st.integers(1, 6), min_size=1, max_size=10).map(
    lambda steps: DegreeSchedule(tuple(1 + sum(steps[: i + 1]) for i in range(len(steps))))
)


def test_schedule_invariants():
    with pytest.raises(ScheduleError):
        DegreeSchedule.parse("3,2")
    with pytest.raises(ScheduleError):
        DegreeSchedule.parse("1,2")
    with pytest.raises(ScheduleError):
        DegreeSchedule(())
    assert str(DegreeSchedule.arithmetic(2, 4)) == "2,3,4,5"


def test_fingerprint_simulation():
    fp = build_fingerprint(DegreeSchedule.arithmetic(2, 7), 7)
    assert fp.degrees[:4] == (2, 3, 4, 5)
    assert fp.exact_prefix == 4
    for e in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (3, 6)]:
        assert e in fp.graph.edges


def test_fingerprint_two_vertices():
    fp = build_fingerprint(DegreeSchedule.parse("2,3"), 2)
    assert fp.graph.edges == frozenset({(0, 1)})
    assert fp.degrees == (1, 1) and fp.exact_prefix == 0


def test_fingerprint_rejects_tiny_m():
    with pytest.raises(ContractError):
        build_fingerprint(DegreeSchedule.parse("2,3"), 1)


@given(schedules, st.integers(2, 14))
def test_fingerprint_prefix_degrees_exact_and_connected(sched, m):
    try:
        fp = build_fingerprint(sched, m)
    except ScheduleError:
        return
    g = fp.graph
    V1 = range(g.n)
    for i in range(fp.exact_prefix):
        assert degree_within(g, i, V1) == sched[i]
    assert len(set(fp.degrees[: fp.exact_prefix])) == fp.exact_prefix
    processed = min(len(sched), m - 1)
    assert all(g.adjacent(i, i + 1) for i in range(processed))
    if len(sched) >= m - 1:
        assert nx.is_connected(to_nx(g))


@given(schedules, st.integers(2, 12))
def test_fingerprint_automorphisms_fix_unique_degrees(sched, m):
    try:
        fp = build_fingerprint(sched, m)
    except ScheduleError:
        return
    degs = fp.degrees
    unique = [v for v in range(m) if degs.count(degs[v]) == 1]
    for p in automorphisms(fp.graph):
        assert all(p[v] == v for v in unique)


@pytest.mark.parametrize("m", [7, 8, 9, 10, 12, 13, 14])
def test_full_fingerprint_automorphisms_fix_exact_prefix(m):
    fp = build_fingerprint(DegreeSchedule.arithmetic(2, 8), m)
    for p in automorphisms(fp.graph):
        assert all(p[v] == v for v in range(fp.exact_prefix))


def test_boundary_degree_collision_breaks_prefix_fixing():
    # at m = 11 a boundary vertex reaches degree 7 = a_6, so v_6 and v_7 swap
    fp = build_fingerprint(DegreeSchedule.arithmetic(2, 8), 11)
    assert fp.exact_prefix == 6 and fp.degrees[5] == fp.degrees[6]
    movers = [p for p in automorphisms(fp.graph) if p[5] != 5]
    assert movers and all(p[5] == 6 and p[6] == 5 for p in movers)


def test_prefix_subgraph_alone_keeps_a_symmetry():
    # Cutting away the boundary vertices lowers prefix degrees, and the
    # induced prefix graph is not rigid on its own.
    fp = build_fingerprint(DegreeSchedule.arithmetic(2, 8), 12)
    assert fp.exact_prefix == 7
    aut = automorphisms(fp.prefix_graph())
    assert aut.order == 2
    assert not is_rigid(fp.graph.induced(range(6)))


def test_pair_enumeration_order():
    assert list(pair_enumeration(range(3))) == [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]


@pytest.fixture(scope="module")
def rigidified():
    base = saturate(binary_rado(8), 2)
    out, st_ = rigidify(base, DegreeSchedule.arithmetic(2, 8), 6)
    return base, out, st_


def test_rigidify_step_edges(rigidified):
    base, out, st_ = rigidified
    for n, (x, y) in enumerate(st_.pair_enum):
        v = st_.v1[n]
        assert out.adjacent(v, x) and not out.adjacent(v, y)
    assert out.induced(range(base.n)) == base


def test_rigidify_setpair_constraints(rigidified):
    base, out, st_ = rigidified
    v1 = set(st_.v1)
    assert st_.setpair_enum[0] is None
    for n, sp in enumerate(st_.setpair_enum):
        if sp is None:
            continue
        W1, W2 = sp
        assert (W1 | W2) & v1, "some side meets V1"
        assert not (W1 | W2) & set(st_.v1[n:]), "no vertex from v_n onwards"
        w = st_.witnesses[n]
        assert all(out.adjacent(w, u) for u in W1)
        assert not any(out.adjacent(w, u) for u in W2)


def test_rigidify_witnesses_distinct(rigidified):
    base, _, st_ = rigidified
    ws = [w for w in st_.witnesses if w is not None]
    assert len(ws) == len(set(ws)) and all(w < base.n for w in ws)


def test_rigidify_v1_setwise_implies_pointwise(rigidified):
    base, out, st_ = rigidified
    v1 = set(st_.v1)
    aut = automorphisms(out, cap=64)
    for p in aut:
        if {p[v] for v in v1} == v1 and all(p[b] < base.n for b in range(base.n)):
            assert all(p[v] == v for v in v1)


def test_rigidify_processed_pairs_block_extension(rigidified):
    base, out, st_ = rigidified
    _, fails = rigidify_extension_failures(base, out, st_, cap=64)
    assert fails == []


def test_rigidify_witness_exhaustion():
    with pytest.raises(ConstructionError, match="step"):
        rigidify(binary_rado(3), DegreeSchedule.arithmetic(2, 6), 6)


def test_rigidify_rejects_too_many_steps():
    with pytest.raises(ContractError):
        rigidify(binary_rado(2), DegreeSchedule.arithmetic(2, 6), 3)


@pytest.fixture(scope="module")
def small_tower():
    return build_tower(binary_rado(3), FAMILY, 5, 3)


def test_tower_audits_pass(small_tower):
    assert all(v == [] for v in audit_tower(small_tower).values())


def test_tower_rigidity_consequence(small_tower):
    assert small_tower.top.n <= 20
    assert tower_rigidity_failures(small_tower) == []


def test_tower_layers_have_distinct_degree_sequences(small_tower):
    t = small_tower
    seqs = []
    for i in range(1, t.t + 1):
        fresh = t.layer_vertices(i)
        seqs.append(sorted(degree_within(t.top, v, fresh) for v in fresh))
    assert len({tuple(s) for s in seqs}) == len(seqs)


def test_tower_without_layers_is_base():
    t = build_tower(binary_rado(3), FAMILY, 5, 0)
    assert t.layers == (binary_rado(3),) and t.t == 0


def test_tower_rejects_repeated_schedule():
    with pytest.raises(ScheduleError):
        build_tower(binary_rado(3), [FAMILY[0], FAMILY[0]], 5, 2)


def test_tower_format_round_trip(small_tower):
    g, layer_of = parse_tower_layers(format_tower(small_tower))
    assert g == small_tower.top and layer_of == small_tower.layer_of


def test_audit_catches_cross_layer_edge(small_tower):
    t = small_tower
    u, v = t.layer_vertices(1)[0], t.layer_vertices(2)[0]
    bad = t.top.add_edges([(u, v)])
    broken = type(t)(t.layers[:-1] + (bad,), t.layer_of, t.family, t.layer_size, t.fingerprints)
    assert audit_tower(broken)["cross_layer"]


def test_no_six_vertex_fingerprint_is_rigid():
    # every strictly increasing schedule from 2..11 long enough for m = 6
    found = []
    for mask in range(1 << 10):
        vals = tuple(v for v in range(2, 12) if mask >> (v - 2) & 1)
        if len(vals) < 5 or vals[0] < 2:
            continue
        try:
            fp = build_fingerprint(DegreeSchedule(vals), 6)
        except ScheduleError:
            continue
        found.append(is_rigid(fp.graph))
    assert found and not any(found)
