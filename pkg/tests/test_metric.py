from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidsat.errors import ContractError, MetricError
from rigidsat.metric import (
    KatetovType,
    QMetricSpace,
    format_metric,
    iter_types,
    one_point_extend,
    parse_metric,
    pushout_amalgam,
    qu_saturate,
    type_problems,
    validate_metric,
)

from oracles import amalgam_cross_maxima, brute_triangle_ok, metric_spaces


def two(a="a", b="b", d=2):
    return QMetricSpace.from_pairs([a, b], {(a, b): d})


def test_validate_single_point_and_triangle():
    assert validate_metric(QMetricSpace.from_pairs(["a"], {})) == []
    bad = QMetricSpace.from_pairs(["a", "b", "c"], {("a", "b"): 1, ("b", "c"): 1, ("a", "c"): 3})
    viol = validate_metric(bad)
    assert len(viol) == 1
    assert viol[0].kind == "triangle" and set(viol[0].points) == {"a", "b", "c"}


def test_validate_flags_zero_and_asymmetry():
    m = QMetricSpace(("a", "b"), ((F(0), F(1)), (F(2), F(0))))
    assert any(v.kind == "asymmetric" for v in validate_metric(m))
    z = QMetricSpace(("a", "b"), ((F(0), F(0)), (F(0), F(0))))
    assert validate_metric(z)


@given(metric_spaces(max_size=6))
def test_validate_agrees_with_brute_force(m):
    assert (validate_metric(m) == []) == brute_triangle_ok(m)


def test_floats_rejected():
    with pytest.raises(MetricError):
        two(d=0.5)


def test_from_pairs_conflicts():
    with pytest.raises(MetricError):
        QMetricSpace.from_pairs(["a", "b"], {("a", "b"): 1, ("b", "a"): 2})
    with pytest.raises(MetricError):
        QMetricSpace.from_pairs(["a", "b", "c"], {("a", "b"): 1})


def test_one_point_extend_examples():
    out = one_point_extend(two(), KatetovType.of({"a": 1}), "x")
    assert out.d("x", "b") == 3
    out = one_point_extend(two(), KatetovType.of({"a": 1, "b": 2}), "x")
    assert (out.d("x", "a"), out.d("x", "b")) == (1, 2)


def test_one_point_extend_min_closes():
    m = QMetricSpace.from_pairs(["a", "b"], {("a", "b"): 1})
    t = KatetovType.of({"a": 1, "b": 2})
    out = one_point_extend(m, t, "x")
    assert out.d("x", "b") == 2 and validate_metric(out) == []


def test_unrealisable_type_and_id_clash():
    with pytest.raises(ContractError):
        one_point_extend(two(), KatetovType.of({"a": 1, "b": 4}), "x")
    with pytest.raises(MetricError):
        one_point_extend(two(), KatetovType.of({"a": 1}), "a")
    assert type_problems(two(), KatetovType.of({"a": 1, "b": 4}))


def test_extend_empty_space():
    out = one_point_extend(QMetricSpace.empty(), KatetovType((), ()), "x")
    assert out.points == ("x",)


@st.composite
def space_and_type(draw):
    m = draw(metric_spaces(max_size=5))
    k = draw(st.integers(1, len(m)))
    supp = draw(st.permutations(m.points))[:k]
    vals = [draw(st.sampled_from([F(1, 2), F(1), F(3, 2), F(2), F(3)])) for _ in supp]
    return m, KatetovType(tuple(supp), tuple(vals))


@given(space_and_type())
def test_one_point_extend_valid_or_rejected(mt):
    m, t = mt
    if type_problems(m, t):
        with pytest.raises(ContractError):
            one_point_extend(m, t, "x")
        return
    out = one_point_extend(m, t, "x")
    assert validate_metric(out) == []
    assert out.restrict(m.points) == m
    for z in m.points:
        assert out.d("x", z) == min(v + m.d(s, z) for s, v in zip(t.support, t.values))


@given(space_and_type(), st.data())
def test_one_point_extend_commutes_with_relabel(mt, data):
    m, t = mt
    if type_problems(m, t):
        return
    perm = data.draw(st.permutations(range(len(m))))
    ren = {p: f"r{perm[i]}" for i, p in enumerate(m.points)}
    out = one_point_extend(m, t, "x").relabel(ren)
    t2 = KatetovType(tuple(ren[s] for s in t.support), t.values)
    out2 = one_point_extend(m.relabel(ren), t2, "x")
    assert out == out2


def test_pushout_examples():
    a = QMetricSpace.from_pairs(["c"], {})
    b1 = QMetricSpace.from_pairs(["c", "p"], {("c", "p"): 1})
    b2 = QMetricSpace.from_pairs(["c", "q"], {("c", "q"): 2})
    assert pushout_amalgam(a, b1, b2, {"c": "c"}, {"c": "c"}).d("p", "q") == 3
    a = two("c1", "c2", 4)
    b1 = QMetricSpace.from_pairs(["c1", "c2", "p"], {("c1", "c2"): 4, ("p", "c1"): 1, ("p", "c2"): 5})
    b2 = QMetricSpace.from_pairs(["c1", "c2", "q"], {("c1", "c2"): 4, ("q", "c1"): 6, ("q", "c2"): 2})
    ident = {"c1": "c1", "c2": "c2"}
    out = pushout_amalgam(a, b1, b2, ident, ident)
    assert out.d("p", "q") == 7
    assert out.restrict(b1.points) == b1 and out.restrict(b2.points) == b2


def test_pushout_errors():
    with pytest.raises(ContractError):
        pushout_amalgam(QMetricSpace.empty(), two(), two("c", "d"), {}, {})
    a = two("c1", "c2", 1)
    with pytest.raises(ContractError):
        pushout_amalgam(a, two("c1", "c2", 2), a, {"c1": "c1", "c2": "c2"}, {"c1": "c1", "c2": "c2"})


@st.composite
def pushout_instances(draw):
    glue = draw(metric_spaces(min_size=1, max_size=2, prefix="c"))
    sides = []
    for pre in ("p", "q"):
        r = draw(st.integers(1, 2))
        ids = list(glue.points) + [f"{pre}{i}" for i in range(r)]
        # sample a metric on the side, then force the glue block to match
        while True:
            m = draw(metric_spaces(min_size=len(ids), max_size=len(ids), prefix="t"))
            m = QMetricSpace(tuple(ids), m.matrix)
            g = len(glue)
            rows = [list(r_) for r_ in m.matrix]
            for i in range(g):
                for j in range(g):
                    rows[i][j] = glue.matrix[i][j]
            cand = QMetricSpace(tuple(ids), tuple(tuple(r_) for r_ in rows))
            if not validate_metric(cand):
                sides.append(cand)
                break
    return glue, sides[0], sides[1]


@given(pushout_instances())
def test_pushout_is_maximal_against_brute_force(inst):
    a, b1, b2 = inst
    ident = {c: c for c in a.points}
    out = pushout_amalgam(a, b1, b2, ident, ident)
    assert validate_metric(out) == []
    grid = sorted({F(k, 2) for k in range(1, 17)} | {out.d(p, q) for p in b1.points for q in b2.points})
    cross, maxima, count = amalgam_cross_maxima(b1, b2, list(a.points), grid)
    assert count > 0
    assert maxima == [out.d(p, q) for p, q in cross]


def test_qu_one_point():
    out = qu_saturate(QMetricSpace.from_pairs(["a"], {}), 1, [1])
    assert len(out) == 2 and out.d("a", out.points[1]) == 1


def test_qu_two_points_includes_midpoint():
    m = two()
    types = [t for t, _ in iter_types(m, m.points, 2, [1, 2])]
    assert KatetovType(("a", "b"), (F(1), F(1))) in types
    assert KatetovType(("a", "b"), (F(1), F(2))) in types
    out = qu_saturate(m, 2, [1, 2])
    assert validate_metric(out) == []
    assert any(out.d(p, "a") == 1 and out.d(p, "b") == 1 for p in out.points)


@given(metric_spaces(max_size=4), st.integers(1, 2))
def test_qu_keeps_original_and_stays_metric(m, k):
    out = qu_saturate(m, k, [F(1, 2), F(1)])
    assert out.restrict(m.points) == m
    assert validate_metric(out) == []


def test_qu_dedupes_by_distance_vector():
    m = QMetricSpace.from_pairs(["a"], {})
    assert len(qu_saturate(m, 1, [1, 1, F(2, 2)])) == 2


def test_metric_text_golden_and_round_trip():
    m = QMetricSpace.from_pairs(["a", "b", "c"], {("a", "b"): F(1, 2), ("a", "c"): 1, ("b", "c"): F(3, 2)})
    text = format_metric(m, {"a": "base"})
    assert text == "metric 3\na role: base\nb\nc\ndistances\na b 1/2\na c 1/1\nb c 3/2\n"
    back, roles = parse_metric(text)
    assert back == m and roles == {"a": "base"}


def test_metric_text_rejects_truncation():
    with pytest.raises(MetricError):
        parse_metric("metric 2\na\nb\ndistances\n")
