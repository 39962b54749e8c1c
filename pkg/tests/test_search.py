"""The two kernel backends against each other and against brute force."""

from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidsat import _search
from rigidsat._pysearch import extend_maps as py_extend

from conftest import BACKENDS


def brute(pattern, host, pcolor, hcolor, fixed):
    n, N = len(pattern), len(host)
    out = []
    for img in permutations(range(N), n):
        if any(pcolor[i] != hcolor[img[i]] for i in range(n)):
            continue
        if any(f >= 0 and img[i] != f for i, f in enumerate(fixed)):
            continue
        if all(pattern[i][j] == host[img[i]][img[j]] for i in range(n) for j in range(n)):
            out.append(img)
    return out


@st.composite
def instances(draw):
    N = draw(st.integers(1, 6))
    n = draw(st.integers(0, N))
    vals = st.integers(0, 2)

    def sym(k):
        m = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                m[i][j] = m[j][i] = draw(vals)
        return m

    host = sym(N)
    # half the time plant the pattern inside the host so matches exist
    if draw(st.booleans()):
        pick = draw(st.permutations(range(N)))[:n]
        pattern = [[host[a][b] for b in pick] for a in pick]
    else:
        pattern = sym(n)
    hcolor = [draw(st.integers(0, 1)) for _ in range(N)]
    pcolor = [draw(st.integers(0, 1)) for _ in range(n)]
    fixed = [draw(st.sampled_from([-1, -1, *range(N)])) for _ in range(n)]
    return pattern, host, pcolor, hcolor, fixed


@given(instances())
def test_python_kernel_matches_brute_force(inst):
    pattern, host, pc, hc, fixed = inst
    assert py_extend(pattern, host, pc, hc, range(len(pattern)), fixed, 0) == brute(pattern, host, pc, hc, fixed)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
@given(instances(), st.integers(0, 3))
def test_backends_agree(inst, limit):
    pattern, host, pc, hc, fixed = inst
    order = list(range(len(pattern)))[::-1]
    a = _search.extend_maps(pattern, host, pc, hc, order, fixed, limit, backend="python")
    b = _search.extend_maps(pattern, host, pc, hc, order, fixed, limit, backend="cython")
    assert a == b


def test_natural_order_is_lexicographic(backend):
    host = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    maps = _search.extend_maps(host, host, [0] * 3, [0] * 3, range(3), [-1] * 3, 0, backend=backend)
    assert maps == sorted(maps) and len(maps) == 6


def test_empty_pattern_and_oversized_pattern(backend):
    assert _search.extend_maps([], [[0]], [], [0], [], [], 0, backend=backend) == [()]
    assert _search.extend_maps([[0, 1], [1, 0]], [[0]], [0, 0], [0], [0, 1], [-1, -1], 0, backend=backend) == []


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _search.extend_maps([[0]], [[0]], [0], [0], [0], [-1], 0, backend="fortran")


def test_huge_entries_fall_back_to_python():
    big = 1 << 70
    host = [[0, big], [big, 0]]
    assert _search.extend_maps(host, host, [0, 0], [0, 0], [0, 1], [-1, -1], 0) == [(0, 1), (1, 0)]
