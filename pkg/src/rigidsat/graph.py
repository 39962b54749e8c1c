"""Finite simple graphs and the bounded Rado extension property."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator

from .errors import InvalidQueryError, RigidsatError


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertex ids ``0 .. n-1``.

    ``edges`` holds sorted pairs ``(u, v)`` with ``u < v``.
    """

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()
    _nbr: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.n:
                raise ValueError(f"edge {e} out of range for n={self.n}")
            norm.add((u, v))
        object.__setattr__(self, "edges", frozenset(norm))
        masks = [0] * self.n
        for u, v in norm:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        object.__setattr__(self, "_nbr", tuple(masks))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @property
    def vertices(self) -> range:
        return range(self.n)

    def neighbor_mask(self, v: int) -> int:
        """Bitmask of the neighbours of ``v``."""
        return self._nbr[v]

    def neighbors(self, v: int) -> list[int]:
        m = self._nbr[v]
        return [u for u in range(self.n) if m >> u & 1]

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self._nbr[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self._nbr[v].bit_count()

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph, relabelled ``0..k-1`` in the order given."""
        vs = list(vertices)
        idx = {v: i for i, v in enumerate(vs)}
        es = [(idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx]
        return Graph.from_edges(len(vs), es)

    def add_vertices(self, count: int, edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        return Graph.from_edges(self.n + count, list(self.edges) + list(edges))

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        return Graph.from_edges(self.n, list(self.edges) + list(edges))

    def adjacency_matrix(self) -> list[list[int]]:
        return [[self._nbr[u] >> v & 1 for v in range(self.n)] for u in range(self.n)]

    def to_text(self) -> str:
        return format_graph(self)


@dataclass(frozen=True)
class WitnessQuery:
    """A one-point extension request: adjacent to all of ``X``, none of ``Y``."""

    X: frozenset[int] = frozenset()
    Y: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "X", frozenset(self.X))
        object.__setattr__(self, "Y", frozenset(self.Y))
        if self.X & self.Y:
            raise InvalidQueryError(f"X and Y overlap in {sorted(self.X & self.Y)}")

    @property
    def size(self) -> int:
        return len(self.X) + len(self.Y)

    def vertices(self) -> frozenset[int]:
        return self.X | self.Y

    def __str__(self) -> str:
        return f"X={sorted(self.X)} Y={sorted(self.Y)}"


def binary_rado(n: int) -> Graph:
    """Finite binary Rado graph: ``i < j`` adjacent iff bit ``i`` of ``j`` is set."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return Graph.from_edges(n, [(i, j) for j in range(n) for i in range(j) if j >> i & 1])


def _check_query(g: Graph, q: WitnessQuery) -> None:
    bad = [v for v in q.vertices() if not 0 <= v < g.n]
    if bad:
        raise InvalidQueryError(f"query vertices {sorted(bad)} not in graph")


def _masks(q: WitnessQuery) -> tuple[int, int]:
    xm = ym = 0
    for x in q.X:
        xm |= 1 << x
    for y in q.Y:
        ym |= 1 << y
    return xm, ym


def find_witness(g: Graph, q: WitnessQuery) -> int | None:
    """Least vertex outside ``X | Y`` adjacent to all of ``X`` and none of ``Y``."""
    _check_query(g, q)
    xm, ym = _masks(q)
    taken = xm | ym
    for v in range(g.n):
        if taken >> v & 1:
            continue
        m = g.neighbor_mask(v)
        if m & xm == xm and not m & ym:
            return v
    return None


def iter_queries(vertices: Iterable[int], k: int) -> Iterator[WitnessQuery]:
    """All disjoint ``(X, Y)`` over ``vertices`` with ``|X| + |Y| <= k``.

    Order: by total size, then by the sorted union, then by the side pattern
    with ``X`` before ``Y`` for each vertex in turn.
    """
    vs = sorted(vertices)
    for s in range(min(k, len(vs)) + 1):
        for S in combinations(vs, s):
            for sides in product((0, 1), repeat=s):
                yield WitnessQuery(
                    frozenset(v for v, t in zip(S, sides) if t == 0),
                    frozenset(v for v, t in zip(S, sides) if t == 1),
                )


def extension_defects(g: Graph, k: int, within: Iterable[int] | None = None) -> list[WitnessQuery]:
    """Queries of size at most ``k`` with no witness in ``g``.

    ``within`` restricts the query vertices (default: all of ``g``); witnesses
    are always searched in the whole graph.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    vs = g.vertices if within is None else within
    return [q for q in iter_queries(vs, k) if find_witness(g, q) is None]


def saturate(g: Graph, k: int) -> Graph:
    """One Katětov-style round: a fresh vertex for every defect of ``g``.

    Each fresh vertex is adjacent to exactly the ``X`` of its defect; fresh
    vertices are mutually non-adjacent.  Defects are those of the input graph.
    """
    defects = extension_defects(g, k)
    new_edges = []
    for i, q in enumerate(defects):
        v = g.n + i
        new_edges.extend((x, v) for x in q.X)
    return g.add_vertices(len(defects), new_edges)


def degree_within(g: Graph, v: int, S: Iterable[int]) -> int:
    """Number of neighbours of ``v`` inside ``S``."""
    if not 0 <= v < g.n:
        raise InvalidQueryError(f"unknown vertex {v}")
    m = g.neighbor_mask(v)
    return sum(1 for u in set(S) if 0 <= u < g.n and m >> u & 1)


# -- text format --------------------------------------------------------------


def format_graph(g: Graph) -> str:
    """``"n m"`` header, then one ``"u v"`` line per edge, sorted."""
    es = g.sorted_edges()
    lines = [f"{g.n} {len(es)}"] + [f"{u} {v}" for u, v in es]
    return "\n".join(lines) + "\n"


class GraphFormatError(RigidsatError, ValueError):
    pass


def parse_graph(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("empty graph file")
    try:
        n, m = (int(t) for t in lines[0].split())
        edges = [tuple(int(t) for t in ln.split()) for ln in lines[1 : 1 + m]]
    except ValueError as exc:
        raise GraphFormatError(f"malformed graph file: {exc}") from None
    if len(edges) != m or any(len(e) != 2 for e in edges):
        raise GraphFormatError(f"expected {m} edge lines")
    return Graph.from_edges(n, edges)
