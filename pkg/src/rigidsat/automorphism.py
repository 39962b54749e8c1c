"""Exact automorphism groups of small graphs and the extension-square check.

Everything reduces to one backtracking kernel (``_search.extend_maps``) run on
adjacency matrices, pruned by a colour-refinement partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import _search
from .errors import ContractError, SizeCapError
from .graph import Graph

DEFAULT_CAP = 24

Perm = tuple[int, ...]


def refine_colors(g: Graph) -> list[int]:
    """Stable colouring seeded by (degree, sorted neighbour degrees).

    Iterates colour refinement until the number of cells stops growing.
    Colours are small ints, assigned by sorted signature so they are
    deterministic.
    """
    deg = [g.degree(v) for v in g.vertices]
    sig = [(deg[v], tuple(sorted(deg[u] for u in g.neighbors(v)))) for v in g.vertices]
    colors = _relabel(sig)
    while True:
        sig = [(colors[v], tuple(sorted(colors[u] for u in g.neighbors(v)))) for v in g.vertices]
        new = _relabel(sig)
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _relabel(sig):
    table = {s: i for i, s in enumerate(sorted(set(sig)))}
    return [table[s] for s in sig]


@lru_cache(maxsize=64)
def _prepared(g: Graph):
    colors = refine_colors(g)
    return colors, g.adjacency_matrix(), _search_order(g, colors)


def _search_order(g: Graph, colors: Sequence[int]) -> list[int]:
    size = {}
    for c in colors:
        size[c] = size.get(c, 0) + 1
    left = set(g.vertices)
    placed_mask = 0
    order = []
    while left:
        v = min(left, key=lambda u: (size[colors[u]], -(g.neighbor_mask(u) & placed_mask).bit_count(), u))
        order.append(v)
        left.remove(v)
        placed_mask |= 1 << v
    return order


def _check_cap(g: Graph, cap: int) -> None:
    if g.n > cap:
        raise SizeCapError(f"graph has {g.n} vertices, cap is {cap}")


@dataclass(frozen=True)
class AutSet:
    """Explicit, sorted list of permutations forming (part of) a group."""

    perms: tuple[Perm, ...]
    n: int

    @property
    def order(self) -> int:
        return len(self.perms)

    def __contains__(self, p) -> bool:
        return tuple(p) in set(self.perms)

    def __iter__(self):
        return iter(self.perms)

    def __len__(self) -> int:
        return len(self.perms)

    def identity(self) -> Perm:
        return tuple(range(self.n))

    def contains_identity(self) -> bool:
        return self.identity() in self

    def is_group(self) -> bool:
        """True iff the set equals the group its members generate.

        Generators are picked greedily (each member not yet generated) and
        the generated set is grown by left multiplication; leaving the set
        at any point means it is not closed.  For a finite set this is the
        same as closure under composition and inverses.
        """
        s = set(self.perms)
        ident = self.identity()
        if ident not in s:
            return False
        gens: list[Perm] = []
        closure = {ident}
        for p in self.perms:
            if p in closure:
                continue
            gens.append(p)
            frontier = list(closure)
            while frontier:
                nxt = []
                for x in frontier:
                    for g in gens:
                        y = tuple(map(g.__getitem__, x))
                        if y not in closure:
                            if y not in s:
                                return False
                            closure.add(y)
                            nxt.append(y)
                frontier = nxt
        return closure == s


def compose(p: Perm, q: Perm) -> Perm:
    """``p ∘ q``: apply ``q`` first."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def is_automorphism(g: Graph, p: Sequence[int]) -> bool:
    # a bijection mapping edges to edges maps the edge set onto itself
    if sorted(p) != list(range(g.n)):
        return False
    return all(g.adjacent(p[u], p[v]) for u, v in g.edges)


def automorphisms(g: Graph, limit: int | None = None, cap: int = DEFAULT_CAP, backend=None) -> AutSet:
    """All automorphisms of ``g`` (or the first ``limit`` found), sorted."""
    _check_cap(g, cap)
    if g.n == 0:
        return AutSet(((),), 0)
    colors, adj, order = _prepared(g)
    perms = _search.extend_maps(adj, adj, colors, colors, order, [-1] * g.n, limit or 0, backend=backend)
    return AutSet(tuple(sorted(perms)), g.n)


def is_rigid(g: Graph, cap: int = DEFAULT_CAP) -> bool:
    return automorphisms(g, limit=2, cap=cap).order == 1


@dataclass(frozen=True)
class Embedding:
    """Induced-subgraph embedding ``source -> target`` given by ``map``."""

    source: Graph
    target: Graph
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))
        m = self.map
        if len(m) != self.source.n:
            raise ContractError("embedding map must cover every source vertex")
        if len(set(m)) != len(m) or any(not 0 <= t < self.target.n for t in m):
            raise ContractError("embedding map must be injective into the target")
        for u in range(self.source.n):
            for v in range(u + 1, self.source.n):
                if self.source.adjacent(u, v) != self.target.adjacent(m[u], m[v]):
                    raise ContractError(f"pair ({u},{v}) not preserved by embedding")

    @classmethod
    def inclusion(cls, source: Graph, target: Graph) -> "Embedding":
        return cls(source, target, tuple(range(source.n)))

    def image(self) -> frozenset[int]:
        return frozenset(self.map)


def extension_square(e: Embedding, alpha: Sequence[int], cap: int = DEFAULT_CAP, backend=None) -> Perm | None:
    """Least automorphism ``beta`` of the target with ``beta∘e == e∘alpha``."""
    alpha = tuple(alpha)
    if not is_automorphism(e.source, alpha):
        raise ContractError("alpha is not an automorphism of the source")
    t = e.target
    _check_cap(t, cap)
    fixed = [-1] * t.n
    for v in range(e.source.n):
        fixed[e.map[v]] = e.map[alpha[v]]
    colors, adj, _ = _prepared(t)
    found = _search.extend_maps(adj, adj, colors, colors, range(t.n), fixed, 1, backend=backend)
    return found[0] if found else None


def ge_group(e: Embedding, cap: int = DEFAULT_CAP) -> AutSet:
    """Automorphisms of the source that extend across ``e``."""
    _check_cap(e.source, cap)
    _check_cap(e.target, cap)
    aut = automorphisms(e.source, cap=cap)
    return AutSet(tuple(a for a in aut if extension_square(e, a, cap=cap) is not None), e.source.n)


def format_perm(p: Iterable[int]) -> str:
    return " ".join(str(i) for i in p)


def parse_perm(text: str) -> Perm:
    return tuple(int(t) for t in text.split())
