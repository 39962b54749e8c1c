"""Degree-coded fingerprints, the rigidifying one-step extension, and the
layered rigid tower, all truncated to finitely many vertices."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .automorphism import DEFAULT_CAP, Embedding, automorphisms, extension_square, format_perm
from .errors import ConstructionError, ContractError, ScheduleError
from .graph import Graph, extension_defects, format_graph, parse_graph


@dataclass(frozen=True)
class DegreeSchedule:
    """Strictly increasing target degrees ``a_1 < a_2 < ...`` with ``a_1 >= 2``."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(a) for a in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ScheduleError("schedule must be non-empty")
        if vals[0] < 2:
            raise ScheduleError(f"schedule must start at >= 2, got {vals[0]}")
        for i in range(1, len(vals)):
            if vals[i] <= vals[i - 1]:
                raise ScheduleError(
                    f"schedule must be strictly increasing: a_{i} = {vals[i - 1]} >= a_{i + 1} = {vals[i]}"
                )

    @classmethod
    def parse(cls, text: str) -> "DegreeSchedule":
        try:
            return cls(tuple(int(t) for t in text.replace(",", " ").split()))
        except ValueError as exc:
            raise ScheduleError(f"bad schedule {text!r}: {exc}") from None

    @classmethod
    def arithmetic(cls, start: int, count: int, step: int = 1) -> "DegreeSchedule":
        return cls(tuple(start + step * i for i in range(count)))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __str__(self) -> str:
        return ",".join(map(str, self.values))


@dataclass(frozen=True)
class Fingerprint:
    graph: Graph
    schedule: DegreeSchedule
    exact_prefix: int

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(self.graph.degree(v) for v in self.graph.vertices)

    def prefix_graph(self) -> Graph:
        return self.graph.induced(range(self.exact_prefix))


def _fingerprint_edges(schedule: DegreeSchedule, m: int) -> list[tuple[int, int]]:
    deg = [0] * m
    edges = []
    for n in range(min(m, len(schedule))):
        k = deg[n]
        a = schedule[n]
        if k >= a:
            raise ScheduleError(f"infeasible schedule: v_{n + 1} already has degree {k} >= a_{n + 1} = {a}")
        for s in range(1, a - k + 1):
            if n + s >= m:
                break
            edges.append((n, n + s))
            deg[n] += 1
            deg[n + s] += 1
    return edges


def build_fingerprint(schedule: DegreeSchedule, m: int) -> Fingerprint:
    """Graph on ``v_1..v_m`` (ids ``0..m-1``) whose degrees follow ``schedule``.

    Vertex ``v_n`` with current degree ``k`` is joined to
    ``v_{n+1} .. v_{n+a_n-k}``; links past ``v_m`` are dropped.  Only vertices
    with a schedule entry are processed.  ``exact_prefix`` is the largest ``p``
    such that ``v_1..v_p`` end with degree exactly ``a_1..a_p``.
    """
    if m < 2:
        raise ContractError("fingerprint needs at least 2 vertices")
    g = Graph.from_edges(m, _fingerprint_edges(schedule, m))
    p = 0
    while p < min(m, len(schedule)) and g.degree(p) == schedule[p]:
        p += 1
    return Fingerprint(g, schedule, p)


# -- rigidify ------------------------------------------------------------------

SetPair = tuple[frozenset, frozenset]


@dataclass(frozen=True)
class RigidifyState:
    """Bookkeeping of a rigidify run.

    ``pair_enum[n]`` and ``setpair_enum[n]`` are the ordered pair and the
    set-pair handled at step ``n + 1``; ``setpair_enum[n]`` is ``None`` when no
    admissible set-pair exists yet (always the case at step 1).
    ``witnesses[n]`` is the base vertex used for it.
    """

    base: Graph
    v1: tuple[int, ...]
    pair_enum: tuple[tuple[int, int], ...]
    setpair_enum: tuple[SetPair | None, ...]
    witnesses: tuple[int | None, ...]
    fingerprint: Fingerprint

    @property
    def used_witnesses(self) -> frozenset[int]:
        return frozenset(w for w in self.witnesses if w is not None)

    @property
    def steps(self) -> int:
        return len(self.pair_enum)

    def processed_pairs(self) -> tuple[tuple[int, int], ...]:
        return self.pair_enum


def pair_enumeration(vertices: Sequence[int]) -> Iterator[tuple[int, int]]:
    """Ordered pairs of distinct vertices, by sorted contents then orientation."""
    for x, y in combinations(sorted(vertices), 2):
        yield (x, y)
        yield (y, x)


def unordered_pair_enumeration(vertices: Sequence[int]) -> Iterator[tuple[int, int]]:
    """Each unordered pair once as ``(x, y)``, ``x < y``, then each reversed."""
    pairs = list(combinations(sorted(vertices), 2))
    yield from pairs
    yield from ((y, x) for x, y in pairs)


def _setpair_candidates(pool: Sequence[int], v1: frozenset) -> Iterator[SetPair]:
    for s in range(1, len(pool) + 1):
        yield from _sized_setpairs(pool, v1, s)


class _StepGraph:
    """Mutable edge set used while a construction is in progress."""

    def __init__(self, g: Graph):
        self.n = g.n
        self.edges = set(g.edges)
        self.adj = {v: set(g.neighbors(v)) for v in g.vertices}
        self.forbidden = set()

    def link(self, a, b):
        a, b = min(a, b), max(a, b)
        self.edges.add((a, b))
        self.adj[a].add(b)
        self.adj[b].add(a)

    def forbid(self, a, b):
        self.forbidden.add((min(a, b), max(a, b)))

    def allowed(self, w, vs):
        return not any((min(w, v), max(w, v)) in self.forbidden for v in vs)

    def graph(self) -> Graph:
        return Graph.from_edges(self.n, self.edges)

    def find_witness(self, base_ids, W1, W2, v1_all, used):
        """Least unused base vertex that can witness ``(W1, W2)`` once joined
        to ``W1 ∩ V_1``, without creating a forbidden edge."""
        base_set = frozenset(base_ids)
        need_in, need_out = W1 & base_set, W2 & base_set
        new_links, avoid = W1 & v1_all, W2 & v1_all
        for w in sorted(base_ids):
            if w in used or w in W1 or w in W2:
                continue
            nb = self.adj[w]
            if not need_in <= nb or nb & need_out or nb & avoid:
                continue
            if self.allowed(w, new_links):
                return w
        return None

    def is_witnessed(self, base_ids, W1, W2):
        for w in base_ids:
            if w in W1 or w in W2:
                continue
            nb = self.adj[w]
            if W1 <= nb and not nb & W2:
                return True
        return False


def _attach_steps(sg: _StepGraph, base_ids, v1, pairs, steps):
    """Per-step edges between a fingerprint ``v1`` and the base vertices.

    Step ``n`` joins ``v_n`` to ``u_n^1`` (never to ``u_n^2``) and serves the
    least unused admissible set-pair with a fresh base witness.
    """
    v1_all = frozenset(v1)
    used_sp, used_w = set(), set()
    records_sp, records_w = [], []
    for n in range(steps):
        vn = v1[n]
        x, y = pairs[n]
        sg.link(vn, x)
        sg.forbid(vn, y)

        # admissible: meets V1, avoids v_n, v_{n+1}, ...
        pool = sorted(base_ids) + list(v1[:n])
        available = frozenset(v1[:n])
        chosen = None
        if available:
            for sp in _setpair_candidates(pool, available):
                if sp not in used_sp:
                    chosen = sp
                    break
        if chosen is None:
            records_sp.append(None)
            records_w.append(None)
            continue
        W1, W2 = chosen
        witness = sg.find_witness(base_ids, W1, W2, v1_all, used_w)
        if witness is None:
            raise ConstructionError(
                f"witness exhaustion at step {n + 1}: no unused base vertex for "
                f"W=({sorted(W1)}, {sorted(W2)})"
            )
        for v in W1 & v1_all:
            sg.link(witness, v)
        used_sp.add(chosen)
        used_w.add(witness)
        records_sp.append(chosen)
        records_w.append(witness)
    return records_sp, records_w


def _serve_bounded_queries(sg: _StepGraph, base_ids, v1, k):
    """Give every query of size <= k that meets ``v1`` a witness in the base.

    Already-witnessed queries are left alone; the rest get a fresh (per
    layer) base witness joined to their ``X ∩ v1``.  Returns the list of
    ``(W1, W2, witness)`` served.
    """
    v1_all = frozenset(v1)
    pool = sorted(base_ids) + list(v1)
    served, used = [], set()
    changed = True
    while changed:
        changed = False
        for s in range(1, k + 1):
            for W1, W2 in _sized_setpairs(pool, v1_all, s):
                if sg.is_witnessed(base_ids, W1, W2):
                    continue
                w = sg.find_witness(base_ids, W1, W2, v1_all, used)
                if w is None:
                    raise ConstructionError(
                        f"base witness exhaustion for W=({sorted(W1)}, {sorted(W2)})"
                    )
                for v in W1 & v1_all:
                    sg.link(w, v)
                used.add(w)
                served.append((W1, W2, w))
                changed = True
    return served


def _sized_setpairs(pool, v1, s):
    for S in combinations(pool, s):
        if not v1.intersection(S):
            continue
        for sides in product((0, 1), repeat=s):
            yield (
                frozenset(v for v, t in zip(S, sides) if t == 0),
                frozenset(v for v, t in zip(S, sides) if t == 1),
            )


def rigidify(
    base: Graph, schedule: DegreeSchedule, steps: int, fingerprint_size: int | None = None
) -> tuple[Graph, RigidifyState]:
    """Extend ``base`` by a degree-coded fingerprint ``V_1`` so that no
    non-identity automorphism of ``base`` that moves a processed pair extends.

    Base vertices keep their ids; fingerprint vertex ``v_n`` gets id
    ``base.n + n - 1``.  ``fingerprint_size`` defaults to ``steps``.
    """
    if base.n < 2:
        raise ContractError("base needs at least two vertices")
    m = steps if fingerprint_size is None else fingerprint_size
    if steps < 0 or m < steps:
        raise ContractError("need 0 <= steps <= fingerprint size")
    pairs = list(pair_enumeration(range(base.n)))
    if steps > len(pairs):
        raise ContractError(f"only {len(pairs)} ordered pairs available, asked for {steps} steps")
    fp = build_fingerprint(schedule, max(m, 2))
    m = fp.graph.n
    N = base.n
    v1 = tuple(range(N, N + m))
    sg = _StepGraph(base.add_vertices(m, [(N + u, N + v) for u, v in fp.graph.edges]))
    sps, ws = _attach_steps(sg, range(N), v1, pairs, steps)
    out = sg.graph()
    state = RigidifyState(base, v1, tuple(pairs[:steps]), tuple(sps), tuple(ws), fp)
    return out, state


# -- tower ----------------------------------------------------------------------


@dataclass(frozen=True)
class LayerRecord:
    """How one positive layer was attached to ``R_0``."""

    pairs: tuple[tuple[int, int], ...]
    served: tuple[tuple[frozenset, frozenset, int], ...]


@dataclass(frozen=True)
class Tower:
    """Layers ``R_0 ⊆ R_1 ⊆ ... ⊆ R_t`` with fingerprints on each fresh layer."""

    layers: tuple[Graph, ...]
    layer_of: tuple[int, ...]
    family: tuple[DegreeSchedule, ...]
    layer_size: int
    fingerprints: tuple[Fingerprint, ...] = ()
    records: tuple[LayerRecord, ...] = field(default=(), compare=False)

    @property
    def top(self) -> Graph:
        return self.layers[-1]

    @property
    def t(self) -> int:
        return len(self.layers) - 1

    def layer_vertices(self, i: int) -> list[int]:
        return [v for v, l in enumerate(self.layer_of) if l == i]

    def exact_prefix_vertices(self, i: int) -> list[int]:
        """Vertices of layer ``i >= 1`` whose fingerprint degree is exact."""
        vs = self.layer_vertices(i)
        return vs[: self.fingerprints[i - 1].exact_prefix]


def build_tower(
    base: Graph, family: Sequence[DegreeSchedule], layer_size: int, t: int, k: int = 1
) -> Tower:
    """Stack ``t`` fingerprint layers on ``base``.

    Each layer's fresh vertices carry a fingerprint from their own schedule
    and are linked only to ``base``, never to other positive layers.  Fresh
    vertex ``n`` is joined to the first member of the ``n``-th base pair
    (unordered pairs first), then every query of size ``<= k`` touching the
    layer that still lacks a base witness gets one.
    """
    if t < 0:
        raise ContractError("t must be non-negative")
    if t > len(family):
        raise ScheduleError(f"{t} layers need {t} schedules, got {len(family)}")
    family = tuple(family[:t])
    seen = {}
    for i, s in enumerate(family):
        if s.values in seen:
            raise ScheduleError(f"layers {seen[s.values] + 1} and {i + 1} share a schedule")
        seen[s.values] = i
    if base.n == 0:
        raise ContractError("base must be non-empty")
    N = base.n
    pairs = list(unordered_pair_enumeration(range(N)))
    if t and layer_size < len(pairs) // 2:
        raise ContractError(f"layer_size {layer_size} cannot separate the {len(pairs) // 2} base pairs")
    if t and layer_size > len(pairs):
        raise ContractError(f"layer_size {layer_size} exceeds the {len(pairs)} ordered base pairs")
    layers = [base]
    layer_of = [0] * N
    fps, records = [], []
    g = base
    for i in range(1, t + 1):
        fp = build_fingerprint(family[i - 1], layer_size)
        off = g.n
        v1 = tuple(range(off, off + layer_size))
        sg = _StepGraph(g.add_vertices(layer_size, [(off + u, off + v) for u, v in fp.graph.edges]))
        for n in range(layer_size):
            x, y = pairs[n]
            sg.link(v1[n], x)
            sg.forbid(v1[n], y)
        served = _serve_bounded_queries(sg, range(N), v1, k)
        g = sg.graph()
        layer_of.extend([i] * layer_size)
        layers.append(g)
        fps.append(fp)
        records.append(LayerRecord(tuple(pairs[:layer_size]), tuple(served)))
    return Tower(tuple(layers), tuple(layer_of), family, layer_size, tuple(fps), tuple(records))


def audit_tower(tower: Tower, k: int = 1) -> dict[str, list[str]]:
    """Finite versions of the five tower conditions; empty lists mean pass.

    ``chain``: each layer is an induced subgraph of the next.
    ``layer_size``: every positive layer adds exactly ``layer_size`` vertices.
    ``defects``: no layer has a size-``k`` extension defect that ``R_0`` lacks.
    ``cross_layer``: no edge joins two distinct positive layers.
    ``separation``: every ``R_0`` pair is split by a vertex of every layer.
    """
    report = {name: [] for name in ("chain", "layer_size", "defects", "cross_layer", "separation")}
    L = tower.layers
    for i in range(len(L) - 1):
        a, b = L[i], L[i + 1]
        if b.induced(range(a.n)).edges != a.edges:
            report["chain"].append(f"R_{i} is not induced in R_{i + 1}")
        if b.n - a.n != tower.layer_size:
            report["layer_size"].append(f"layer {i + 1} adds {b.n - a.n} vertices")
    base_defects = set(extension_defects(L[0], k))
    for i in range(1, len(L)):
        extra = [q for q in extension_defects(L[i], k) if q not in base_defects]
        report["defects"].extend(f"R_{i}: {q}" for q in extra)
    top = tower.top
    for u, v in sorted(top.edges):
        lu, lv = tower.layer_of[u], tower.layer_of[v]
        if lu > 0 and lv > 0 and lu != lv:
            report["cross_layer"].append(f"edge {u}-{v} joins layers {lu} and {lv}")
    base_n = L[0].n
    for i in range(1, len(L)):
        fresh = tower.layer_vertices(i)
        g = L[i]
        for v, w in combinations(range(base_n), 2):
            if not any(g.adjacent(u, v) != g.adjacent(u, w) for u in fresh):
                report["separation"].append(f"layer {i} does not separate {{{v},{w}}}")
    return report


def tower_rigidity_failures(tower: Tower, cap: int = DEFAULT_CAP) -> list[str]:
    """Automorphisms of ``R_t`` that move a fingerprint exact-prefix vertex."""
    prefix = [v for i in range(1, tower.t + 1) for v in tower.exact_prefix_vertices(i)]
    out = []
    for p in automorphisms(tower.top, cap=cap):
        moved = [v for v in prefix if p[v] != v]
        if moved:
            out.append(f"automorphism moves exact-prefix vertices {moved}")
    return out


def format_tower(tower: Tower) -> str:
    lines = [format_graph(tower.top).rstrip("\n"), "layers"]
    lines += [f"{v} {l}" for v, l in enumerate(tower.layer_of)]
    lines.append("schedules")
    lines += [str(s) for s in tower.family]
    return "\n".join(lines) + "\n"


def parse_tower_layers(text: str) -> tuple[Graph, tuple[int, ...]]:
    head, _, rest = text.partition("layers\n")
    g = parse_graph(head)
    layer_part = rest.partition("schedules")[0]
    layer_of = [0] * g.n
    for ln in layer_part.splitlines():
        if ln.strip():
            v, l = (int(t) for t in ln.split())
            layer_of[v] = l
    return g, tuple(layer_of)


def rigidify_extension_failures(
    base: Graph, out: Graph, state: RigidifyState, cap: int = DEFAULT_CAP, backend=None
) -> tuple[int, list[str]]:
    """Check every automorphism of ``base`` that moves a processed pair.

    Returns the number of such automorphisms and a line for each one that
    still extends across the inclusion ``base -> out``.
    """
    e = Embedding.inclusion(base, out)
    pairs = state.processed_pairs()
    movers, fails = 0, []
    for a in automorphisms(base, cap=cap, backend=backend):
        if all(a[x] == x and a[y] == y for x, y in pairs):
            continue
        movers += 1
        beta = extension_square(e, a, cap=cap, backend=backend)
        if beta is not None:
            fails.append(f"{format_perm(a)} extends to {format_perm(beta)}")
    return movers, fails
