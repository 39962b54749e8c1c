"""Finite metric towers: anchor layers glued through four-point gadgets,
finite-support fill layers, and exact stage-rigidity audits."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import ContractError, ConstructionError, MetricError
from .metric import (
    KatetovType,
    QMetricSpace,
    _parse_metric_lines,
    as_fraction,
    fmt_fraction,
    format_metric,
    iter_types,
    one_point_extend,
    pushout_amalgam,
    validate_metric,
)
from .rtype import LayeredSpace, Role, gadget_embeds, isometric_embeddings, make_gadget, parse_role

AUDIT_HOST_CAP = 14


@dataclass(frozen=True)
class RMatrix:
    """Rows of anchor radii, one row per stage; all entries distinct and > 1."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        flat = [v for row in rows for v in row]
        if not rows or any(not row for row in rows):
            raise ContractError("r-matrix needs at least one non-empty row")
        bad = [v for v in flat if v <= 1]
        if bad:
            raise ContractError(f"r-matrix entries must exceed 1, got {fmt_fraction(bad[0])}")
        if len(set(flat)) != len(flat):
            raise ContractError("r-matrix entries must be pairwise distinct")

    @classmethod
    def parse(cls, text: str) -> "RMatrix":
        """``"2,5;3,7"``: rows split by ``;``, entries by ``,``."""
        return cls(tuple(tuple(as_fraction(v.strip()) for v in row.split(",")) for row in text.split(";")))

    def __str__(self) -> str:
        return ";".join(",".join(fmt_fraction(v) for v in row) for row in self.rows)


@dataclass(frozen=True)
class AnchorSeed:
    anchor: str
    stage: int
    j: int
    r: Fraction
    w: str
    p0: str
    p1: str
    gadget: QMetricSpace

    def __str__(self) -> str:
        return (
            f"{self.anchor} stage={self.stage} j={self.j} r={fmt_fraction(self.r)} "
            f"w={self.w} p0={self.p0} p1={self.p1}"
        )


@dataclass(frozen=True)
class TowerState:
    stages: tuple[QMetricSpace, ...]
    dense: tuple[tuple[str, ...], ...]
    roles: Mapping[str, Role]
    seeds: Mapping[str, AnchorSeed]
    rmatrix: RMatrix

    @property
    def top(self) -> QMetricSpace:
        return self.stages[-1]

    @property
    def t(self) -> int:
        return len(self.stages) - 1

    def layered(self, stage: int | None = None) -> LayeredSpace:
        sp = self.top if stage is None else self.stages[stage]
        return LayeredSpace(sp, {p: r for p, r in self.roles.items() if p in sp})

    def role(self, p: str) -> Role:
        return self.roles.get(p, Role("base"))

    def role_tags(self) -> dict[str, str]:
        return {p: str(self.role(p)) for p in self.top.points}


def initial_tower(base: QMetricSpace, rmatrix: RMatrix) -> TowerState:
    bad = validate_metric(base)
    if bad:
        raise MetricError(f"base is not a metric space: {bad[0]}")
    return TowerState((base,), (base.points,), {}, {}, rmatrix)


def default_base() -> QMetricSpace:
    """Four points spread enough that small pairs find far base witnesses."""
    return QMetricSpace.from_pairs(
        ["b0", "b1", "b2", "b3"],
        {
            ("b0", "b1"): 1,
            ("b0", "b2"): 4,
            ("b1", "b2"): 4,
            ("b0", "b3"): 10,
            ("b1", "b3"): 10,
            ("b2", "b3"): 8,
        },
    )


def four_point_gadget(w_dists: tuple[object, object], pair_dist, r) -> QMetricSpace:
    """Space ``{z, q0, q1, x}`` anchoring ``x`` at ``r`` from ``z`` and
    collinear beyond the pair ``(q0, q1)``."""
    d0, d1 = (as_fraction(v) for v in w_dists)
    pd, r = as_fraction(pair_dist), as_fraction(r)
    checks = [
        (d0 >= d1, f"d(w,p0)={fmt_fraction(d0)} < d(w,p1)={fmt_fraction(d1)}"),
        (d1 > r, f"d(w,p1)={fmt_fraction(d1)} <= r={fmt_fraction(r)}"),
        (pd > 0, f"pair_dist={fmt_fraction(pd)} is not positive"),
        (pd <= r, f"pair_dist={fmt_fraction(pd)} > r={fmt_fraction(r)}"),
        (d0 <= d1 + pd, f"triangle (w,p0,p1): {fmt_fraction(d0)} > {fmt_fraction(d1)} + {fmt_fraction(pd)}"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ContractError(msg)
    return QMetricSpace.from_pairs(
        ["z", "q0", "q1", "x"],
        {
            ("z", "q0"): d0,
            ("z", "q1"): d1,
            ("q0", "q1"): pd,
            ("z", "x"): r,
            ("q0", "x"): d1,
            ("q1", "x"): d1 + pd,
        },
    )


def triangle_report(m: QMetricSpace) -> list[tuple[tuple[str, str, str], str]]:
    """Per point triple: ``"strict"``, ``"equality"`` or ``"violated"``."""
    out = []
    for tri in combinations(m.points, 3):
        a, b, c = tri
        s = sorted([m.d(a, b), m.d(b, c), m.d(a, c)])
        status = "violated" if s[2] > s[0] + s[1] else "equality" if s[2] == s[0] + s[1] else "strict"
        out.append((tri, status))
    return out


def _find_base_triple(cur: QMetricSpace, base: QMetricSpace, a: str, b: str, r: Fraction):
    """First ``w`` of ``X_0`` farther than ``r`` from both ends, with the
    pair oriented so that ``p0`` is the farther end."""
    for w in base.points:
        if w in (a, b):
            continue
        da, db = cur.d(w, a), cur.d(w, b)
        if min(da, db) > r:
            return (w, a, b) if da >= db else (w, b, a)
    return None


def build_stage(
    prev: TowerState,
    stage: int,
    pair_budget: int,
    fill_rounds: int,
    fill_menu: Iterable[object],
    fill_budget: int | None = None,
    support_bound: int = 1,
) -> TowerState:
    """Build ``X_{stage+1}`` on top of ``X_stage``.

    Pairs of the dense part are taken in canonical order; each gets the least
    unused radius of its matrix row that is at least the pair distance, and
    an anchor glued in by push-out over its base triple.  Then
    ``fill_rounds`` rounds add finitely supported points over the dense part,
    newest points first, stopping after ``fill_budget`` fills in total.
    """
    if stage != prev.t:
        raise ContractError(f"next stage to build is {prev.t}, not {stage}")
    if stage >= len(prev.rmatrix.rows):
        raise ContractError(f"r-matrix has no row for stage {stage}")
    if pair_budget < 0 or fill_rounds < 0 or (fill_budget is not None and fill_budget < 0):
        raise ContractError("budgets must be non-negative")
    menu = sorted({as_fraction(v) for v in fill_menu})
    row = prev.rmatrix.rows[stage]
    if fill_rounds and menu and menu[-1] >= min(row):
        raise ContractError(
            f"fill menu value {fmt_fraction(menu[-1])} is not below the smallest radius {fmt_fraction(min(row))}"
        )
    base = prev.stages[0]
    cur = prev.top
    dense = list(prev.dense[-1])
    roles = dict(prev.roles)
    seeds = dict(prev.seeds)
    taken = set(cur.points)

    used: set[int] = set()
    new_points: list[str] = []
    for a, b in list(combinations(dense, 2))[:pair_budget]:
        pd = cur.d(a, b)
        j = next((j for j, r in enumerate(row) if j not in used and pd <= r), None)
        if j is None:
            raise ConstructionError(f"no admissible radius left in row {stage} for pair ({a},{b}) at {fmt_fraction(pd)}")
        used.add(j)
        r = row[j]
        triple = _find_base_triple(cur, base, a, b, r)
        if triple is None:
            raise ConstructionError(f"no base triple for pair ({a},{b}) at radius {fmt_fraction(r)}")
        w, p0, p1 = triple
        gad = four_point_gadget((cur.d(w, p0), cur.d(w, p1)), pd, r)
        xid = f"x{stage}_{j}"
        if xid in taken:
            raise MetricError(f"anchor id {xid!r} already used")
        glue = gad.restrict(["z", "q0", "q1"])
        e1 = {"z": w, "q0": p0, "q1": p1}
        ident = {c: c for c in glue.points}
        cur = pushout_amalgam(glue, cur, gad.relabel({"x": xid}), e1, ident)
        taken.add(xid)
        roles[xid] = Role("anchor", stage, j, r)
        seeds[xid] = AnchorSeed(xid, stage, j, r, w, p0, p1, gad)
        new_points.append(xid)

    k = 0
    for _ in range(fill_rounds):
        if fill_budget is not None and k >= fill_budget:
            break
        pool = list(reversed(dense + new_points))
        added = False
        for t, _dv in iter_types(cur, pool, support_bound, menu):
            if fill_budget is not None and k >= fill_budget:
                break
            yid = f"y{stage}_{k}"
            cur = one_point_extend(cur, t, yid)
            roles[yid] = Role("fill", stage, support=t)
            new_points.append(yid)
            k += 1
            added = True
        if not added:
            break

    return TowerState(
        prev.stages + (cur,),
        prev.dense + (tuple(dense + new_points),),
        roles,
        seeds,
        prev.rmatrix,
    )


def build_tower(
    base: QMetricSpace,
    rmatrix: RMatrix,
    stages: int,
    pair_budget: int,
    fill_rounds: int,
    fill_menu: Iterable[object],
    fill_budget: int | None = None,
    support_bound: int = 1,
) -> TowerState:
    t = initial_tower(base, rmatrix)
    for s in range(stages):
        t = build_stage(t, s, pair_budget, fill_rounds, fill_menu, fill_budget, support_bound)
    return t


# -- audits --------------------------------------------------------------------


def tower_invariant_failures(t: TowerState) -> list[str]:
    """Stage chain, anchor exactness, pair admissibility and collinearity."""
    fails = []
    for i in range(t.t):
        lo, hi = t.stages[i], t.stages[i + 1]
        if hi.points[: len(lo)] != lo.points or not hi.is_isometric_restriction(lo):
            fails.append(f"chain X_{i} is not an isometric subspace of X_{i + 1}")
    top = t.top
    for x, s in t.seeds.items():
        if top.d(x, s.w) != s.r:
            fails.append(f"anchor {x}: d({x},{s.w}) = {fmt_fraction(top.d(x, s.w))} != r = {fmt_fraction(s.r)}")
        if top.dist_to_set(x, t.stages[0].points) != s.r:
            fails.append(f"anchor {x}: distance to X_0 is not r")
        pd = top.d(s.p0, s.p1)
        if pd > s.r:
            fails.append(f"anchor {x}: pair ({s.p0},{s.p1}) at {fmt_fraction(pd)} exceeds r")
        if top.d(x, s.p0) + pd != top.d(x, s.p1):
            fails.append(f"anchor {x}: not collinear beyond ({s.p0},{s.p1})")
    for v in validate_metric(top):
        fails.append(f"metric {v}")
    return fails


@dataclass
class AuditReport:
    beta: int
    lines: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    def check(self, ok: bool, line: str) -> None:
        self.lines.append(f"{line} {'ok' if ok else 'FAIL'}")
        if not ok:
            self.failures.append(line)

    @property
    def passed(self) -> bool:
        return not self.failures

    def text(self) -> str:
        out = [f"audit beta={self.beta}", *self.lines, f"failures {len(self.failures)}"]
        out += [f"failure {f}" for f in self.failures]
        return "\n".join(out) + "\n"


def audit_stage_rigidity(t: TowerState, beta_stage: int, host_cap: int = AUDIT_HOST_CAP, backend=None) -> AuditReport:
    """Exact audits of the top stage relative to ``X_beta``.

    ``metric``: the triangle audit.  ``a``: every fill ``y`` outside ``X_beta``
    is at least as far from every anchor above ``X_beta`` as from the
    skeleton it was typed over.  ``b``: anchors above ``X_beta`` sit at their
    own radius from ``X_beta`` and the radii are pairwise distinct.  ``c``:
    for small tops, every self-isometry preserving ``X_beta`` setwise fixes
    those anchors.
    """
    if not 0 <= beta_stage < len(t.stages):
        raise ContractError(f"beta_stage {beta_stage} out of range 0..{t.t}")
    rep = AuditReport(beta_stage)
    top = t.top
    xb = set(t.stages[beta_stage].points)
    xb_list = list(t.stages[beta_stage].points)
    viol = validate_metric(top)
    rep.check(not viol, f"metric points={len(top)} violations={len(viol)}")
    for v in viol:
        rep.failures.append(f"metric {v}")

    anchors = [p for p in top.points if t.role(p).kind == "anchor" and p not in xb]
    fills = [p for p in top.points if t.role(p).kind == "fill" and p not in xb]
    for y in fills:
        iy = top.index(y)
        skel = xb_list + [z for z in anchors if top.index(z) < iy]
        bound = top.dist_to_set(y, skel)
        for z in anchors:
            dyz = top.d(y, z)
            rep.check(dyz >= bound, f"a {y} {z} d={fmt_fraction(dyz)} >= bound={fmt_fraction(bound)}")

    radii = {}
    for z in anchors:
        r = t.role(z).r
        dz = top.dist_to_set(z, xb_list)
        radii[z] = r
        rep.check(dz == r, f"b {z} d(z,X_{beta_stage})={fmt_fraction(dz)} == r={fmt_fraction(r)}")
    vals = list(radii.values())
    rep.check(len(set(vals)) == len(vals), f"b radii distinct count={len(vals)}")

    if not anchors:
        rep.lines.append("c no anchors above X_beta")
    elif len(top) > host_cap:
        rep.lines.append(f"c skipped points={len(top)} > {host_cap}")
    else:
        cls = {p: 1 if p in xb else 0 for p in top.points}
        isos = isometric_embeddings(top, top, pattern_classes=cls, host_classes=cls, backend=backend)
        movers = [f for f in isos if any(f[z] != z for z in anchors)]
        rep.check(not movers, f"c isometries={len(isos)} moving_anchors={len(movers)}")
    return rep


def gadget_probe_lengths(space: QMetricSpace, y: str, support_max: Fraction) -> list[Fraction]:
    """Scales worth probing: every distance from ``y`` above the support
    maximum, plus one beyond the diameter."""
    ds = sorted({space.d(y, p) for p in space.points if p != y and space.d(y, p) > support_max})
    return ds + [space.diameter() + 1]


def gadget_obstruction_failures(t: TowerState, host_cap: int = AUDIT_HOST_CAP, backend=None) -> list[str]:
    """Fills that admit a gadget copy centred on them, per stage snapshot."""
    fails = []
    for si, sp in enumerate(t.stages):
        if len(sp) > host_cap:
            continue
        for y in sp.points:
            role = t.role(y)
            if role.kind != "fill":
                continue
            smax = max(role.support.values)
            for L in gadget_probe_lengths(sp, y, smax):
                g = make_gadget(len(role.support.support), L)
                hit = gadget_embeds(sp, y, g, backend=backend)
                if hit is not None:
                    fails.append(f"stage {si} fill {y} L={fmt_fraction(L)} embeds {hit}")
    return fails


def mutate_distance(t: TowerState, p: str, q: str, delta) -> TowerState:
    """Copy of ``t`` with ``d(p, q)`` shifted by ``delta`` in every stage holding both."""
    delta = as_fraction(delta)
    stages = []
    for sp in t.stages:
        if p in sp and q in sp:
            i, j = sp.index(p), sp.index(q)
            rows = [list(r) for r in sp.matrix]
            rows[i][j] += delta
            rows[j][i] += delta
            sp = QMetricSpace(sp.points, tuple(tuple(r) for r in rows))
        stages.append(sp)
    return replace(t, stages=tuple(stages))


# -- text format ---------------------------------------------------------------


def format_tower(t: TowerState) -> str:
    tags = t.role_tags()
    out = [f"tower {len(t.stages)}", f"rmatrix {t.rmatrix}"]
    for i, (sp, dn) in enumerate(zip(t.stages, t.dense)):
        out.append(f"stage {i}")
        out.append(format_metric(sp, {p: tags[p] for p in sp.points}).rstrip("\n"))
        out.append("dense " + " ".join(dn))
    out.append(f"seeds {len(t.seeds)}")
    out += [str(s) for s in t.seeds.values()]
    return "\n".join(out) + "\n"


def parse_tower(text: str) -> TowerState:
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        head = lines[0].split()
        if head[0] != "tower":
            raise ValueError
        count = int(head[1])
        rm = lines[1].split(maxsplit=1)
        if rm[0] != "rmatrix":
            raise ValueError
        rmatrix = RMatrix.parse(rm[1])
    except (IndexError, ValueError):
        raise MetricError("tower file must start with 'tower <n>' and 'rmatrix <rows>'") from None
    rest = lines[2:]
    stages, dense, roles = [], [], {}
    for i in range(count):
        if not rest or rest[0] != f"stage {i}":
            raise MetricError(f"missing 'stage {i}' block")
        sp, tags, rest = _parse_metric_lines(rest[1:])
        if not rest or not rest[0].startswith("dense"):
            raise MetricError(f"stage {i}: missing 'dense' line")
        dense.append(tuple(rest[0].split()[1:]))
        rest = rest[1:]
        stages.append(sp)
        for p, tag in tags.items():
            role = parse_role(tag)
            if role.kind != "base":
                roles[p] = role
    if not rest or not rest[0].startswith("seeds"):
        raise MetricError("missing 'seeds' section")
    top = stages[-1]
    seeds = {}
    for ln in rest[1:]:
        parts = ln.split()
        kv = dict(x.split("=", 1) for x in parts[1:])
        x = parts[0]
        r = as_fraction(kv["r"])
        w, p0, p1 = kv["w"], kv["p0"], kv["p1"]
        gad = four_point_gadget((top.d(w, p0), top.d(w, p1)), top.d(p0, p1), r)
        seeds[x] = AnchorSeed(x, int(kv["stage"]), int(kv["j"]), r, w, p0, p1, gad)
    return TowerState(tuple(stages), tuple(dense), roles, seeds, rmatrix)
