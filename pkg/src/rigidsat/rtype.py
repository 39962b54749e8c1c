"""Pointed spaces with a distance floor, the finite-support obstruction
gadget, iterated support closures and separating anchors."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import _search
from .errors import ContractError, MetricError
from .metric import (
    KatetovType,
    QMetricSpace,
    as_fraction,
    fmt_fraction,
    fresh_ids,
    iter_types,
    one_point_extend,
    pushout_amalgam,
    validate_metric,
)


@dataclass(frozen=True)
class RTypeSpec:
    r: Fraction

    def __post_init__(self):
        r = as_fraction(self.r)
        object.__setattr__(self, "r", r)
        if r <= 1:
            raise ContractError(f"r must exceed 1, got {fmt_fraction(r)}")


@dataclass(frozen=True)
class PointedSpace:
    space: QMetricSpace
    special: str

    def __post_init__(self):
        if self.special not in self.space:
            raise ContractError(f"special point {self.special!r} not in space")

    def others(self) -> list[str]:
        return [p for p in self.space.points if p != self.special]


def mr_validate(p: PointedSpace, r: RTypeSpec) -> bool:
    """Every ordinary point lies at distance >= r from the special one."""
    return all(p.space.d(p.special, q) >= r.r for q in p.others())


def rtype_saturate(
    p: PointedSpace, r: RTypeSpec, k: int, menu: Iterable[object], prefix: str = "e"
) -> PointedSpace:
    """One saturation round that keeps the special point's floor.

    Candidate types range over supports of size ``<= k`` in the whole pointed
    space; a type is admitted only if the distance it induces to the special
    point is at least ``r``.
    """
    if not mr_validate(p, r):
        raise ContractError("input violates the r-floor")
    admitted = [t for t, dv in iter_types(p.space, p.space.points, k, menu) if dv[p.special] >= r.r]
    out = p.space
    for t, pid in zip(admitted, fresh_ids(out, prefix, len(admitted))):
        out = one_point_extend(out, t, pid)
    return PointedSpace(out, p.special)


# -- obstruction gadget --------------------------------------------------------


@dataclass(frozen=True)
class ObstructionGadget:
    """``n + 1`` points pairwise ``2L`` apart, all at ``L`` from a centre ``w``."""

    n: int
    L: Fraction
    space: QMetricSpace

    centre = "w"


def make_gadget(n: int, L) -> ObstructionGadget:
    L = as_fraction(L)
    if n < 1 or L <= 0:
        raise ContractError("gadget needs n >= 1 and L > 0")
    leaves = [f"w{i}" for i in range(1, n + 2)]
    dist = {(a, b): 2 * L for a, b in combinations(leaves, 2)}
    dist.update({("w", a): L for a in leaves})
    return ObstructionGadget(n, L, QMetricSpace.from_pairs(["w"] + leaves, dist))


def isometric_embeddings(
    pattern: QMetricSpace,
    host: QMetricSpace,
    fixed: Mapping[str, str] | None = None,
    limit: int = 0,
    pattern_classes: Mapping[str, int] | None = None,
    host_classes: Mapping[str, int] | None = None,
    backend=None,
) -> list[dict[str, str]]:
    """All (or ``limit``) distance-preserving injections ``pattern -> host``.

    ``fixed`` pins some images; the optional class maps restrict images to
    points of equal class.  Distances are compared as scaled integers.
    """
    if len(pattern) > len(host):
        return []
    denoms = [v for r in pattern.matrix for v in r]
    hm, s = host.scaled_integers(denoms)
    pm = [[int(v * s) for v in r] for r in pattern.matrix]
    fx = [-1] * len(pattern)
    for a, b in (fixed or {}).items():
        fx[pattern.index(a)] = host.index(b)
    pc = [pattern_classes.get(p, 0) if pattern_classes else 0 for p in pattern.points]
    hc = [host_classes.get(p, 0) if host_classes else 0 for p in host.points]
    maps = _search.extend_maps(pm, hm, pc, hc, range(len(pattern)), fx, limit, backend=backend)
    return [{pattern.points[i]: host.points[h] for i, h in enumerate(mp)} for mp in maps]


def gadget_embeds(host: QMetricSpace, anchor: str, g: ObstructionGadget, backend=None) -> dict[str, str] | None:
    """Least isometric copy of the gadget in ``host`` with centre at ``anchor``."""
    if anchor not in host:
        raise ContractError(f"anchor {anchor!r} not in host")
    found = isometric_embeddings(g.space, host, {"w": anchor}, limit=1, backend=backend)
    return found[0] if found else None


# -- roles and layered spaces --------------------------------------------------


@dataclass(frozen=True)
class Role:
    kind: str  # "base" | "anchor" | "fill"
    stage: int = 0
    j: int | None = None
    r: Fraction | None = None
    support: KatetovType | None = None

    def __str__(self) -> str:
        if self.kind == "base":
            return "base"
        if self.kind == "anchor":
            j = "" if self.j is None else f";j={self.j}"
            return f"anchor(r={fmt_fraction(self.r)};stage={self.stage}{j})"
        return f"fill(support={self.support};stage={self.stage})"

    @property
    def is_skeleton(self) -> bool:
        return self.kind in ("base", "anchor")


_ROLE_RE = re.compile(r"^(anchor|fill)\((.*)\)$")


def parse_role(text: str) -> Role:
    text = text.strip()
    if text == "base":
        return Role("base")
    m = _ROLE_RE.match(text)
    if not m:
        raise MetricError(f"bad role tag {text!r}")
    fields = dict(part.split("=", 1) for part in m.group(2).split(";"))
    stage = int(fields.get("stage", 0))
    if m.group(1) == "anchor":
        j = int(fields["j"]) if "j" in fields else None
        return Role("anchor", stage, j, as_fraction(fields["r"]))
    supp = [item.rsplit(":", 1) for item in fields["support"].split(",")]
    return Role("fill", stage, support=KatetovType(tuple(a for a, _ in supp), tuple(b for _, b in supp)))


@dataclass(frozen=True)
class LayeredSpace:
    """A space whose points carry roles; point order is creation order."""

    space: QMetricSpace
    roles: Mapping[str, Role]

    def role(self, p: str) -> Role:
        return self.roles.get(p, Role("base"))

    def skeleton(self) -> list[str]:
        return [p for p in self.space.points if self.role(p).is_skeleton]

    def skeleton_before(self, y: str) -> list[str]:
        """Skeleton points created before ``y``: what ``y``'s type lives over."""
        i = self.space.index(y)
        return [p for p in self.space.points[:i] if self.role(p).is_skeleton]

    def fills(self) -> list[str]:
        return [p for p in self.space.points if self.role(p).kind == "fill"]

    def anchors(self) -> list[str]:
        return [p for p in self.space.points if self.role(p).kind == "anchor"]

    def role_tags(self) -> dict[str, str]:
        return {p: str(self.role(p)) for p in self.space.points}


@dataclass(frozen=True)
class SupportClosure:
    """Iterated support of a fill point, pushed down to the skeleton."""

    origin: str
    reach: dict[str, Fraction]
    chains: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def points(self) -> list[str]:
        return list(self.reach)


def support_closure(layered: LayeredSpace, y: str) -> SupportClosure:
    """Minimal chain sums from fill ``y`` through fills to skeleton points."""
    if layered.role(y).kind != "fill":
        raise ContractError(f"{y!r} is not a fill point")
    memo: dict[str, dict[str, tuple[Fraction, tuple[str, ...]]]] = {}

    def walk(p):
        if p in memo:
            return memo[p]
        best: dict[str, tuple[Fraction, tuple[str, ...]]] = {}
        t = layered.role(p).support
        for s, v in zip(t.support, t.values):
            if layered.role(s).is_skeleton:
                sub = {s: (Fraction(0), (s,))}
            else:
                sub = walk(s)
            for z, (w, ch) in sub.items():
                cand = (v + w, (p,) + ch)
                if z not in best or cand[0] < best[z][0]:
                    best[z] = cand
        memo[p] = best
        return best

    res = walk(y)
    order = {p: i for i, p in enumerate(layered.space.points)}
    keys = sorted(res, key=order.__getitem__)
    return SupportClosure(y, {z: res[z][0] for z in keys}, {z: res[z][1] for z in keys})


def closure_distance(layered: LayeredSpace, c: SupportClosure, z: str) -> Fraction:
    """``min over s in the closure of reach(s) + d(s, z)``."""
    return min(w + layered.space.d(s, z) for s, w in c.reach.items())


def rtype_lower_bound(
    layered: LayeredSpace, y: str, z: str, skeleton: Sequence[str] | None = None
) -> tuple[Fraction, bool]:
    """``(d(y, skeleton), d(y, z) >= d(y, skeleton))`` for fill ``y``, anchor ``z``.

    The skeleton defaults to the base and anchor points created before ``y``.
    """
    if layered.role(y).kind != "fill":
        raise ContractError(f"{y!r} is not a fill point")
    if layered.role(z).kind != "anchor":
        raise ContractError(f"{z!r} is not an anchor")
    skel = layered.skeleton_before(y) if skeleton is None else list(skeleton)
    if not skel:
        raise ContractError(f"no skeleton points before {y!r}")
    bound = layered.space.dist_to_set(y, skel)
    return bound, layered.space.d(y, z) >= bound


# -- separating family ---------------------------------------------------------


@dataclass(frozen=True)
class SeparatingFamily:
    space: QMetricSpace
    anchors: tuple[str, ...]
    seeds: tuple[tuple[str, str], ...]
    rs: tuple[Fraction, ...]

    def layered(self) -> LayeredSpace:
        roles = {a: Role("anchor", 0, i, r) for i, (a, r) in enumerate(zip(self.anchors, self.rs))}
        return LayeredSpace(self.space, roles)


def collinear_seed(p0: str, p1: str, pair_dist: Fraction, r: Fraction, anchor: str) -> QMetricSpace:
    """``{p0, p1, x}`` with ``d(x,p0) = r`` and ``x, p0, p1`` collinear."""
    if p0 == p1:
        return QMetricSpace.from_pairs([p0, anchor], {(p0, anchor): r})
    return QMetricSpace.from_pairs(
        [p0, p1, anchor], {(p0, p1): pair_dist, (p0, anchor): r, (p1, anchor): r + pair_dist}
    )


def separating_family(
    base: QMetricSpace,
    dense: Sequence[str],
    rs: Sequence[object],
    pairs: Sequence[tuple[str, str]],
    prefix: str = "x",
) -> SeparatingFamily:
    """One anchor per ``r``, collinear beyond its pair, glued by push-out.

    A pair ``(p, p)`` is allowed and seeds the anchor on ``p`` alone.
    """
    rs = [RTypeSpec(r).r for r in rs]
    if len(set(rs)) != len(rs):
        raise ContractError("r values must be pairwise distinct")
    if len(pairs) != len(rs):
        raise ContractError("need exactly one pair per r value")
    dense_set = set(dense)
    for p0, p1 in pairs:
        if p0 not in dense_set or p1 not in dense_set:
            raise ContractError(f"pair ({p0},{p1}) not in the dense part")
    space = base
    anchors = []
    for (p0, p1), r, x in zip(pairs, rs, fresh_ids(base, prefix, len(rs))):
        pd = space.d(p0, p1)
        seed = collinear_seed(p0, p1, pd, r, x)
        bad = validate_metric(seed)
        if bad:
            raise MetricError(f"seed for {x} fails: {bad[0]}")
        glue = [p0] if p0 == p1 else [p0, p1]
        a = seed.restrict(glue)
        ident = {c: c for c in glue}
        space = pushout_amalgam(a, space, seed, ident, ident)
        anchors.append(x)
    return SeparatingFamily(space, tuple(anchors), tuple(tuple(p) for p in pairs), tuple(rs))
