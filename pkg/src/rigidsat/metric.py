"""Finite metric spaces with exact rational distances.

Covers validation, finitely supported one-point extensions, push-out
amalgamation and bounded one-round saturation.  No floating point is used
anywhere; every distance is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import lcm
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ContractError, MetricError

Rational = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise MetricError(f"floating-point distance {x!r} not allowed; use Fraction or 'p/q'")
    try:
        return Fraction(x)
    except (TypeError, ValueError) as exc:
        raise MetricError(f"not a rational: {x!r}") from exc


def fmt_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class QMetricSpace:
    """Ordered point ids plus a full distance matrix.

    The constructor only checks shape; use :func:`validate_metric` to audit
    the metric axioms.
    """

    points: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        pts = tuple(str(p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise MetricError("duplicate point ids")
        if len(self.matrix) != len(pts) or any(len(r) != len(pts) for r in self.matrix):
            raise MetricError("distance matrix shape does not match point count")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "matrix", tuple(tuple(as_fraction(x) for x in r) for r in self.matrix))
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    @classmethod
    def empty(cls) -> "QMetricSpace":
        return cls((), ())

    @classmethod
    def from_pairs(cls, points: Sequence[str], dist: Mapping[tuple[str, str], object]) -> "QMetricSpace":
        """Build from a mapping over unordered pairs (either orientation)."""
        pts = [str(p) for p in points]
        n = len(pts)
        m = [[Fraction(0)] * n for _ in range(n)]
        seen = {}
        for (p, q), v in dist.items():
            key = frozenset((str(p), str(q)))
            v = as_fraction(v)
            if key in seen and seen[key] != v:
                raise MetricError(f"conflicting distances for {p},{q}")
            seen[key] = v
        for i, j in combinations(range(n), 2):
            key = frozenset((pts[i], pts[j]))
            if key not in seen:
                raise MetricError(f"missing distance {pts[i]},{pts[j]}")
            m[i][j] = m[j][i] = seen[key]
        return cls(tuple(pts), tuple(tuple(r) for r in m))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p) -> bool:
        return p in self._index

    def index(self, p: str) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise MetricError(f"unknown point {p!r}") from None

    def d(self, p: str, q: str) -> Fraction:
        return self.matrix[self.index(p)][self.index(q)]

    def dist_to_set(self, p: str, S: Iterable[str]) -> Fraction | None:
        vals = [self.d(p, q) for q in S]
        return min(vals) if vals else None

    def diameter(self) -> Fraction:
        return max((v for r in self.matrix for v in r), default=Fraction(0))

    def restrict(self, ids: Iterable[str]) -> "QMetricSpace":
        ids = list(ids)
        ix = [self.index(p) for p in ids]
        return QMetricSpace(tuple(ids), tuple(tuple(self.matrix[i][j] for j in ix) for i in ix))

    def relabel(self, mapping: Mapping[str, str]) -> "QMetricSpace":
        return QMetricSpace(tuple(mapping.get(p, p) for p in self.points), self.matrix)

    def with_point(self, new_id: str, dists: Mapping[str, Fraction]) -> "QMetricSpace":
        """Append ``new_id`` with the given distances to every existing point."""
        new_id = str(new_id)
        if new_id in self._index:
            raise MetricError(f"point id {new_id!r} already used")
        col = [as_fraction(dists[p]) for p in self.points]
        rows = [r + (c,) for r, c in zip(self.matrix, col)]
        rows.append(tuple(col) + (Fraction(0),))
        return QMetricSpace(self.points + (new_id,), tuple(rows))

    def scaled_integers(self, extra: Iterable[Fraction] = ()) -> tuple[list[list[int]], int]:
        """Integer matrix ``D * s`` for the least common denominator ``s``."""
        s = 1
        for r in self.matrix:
            for v in r:
                s = lcm(s, v.denominator)
        for v in extra:
            s = lcm(s, as_fraction(v).denominator)
        return [[int(v * s) for v in r] for r in self.matrix], s

    def is_isometric_restriction(self, other: "QMetricSpace", mapping: Mapping[str, str] | None = None) -> bool:
        """True if every pair of ``other`` keeps its distance here (under ``mapping``)."""
        mp = mapping or {p: p for p in other.points}
        return all(
            self.d(mp[p], mp[q]) == other.d(p, q) for p, q in combinations(other.points, 2)
        )


@dataclass(frozen=True)
class Violation:
    kind: str  # "diagonal" | "asymmetric" | "nonpositive" | "triangle"
    points: tuple[str, ...]
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} {' '.join(self.points)}: {self.detail}"


def validate_metric(m: QMetricSpace) -> list[Violation]:
    """Every violated metric axiom, exactly.

    A triangle violation ``(a, b, c)`` means ``d(a,c) > d(a,b) + d(b,c)``.
    """
    out = []
    P, M = m.points, m.matrix
    n = len(P)
    for i in range(n):
        if M[i][i] != 0:
            out.append(Violation("diagonal", (P[i],), f"d={fmt_fraction(M[i][i])}"))
    for i, j in combinations(range(n), 2):
        if M[i][j] != M[j][i]:
            out.append(Violation("asymmetric", (P[i], P[j]), f"{fmt_fraction(M[i][j])} != {fmt_fraction(M[j][i])}"))
        if M[i][j] <= 0:
            out.append(Violation("nonpositive", (P[i], P[j]), f"d={fmt_fraction(M[i][j])}"))
    for i, k in combinations(range(n), 2):
        dik = M[i][k]
        for j in range(n):
            if j == i or j == k:
                continue
            if dik > M[i][j] + M[j][k]:
                out.append(
                    Violation(
                        "triangle",
                        (P[i], P[j], P[k]),
                        f"{fmt_fraction(dik)} > {fmt_fraction(M[i][j])} + {fmt_fraction(M[j][k])}",
                    )
                )
    return out


# -- Katětov types -------------------------------------------------------------


@dataclass(frozen=True)
class KatetovType:
    """A one-point extension prescribed on a finite support."""

    support: tuple[str, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(str(s) for s in self.support))
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))
        if len(self.support) != len(self.values):
            raise ContractError("support and values differ in length")
        if len(set(self.support)) != len(self.support):
            raise ContractError("support repeats a point")

    @classmethod
    def of(cls, mapping: Mapping[str, object]) -> "KatetovType":
        return cls(tuple(mapping), tuple(mapping.values()))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.support, self.values))

    def __str__(self) -> str:
        return ",".join(f"{s}:{fmt_fraction(v)}" for s, v in zip(self.support, self.values))


def type_problems(m: QMetricSpace, t: KatetovType) -> list[str]:
    """Reasons ``t`` cannot be realised over ``m`` (empty when realisable)."""
    probs = []
    for s in t.support:
        if s not in m:
            probs.append(f"support point {s!r} not in space")
    if probs:
        return probs
    if not t.support and len(m):
        probs.append("empty support over a non-empty space")
    for s, v in zip(t.support, t.values):
        if v <= 0:
            probs.append(f"value at {s} is not positive")
    for (s, v), (s2, v2) in combinations(zip(t.support, t.values), 2):
        d = m.d(s, s2)
        if abs(v - v2) > d:
            probs.append(f"|f({s}) - f({s2})| = {fmt_fraction(abs(v - v2))} > d = {fmt_fraction(d)}")
        if d > v + v2:
            probs.append(f"d({s},{s2}) = {fmt_fraction(d)} > f({s}) + f({s2}) = {fmt_fraction(v + v2)}")
    return probs


def extension_distances(m: QMetricSpace, t: KatetovType) -> dict[str, Fraction]:
    """``d(x, z) = min over support y of (f(y) + d(y, z))`` for every ``z``."""
    ix = [m.index(s) for s in t.support]
    out = {}
    for j, z in enumerate(m.points):
        out[z] = min(v + m.matrix[i][j] for i, v in zip(ix, t.values))
    return out


def min_closed(m: QMetricSpace, t: KatetovType) -> KatetovType:
    d = extension_distances(m, t)
    return KatetovType(t.support, tuple(d[s] for s in t.support))


def one_point_extend(m: QMetricSpace, t: KatetovType, new_id: str) -> QMetricSpace:
    """Add ``new_id`` realising the finitely supported type ``t``."""
    probs = type_problems(m, t)
    if probs:
        raise ContractError("unrealisable type: " + "; ".join(probs))
    if str(new_id) in m:
        raise MetricError(f"point id {new_id!r} already used")
    if not len(m):
        return QMetricSpace((str(new_id),), ((Fraction(0),),))
    return m.with_point(new_id, extension_distances(m, t))


# -- push-out ------------------------------------------------------------------


def pushout_amalgam(
    a: QMetricSpace,
    b1: QMetricSpace,
    b2: QMetricSpace,
    e1: Mapping[str, str],
    e2: Mapping[str, str],
) -> QMetricSpace:
    """Maximal amalgam of ``b1`` and ``b2`` over ``a``.

    Points are those of ``b1`` followed by the points of ``b2`` outside
    ``e2(a)``; ``e2(c)`` is identified with ``e1(c)``.  Cross distances are
    ``min over c in a of d(p, e1(c)) + d(e2(c), q)``.
    """
    if not len(a):
        raise ContractError("push-out over an empty space forces no cross distance")
    for name, e, b in (("e1", e1, b1), ("e2", e2, b2)):
        if set(e) != set(a.points):
            raise ContractError(f"{name} must be defined on every point of a")
        if len(set(e.values())) != len(e):
            raise ContractError(f"{name} is not injective")
        for c in a.points:
            if e[c] not in b:
                raise ContractError(f"{name}({c}) = {e[c]!r} not in target")
        for c, c2 in combinations(a.points, 2):
            if b.d(e[c], e[c2]) != a.d(c, c2):
                raise ContractError(f"{name} is not isometric on ({c},{c2})")
    img2 = set(e2.values())
    rest = [q for q in b2.points if q not in img2]
    clash = set(rest) & set(b1.points)
    if clash:
        raise MetricError(f"point ids {sorted(clash)} occur in both spaces outside the glued part")
    back = {e2[c]: e1[c] for c in a.points}
    pts = list(b1.points) + rest
    n1 = len(b1)
    n = len(pts)
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            M[i][j] = b1.matrix[i][j]
    for i, p in enumerate(rest, n1):
        for j, q in enumerate(rest, n1):
            M[i][j] = b2.d(p, q)
    glue = [(b1.index(e1[c]), b2.index(e2[c])) for c in a.points]
    for j, q in enumerate(rest, n1):
        qi = b2.index(q)
        for i in range(n1):
            v = min(b1.matrix[i][g1] + b2.matrix[g2][qi] for g1, g2 in glue)
            M[i][j] = M[j][i] = v
    return QMetricSpace(tuple(pts), tuple(tuple(r) for r in M))


# -- saturation ----------------------------------------------------------------


def iter_types(
    m: QMetricSpace, pool: Sequence[str], k: int, menu: Iterable[object]
) -> Iterator[tuple[KatetovType, dict[str, Fraction]]]:
    """Realisable types on supports from ``pool`` of size ``1..k``, values
    from ``menu``, each with its induced distance vector over ``m``.

    Canonical order: support size, support in ``pool`` order, then values in
    increasing menu order.  Types inducing an already-seen vector are skipped.
    """
    vals = sorted({as_fraction(v) for v in menu})
    if k < 1 or not vals:
        raise ContractError("need k >= 1 and a non-empty menu")
    if any(v <= 0 for v in vals):
        raise ContractError("menu values must be positive")
    seen = set()
    for s in range(1, min(k, len(pool)) + 1):
        for supp in combinations(pool, s):
            for combo in product(vals, repeat=s):
                t = KatetovType(supp, combo)
                if type_problems(m, t):
                    continue
                dv = extension_distances(m, t)
                key = tuple(dv[p] for p in m.points)
                if key in seen:
                    continue
                seen.add(key)
                yield t, dv


def fresh_ids(m: QMetricSpace, prefix: str, count: int, start: int = 0) -> list[str]:
    out, i = [], start
    taken = set(m.points)
    while len(out) < count:
        cand = f"{prefix}{i}"
        if cand not in taken:
            out.append(cand)
        i += 1
    return out


def qu_saturate(m: QMetricSpace, k: int, menu: Iterable[object], prefix: str = "q") -> QMetricSpace:
    """Add one point per realisable type (support size <= k, values from
    ``menu``) over the original ``m``.

    New points are mutually placed by their own support formula, so each is
    finitely supported over everything before it.
    """
    types = [t for t, _ in iter_types(m, m.points, k, menu)]
    out = m
    for t, pid in zip(types, fresh_ids(m, prefix, len(types))):
        out = one_point_extend(out, t, pid)
    return out


# -- text format ---------------------------------------------------------------


def format_metric(m: QMetricSpace, roles: Mapping[str, str] | None = None, header: str = "metric") -> str:
    """``points`` block (one id per line, optional ``role: ...``) then the
    upper triangle of the distance matrix, one ``p q n/d`` line per pair."""
    lines = [f"{header} {len(m)}"]
    for p in m.points:
        r = roles.get(p) if roles else None
        lines.append(f"{p} role: {r}" if r else p)
    lines.append("distances")
    for i, j in combinations(range(len(m)), 2):
        lines.append(f"{m.points[i]} {m.points[j]} {fmt_fraction(m.matrix[i][j])}")
    return "\n".join(lines) + "\n"


def parse_metric(text: str) -> tuple[QMetricSpace, dict[str, str]]:
    """Inverse of :func:`format_metric`; returns the space and its role tags."""
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return _parse_metric_lines(lines)[0:2]


def _parse_metric_lines(lines: list[str]):
    try:
        head = lines[0].split()
        n = int(head[-1])
    except (IndexError, ValueError):
        raise MetricError("metric file must start with '<header> <count>'") from None
    pts, roles = [], {}
    for ln in lines[1 : 1 + n]:
        pid, _, role = ln.partition(" role: ")
        pid = pid.strip()
        pts.append(pid)
        if role:
            roles[pid] = role.strip()
    if len(lines) <= 1 + n or lines[1 + n].strip() != "distances":
        raise MetricError("missing 'distances' section")
    npairs = n * (n - 1) // 2
    body = lines[2 + n : 2 + n + npairs]
    if len(body) != npairs:
        raise MetricError(f"expected {npairs} distance lines, got {len(body)}")
    dist = {}
    for ln in body:
        parts = ln.split()
        if len(parts) != 3:
            raise MetricError(f"bad distance line {ln!r}")
        dist[(parts[0], parts[1])] = as_fraction(parts[2])
    return QMetricSpace.from_pairs(pts, dist), roles, lines[2 + n + npairs :]
