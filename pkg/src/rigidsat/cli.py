"""Command-line front end: ``rigidsat graph ...`` and ``rigidsat metric ...``.

Every subcommand is deterministic.  The primary artefact goes to ``--out``
(or stdout); the audit report goes to ``--report`` (or stderr).  Exit status
is 0 when every audit passes, 1 when an audit fails and 2 on bad input or a
construction error.  ``--config FILE`` reads ``key = value`` lines whose keys
are flag names; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .automorphism import automorphisms, format_perm
from .errors import RigidsatError
from .graph import binary_rado, extension_defects, format_graph, parse_graph, saturate
from .metric import (
    KatetovType,
    QMetricSpace,
    as_fraction,
    format_metric,
    one_point_extend,
    parse_metric,
    pushout_amalgam,
    qu_saturate,
    validate_metric,
)
from .rigid import (
    DegreeSchedule,
    audit_tower,
    build_tower as build_graph_tower,
    format_tower as format_graph_tower,
    rigidify,
    rigidify_extension_failures,
    tower_rigidity_failures,
)
from .rtype import PointedSpace, RTypeSpec, make_gadget, mr_validate, rtype_saturate
from .tower import (
    RMatrix,
    audit_stage_rigidity,
    build_tower as build_metric_tower,
    default_base,
    format_tower as format_metric_tower,
    gadget_obstruction_failures,
    parse_tower,
    tower_invariant_failures,
)

EXIT_OK, EXIT_AUDIT, EXIT_ERROR = 0, 1, 2


class Result:
    """What a subcommand produced: an artefact, report lines and a verdict."""

    def __init__(self, artefact: str | None, report: list[str], ok: bool = True):
        self.artefact = artefact
        self.report = report
        self.ok = ok


# -- config ------------------------------------------------------------------


def read_config(path: str) -> list[str]:
    """Turn ``key = value`` lines into ``--key value`` tokens."""
    tokens = []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise RigidsatError(f"{path}:{n}: expected 'key = value'")
        tokens += ["--" + key.strip().replace("_", "-"), value.strip()]
    return tokens


def expand_config(argv: Sequence[str]) -> list[str]:
    argv = list(argv)
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise RigidsatError("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    head = rest[:2]
    return head + read_config(path) + rest[2:]


# -- helpers ------------------------------------------------------------------


def _load_graph(spec: str):
    """``radoN`` or ``radoN+K`` (saturated to size K), or a graph file."""
    if spec.startswith("rado"):
        body = spec[4:]
        n, _, k = body.partition("+")
        g = binary_rado(int(n))
        return saturate(g, int(k)) if k else g
    return parse_graph(Path(spec).read_text())


def _load_metric(path: str):
    return parse_metric(Path(path).read_text())


def _mapping(text: str) -> dict[str, str]:
    out = {}
    for item in text.split(","):
        a, sep, b = item.partition(":")
        if not sep:
            raise RigidsatError(f"bad mapping entry {item!r}; expected 'a:b'")
        out[a.strip()] = b.strip()
    return out


def _menu(text: str) -> list:
    return [as_fraction(v.strip()) for v in text.split(",") if v.strip()]


def _metric_check(m: QMetricSpace) -> tuple[list[str], bool]:
    viol = validate_metric(m)
    return [f"points={len(m)}", f"violations={len(viol)}"] + [f"violation {v}" for v in viol], not viol


# -- graph subcommands ----------------------------------------------------------


def cmd_graph_rado(a) -> Result:
    g = binary_rado(a.n)
    if a.k:
        g = saturate(g, a.k)
    defects = extension_defects(g, a.k, within=range(a.n)) if a.k else []
    rep = [f"vertices={g.n}", f"edges={len(g.edges)}", f"defects={len(defects)}"]
    return Result(format_graph(g), rep, not defects)


def cmd_graph_rigidify(a) -> Result:
    base = _load_graph(a.base)
    sched = DegreeSchedule.parse(a.schedule)
    out, st = rigidify(base, sched, a.steps, a.fingerprint_size)
    rep = [
        f"base_vertices={base.n}",
        f"vertices={out.n}",
        f"edges={len(out.edges)}",
        f"schedule={sched}",
        f"exact_prefix={st.fingerprint.exact_prefix}",
    ]
    for n, (pair, sp, w) in enumerate(zip(st.pair_enum, st.setpair_enum, st.witnesses), 1):
        sp_txt = "-" if sp is None else f"{sorted(sp[0])}|{sorted(sp[1])}"
        rep.append(f"step {n} pair={pair[0]},{pair[1]} setpair={sp_txt} witness={'-' if w is None else w}")
    movers, fails = rigidify_extension_failures(base, out, st, cap=a.cap)
    rep.append(f"movers={movers}")
    rep.append(f"extending_movers={len(fails)}")
    rep += [f"failure {f}" for f in fails]
    return Result(format_graph(out), rep, not fails)


def cmd_graph_tower(a) -> Result:
    base = _load_graph(a.base)
    family = [DegreeSchedule.parse(s) for s in a.family.split(";")]
    tw = build_graph_tower(base, family, a.layer_size, a.layers, a.k)
    audit = audit_tower(tw, a.k)
    rep = [f"vertices={tw.top.n}", f"layers={tw.t}"]
    ok = True
    for name, fails in audit.items():
        rep.append(f"{name} {'pass' if not fails else 'FAIL'}")
        rep += [f"failure {name}: {f}" for f in fails]
        ok = ok and not fails
    if tw.top.n <= a.cap:
        rf = tower_rigidity_failures(tw, cap=a.cap)
        rep.append(f"rigidity {'pass' if not rf else 'FAIL'}")
        rep += [f"failure rigidity: {f}" for f in rf]
        ok = ok and not rf
    else:
        rep.append(f"rigidity skipped vertices={tw.top.n} > cap={a.cap}")
    return Result(format_graph_tower(tw), rep, ok)


def cmd_graph_aut(a) -> Result:
    g = _load_graph(a.graph)
    aut = automorphisms(g, cap=a.cap)
    lines = [f"order={aut.order}"]
    if a.list:
        lines += [format_perm(p) for p in aut]
    return Result("\n".join(lines) + "\n", [], True)


def cmd_graph_defects(a) -> Result:
    g = _load_graph(a.graph)
    within = range(a.within) if a.within is not None else None
    ds = extension_defects(g, a.k, within=within)
    lines = [f"defects={len(ds)}"] + [str(q) for q in ds]
    return Result("\n".join(lines) + "\n", [], not ds)


# -- metric subcommands ---------------------------------------------------------


def cmd_metric_validate(a) -> Result:
    m, _ = _load_metric(a.space)
    lines, ok = _metric_check(m)
    return Result("\n".join(lines) + "\n", [], ok)


def cmd_metric_extend(a) -> Result:
    m, roles = _load_metric(a.space)
    t = KatetovType.of(_mapping(a.type))
    out = one_point_extend(m, t, a.id)
    rep, ok = _metric_check(out)
    return Result(format_metric(out, roles), rep, ok)


def cmd_metric_pushout(a) -> Result:
    sa, _ = _load_metric(a.a)
    b1, _ = _load_metric(a.b1)
    b2, _ = _load_metric(a.b2)
    out = pushout_amalgam(sa, b1, b2, _mapping(a.e1), _mapping(a.e2))
    rep, ok = _metric_check(out)
    return Result(format_metric(out), rep, ok)


def cmd_metric_qu(a) -> Result:
    m, _ = _load_metric(a.space)
    out = qu_saturate(m, a.k, _menu(a.menu), a.prefix)
    rep, ok = _metric_check(out)
    rep.insert(0, f"added={len(out) - len(m)}")
    return Result(format_metric(out), rep, ok)


def cmd_metric_rtype(a) -> Result:
    m, _ = _load_metric(a.space)
    r = RTypeSpec(as_fraction(a.r))
    out = rtype_saturate(PointedSpace(m, a.special), r, a.k, _menu(a.menu), a.prefix)
    rep, ok = _metric_check(out.space)
    floor = mr_validate(out, r)
    rep += [f"added={len(out.space) - len(m)}", f"r_floor={'pass' if floor else 'FAIL'}"]
    return Result(format_metric(out.space, {a.special: "special"}), rep, ok and floor)


def cmd_metric_gadget(a) -> Result:
    g = make_gadget(a.n, as_fraction(a.L))
    rep, ok = _metric_check(g.space)
    return Result(format_metric(g.space), rep, ok)


def _tower_report(tw, beta: int) -> tuple[list[str], bool]:
    inv = tower_invariant_failures(tw)
    audit = audit_stage_rigidity(tw, beta)
    gad = gadget_obstruction_failures(tw)
    rep = [f"stages={tw.t}", f"points={len(tw.top)}", f"invariants failures={len(inv)}"]
    rep += [f"failure {f}" for f in inv]
    rep += audit.text().rstrip("\n").splitlines()
    rep.append(f"gadget failures={len(gad)}")
    rep += [f"failure {f}" for f in gad]
    return rep, not (inv or audit.failures or gad)


def cmd_metric_tower(a) -> Result:
    base = _load_metric(a.base)[0] if a.base else default_base()
    tw = build_metric_tower(
        base, RMatrix.parse(a.rmatrix), a.stages, a.pairs, a.rounds, _menu(a.menu), a.fills, a.support
    )
    rep, ok = _tower_report(tw, a.beta)
    return Result(format_metric_tower(tw), rep, ok)


def cmd_metric_audit(a) -> Result:
    tw = parse_tower(Path(a.tower).read_text())
    rep, ok = _tower_report(tw, a.beta)
    return Result("\n".join(rep) + "\n", [], ok)


# -- parser ---------------------------------------------------------------------


def _io(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--out", help="write the artefact here instead of stdout")
    p.add_argument("--report", help="write the report here instead of stderr")
    p.add_argument("--config", help="key = value file supplying flag defaults")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rigidsat", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = ap.add_subparsers(dest="group", required=True)

    gp = top.add_parser("graph", help="graph constructions and audits")
    gs = gp.add_subparsers(dest="cmd", required=True)

    p = gs.add_parser("rado", help="binary Rado graph, optionally saturated")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=0, help="saturate for queries up to this size")
    p.set_defaults(func=cmd_graph_rado)

    p = gs.add_parser("rigidify", help="attach a rigidifying fingerprint")
    p.add_argument("--base", required=True, help="graph file, radoN or radoN+K")
    p.add_argument("--schedule", required=True, help="strictly increasing degrees, e.g. 2,3,4")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--fingerprint-size", type=int)
    p.add_argument("--cap", type=int, default=64)
    p.set_defaults(func=cmd_graph_rigidify)

    p = gs.add_parser("tower", help="layered rigid graph tower")
    p.add_argument("--base", required=True)
    p.add_argument("--family", required=True, help="schedules separated by ';'")
    p.add_argument("--layer-size", type=int, required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--cap", type=int, default=24)
    p.set_defaults(func=cmd_graph_tower)

    p = gs.add_parser("aut", help="automorphism group order")
    p.add_argument("graph", help="graph file or radoN")
    p.add_argument("--list", action="store_true", help="also list every automorphism")
    p.add_argument("--cap", type=int, default=24)
    p.set_defaults(func=cmd_graph_aut)

    p = gs.add_parser("defects", help="extension defects of bounded size")
    p.add_argument("graph")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--within", type=int, help="only queries over vertices 0..N-1")
    p.set_defaults(func=cmd_graph_defects)

    mp = top.add_parser("metric", help="rational metric constructions and audits")
    ms = mp.add_subparsers(dest="cmd", required=True)

    p = ms.add_parser("validate", help="triangle audit of a metric file")
    p.add_argument("space")
    p.set_defaults(func=cmd_metric_validate)

    p = ms.add_parser("extend", help="one-point extension by a finite-support type")
    p.add_argument("space")
    p.add_argument("--type", required=True, help="support values, e.g. a:1,b:3/2")
    p.add_argument("--id", required=True)
    p.set_defaults(func=cmd_metric_extend)

    p = ms.add_parser("pushout", help="push-out amalgamation")
    p.add_argument("--a", required=True)
    p.add_argument("--b1", required=True)
    p.add_argument("--b2", required=True)
    p.add_argument("--e1", required=True, help="a-point:b1-point pairs")
    p.add_argument("--e2", required=True, help="a-point:b2-point pairs")
    p.set_defaults(func=cmd_metric_pushout)

    p = ms.add_parser("qu", help="one bounded saturation round")
    p.add_argument("space")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--menu", required=True)
    p.add_argument("--prefix", default="q")
    p.set_defaults(func=cmd_metric_qu)

    p = ms.add_parser("rtype", help="saturation round keeping an r-floor")
    p.add_argument("space")
    p.add_argument("--special", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--menu", required=True)
    p.add_argument("--prefix", default="e")
    p.set_defaults(func=cmd_metric_rtype)

    p = ms.add_parser("gadget", help="obstruction gadget")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", required=True)
    p.set_defaults(func=cmd_metric_gadget)

    p = ms.add_parser("tower", help="staged metric tower with audits")
    p.add_argument("--base", help="metric file for X_0 (default: built-in 4-point base)")
    p.add_argument("--rmatrix", default="2,5,11;3,7,13", help="rows split by ';', entries by ','")
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--pairs", type=int, default=2, help="pair budget per stage")
    p.add_argument("--fills", type=int, default=2, help="fill budget per stage")
    p.add_argument("--rounds", type=int, default=1, help="fill rounds per stage")
    p.add_argument("--menu", default="1/2,1")
    p.add_argument("--support", type=int, default=1, help="fill support bound")
    p.add_argument("--beta", type=int, default=0)
    p.set_defaults(func=cmd_metric_tower)

    p = ms.add_parser("audit", help="re-audit a tower file")
    p.add_argument("tower")
    p.add_argument("--beta", type=int, default=0)
    p.set_defaults(func=cmd_metric_audit)

    for sub in (*gs.choices.values(), *ms.choices.values()):
        _io(sub)
    return ap


def _emit(text: str, path: str | None, stream) -> None:
    if path:
        Path(path).write_text(text)
    else:
        stream.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = expand_config(argv)
    except (OSError, RigidsatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    args = build_parser().parse_args(argv)
    func: Callable[[argparse.Namespace], Result] = args.func
    try:
        res = func(args)
    except (RigidsatError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if res.artefact is not None:
        _emit(res.artefact, args.out, sys.stdout)
    if res.report:
        _emit("\n".join(res.report) + "\n", args.report, sys.stderr)
    return EXIT_OK if res.ok else EXIT_AUDIT


if __name__ == "__main__":
    sys.exit(main())
