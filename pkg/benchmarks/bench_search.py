"""Time the compiled and pure-Python search kernels on the same workloads.

    python3 benchmarks/bench_search.py [--repeat N]

Each workload is run on both backends; results must agree exactly.
"""

from __future__ import annotations

import argparse
import time

from rigidsat import _search
from rigidsat.automorphism import automorphisms
from rigidsat.graph import Graph, binary_rado, saturate
from rigidsat.rtype import isometric_embeddings
from rigidsat.tower import RMatrix, build_tower, default_base


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def complete(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def workloads():
    sat = saturate(binary_rado(8), 2)
    tw = build_tower(default_base(), RMatrix.parse("2,5,11;3,7,13"), 1, 2, 2, ["1/2", "1"], 10)
    top = tw.top
    yield "aut Petersen (120)", lambda b: automorphisms(petersen(), backend=b).order
    yield "aut K7 (5040)", lambda b: automorphisms(complete(7), backend=b).order
    yield "aut saturated rado8 (30 vertices)", lambda b: automorphisms(sat, cap=64, backend=b).order
    yield f"self-isometries of a {len(top)}-point tower", lambda b: len(isometric_embeddings(top, top, backend=b))


def bench(fn, backend: str, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"] + (["cython"] if _search.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled kernel not built; timing the Python backend only")
    print(f"{'workload':44s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, fn in workloads():
        times, outs = [], []
        for b in backends:
            t, o = bench(fn, b, args.repeat)
            times.append(t)
            outs.append(o)
        if len(set(map(repr, outs))) != 1:
            raise SystemExit(f"backends disagree on {name}: {outs}")
        speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
        print(f"{name:44s} " + " ".join(f"{t * 1e3:8.1f}ms" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
