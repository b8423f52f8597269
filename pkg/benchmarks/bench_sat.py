"""Compiled vs pure-Python CDCL on random 3-SAT, pigeonhole and bit-blasted BV queries.

    python benchmarks/bench_sat.py [--repeat N] [--seed S]
"""
import argparse
import itertools
import random
import statistics
import time

from invbv import term as T
from invbv.qfbv import _cdcl_py
from invbv.qfbv.check import check
from invbv.qfbv.sat import SAT, UNSAT, sat_solve

try:
    from invbv.qfbv._cdcl import CDCLSolver as CompiledSolver
except ImportError:
    CompiledSolver = None


def random_3sat(rng, n, ratio=4.26):
    m = int(n * ratio)
    return n, [[rng.choice((1, -1)) * v for v in rng.sample(range(1, n + 1), 3)] for _ in range(m)]


def pigeonhole(holes):
    pigeons = holes + 1
    v = lambda p, h: p * holes + h + 1
    cnf = [[v(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            cnf.append([-v(p, h), -v(q, h)])
    return pigeons * holes, cnf


def bv_queries():
    x, y = T.var("x", 16), T.var("y", 16)
    c = T.const(0x1235, 16)
    return {
        "mul-inverse w16": T.eq(T.mul(x, c), T.const(1, 16)),
        "udiv bound w16": T.and_(T.ult(y, x), T.ne(T.udiv(x, y), T.const(0, 16)),
                                 T.eq(T.urem(x, y), T.add(y, T.const(1, 16)))),
        "mul commutes w8": T.ne(T.mul(T.var("p", 8), T.var("q", 8)),
                                T.mul(T.var("q", 8), T.var("p", 8))),
    }


def timed(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    solvers = [("python", _cdcl_py.CDCLSolver)]
    if CompiledSolver is not None:
        solvers.insert(0, ("compiled", CompiledSolver))
    else:
        print("compiled extension not built; timing the pure-Python solver only")

    rng = random.Random(args.seed)
    cases = [(f"3-SAT n={n}", random_3sat(rng, n)) for n in (50, 100, 150)]
    cases += [(f"pigeonhole {h}", pigeonhole(h)) for h in (5, 6, 7)]

    print(f"{'instance':<20} " + " ".join(f"{name:>12}" for name, _ in solvers) + f" {'speedup':>8}  result")
    for label, (n, cnf) in cases:
        row, result = [], None
        for _, cls in solvers:
            t, (status, _) = timed(lambda: sat_solve(n, cnf, solver_class=cls), args.repeat)
            row.append(t)
            result = {SAT: "sat", UNSAT: "unsat"}.get(status, "unknown")
        _print_row(label, row, result)
    for label, phi in bv_queries().items():
        row, result = [], None
        for _, cls in solvers:
            t, v = timed(lambda: check(phi, solver_class=cls), args.repeat)
            row.append(t)
            result = v.status
        _print_row(label, row, result)


def _print_row(label, row, result):
    speed = f"{row[-1] / row[0]:>7.1f}x" if len(row) > 1 and row[0] > 0 else f"{'-':>8}"
    print(f"{label:<20} " + " ".join(f"{t:>11.4f}s" for t in row) + f" {speed}  {result}")


if __name__ == "__main__":
    main()
