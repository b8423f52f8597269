import itertools
import random

import pytest

from invbv.qfbv import _cdcl_py, sat
from invbv.qfbv.sat import SAT, UNKNOWN, UNSAT, sat_solve

SOLVERS = [_cdcl_py.CDCLSolver]
try:
    from invbv.qfbv._cdcl import CDCLSolver as Compiled
    SOLVERS.append(Compiled)
except ImportError:
    Compiled = None


def random_cnf(rng, n, m, k=3):
    return [[rng.choice((1, -1)) * v for v in rng.sample(range(1, n + 1), k)] for _ in range(m)]


def brute(n, clauses):
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(d) - 1] == (d > 0) for d in c) for c in clauses):
            return SAT
    return UNSAT


def pigeonhole(holes):
    pigeons = holes + 1
    v = lambda p, h: p * holes + h + 1
    cnf = [[v(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p, q in itertools.combinations(range(pigeons), 2):
            cnf.append([-v(p, h), -v(q, h)])
    return pigeons * holes, cnf


@pytest.mark.parametrize("cls", SOLVERS, ids=lambda c: c.__module__)
def test_random_3sat_matches_brute_force(cls):
    rng = random.Random(1)
    for _ in range(150):
        n = rng.randint(3, 10)
        cnf = random_cnf(rng, n, rng.randint(1, 5 * n))
        status, model = sat_solve(n, cnf, solver_class=cls)
        assert status == brute(n, cnf)
        if status == SAT:
            assert all(any(model[abs(d) - 1] == (d > 0) for d in c) for c in cnf)


@pytest.mark.parametrize("cls", SOLVERS, ids=lambda c: c.__module__)
@pytest.mark.parametrize("holes", [3, 5, 6])
def test_pigeonhole_unsat(cls, holes):
    n, cnf = pigeonhole(holes)
    assert sat_solve(n, cnf, solver_class=cls)[0] == UNSAT


@pytest.mark.parametrize("cls", SOLVERS, ids=lambda c: c.__module__)
def test_budget_gives_unknown(cls):
    n, cnf = pigeonhole(8)
    assert sat_solve(n, cnf, budget=10, solver_class=cls)[0] == UNKNOWN


@pytest.mark.parametrize("cls", SOLVERS, ids=lambda c: c.__module__)
def test_incremental_and_assumptions(cls):
    s = cls(seed=0)
    a, b, c = s.new_var(), s.new_var(), s.new_var()
    s.add_clause([a, b])
    s.add_clause([-a, c])
    assert s.solve(assumptions=[-b]) == SAT
    assert s.value(a) and s.value(c)
    assert s.solve(assumptions=[-b, -c]) == UNSAT
    # failing assumptions do not poison the instance
    assert s.solve() == SAT
    s.add_clause([-b])
    s.add_clause([-c])
    assert s.solve() == UNSAT
    assert s.solve() == UNSAT


@pytest.mark.parametrize("cls", SOLVERS, ids=lambda c: c.__module__)
def test_bad_literals(cls):
    s = cls()
    s.new_var()
    with pytest.raises(ValueError):
        s.add_clause([2])
    with pytest.raises(ValueError):
        s.add_clause([0])


@pytest.mark.skipif(Compiled is None, reason="extension not built")
def test_twins_agree_exactly():
    rng = random.Random(9)
    for i in range(60):
        n = rng.randint(20, 60)
        cnf = random_cnf(rng, n, int(n * 4.26))
        r1 = sat_solve(n, cnf, seed=i, solver_class=_cdcl_py.CDCLSolver)
        r2 = sat_solve(n, cnf, seed=i, solver_class=Compiled)
        assert r1 == r2


def test_backend_selection():
    assert sat.BACKEND in ("compiled", "python")
    assert sat.PyCDCLSolver is _cdcl_py.CDCLSolver
    if Compiled is not None:
        assert sat.CDCLSolver is Compiled or sat.BACKEND == "python"


def test_luby():
    assert [_cdcl_py.luby(2, i) for i in range(7)] == [1, 1, 2, 1, 1, 2, 4]
