import random

import numpy as np
import pytest

from invbv import term as T
from invbv.rewrite import simplify
from invbv.vectorized import grid, veval

from generators import random_formula

a, b, x, y = (T.var(n, 4) for n in "abxy")


def test_hash_consing():
    assert T.add(a, b) is T.add(a, b)
    assert T.add(a, b) is not T.add(b, a)
    assert T.var("a", 4) is a
    assert T.var("a", 5) is not a


def test_constant_folding():
    assert T.add(T.const(7, 4), T.const(12, 4)) is T.const(3, 4)
    assert T.ult(T.const(1, 4), T.const(2, 4)) is T.TRUE
    assert T.udiv(T.const(3, 4), T.const(0, 4)) is T.const(15, 4)


def test_sort_errors():
    with pytest.raises(T.SortError):
        T.add(a, T.var("c", 3))
    with pytest.raises(T.SortError):
        T.not_(a)
    with pytest.raises(T.SortError):
        T.extract(a, 4, 0)
    with pytest.raises(T.SortError):
        T.substitute(T.eq(a, b), {a: T.var("z", 5)})


def test_free_vars_and_occurrences():
    f = T.forall([x], T.eq(T.add(x, a), T.add(a, b)))
    assert T.free_vars(f) == {a, b}
    assert T.occurrences(a, f.args[-1]) == 2
    assert T.occurrences(x, f) == 0


def test_substitute_respects_binders():
    f = T.and_(T.eq(x, a), T.exists([x], T.eq(x, b)))
    g = T.substitute(f, {x: T.const(1, 4), b: a})
    assert g is T.and_(T.eq(T.const(1, 4), a), T.exists([x], T.eq(x, a)))


def test_substitute_is_simultaneous():
    g = T.substitute(T.eq(a, b), {a: b, b: a})
    assert g is T.eq(b, a)


def test_choice_smallest_witness():
    c = T.choice(y, T.ugt(T.mul(y, T.const(3, 4)), T.const(10, 4)))
    # 3*y >u 10 first holds at y = 4
    assert T.evaluate(c, {}) == 4
    none = T.choice(y, T.ult(y, T.const(0, 4)))
    assert T.evaluate(none, {}) == 0


def test_nested_same_binder():
    e = T.var("@e", 4)
    inner = T.choice(e, T.ugt(e, a))
    outer = T.choice(e, T.eq(e, T.add(inner, T.const(1, 4))))
    for av in range(16):
        want = (av + 2) % 16 if av < 15 else 1
        assert T.evaluate(outer, {a: av}) == want


def test_quantifier_evaluation():
    f = T.forall([x], T.exists([y], T.eq(T.add(x, y), a)))
    assert T.evaluate(f, {a: 3}) is True
    g = T.exists([x], T.eq(T.mul(x, T.const(2, 4)), a))
    assert T.evaluate(g, {a: 3}) is False
    with pytest.raises(T.EvaluationError):
        T.evaluate(T.exists([T.var("big", 9)], T.TRUE), {}, cap=8)


def _truth_table(f, vs):
    env, n = grid(vs)
    return np.broadcast_to(np.asarray(veval(f, env)), (n,))


def test_vectorized_agrees_with_scalar():
    rng = random.Random(11)
    vs = [T.var("p", 3), T.var("q", 3)]
    for _ in range(150):
        f = random_formula(rng, vs, 3, rng.randint(1, 6))
        table = _truth_table(f, vs)
        env, n = grid(vs)
        for i in range(0, n, 7):
            interp = {v: int(env[v][i]) for v in vs}
            assert T.evaluate(f, interp) == bool(table[i]), f


def test_simplify_preserves_meaning():
    rng = random.Random(5)
    vs = [T.var("p", 3), T.var("q", 3)]
    for _ in range(300):
        f = random_formula(rng, vs, 3, rng.randint(1, 8))
        g = simplify(f)
        assert T.free_vars(g) <= T.free_vars(f)
        assert (_truth_table(f, vs) == _truth_table(g, vs)).all(), (f, g)


def test_simplify_collects_sums():
    assert simplify(T.add(x, x)) is T.mul(T.const(2, 4), x) or simplify(T.add(x, x)) is T.mul(x, T.const(2, 4))
    assert simplify(T.add(x, T.neg(x))) is T.const(0, 4)


def test_literals_polarity():
    f = T.implies(T.eq(a, b), T.ult(a, b))
    lits = set(T.literals(f))
    assert T.Literal(False, T.eq(a, b)) in lits
    assert T.Literal(True, T.ult(a, b)) in lits
    both = set(T.literals(T.iff(T.eq(a, b), T.TRUE)))
    assert {T.Literal(True, T.eq(a, b)), T.Literal(False, T.eq(a, b))} <= both


def test_printing():
    f = T.forall([x], T.not_(T.eq(T.add(x, a), b)))
    assert T.to_smtlib(f) == "(forall ((x (_ BitVec 4))) (not (= (bvadd x a) b)))"
    assert T.symbol("@k1") == "@k1"
    assert T.symbol("let") == "|let|"
    assert T.to_smtlib(T.extract(a, 2, 1)) == "((_ extract 2 1) a)"
