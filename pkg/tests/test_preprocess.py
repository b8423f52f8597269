import random

import pytest

from invbv import term as T
from invbv.cegqi.loop import SAT, UNSAT, cegqi_check
from invbv.cegqi.preprocess import UnsupportedInput, der, nnf, prenex, split_extracts, to_problem

from generators import random_formula

W = 4
a, b, x, y = (T.var(n, W) for n in "abxy")


def _decide(f):
    p = to_problem(f)
    v = cegqi_check(p, "k", budget=256)
    ans = v.status
    if p.flip:
        ans = {SAT: UNSAT, UNSAT: SAT}.get(ans, ans)
    return ans, p, v


def test_nnf_pushes_negation_through_quantifiers():
    f = T.not_(T.forall([x], T.ult(x, a)))
    g = nnf(f)
    assert g.op == "exists" and g.args[-1] is T.not_(T.ult(x, a))


def test_prenex_existential_first():
    f = T.and_(T.forall([x], T.ult(x, a)), T.exists([y], T.eq(y, a)))
    blocks, m = prenex(f)
    assert [q for q, _ in blocks] == ["exists", "forall"]
    assert len(T.free_vars(m)) == 3


def test_der_eliminates_guarded_variable():
    # forall x. x != a + b or P[x]  becomes P[a + b]
    body = T.or_(T.ne(x, T.add(a, b)), T.ult(x, T.const(5, W)))
    m, xs, gone = der(body, [x])
    assert xs == [] and gone[x] is T.add(a, b)
    assert m is T.ult(T.add(a, b), T.const(5, W))


def test_der_keeps_single_literal():
    m, xs, _ = der(T.ne(x, a), [x])
    assert xs == [x]


def test_extract_split():
    z = T.var("z", 8)
    m = T.or_(T.ne(T.extract(z, 7, 4), a), T.ne(T.extract(z, 3, 0), b))
    m2, xs, regions = split_extracts(m, [z])
    assert len(xs) == 2 and all(v.width == 4 for v in xs)
    assert not any(n.op == "extract" for n in T.postorder(m2))
    v = cegqi_check(to_problem(T.forall([z], m)), "k")
    assert v.status == UNSAT and v.stats["instantiations"] == 1


def test_sum_rewrite_in_problem():
    p = to_problem(T.forall([x], T.ne(T.add(x, x), a)))
    (x2,) = p.forall_vars
    assert T.occurrences(x2, p.matrix) == 1


def test_closed_forall_exists_is_flipped():
    f = T.forall([x], T.exists([y], T.eq(T.add(x, y), T.const(0, W))))
    ans, p, _ = _decide(f)
    assert p.flip and ans == SAT
    g = T.forall([x], T.exists([y], T.eq(T.mul(x, y), T.const(1, W))))
    assert _decide(g)[0] == UNSAT


def test_two_alternations_rejected():
    z = T.var("z", W)
    f = T.exists([a], T.forall([x], T.exists([y], T.eq(T.add(x, y), a))))
    with pytest.raises(UnsupportedInput):
        to_problem(f)
    g = T.forall([x], T.exists([y], T.forall([z], T.eq(T.add(x, y), z))))
    with pytest.raises(UnsupportedInput):
        to_problem(g)


def test_boolean_binders_rejected():
    p = T.var("p", 0)
    with pytest.raises(UnsupportedInput):
        to_problem(T.forall([p], p))


def test_random_quantified_inputs_against_evaluation():
    rng = random.Random(31)
    w = 2
    p_ = T.var("p", w)
    u, v = T.var("u", w), T.var("v", w)
    for _ in range(120):
        inner = random_formula(rng, [p_, u, v], w, rng.randint(1, 5))
        shape = rng.randrange(4)
        if shape == 0:
            f = T.forall([u], inner)
        elif shape == 1:
            f = T.exists([v], T.forall([u], inner))
        elif shape == 2:
            f = T.not_(T.exists([u], inner))
        else:
            f = T.and_(T.forall([u], inner), T.exists([v], T.ult(v, p_)))
        closed = T.exists(sorted(T.free_vars(f), key=lambda t: t.name), f)
        want = T.evaluate(closed, {})
        ans, _, _ = _decide(closed)
        assert ans == (SAT if want else UNSAT), f
