import random

import pytest

from invbv import term as T
from invbv.sexpr import ParseError
from invbv.smtlib import Unsupported, parse, print_script, script_for

from generators import random_formula

HEAD = "(set-logic BV)\n(declare-fun s () (_ BitVec 4))\n(declare-fun t () (_ BitVec 4))\n"
s4, t4 = T.var("s", 4), T.var("t", 4)


def one(body, head=HEAD):
    return parse(head + f"(assert {body})\n(check-sat)\n").assertions[0]


def test_motivating_formula():
    f = one("(forall ((x (_ BitVec 4))) (distinct (bvadd x s) t))")
    x = T.var("x", 4)
    assert f is T.forall([x], T.ne(T.add(x, s4), t4))


def test_constants():
    assert one("(= s (_ bv5 4))") is T.eq(s4, T.const(5, 4))
    assert one("(= s #xA)") is T.eq(s4, T.const(10, 4))
    assert one("(= s #b0011)") is T.eq(s4, T.const(3, 4))


def test_derived_operators():
    assert one("(= (bvsub s t) s)") is T.eq(T.sub(s4, t4), s4)
    assert one("(bvule s t)") is T.ule(s4, t4)
    f = one("(= (bvxor s t) #b0110)")
    for sv in range(16):
        for tv in (0, 5, 9):
            assert T.evaluate(f, {s4: sv, t4: tv}) == ((sv ^ tv) == 6)
    z = one("(= ((_ sign_extend 4) s) #xF8)")
    assert T.evaluate(z, {s4: 8}) and not T.evaluate(z, {s4: 0})
    assert one("(= ((_ zero_extend 0) s) t)") is T.eq(s4, t4)


def test_let_and_chains():
    f = one("(let ((u (bvadd s t)) (v s)) (= u v u))")
    u = T.add(s4, t4)
    assert f is T.and_(T.eq(u, s4), T.eq(s4, u))
    assert one("(let ((s t)) (= s t))") is T.eq(t4, t4)
    g = one("(=> (= s t) (bvult s t) (= s s))")
    assert g is T.implies(T.eq(s4, t4), T.implies(T.ult(s4, t4), T.eq(s4, s4)))


def test_script_structure():
    sc = parse(HEAD + "(set-info :status sat)(assert (= s t))(check-sat)(exit)(assert foo)")
    assert sc.logic == "BV" and list(sc.decls) == ["s", "t"]
    assert sc.check_sat and len(sc.assertions) == 1
    sc2 = parse("(set-logic QF_BV)(declare-const a (_ BitVec 64))(assert (= a a))")
    assert sc2.decls["a"].width == 64


@pytest.mark.parametrize("text, msg, line, col, cls", [
    ("(set-logic BV)\n(assert (bvfoo #b1))", "unsupported operator", 2, 9, Unsupported),
    ("(set-logic BV)\n(declare-fun a () (_ BitVec 65))", "exceeds", 2, 19, Unsupported),
    ("(set-logic BV)\n(declare-fun f ((_ BitVec 4)) (_ BitVec 4))", "uninterpreted", 2, 1, Unsupported),
    ("(set-logic LIA)", "unsupported logic", 1, 12, Unsupported),
    ("(set-logic BV)\n(push 1)", "unsupported command", 2, 1, Unsupported),
    ("(set-logic BV)\n  (assert (= a b))", "unknown symbol", 2, 14, ParseError),
    ("(set-logic BV)\n(declare-fun a () (_ BitVec 4))\n(assert (= a #b101))", "ill-sorted", 3, 9, ParseError),
    ("(set-logic BV)\n(assert (= #b1 #b1)", "unbalanced", 2, 1, ParseError),
    ("(set-logic BV)\n(declare-fun @k () Bool)", "reserved", 2, 14, ParseError),
    ("(declare-fun a () Bool)", "missing set-logic", 1, 1, ParseError),
    ("(set-logic QF_BV)\n(assert (forall ((x (_ BitVec 2))) (= x x)))", "QF_BV", 2, 1, ParseError),
    ("(set-logic BV)\n(assert (! true :named a))", "annotations", 2, 9, Unsupported),
])
def test_diagnostics(text, msg, line, col, cls):
    with pytest.raises(cls) as ei:
        parse(text)
    e = ei.value
    assert msg in str(e)
    assert (e.line, e.col) == (line, col), str(e)
    assert f"{line}:{col}" in str(e)


def test_round_trip_generated_scripts():
    rng = random.Random(77)
    n = 0
    for i in range(520):
        w = rng.randint(1, 8)
        vs = [T.var(f"v{j}", w) for j in range(3)]
        f = random_formula(rng, vs, w, rng.randint(1, 8))
        if rng.random() < 0.4:
            f = T.forall([vs[0]], f)
        if rng.random() < 0.2:
            f = T.exists([vs[1]], f)
        sc = script_for(f)
        text = print_script(sc)
        back = parse(text)
        assert back.same_as(sc), text
        assert print_script(back) == text
        n += 1
    assert n >= 500


def test_quoted_symbols_round_trip():
    v = T.var("has space", 3)
    sc = script_for(T.ult(v, T.const(2, 3)))
    text = print_script(sc)
    assert "|has space|" in text
    assert parse(text).same_as(sc)
