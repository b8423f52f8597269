import itertools
import random

import pytest

from invbv import catalog, term as T, verifier
from invbv.catalog import CATALOG, CatalogMiss, IcEntry, IcKey

# one-node mutations applied to a built condition
FLIP = {"ult": "ule", "ule": "ult", "slt": "sle", "sle": "slt", "bvand": "bvor", "bvor": "bvand",
        "and": "or", "or": "and", "ugt": "uge", "uge": "ugt", "sgt": "sge", "sge": "sgt"}


def mutate(f):
    for n in T.postorder(f):
        if n.op in FLIP:
            repl = T.mk(FLIP[n.op], *n.args, payload=n.payload)
            return _replace(f, n, repl)
    if f.op == "not":
        return f.args[0]
    return T.not_(f)


def _replace(f, old, new):
    memo = {}
    for n in T.postorder(f):
        if n is old:
            memo[n] = new
        elif not n.args:
            memo[n] = n
        else:
            memo[n] = T.mk(n.op, *(memo[a] for a in n.args), payload=n.payload)
    return memo[f]


def test_catalog_size_and_keys():
    assert len(CATALOG) == 200
    ops = {k.op for k in CATALOG}
    assert {"mul", "urem", "udiv", "and", "or", "lshr", "ashr", "shl", "concat"} <= ops
    for k in CATALOG:
        assert len({r for (o, s, r) in CATALOG if (o, s) == (k.op, k.side)}) == 10


def test_key_parse():
    assert IcKey.parse("udiv:right:sge") == IcKey("udiv", "right", "sge")
    with pytest.raises(ValueError):
        IcKey.parse("udiv:right")
    with pytest.raises(CatalogMiss):
        catalog.lookup(IcKey("mul", "right", "eq"))


def test_table_cells():
    s, t = T.var("s", 4), T.var("t", 4)
    c = catalog.lookup(IcKey("mul", "left", "eq")).condition(s, t)
    assert c is T.eq(T.band(T.bor(T.neg(s), s), t), t)
    ult = catalog.lookup(IcKey("var", "unary", "ult")).condition(None, t)
    assert ult is T.ne(t, T.const(0, 4))


def test_conditions_are_free_of_x():
    for k in CATALOG:
        x = T.var("x", 4)
        for wx, ws, wt, lo in verifier._shapes(k, 3):
            s = T.var("s", ws) if ws else None
            c = catalog.lookup(k).condition(s, T.var("t", wt), x_width=wx)
            assert x not in T.free_vars(c)


@pytest.mark.parametrize("w", [1, 2, 3, 4, 5])
def test_every_row_verifies(w):
    reports = verifier.verify_all([w])
    bad = [r for r in reports if r.status != "verified"]
    assert not bad, bad[:3]


def test_brute_force_cell_by_hand():
    # independent of the vectorized sweep: scalar loops at width 3
    key = IcKey("urem", "right", "ult")
    e = catalog.lookup(key)
    s, t = T.var("s", 3), T.var("t", 3)
    cond = e.condition(s, t)
    for sv, tv in itertools.product(range(8), repeat=2):
        solvable = any((sv if xv == 0 else sv % xv) < tv for xv in range(8))
        assert T.evaluate(cond, {s: sv, t: tv}) == solvable


@pytest.mark.parametrize("key", ["mul:left:ult", "lshr:right:slt", "concat:left:uge"])
def test_mutation_is_caught(key, monkeypatch):
    k = IcKey.parse(key)
    orig = CATALOG[k]
    mutated = IcEntry(k, lambda s, t, c, _f=orig.template: mutate(_f(s, t, c)))
    monkeypatch.setitem(CATALOG, k, mutated)
    found = [verifier.verify_ic(k, w) for w in range(1, 5)]
    refuted = [r for r in found if r.status == "refuted"]
    assert refuted, key
    cex = refuted[0].counterexample
    assert "t" in cex and cex["condition"] != cex["solvable"]


def test_sampled_mutations_are_caught(monkeypatch):
    rng = random.Random(2)
    keys = rng.sample(sorted(k for k in CATALOG if k.side != "unary"), 3)
    for k in keys:
        orig = CATALOG[k]
        monkeypatch.setitem(CATALOG, k, IcEntry(
            k, lambda s, t, c, _f=orig.template: mutate(_f(s, t, c)), dict(orig.width_special_cases)))
        assert any(verifier.verify_ic(k, w).status == "refuted" for w in range(1, 5)), k


@pytest.mark.parametrize("key", ["udiv:right:ne", "udiv:right:sgt", "udiv:right:sge"])
def test_width_one_override_is_needed(key, monkeypatch):
    k = IcKey.parse(key)
    orig = CATALOG[k]
    assert 1 in orig.width_special_cases
    monkeypatch.setitem(CATALOG, k, IcEntry(k, orig.template))
    assert verifier.verify_ic(k, 1).status == "refuted"
    assert verifier.verify_ic(k, 2).status == "verified"


def test_records_and_skip():
    r = verifier.verify_ic("and:left:eq", 9, cap=8)
    assert r.status == "skipped"
    assert '"status": "verified"' in verifier.verify_ic("and:left:eq", 2).record()
    assert verifier.summarize([]) == {}


def test_get_ic_and_inverse():
    x, s, t = T.var("x", 4), T.var("s", 4), T.var("t", 4)
    c = catalog.get_ic(x, T.not_(T.eq(T.add(x, s), t)))
    assert c is T.TRUE
    assert catalog.get_inverse(x, T.eq(T.add(x, s), t)) is T.sub(t, s)
    inv = catalog.get_inverse(x, T.eq(T.mul(x, T.const(3, 4)), t))
    for tv in range(16):
        xv = T.evaluate(inv, {t: tv})
        assert (xv * 3) % 16 == tv
    assert catalog.get_inverse(x, T.eq(T.mul(x, T.const(2, 4)), t)) is None
