"""Small word-level rewrite set applied before bit-blasting and to quantifier matrices.

Rules (closed list):
  * sums are normalized by collecting coefficients of repeated atoms, so
    ``x + x`` becomes ``2*x`` and ``(t - s) + s`` becomes ``t``; a sum is
    only rebuilt when something merged or cancelled
  * ``~~a -> a``, ``--a -> a``, ``a & a -> a``, ``a | a -> a``,
    ``a & ~a -> 0``, ``a | ~a -> ~0``
  * relations between identical sides fold to true/false
  * Boolean connectives drop constants and duplicates, ``not not p -> p``
"""
from . import bv
from .term import (BINDERS, FALSE, TRUE, add, and_, const, mk, mul, neg, not_, or_, postorder)

_REFLEXIVE = {"eq": True, "ule": True, "uge": True, "sle": True, "sge": True,
              "ult": False, "ugt": False, "slt": False, "sgt": False}


def _flatten(t, scale, acc, w):
    """Add ``scale * t`` into ``acc`` (atom -> coefficient, None -> constant).

    Returns the number of leaves visited.
    """
    m = bv.mask(w)
    op = t.op
    if op == "const":
        acc[None] = (acc.get(None, 0) + scale * t.payload) & m
        return 1
    if op == "bvadd":
        return _flatten(t.args[0], scale, acc, w) + _flatten(t.args[1], scale, acc, w)
    if op == "bvneg":
        return _flatten(t.args[0], -scale & m, acc, w)
    if op == "bvnot":
        acc[None] = (acc.get(None, 0) - scale) & m
        return _flatten(t.args[0], -scale & m, acc, w) + 1
    if op == "bvmul":
        a, b = t.args
        if a.op == "const":
            return _flatten(b, scale * a.payload & m, acc, w)
        if b.op == "const":
            return _flatten(a, scale * b.payload & m, acc, w)
    acc[t] = (acc.get(t, 0) + scale) & m
    return 1


def normalize_sum(t):
    acc = {}
    leaves = _flatten(t, 1, acc, t.width)
    c = acc.pop(None, 0)
    atoms = sorted((a for a, k in acc.items() if k), key=lambda a: a.id)
    if leaves == len(atoms) + (1 if c else 0) and len(atoms) == len(acc):
        return t
    w = t.width
    m = bv.mask(w)
    parts = []
    for a in atoms:
        k = acc[a]
        if k == 1:
            parts.append(a)
        elif k == m:
            parts.append(neg(a))
        else:
            parts.append(mul(const(k, w), a))
    if c or not parts:
        parts.append(const(c, w))
    r = parts[0]
    for p in parts[1:]:
        r = add(r, p)
    return r


def _complement(a, b):
    return (a.op == "bvnot" and a.args[0] is b) or (b.op == "bvnot" and b.args[0] is a)


def _rule(n, args):
    op = n.op
    if op in ("bvadd", "bvneg", "bvnot", "bvmul"):
        if op in ("bvneg", "bvnot") and args[0].op == op:
            return args[0].args[0]
        r = mk(op, *args)
        return normalize_sum(r) if r.op in ("bvadd", "bvneg", "bvnot", "bvmul") else r
    if op in ("bvand", "bvor"):
        a, b = args
        if a is b:
            return a
        if _complement(a, b):
            w = a.width
            return const(0, w) if op == "bvand" else const(bv.mask(w), w)
        return mk(op, a, b)
    if op in _REFLEXIVE:
        a, b = args
        if a is b:
            return TRUE if _REFLEXIVE[op] else FALSE
        return mk(op, a, b)
    if op == "not":
        a = args[0]
        if a.op == "not":
            return a.args[0]
        return not_(a)
    if op in ("and", "or"):
        unit, zero = (TRUE, FALSE) if op == "and" else (FALSE, TRUE)
        out = []
        seen = set()
        for a in args:
            parts = a.args if a.op == op else (a,)
            for p in parts:
                if p is zero:
                    return zero
                if p is unit or p in seen:
                    continue
                seen.add(p)
                out.append(p)
        return and_(*out) if op == "and" else or_(*out)
    if op == "implies":
        a, b = args
        if a is TRUE:
            return b
        if a is FALSE or b is TRUE:
            return TRUE
        if a is b:
            return TRUE
        return mk(op, a, b)
    if op == "iff":
        a, b = args
        if a is b:
            return TRUE
        return mk(op, a, b)
    return mk(op, *args, payload=n.payload)


def simplify(t):
    """Apply the rule set bottom-up.  Binder bodies are left alone."""
    memo = {}
    for n in postorder(t):
        if n.op in BINDERS:
            memo[n] = n
            continue
        if not n.args:
            memo[n] = n
            continue
        args = tuple(memo[a] for a in n.args)
        memo[n] = _rule(n, args)
    return memo[t]
