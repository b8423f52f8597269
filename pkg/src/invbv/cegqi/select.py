"""Instantiation selection from a countermodel, parameterized by a configuration.

Configurations: ``m`` uses model values only, ``k`` keeps satisfied literals
as they are, ``s`` turns them into equalities with the model's slack, and
``b`` into equalities at the boundary point next to ``t``.
"""
from dataclasses import dataclass, field

from .. import bv
from ..catalog import CatalogMiss
from ..rewrite import simplify
from ..solve import NotLinear, solve
from ..term import (BINDERS, NEGATE, SIGNED, Literal, add, atoms, const, eq, evaluate, free_vars,
                    mk, occurrences, size, substitute)

CONFIGS = ("m", "k", "s", "b")
MAX_OCCURRENCES = 16


def _split(lit):
    """``(s, rel, t)`` for a Literal, with negation folded into the relation."""
    a, b = lit.atom.args
    r = lit.atom.op if lit.polarity else NEGATE[lit.atom.op]
    return a, r, b


def _value(t, interp):
    return evaluate(t, interp)


def project(config, interp, lit):
    """Projected form of a literal that holds in ``interp``; None means dropped."""
    if config == "m":
        return None
    if not isinstance(lit, Literal):
        lit = _as_literal(lit)
    if config == "k":
        return lit.term()
    s, r, t = _split(lit)
    w = s.width
    sv, tv = _value(s, interp), _value(t, interp)
    if config == "s":
        d = (sv - tv) & bv.mask(w)
        return eq(s, t) if d == 0 else eq(s, add(t, const(d, w)))
    if config == "b":
        if r in SIGNED:
            sv, tv = bv.to_signed(sv, w), bv.to_signed(tv, w)
        if sv == tv:
            return eq(s, t)
        step = 1 if sv > tv else bv.mask(w)
        return eq(s, add(t, const(step, w)))
    raise ValueError(f"unknown configuration {config!r}")


def _as_literal(f):
    pol = True
    while f.op == "not":
        pol, f = not pol, f.args[0]
    return Literal(pol, f)


def _keep_one(t, x, keep, value):
    """``t`` with every occurrence of ``x`` except the ``keep``-th replaced by ``value``."""
    counter = [0]

    def go(n):
        if x not in free_vars(n):
            return n
        if n is x:
            i = counter[0]
            counter[0] += 1
            return x if i == keep else value
        if n.op in BINDERS and x in n.args[:-1]:
            return n
        if n.op in BINDERS:
            return mk(n.op, *n.args[:-1], go(n.args[-1]))
        return mk(n.op, *(go(a) for a in n.args), payload=n.payload)

    return go(t)


def linearize(x, interp, lit, cap=MAX_OCCURRENCES):
    """Literals linear in ``x``, one per occurrence, other occurrences fixed to ``x``'s value."""
    f = simplify(lit.term() if isinstance(lit, Literal) else lit)
    n = occurrences(x, f)
    if n == 0:
        return []
    if n == 1:
        return [f]
    value = const(interp.get(x, 0), x.width)
    out = []
    for i in range(min(n, cap)):
        g = _keep_one(f, x, i, value)
        if g not in out:
            out.append(g)
    return out


def choose(candidates):
    """Order in which literals are tried: smallest first, then by construction."""
    return sorted(candidates, key=lambda f: (size(f), f.id))


@dataclass
class Selection:
    terms: tuple
    fallback: list = field(default_factory=list)  # per variable: model value used


def satisfied_literals(psi, interp):
    out = []
    for a in atoms(psi):
        out.append(Literal(bool(_value(a, interp)), a))
    return out


def select(config, xs, psi, interp, gamma=None):
    """Terms for ``xs`` from a model ``interp`` of the instances and the negated matrix."""
    ms = satisfied_literals(psi, interp)
    ns = [p for p in (project(config, interp, l) for l in ms) if p is not None]
    ts = []
    fallback = []
    for i, x in enumerate(xs):
        sigma = {xs[j]: ts[j] for j in range(i)}
        cands = []
        for l in ns:
            for g in linearize(x, interp, substitute(l, sigma) if sigma else l):
                if g not in cands:
                    cands.append(g)
        ti = None
        for g in choose(cands):
            try:
                ti = solve(x, g).term
                break
            except (NotLinear, CatalogMiss, ValueError):
                continue
        fallback.append(ti is None)
        if ti is None:
            ti = const(interp.get(x, 0), x.width)
        ts = [substitute(t, {x: ti}) for t in ts]
        ts.append(ti)
    return Selection(tuple(ts), fallback)
