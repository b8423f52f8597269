"""From a closed input formula to an ``exists ys. forall xs. psi`` problem.

Steps: negation normal form around quantifiers, prenexing with existential
blocks pulled out first, negation of closed ``forall/exists`` inputs,
destructive equality resolution, splitting universal variables that only
occur under extracts into region variables, and the sum/idempotence rewrites.
"""
from ..rewrite import simplify
from ..solve import NotLinear, solve
from ..catalog import CatalogMiss
from ..term import (QUANTIFIERS, RELATIONS, Literal, and_, concat, contains_binder, extract,
                    free_vars, fresh_var, mk, not_, occurrences, or_, postorder, substitute)
from .loop import Problem


class UnsupportedInput(ValueError):
    """Input outside the single-alternation fragment."""


def _has_quant(f):
    return contains_binder(f, QUANTIFIERS)


def nnf(f, pol=True):
    """Push negations down to atoms and quantifiers; quantifier-free parts are kept whole."""
    if not _has_quant(f):
        return f if pol else not_(f)
    op = f.op
    if op == "not":
        return nnf(f.args[0], not pol)
    if op in ("and", "or"):
        parts = [nnf(a, pol) for a in f.args]
        return and_(*parts) if (op == "and") == pol else or_(*parts)
    if op == "implies":
        a, b = f.args
        return nnf(or_(not_(a), b), pol)
    if op == "iff":
        a, b = f.args
        if pol:
            return or_(and_(nnf(a), nnf(b)), and_(nnf(a, False), nnf(b, False)))
        return or_(and_(nnf(a), nnf(b, False)), and_(nnf(a, False), nnf(b)))
    if op == "ite" and f.is_bool:
        c, a, b = f.args
        return nnf(or_(and_(c, a), and_(not_(c), b)), pol)
    if op in QUANTIFIERS:
        q = op if pol else ("exists" if op == "forall" else "forall")
        return mk(q, *f.args[:-1], nnf(f.args[-1], pol))
    raise UnsupportedInput(f"quantifier below operator {op}")


def _push(blocks, q, vs):
    if not vs:
        return
    if blocks and blocks[-1][0] == q:
        blocks[-1] = (q, blocks[-1][1] + list(vs))
    else:
        blocks.append((q, list(vs)))


def prenex(f):
    """``(blocks, matrix)`` for an NNF formula; bound variables are renamed apart."""
    if not _has_quant(f):
        return [], f
    op = f.op
    if op in QUANTIFIERS:
        vs = f.args[:-1]
        for v in vs:
            if v.width == 0:
                raise UnsupportedInput("Boolean quantified variables are not supported")
        ren = {v: fresh_var(v.width, v.name.lstrip("@") + "_") for v in vs}
        inner, m = prenex(substitute(f.args[-1], ren))
        blocks = []
        _push(blocks, op, [ren[v] for v in vs])
        for q, ws in inner:
            _push(blocks, q, ws)
        return blocks, m
    if op in ("and", "or"):
        seqs, ms = [], []
        for a in f.args:
            b, m = prenex(a)
            seqs.append(list(b))
            ms.append(m)
        blocks = []
        while any(seqs):
            heads = {s[0][0] for s in seqs if s}
            q = "exists" if "exists" in heads else "forall"
            for s in seqs:
                if s and s[0][0] == q:
                    _push(blocks, q, s.pop(0)[1])
        return blocks, (and_(*ms) if op == "and" else or_(*ms))
    raise UnsupportedInput(f"quantifier below operator {op}")


def _top_nnf(f, pol=True):
    # NNF over the Boolean skeleton of a quantifier-free matrix
    op = f.op
    if op == "not":
        return _top_nnf(f.args[0], not pol)
    if op in ("and", "or"):
        parts = [_top_nnf(a, pol) for a in f.args]
        return and_(*parts) if (op == "and") == pol else or_(*parts)
    if op == "implies":
        return _top_nnf(or_(not_(f.args[0]), f.args[1]), pol)
    return f if pol else not_(f)


def _guard_literal(d):
    """The literal ``l`` when disjunct ``d`` is ``not l``."""
    if d.op == "not" and d.args[0].op in RELATIONS:
        return Literal(True, d.args[0])
    if d.op in RELATIONS:
        return Literal(False, d)
    return None


def der(matrix, xs):
    """Destructive equality resolution; returns ``(matrix, remaining xs, eliminated)``.

    A universal ``x`` guarded as ``not l or rest`` with ``solve(x, l)``
    choice-free is replaced by its solved form.  The guarded rest must be
    non-empty.
    """
    xs = list(xs)
    gone = {}
    progress = True
    while progress:
        progress = False
        disj = matrix.args if matrix.op == "or" else (matrix,)
        if len(disj) < 2:
            break
        for x in xs:
            for i, d in enumerate(disj):
                lit = _guard_literal(d)
                if lit is None or occurrences(x, lit.atom) != 1:
                    continue
                try:
                    form = solve(x, lit)
                except (NotLinear, CatalogMiss, ValueError):
                    continue
                if form.used_choice:
                    continue
                rest = or_(*(e for j, e in enumerate(disj) if j != i))
                matrix = simplify(substitute(rest, {x: form.term}))
                gone[x] = form.term
                xs.remove(x)
                progress = True
                break
            if progress:
                break
    return matrix, xs, gone


def _slice(t, hi, lo):
    """``t[hi:lo]`` pushed through concats and nested extracts."""
    if lo == 0 and hi == t.width - 1:
        return t
    if t.op == "concat":
        a, b = t.args
        bw = b.width
        if hi < bw:
            return _slice(b, hi, lo)
        if lo >= bw:
            return _slice(a, hi - bw, lo - bw)
        return concat(_slice(a, hi - bw, 0), _slice(b, bw - 1, lo))
    if t.op == "extract":
        h2, l2 = t.payload
        return _slice(t.args[0], hi + l2, lo + l2)
    return extract(t, hi, lo)


def fold_extracts(f):
    memo = {}
    for n in postorder(f):
        if n.op in QUANTIFIERS or n.op == "choice" or not n.args:
            memo[n] = n
            continue
        args = [memo[a] for a in n.args]
        if n.op == "extract":
            memo[n] = _slice(args[0], *n.payload)
        else:
            memo[n] = mk(n.op, *args, payload=n.payload)
    return memo[f]


def split_extracts(matrix, xs):
    """Replace universals seen only through extracts by concatenations of region variables."""
    out = []
    regions = {}
    for x in xs:
        exts = [n for n in postorder(matrix) if n.op == "extract" and n.args[0] is x]
        if not exts:
            out.append(x)
            continue
        # every occurrence must sit directly under one of these extracts
        if occurrences(x, matrix) != sum(_count(matrix, e) for e in exts):
            out.append(x)
            continue
        cuts = {0, x.width}
        for e in exts:
            hi, lo = e.payload
            cuts.update((lo, hi + 1))
        cuts = sorted(cuts)
        if len(cuts) <= 2:
            out.append(x)
            continue
        parts = [fresh_var(b - a, f"{x.name.lstrip('@')}_{b - 1}_{a}_")
                 for a, b in zip(cuts, cuts[1:])]
        whole = parts[0]
        for p in parts[1:]:
            whole = concat(p, whole)
        matrix = fold_extracts(substitute(matrix, {x: whole}))
        regions[x] = whole
        out.extend(reversed(parts))
    return matrix, out, regions


def _count(f, node):
    """Occurrences of ``node`` in the tree unfolding of ``f``."""
    counts = {}
    for n in postorder(f):
        counts[n] = 1 if n is node else sum(counts[a] for a in n.args)
    return counts[f]


def to_problem(formula, der_enabled=True):
    """Normalize a closed input (free constants allowed) into a Problem."""
    f = nnf(formula)
    free = free_vars(f)
    blocks, m = prenex(f)
    flip = False
    ys = []
    rest = list(blocks)
    if rest and rest[0][0] == "exists":
        ys = rest.pop(0)[1]
    if len(rest) > 1:
        if not free and not ys and len(rest) == 2:
            # closed forall/exists: decide the negation, answer flipped
            xs_outer, ys_inner = rest[0][1], rest[1][1]
            m = not_(m)
            ys, rest = xs_outer, [("forall", ys_inner)]
            flip = True
        else:
            raise UnsupportedInput("more than one quantifier alternation")
    xs = rest[0][1] if rest else []
    m = simplify(_top_nnf(m))
    m, xs, _ = split_extracts(m, xs)
    if der_enabled:
        m, xs, _ = der(m, xs)
    m = simplify(m)
    xs = [x for x in xs if x in free_vars(m)]
    ys = sorted(free, key=lambda v: v.name) + [y for y in ys if y not in free]
    return Problem(m, tuple(ys), tuple(xs), flip)
