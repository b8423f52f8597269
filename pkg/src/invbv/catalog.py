"""Invertibility conditions and unconditional inverses for linear BV literals.

A row is keyed by ``(op, side, rel)``: ``x op s rel t`` is side ``left``,
``s op x rel t`` is side ``right``, and operators with a single argument
(or the variable itself, op ``var``) use side ``unary``.  Each row holds a
template ``fn(s, t, c)`` returning a quantifier-free condition over ``s``
and ``t`` that holds exactly when some ``x`` satisfies the literal.  ``c``
carries the width-dependent constants.
"""
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from . import bv
from .term import (ALL_RELATIONS, COMMUTATIVE, NEGATE, SWAP, TRUE, Literal, add, and_, ashr, band,
                   bor, bvnot, const, eq, extract, implies, lshr, mul, ne, neg, not_, or_,
                   sge, sgt, shl, sle, slt, sub, udiv, uge, ugt, ule, ult, free_vars)


class CatalogMiss(LookupError):
    """No row covers the requested literal shape."""


class IcKey(NamedTuple):
    op: str
    side: str
    rel: str

    def __str__(self):
        return f"{self.op}:{self.side}:{self.rel}"

    @classmethod
    def parse(cls, text):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected OP:SIDE:REL, got {text!r}")
        return cls(*parts)


# catalog operator names for term operators
OP_NAMES = {"bvmul": "mul", "bvurem": "urem", "bvudiv": "udiv", "bvand": "and", "bvor": "or",
            "bvlshr": "lshr", "bvashr": "ashr", "bvshl": "shl", "concat": "concat",
            "bvnot": "not", "bvneg": "neg", "bvadd": "add", "extract": "extract", "var": "var"}
TERM_OPS = {v: k for k, v in OP_NAMES.items()}
UNARY_OPS = ("var", "not", "neg", "add", "extract")


class Ctx:
    """Constants at the width of ``s`` and ``t`` (for concat, see ``ConcatCtx``)."""

    def __init__(self, w):
        self.w = w
        self.z = const(0, w)
        self.one = const(1, w)
        self.ones = const(bv.mask(w), w)
        self.mins = const(bv.min_signed_int(w), w)
        self.maxs = const(bv.max_signed_int(w), w)
        self.k = const(w, w)

    def big_or(self, f):
        # disjunction over every shift amount 0..w
        return or_(*(f(const(i, self.w)) for i in range(self.w + 1)))


@dataclass
class IcEntry:
    key: IcKey
    template: Callable
    width_special_cases: dict = field(default_factory=dict)

    def condition(self, s, t, x_width=None):
        """Condition for this row with ``s`` and ``t`` plugged in.

        ``s`` is ignored (may be None) for unary rows.  ``x_width`` is only
        needed for concat rows.
        """
        if self.key.op == "concat":
            return self.template(s, t, ConcatCtx(self.key.side, x_width, s.width))
        w = t.width if s is None else s.width
        fn = self.width_special_cases.get(w, self.template)
        return fn(s, t, Ctx(w))


# -- unary and base rows: bounds checks on t ----------------------------------

def _bounds(rel_name):
    if rel_name == "ult":
        return lambda s, t, c: ne(t, c.z)
    if rel_name == "ugt":
        return lambda s, t, c: ne(t, c.ones)
    if rel_name == "slt":
        return lambda s, t, c: ne(t, c.mins)
    if rel_name == "sgt":
        return lambda s, t, c: ne(t, c.maxs)
    return lambda s, t, c: TRUE


def _top(s, t, c):
    return TRUE


# -- binary rows ----------------------------------------------------------------

def _nz(a, c):
    return ne(a, c.z)


BINARY = {
    ("mul", "left"): {
        "eq": lambda s, t, c: eq(band(bor(neg(s), s), t), t),
        "ne": lambda s, t, c: or_(ne(s, c.z), ne(t, c.z)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, bor(neg(s), s)),
        "ule": _top,
        "uge": lambda s, t, c: uge(bor(neg(s), s), t),
        "slt": lambda s, t, c: slt(band(bvnot(neg(t)), bor(neg(s), s)), t),
        "sgt": lambda s, t, c: slt(t, sub(t, bor(bor(s, t), neg(s)))),
        "sle": lambda s, t, c: not_(and_(eq(s, c.z), slt(t, s))),
        "sge": lambda s, t, c: sge(band(bor(neg(s), s), c.maxs), t),
    },
    ("urem", "left"): {
        "eq": lambda s, t, c: uge(bvnot(neg(s)), t),
        "ne": lambda s, t, c: or_(ne(s, c.one), ne(t, c.z)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, bvnot(neg(s))),
        "ule": _top,
        "uge": lambda s, t, c: uge(bvnot(neg(s)), t),
        "slt": lambda s, t, c: slt(bvnot(t), bor(neg(s), neg(t))),
        "sgt": lambda s, t, c: and_(implies(sgt(s, c.z), slt(t, bvnot(neg(s)))),
                                    implies(sle(s, c.z), ne(t, c.maxs)),
                                    or_(ne(t, c.z), ne(s, c.one))),
        "sle": lambda s, t, c: slt(c.ones, band(neg(s), t)),
        "sge": lambda s, t, c: or_(slt(t, s), sge(c.z, s)),
    },
    ("urem", "right"): {
        "eq": lambda s, t, c: uge(band(sub(add(t, t), s), s), t),
        "ne": lambda s, t, c: or_(ne(s, c.z), ne(t, c.z)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, s),
        "ule": _top,
        "uge": lambda s, t, c: or_(uge(band(sub(add(t, t), s), s), t), ult(t, s)),
        "slt": lambda s, t, c: or_(slt(s, t), slt(c.z, t)),
        "sgt": lambda s, t, c: and_(implies(sge(s, c.z), sgt(s, t)),
                                    implies(slt(s, c.z), sgt(lshr(sub(s, c.one), c.one), t))),
        "sle": lambda s, t, c: or_(ult(t, c.mins), sge(t, s)),
        "sge": lambda s, t, c: and_(implies(sge(s, c.z), sge(s, t)),
                                    implies(and_(slt(s, c.z), sge(t, c.z)), ugt(sub(s, t), t))),
    },
    ("udiv", "left"): {
        "eq": lambda s, t, c: eq(udiv(mul(s, t), s), t),
        "ne": lambda s, t, c: or_(ne(s, c.z), ne(t, c.ones)),
        "ult": lambda s, t, c: and_(ult(c.z, s), ult(c.z, t)),
        "ugt": lambda s, t, c: ugt(udiv(c.ones, s), t),
        "ule": lambda s, t, c: uge(bor(s, t), bvnot(neg(s))),
        "uge": lambda s, t, c: eq(band(udiv(mul(s, t), t), s), s),
        "slt": lambda s, t, c: implies(sle(t, c.z), slt(udiv(c.mins, s), t)),
        "sgt": lambda s, t, c: or_(sgt(udiv(c.ones, s), t), sgt(udiv(c.maxs, s), t)),
        "sle": lambda s, t, c: or_(eq(udiv(mul(s, t), s), t),
                                   implies(sle(t, c.z), slt(udiv(c.mins, s), t))),
        "sge": lambda s, t, c: or_(sge(udiv(c.ones, s), t), sge(udiv(c.maxs, s), t)),
    },
    ("udiv", "right"): {
        "eq": lambda s, t, c: eq(udiv(s, udiv(s, t)), t),
        "ne": _top,
        "ult": lambda s, t, c: and_(ult(c.z, bvnot(band(neg(t), s))), ult(c.z, t)),
        "ugt": lambda s, t, c: ult(t, c.ones),
        "ule": lambda s, t, c: ult(c.z, bor(bvnot(s), t)),
        "uge": _top,
        "slt": lambda s, t, c: or_(slt(s, t), sge(t, c.z)),
        "sgt": lambda s, t, c: and_(implies(sge(s, c.z), sgt(s, t)),
                                    implies(slt(s, c.z), sgt(lshr(s, c.one), t))),
        "sle": lambda s, t, c: or_(sge(t, c.ones), sge(t, s)),
        "sge": lambda s, t, c: and_(implies(sge(s, c.z), sge(s, t)),
                                    implies(slt(s, c.z), sge(lshr(s, c.one), t))),
    },
    ("and", "left"): {
        "eq": lambda s, t, c: eq(band(t, s), t),
        "ne": lambda s, t, c: or_(ne(s, c.z), ne(t, c.z)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, s),
        "ule": _top,
        "uge": lambda s, t, c: uge(s, t),
        "slt": lambda s, t, c: slt(band(bvnot(neg(t)), s), t),
        "sgt": lambda s, t, c: slt(t, band(s, c.maxs)),
        "sle": lambda s, t, c: uge(s, band(t, c.mins)),
        "sge": lambda s, t, c: or_(eq(band(s, t), t), slt(t, band(sub(t, s), s))),
    },
    ("or", "left"): {
        "eq": lambda s, t, c: eq(bor(t, s), t),
        "ne": lambda s, t, c: or_(ne(s, c.ones), ne(t, c.ones)),
        "ult": lambda s, t, c: ult(s, t),
        "ugt": lambda s, t, c: ult(t, c.ones),
        "ule": lambda s, t, c: uge(t, s),
        "uge": _top,
        "slt": lambda s, t, c: slt(bor(bvnot(sub(s, t)), s), t),
        "sgt": lambda s, t, c: slt(t, bor(s, c.maxs)),
        "sle": lambda s, t, c: sge(t, bor(s, c.mins)),
        # the printed cell is garbled; this is the condition the sweep accepts
        "sge": lambda s, t, c: sge(bor(s, c.maxs), t),
    },
    ("lshr", "left"): {
        "eq": lambda s, t, c: eq(lshr(shl(t, s), s), t),
        "ne": lambda s, t, c: or_(ne(t, c.z), ult(s, c.k)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, lshr(bvnot(s), s)),
        "ule": _top,
        "uge": lambda s, t, c: eq(lshr(shl(t, s), s), t),
        "slt": lambda s, t, c: slt(lshr(bvnot(neg(t)), s), t),
        "sgt": lambda s, t, c: slt(t, lshr(shl(c.maxs, s), s)),
        "sle": lambda s, t, c: sge(t, lshr(t, s)),
        "sge": lambda s, t, c: implies(ne(s, c.z), sge(lshr(c.ones, s), t)),
    },
    ("lshr", "right"): {
        "eq": lambda s, t, c: c.big_or(lambda i: eq(lshr(s, i), t)),
        "ne": lambda s, t, c: or_(ne(s, c.z), ne(t, c.z)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, s),
        "ule": _top,
        "uge": lambda s, t, c: uge(s, t),
        "slt": lambda s, t, c: or_(slt(s, t), slt(c.z, t)),
        "sgt": lambda s, t, c: and_(implies(slt(s, c.z), sgt(lshr(s, c.one), t)),
                                    implies(sge(s, c.z), sgt(s, t))),
        "sle": lambda s, t, c: or_(ult(t, c.mins), sge(t, s)),
        "sge": lambda s, t, c: and_(implies(slt(s, c.z), sge(lshr(s, c.one), t)),
                                    implies(sge(s, c.z), sge(s, t))),
    },
    ("ashr", "left"): {
        "eq": lambda s, t, c: and_(implies(ult(s, c.k), eq(ashr(shl(t, s), s), t)),
                                   implies(uge(s, c.k), or_(eq(t, c.ones), eq(t, c.z)))),
        "ne": _top,
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, c.ones),
        "ule": _top,
        "uge": _top,
        "slt": lambda s, t, c: slt(ashr(c.mins, s), t),
        "sgt": lambda s, t, c: slt(t, lshr(c.maxs, s)),
        "sle": lambda s, t, c: sge(t, bvnot(lshr(c.maxs, s))),
        "sge": lambda s, t, c: sge(lshr(c.maxs, s), t),
    },
    ("ashr", "right"): {
        "eq": lambda s, t, c: c.big_or(lambda i: eq(ashr(s, i), t)),
        "ne": lambda s, t, c: and_(or_(ne(t, c.z), ne(s, c.z)), or_(ne(t, c.ones), ne(s, c.ones))),
        "ult": lambda s, t, c: and_(or_(ult(s, t), sge(s, c.z)), ne(t, c.z)),
        "ugt": lambda s, t, c: or_(slt(s, lshr(s, bvnot(t))), ult(t, s)),
        "ule": lambda s, t, c: or_(ult(s, c.mins), uge(t, s)),
        "uge": lambda s, t, c: or_(uge(s, bvnot(s)), uge(s, t)),
        "slt": lambda s, t, c: or_(slt(s, t), slt(c.z, t)),
        "sgt": lambda s, t, c: and_(slt(t, band(s, c.maxs)), slt(t, bor(s, c.maxs))),
        "sle": lambda s, t, c: or_(sge(t, c.z), sge(t, s)),
        "sge": lambda s, t, c: or_(uge(t, bvnot(t)), sge(s, t)),
    },
    ("shl", "left"): {
        "eq": lambda s, t, c: eq(shl(lshr(t, s), s), t),
        "ne": lambda s, t, c: or_(ne(t, c.z), ult(s, c.k)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: ult(t, shl(c.ones, s)),
        "ule": _top,
        "uge": lambda s, t, c: uge(shl(c.ones, s), t),
        "slt": lambda s, t, c: slt(shl(lshr(c.mins, s), s), t),
        "sgt": lambda s, t, c: slt(t, band(shl(c.maxs, s), c.maxs)),
        "sle": lambda s, t, c: ult(lshr(t, lshr(t, s)), c.mins),
        "sge": lambda s, t, c: sge(band(shl(c.maxs, s), c.maxs), t),
    },
    ("shl", "right"): {
        "eq": lambda s, t, c: c.big_or(lambda i: eq(shl(s, i), t)),
        "ne": lambda s, t, c: or_(ne(s, c.z), ne(t, c.z)),
        "ult": lambda s, t, c: ne(t, c.z),
        "ugt": lambda s, t, c: c.big_or(lambda i: ugt(shl(s, i), t)),
        "ule": _top,
        "uge": lambda s, t, c: c.big_or(lambda i: uge(shl(s, i), t)),
        "slt": lambda s, t, c: ult(shl(c.mins, s), add(t, c.mins)),
        "sgt": lambda s, t, c: c.big_or(lambda i: sgt(shl(s, i), t)),
        "sle": lambda s, t, c: ult(lshr(t, s), c.mins),
        "sge": lambda s, t, c: c.big_or(lambda i: sge(shl(s, i), t)),
    },
}


# -- concat rows ----------------------------------------------------------------

class ConcatCtx:
    """Pieces of ``t`` for ``x o s`` (left) or ``s o x`` (right).

    ``tx`` is the slice of ``t`` aligned with ``x`` and ``ts`` the slice
    aligned with ``s``; the signed and all-ones constants live at the width of
    whichever operand holds the top bits.
    """

    def __init__(self, side, wx, ws):
        self.side = side
        self.wx, self.ws = wx, ws
        self.wt = wx + ws
        self.zx = const(0, wx)
        self.onesx = const(bv.mask(wx), wx)
        self.minsx = const(bv.min_signed_int(wx), wx)
        self.maxsx = const(bv.max_signed_int(wx), wx)

    def split(self, t):
        if self.side == "left":
            return extract(t, self.wt - 1, self.wt - self.wx), extract(t, self.ws - 1, 0)
        return extract(t, self.wx - 1, 0), extract(t, self.wt - 1, self.wt - self.ws)


def _cat(fn):
    def template(s, t, c):
        tx, ts = c.split(t)
        return fn(s, tx, ts, c)
    return template


CONCAT = {
    "left": {
        "eq": _cat(lambda s, tx, ts, c: eq(s, ts)),
        "ne": _top,
        "ult": _cat(lambda s, tx, ts, c: implies(eq(tx, c.zx), ult(s, ts))),
        "ugt": _cat(lambda s, tx, ts, c: implies(eq(tx, c.onesx), ugt(s, ts))),
        "ule": _cat(lambda s, tx, ts, c: implies(eq(tx, c.zx), ule(s, ts))),
        "uge": _cat(lambda s, tx, ts, c: implies(eq(tx, c.onesx), uge(s, ts))),
        "slt": _cat(lambda s, tx, ts, c: implies(eq(tx, c.minsx), ult(s, ts))),
        "sgt": _cat(lambda s, tx, ts, c: implies(eq(tx, c.maxsx), ugt(s, ts))),
        "sle": _cat(lambda s, tx, ts, c: implies(eq(tx, c.minsx), ule(s, ts))),
        "sge": _cat(lambda s, tx, ts, c: implies(eq(tx, c.maxsx), uge(s, ts))),
    },
    "right": {
        "eq": _cat(lambda s, tx, ts, c: eq(s, ts)),
        "ne": _top,
        "ult": _cat(lambda s, tx, ts, c: and_(ule(s, ts), implies(eq(s, ts), ne(tx, c.zx)))),
        "ugt": _cat(lambda s, tx, ts, c: and_(uge(s, ts), implies(eq(s, ts), ne(tx, c.onesx)))),
        "ule": _cat(lambda s, tx, ts, c: ule(s, ts)),
        "uge": _cat(lambda s, tx, ts, c: uge(s, ts)),
        "slt": _cat(lambda s, tx, ts, c: and_(sle(s, ts), implies(eq(s, ts), ne(tx, c.zx)))),
        "sgt": _cat(lambda s, tx, ts, c: and_(sge(s, ts), implies(eq(s, ts), ne(tx, c.onesx)))),
        "sle": _cat(lambda s, tx, ts, c: sle(s, ts)),
        "sge": _cat(lambda s, tx, ts, c: sge(s, ts)),
    },
}


# width-1 overrides for s udiv x, keyed by the width of s
WIDTH_SPECIAL = {
    ("udiv", "right", "ne"): {1: lambda s, t, c: eq(band(s, t), c.z)},
    ("udiv", "right", "sgt"): {1: lambda s, t, c: sgt(s, t)},
    ("udiv", "right", "sge"): {1: lambda s, t, c: or_(sge(s, t), eq(t, c.ones))},
}


def _build():
    rows = {}
    for op in UNARY_OPS:
        for r in ALL_RELATIONS:
            k = IcKey(op, "unary", r)
            rows[k] = IcEntry(k, _bounds(r))
    for (op, side), cells in BINARY.items():
        for r in ALL_RELATIONS:
            k = IcKey(op, side, r)
            rows[k] = IcEntry(k, cells[r], dict(WIDTH_SPECIAL.get(k, {})))
    for side, cells in CONCAT.items():
        for r in ALL_RELATIONS:
            k = IcKey("concat", side, r)
            rows[k] = IcEntry(k, cells[r])
    return rows


CATALOG = _build()


def catalog_entries():
    return list(CATALOG)


def lookup(key):
    try:
        return CATALOG[key]
    except KeyError:
        raise CatalogMiss(f"no invertibility condition for {key}") from None


# -- literal shapes ---------------------------------------------------------------

def orient(x, lit):
    """Rewrite a literal containing ``x`` into ``(lhs, rel, t)`` with ``x`` in ``lhs``.

    ``lit`` is a :class:`Literal`, or a Boolean term that is a relation or
    the negation of one.
    """
    if not isinstance(lit, Literal):
        pol = True
        while lit.op == "not":
            pol, lit = not pol, lit.args[0]
        lit = Literal(pol, lit)
    atom = lit.atom
    a, b = atom.args
    r = atom.op
    if not lit.polarity:
        r = NEGATE[r]
    if x in free_vars(a):
        return a, r, b
    if x in free_vars(b):
        return b, SWAP[r], a
    raise ValueError(f"{x.name} does not occur in the literal")


def shape(x, lhs):
    """Split ``lhs`` into ``(op, side, s, child)`` where ``child`` holds ``x``."""
    op = lhs.op
    if lhs is x:
        return "var", "unary", None, x
    if op in ("bvnot", "bvneg", "extract"):
        return OP_NAMES[op], "unary", None, lhs.args[0]
    if op == "bvadd":
        a, b = lhs.args
        return ("add", "unary", b, a) if x in free_vars(a) else ("add", "unary", a, b)
    if op in OP_NAMES and len(lhs.args) == 2:
        a, b = lhs.args
        name = OP_NAMES[op]
        if x in free_vars(a):
            return name, "left", b, a
        return name, ("left" if op in COMMUTATIVE else "right"), a, b
    raise CatalogMiss(f"operator {op} has no invertibility condition")


def get_ic(x, lit):
    """Invertibility condition for a literal whose ``x`` sits directly under one operator."""
    lhs, r, t = orient(x, lit)
    op, side, s, child = shape(x, lhs)
    if child is not x:
        raise ValueError("get_ic expects x as a direct argument of the top operator")
    if s is not None and x in free_vars(s) or x in free_vars(t):
        raise ValueError("literal is not linear in x")
    entry = lookup(IcKey(op, side, r))
    if op == "add":
        return entry.condition(None, t)
    return entry.condition(s, t, x_width=x.width)


def base_case_ic(x, rel_name, t):
    return lookup(IcKey("var", "unary", rel_name)).condition(None, t)


def get_inverse(x, lit):
    """Exact solution ``t'`` with ``lit <=> x = t'``, or None when no inverse exists."""
    lhs, r, t = orient(x, lit)
    if r != "eq":
        return None
    return inverse_of(x, lhs, t)


def inverse_of(x, lhs, t):
    # lhs has x as a direct argument
    op = lhs.op
    if lhs is x:
        return t
    if op == "bvnot" and lhs.args[0] is x:
        return bvnot(t)
    if op == "bvneg" and lhs.args[0] is x:
        return neg(t)
    if op in ("bvadd", "bvmul"):
        a, b = lhs.args
        if a is x:
            s = b
        elif b is x:
            s = a
        else:
            return None
        if x in free_vars(s):
            return None
        if op == "bvadd":
            return sub(t, s)
        if s.op == "const" and s.payload & 1:
            return mul(t, const(bv.mul_inverse_int(s.payload, s.width), s.width))
    return None


def describe(key, width=4, x_width=None):
    """Condition of ``key`` over symbolic ``s`` and ``t`` in SMT-LIB syntax."""
    from .term import var, to_smtlib
    e = lookup(key)
    if key.op == "concat":
        xw = x_width or width
        s = var("s", width)
        t = var("t", width + xw)
        return to_smtlib(e.condition(s, t, x_width=xw))
    s = None if key.side == "unary" and key.op != "add" else var("s", width)
    t = var("t", width)
    return to_smtlib(e.condition(s, t))
