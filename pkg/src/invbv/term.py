"""Hash-consed term DAG for quantified bit-vector formulas with choice binders.

Every node is interned: two structurally equal constructions return the same
object, so ``a is b`` is structural equality and terms can key dicts by
identity.  Boolean-sorted terms have ``width == 0``.
"""
import itertools
import re
import threading
import weakref
from typing import NamedTuple

from . import bv

BV_UNARY = frozenset({"bvnot", "bvneg"})
BV_BINARY = frozenset(bv.BINOPS)
COMMUTATIVE = frozenset({"bvadd", "bvmul", "bvand", "bvor"})
RELATIONS = frozenset({"eq", "ult", "ugt", "ule", "uge", "slt", "sgt", "sle", "sge"})
BOOL_OPS = frozenset({"not", "and", "or", "implies", "iff"})
BINDERS = frozenset({"choice", "forall", "exists"})
QUANTIFIERS = frozenset({"forall", "exists"})

# relation after swapping operands: a R b  <=>  b swap[R] a
SWAP = {"eq": "eq", "ne": "ne", "ult": "ugt", "ugt": "ult", "ule": "uge", "uge": "ule",
        "slt": "sgt", "sgt": "slt", "sle": "sge", "sge": "sle"}
# relation under negation: not (a R b)  <=>  a neg[R] b
NEGATE = {"eq": "ne", "ne": "eq", "ult": "uge", "uge": "ult", "ugt": "ule", "ule": "ugt",
          "slt": "sge", "sge": "slt", "sgt": "sle", "sle": "sgt"}
ALL_RELATIONS = ("eq", "ne", "ult", "ugt", "ule", "uge", "slt", "sgt", "sle", "sge")
SIGNED = frozenset({"slt", "sgt", "sle", "sge"})


class SortError(TypeError):
    """Ill-sorted term construction or substitution."""


class EvaluationError(RuntimeError):
    pass


class Term:
    __slots__ = ("op", "args", "width", "payload", "id", "_fv", "_size", "__weakref__")

    def __init__(self, op, args, width, payload, ident):
        self.op = op
        self.args = args
        self.width = width
        self.payload = payload
        self.id = ident
        self._fv = None
        self._size = None

    @property
    def is_bool(self):
        return self.width == 0

    @property
    def is_const(self):
        return self.op == "const" or self.op == "bconst"

    @property
    def is_var(self):
        return self.op == "var"

    @property
    def name(self):
        return self.payload if self.op == "var" else None

    @property
    def value(self):
        return self.payload if self.is_const else None

    def __repr__(self):
        return to_smtlib(self)


class _Store:
    def __init__(self):
        self.table = weakref.WeakValueDictionary()
        self.lock = threading.Lock()
        self.counter = itertools.count()

    def intern(self, op, args, width, payload):
        key = (op, width, payload, args)
        node = self.table.get(key)
        if node is not None:
            return node
        with self.lock:
            node = self.table.get(key)
            if node is None:
                node = Term(op, args, width, payload, next(self.counter))
                self.table[key] = node
        return node


_store = _Store()
_fresh = itertools.count(1)
_fresh_lock = threading.Lock()


def fresh_name(prefix="y"):
    with _fresh_lock:
        return f"@{prefix}{next(_fresh)}"


# -- leaves ----------------------------------------------------------------

def const(value, width):
    bv.check_width(width)
    return _store.intern("const", (), width, value & bv.mask(width))


TRUE = _store.intern("bconst", (), 0, True)
FALSE = _store.intern("bconst", (), 0, False)


def boolean(b):
    return TRUE if b else FALSE


def var(name, width):
    """Variable of BV sort ``width``, or Boolean sort when ``width == 0``."""
    if width:
        bv.check_width(width)
    return _store.intern("var", (), width, name)


def fresh_var(width, prefix="y"):
    return var(fresh_name(prefix), width)


def zero(w):
    return const(0, w)


def ones(w):
    return const(bv.mask(w), w)


def min_s(w):
    return const(bv.min_signed_int(w), w)


def max_s(w):
    return const(bv.max_signed_int(w), w)


# -- generic constructor ---------------------------------------------------

def _fail(msg):
    raise SortError(msg)


def mk(op, *args, payload=None):
    """Build (or fetch) the node ``op(args)``, folding all-constant arguments."""
    if op in BV_UNARY:
        (a,) = args
        if a.is_bool:
            _fail(f"{op} expects a bit-vector argument")
        w = a.width
        if a.op == "const":
            return const(bv.UNOPS[op](a.payload, w), w)
    elif op in BV_BINARY:
        a, b = args
        if a.is_bool or b.is_bool or a.width != b.width:
            _fail(f"{op}: sort mismatch ({a.width} vs {b.width})")
        w = a.width
        if a.op == "const" and b.op == "const":
            return const(bv.BINOPS[op](a.payload, b.payload, w), w)
    elif op in RELATIONS:
        a, b = args
        if a.is_bool or b.is_bool or a.width != b.width:
            _fail(f"{op}: sort mismatch ({a.width} vs {b.width})")
        w = 0
        if a.op == "const" and b.op == "const":
            return boolean(bv.CMPS[op](a.payload, b.payload, a.width))
    elif op == "concat":
        a, b = args
        if a.is_bool or b.is_bool:
            _fail("concat expects bit-vector arguments")
        w = a.width + b.width
        if w > bv.MAX_WIDTH:
            raise bv.WidthError(f"concat result width {w} exceeds {bv.MAX_WIDTH}")
        if a.op == "const" and b.op == "const":
            return const(bv.concat_int(a.payload, b.payload, b.width), w)
    elif op == "extract":
        (a,) = args
        hi, lo = payload
        if a.is_bool or not 0 <= lo <= hi < a.width:
            _fail(f"extract [{hi}:{lo}] invalid for width {a.width}")
        w = hi - lo + 1
        if a.op == "const":
            return const(bv.extract_int(a.payload, hi, lo), w)
    elif op == "not":
        (a,) = args
        if not a.is_bool:
            _fail("not expects a Boolean")
        w = 0
        if a.op == "bconst":
            return boolean(not a.payload)
    elif op in ("and", "or"):
        if len(args) < 2 or any(not a.is_bool for a in args):
            _fail(f"{op} expects at least two Boolean arguments")
        w = 0
        if all(a.op == "bconst" for a in args):
            vals = [a.payload for a in args]
            return boolean(all(vals) if op == "and" else any(vals))
    elif op in ("implies", "iff"):
        a, b = args
        if not (a.is_bool and b.is_bool):
            _fail(f"{op} expects Boolean arguments")
        w = 0
        if a.op == "bconst" and b.op == "bconst":
            return boolean((not a.payload or b.payload) if op == "implies" else a.payload == b.payload)
    elif op == "ite":
        c, a, b = args
        if not c.is_bool or a.width != b.width:
            _fail("ite: sort mismatch")
        w = a.width
        if c.op == "bconst":
            return a if c.payload else b
    elif op == "choice":
        v, body = args
        if v.op != "var" or v.is_bool or not body.is_bool:
            _fail("choice binds a bit-vector variable over a Boolean body")
        w = v.width
    elif op in QUANTIFIERS:
        *vs, body = args
        if not vs or any(v.op != "var" for v in vs) or not body.is_bool:
            _fail(f"{op} binds variables over a Boolean body")
        w = 0
    else:
        raise ValueError(f"unknown operator {op!r}")
    return _store.intern(op, tuple(args), w, payload)


# -- convenience builders --------------------------------------------------

def bvnot(a): return mk("bvnot", a)
def neg(a): return mk("bvneg", a)
def add(a, b): return mk("bvadd", a, b)
def sub(a, b): return mk("bvadd", a, mk("bvneg", b))
def mul(a, b): return mk("bvmul", a, b)
def band(a, b): return mk("bvand", a, b)
def bor(a, b): return mk("bvor", a, b)
def shl(a, b): return mk("bvshl", a, b)
def lshr(a, b): return mk("bvlshr", a, b)
def ashr(a, b): return mk("bvashr", a, b)
def udiv(a, b): return mk("bvudiv", a, b)
def urem(a, b): return mk("bvurem", a, b)
def concat(a, b): return mk("concat", a, b)
def extract(a, hi, lo): return mk("extract", a, payload=(hi, lo))
def eq(a, b): return mk("eq", a, b)
def ult(a, b): return mk("ult", a, b)
def ugt(a, b): return mk("ugt", a, b)
def ule(a, b): return mk("ule", a, b)
def uge(a, b): return mk("uge", a, b)
def slt(a, b): return mk("slt", a, b)
def sgt(a, b): return mk("sgt", a, b)
def sle(a, b): return mk("sle", a, b)
def sge(a, b): return mk("sge", a, b)
def not_(a): return mk("not", a)
def implies(a, b): return mk("implies", a, b)
def iff(a, b): return mk("iff", a, b)
def ite(c, a, b): return mk("ite", c, a, b)
def choice(v, body): return mk("choice", v, body)


def ne(a, b):
    return mk("not", mk("eq", a, b))


def and_(*args):
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else mk("and", *args)


def or_(*args):
    if not args:
        return FALSE
    return args[0] if len(args) == 1 else mk("or", *args)


def forall(vs, body):
    return mk("forall", *vs, body) if vs else body


def exists(vs, body):
    return mk("exists", *vs, body) if vs else body


def rel(name, a, b):
    """Atom for any of the ten relations, ``ne`` included."""
    if name == "ne":
        return ne(a, b)
    return mk(name, a, b)


# -- structural queries ----------------------------------------------------

def free_vars(t):
    """Free variables of ``t`` as a frozenset (cached on the node)."""
    if t._fv is not None:
        return t._fv
    stack = [t]
    while stack:
        n = stack[-1]
        if n._fv is not None:
            stack.pop()
            continue
        pending = [a for a in n.args if a._fv is None]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if n.op == "var":
            n._fv = frozenset((n,))
        elif n.op in BINDERS:
            n._fv = n.args[-1]._fv - frozenset(n.args[:-1])
        elif n.args:
            fv = n.args[0]._fv
            for a in n.args[1:]:
                fv = fv | a._fv
            n._fv = fv
        else:
            n._fv = frozenset()
    return t._fv


def size(t):
    """Number of nodes in the tree unfolding of ``t``."""
    if t._size is None:
        for n in postorder(t):
            if n._size is None:
                n._size = 1 + sum(a._size for a in n.args)
    return t._size


def postorder(t):
    """Distinct DAG nodes of ``t``, children before parents."""
    seen = set()
    out = []
    stack = [(t, False)]
    while stack:
        n, done = stack.pop()
        if done:
            out.append(n)
            continue
        if n in seen:
            continue
        seen.add(n)
        stack.append((n, True))
        for a in reversed(n.args):
            if a not in seen:
                stack.append((a, False))
    return out


def contains_binder(t, ops=BINDERS):
    return any(n.op in ops for n in postorder(t))


def occurrences(x, t):
    """Number of free occurrences of variable ``x`` in the tree unfolding of ``t``."""
    counts = {}
    for n in postorder(t):
        if x not in free_vars(n):
            counts[n] = 0
        elif n is x:
            counts[n] = 1
        else:
            counts[n] = sum(counts[a] for a in n.args)
    return counts[t]


class Literal(NamedTuple):
    polarity: bool
    atom: Term

    def term(self):
        return self.atom if self.polarity else not_(self.atom)


def literals(phi):
    """Relational atoms of a quantifier-free formula with the polarity they occur at."""
    out = {}
    seen = set()

    def walk(f, pol):
        # pol: True, False, or None for both
        if (f, pol) in seen:
            return
        seen.add((f, pol))
        op = f.op
        if op in RELATIONS:
            for p in ((True, False) if pol is None else (pol,)):
                out.setdefault(Literal(p, f), None)
        elif op == "not":
            walk(f.args[0], None if pol is None else not pol)
        elif op in ("and", "or"):
            for a in f.args:
                walk(a, pol)
        elif op == "implies":
            walk(f.args[0], None if pol is None else not pol)
            walk(f.args[1], pol)
        elif op == "iff":
            for a in f.args:
                walk(a, None)
        elif op == "ite" and f.is_bool:
            walk(f.args[0], None)
            walk(f.args[1], pol)
            walk(f.args[2], pol)
        elif op in BINDERS:
            raise ValueError("literals() expects a quantifier-free formula")

    walk(phi, True)
    return list(out)


def atoms(phi):
    """Distinct relational atoms of ``phi`` in construction-stable order."""
    return [n for n in postorder(phi) if n.op in RELATIONS]


def is_linear_in(lit, x):
    atom = lit.atom if isinstance(lit, Literal) else lit
    return occurrences(x, atom) == 1


# -- substitution ----------------------------------------------------------

def substitute(t, sigma):
    """Simultaneously replace free occurrences of the variables in ``sigma``."""
    for k, v in sigma.items():
        if k.width != v.width:
            raise SortError(f"substitution {k.name} -> width {v.width} changes sort")
    if not sigma:
        return t
    keys = frozenset(sigma)
    memo = {}

    def go(n, sig, ks):
        if not (free_vars(n) & ks):
            return n
        key = (n, ks)
        r = memo.get(key)
        if r is not None:
            return r
        if n.op == "var":
            r = sig[n]
        elif n.op in BINDERS:
            bound = frozenset(n.args[:-1])
            inner_ks = ks - bound
            inner = {k: v for k, v in sig.items() if k in inner_ks}
            body = go(n.args[-1], inner, inner_ks)
            r = mk(n.op, *n.args[:-1], body)
        else:
            r = mk(n.op, *(go(a, sig, ks) for a in n.args), payload=n.payload)
        memo[key] = r
        return r

    return go(t, sigma, keys)


# -- scalar evaluation -----------------------------------------------------

DEFAULT_EVAL_CAP = 8


def evaluate(t, interp, cap=DEFAULT_EVAL_CAP):
    """Value of ``t`` under ``interp`` (var -> int/bool).

    Quantifiers and choice binders are evaluated by exhaustive iteration over
    the bound variable, which is only allowed up to ``cap`` bits.  A choice
    denotes the smallest satisfying value, or 0 if there is none.
    """
    return _ScalarEval(interp, cap).run(t)


class _ScalarEval:
    def __init__(self, interp, cap):
        self.env = dict(interp)
        self.cap = cap
        self.depth = {}
        self.memos = [{}]

    def level(self, n):
        if not self.depth:
            return 0
        lv = 0
        for v in free_vars(n):
            d = self.depth.get(v)
            if d is not None and d > lv:
                lv = d
        return lv

    def run(self, n):
        lv = self.level(n)
        memo = self.memos[lv]
        r = memo.get(n)
        if r is None:
            r = self.compute(n)
            memo[n] = r
        return r

    def _bind_range(self, v):
        if v.width > self.cap:
            raise EvaluationError(f"binder over {v.width} bits exceeds evaluation cap {self.cap}")
        return range(1 << v.width) if v.width else (False, True)

    def _iterate(self, vs, body, stop):
        """Yield-free search: returns True iff some assignment makes body == stop."""
        base = len(self.memos)
        # a binder may shadow an enclosing one with the same variable
        saved = {v: self.env[v] for v in vs if v in self.env}
        saved_depth = {v: self.depth[v] for v in vs if v in self.depth}
        for i, v in enumerate(vs):
            self.depth[v] = base + i
            self.memos.append({})
        try:
            ranges = [self._bind_range(v) for v in vs]
            for vals in itertools.product(*ranges):
                for v, val in zip(vs, vals):
                    self.env[v] = val
                for i in range(len(vs)):
                    self.memos[base + i] = {}
                if self.run(body) == stop:
                    return vals
            return None
        finally:
            for v in vs:
                del self.depth[v]
                self.env.pop(v, None)
            self.env.update(saved)
            self.depth.update(saved_depth)
            del self.memos[base:]

    def compute(self, n):
        op = n.op
        if op == "const" or op == "bconst":
            return n.payload
        if op == "var":
            try:
                return self.env[n]
            except KeyError:
                raise EvaluationError(f"no value for variable {n.name}") from None
        if op in BV_BINARY:
            return bv.BINOPS[op](self.run(n.args[0]), self.run(n.args[1]), n.width)
        if op in RELATIONS:
            a = n.args[0]
            return bv.CMPS[op](self.run(a), self.run(n.args[1]), a.width)
        if op in BV_UNARY:
            return bv.UNOPS[op](self.run(n.args[0]), n.width)
        if op == "not":
            return not self.run(n.args[0])
        if op == "and":
            return all(self.run(a) for a in n.args)
        if op == "or":
            return any(self.run(a) for a in n.args)
        if op == "implies":
            return (not self.run(n.args[0])) or self.run(n.args[1])
        if op == "iff":
            return self.run(n.args[0]) == self.run(n.args[1])
        if op == "ite":
            return self.run(n.args[1]) if self.run(n.args[0]) else self.run(n.args[2])
        if op == "concat":
            return bv.concat_int(self.run(n.args[0]), self.run(n.args[1]), n.args[1].width)
        if op == "extract":
            hi, lo = n.payload
            return bv.extract_int(self.run(n.args[0]), hi, lo)
        if op == "choice":
            v, body = n.args
            hit = self._iterate([v], body, True)
            return hit[0] if hit is not None else 0
        if op == "forall":
            return self._iterate(list(n.args[:-1]), n.args[-1], False) is None
        if op == "exists":
            return self._iterate(list(n.args[:-1]), n.args[-1], True) is not None
        raise ValueError(f"cannot evaluate {op}")


# -- SMT-LIB printing ------------------------------------------------------

_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$")
RESERVED = frozenset({"let", "forall", "exists", "choice", "par", "_", "!", "as",
                      "true", "false", "NUMERAL", "DECIMAL", "STRING"})

_REL_NAMES = {"eq": "=", "ult": "bvult", "ugt": "bvugt", "ule": "bvule", "uge": "bvuge",
              "slt": "bvslt", "sgt": "bvsgt", "sle": "bvsle", "sge": "bvsge"}
_BOOL_NAMES = {"not": "not", "and": "and", "or": "or", "implies": "=>", "iff": "="}


def symbol(name):
    if _SIMPLE.match(name) and name not in RESERVED:
        return name
    return "|" + name + "|"


def sort_str(width):
    return "Bool" if width == 0 else f"(_ BitVec {width})"


def const_str(value, width):
    return "#b" + format(value, f"0{width}b")


def to_sexpr(t):
    """Nested-list form of ``t`` (strings at the leaves)."""
    memo = {}
    for n in postorder(t):
        op = n.op
        if op == "const":
            r = const_str(n.payload, n.width)
        elif op == "bconst":
            r = "true" if n.payload else "false"
        elif op == "var":
            r = symbol(n.payload)
        elif op == "extract":
            hi, lo = n.payload
            r = [["_", "extract", str(hi), str(lo)], memo[n.args[0]]]
        elif op in BINDERS:
            binds = [[symbol(v.payload), _sort_sexpr(v.width)] for v in n.args[:-1]]
            r = [op, binds, memo[n.args[-1]]]
        else:
            name = _REL_NAMES.get(op) or _BOOL_NAMES.get(op) or op
            r = [name] + [memo[a] for a in n.args]
        memo[n] = r
    return memo[t]


def _sort_sexpr(width):
    return "Bool" if width == 0 else ["_", "BitVec", str(width)]


def sexpr_str(e):
    if isinstance(e, str):
        return e
    return "(" + " ".join(sexpr_str(x) for x in e) + ")"


def to_smtlib(t):
    return sexpr_str(to_sexpr(t))

