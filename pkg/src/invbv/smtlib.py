"""SMT-LIB 2 scripts over the quantified bit-vector fragment."""
from dataclasses import dataclass, field

from . import bv
from . import term as T
from .sexpr import ParseError, SList, Tok, parse_sexprs, pos


class Unsupported(ParseError):
    """Well-formed input that lies outside the supported fragment."""


LOGICS = ("BV", "QF_BV")


@dataclass
class Script:
    logic: str = None
    decls: dict = field(default_factory=dict)  # name -> var, in declaration order
    assertions: list = field(default_factory=list)
    check_sat: bool = False
    info: list = field(default_factory=list)

    def formula(self):
        return T.and_(*self.assertions)

    def same_as(self, other):
        return (self.logic == other.logic and list(self.decls.items()) == list(other.decls.items())
                and len(self.assertions) == len(other.assertions)
                and all(a is b for a, b in zip(self.assertions, other.assertions))
                and self.check_sat == other.check_sat)


def _err(msg, e, cls=ParseError):
    return cls(msg, *pos(e))


_BV_BIN = {"bvadd": "bvadd", "bvmul": "bvmul", "bvand": "bvand", "bvor": "bvor",
           "bvshl": "bvshl", "bvlshr": "bvlshr", "bvashr": "bvashr", "bvudiv": "bvudiv",
           "bvurem": "bvurem"}
_LEFT_ASSOC = {"bvadd", "bvmul", "bvand", "bvor", "bvxor", "concat"}
_REL = {"bvult": "ult", "bvugt": "ugt", "bvule": "ule", "bvuge": "uge",
        "bvslt": "slt", "bvsgt": "sgt", "bvsle": "sle", "bvsge": "sge"}


def _bvxor(a, b):
    return T.band(T.bor(a, b), T.bvnot(T.band(a, b)))


_DERIVED = {
    "bvsub": T.sub,
    "bvxor": _bvxor,
    "bvnand": lambda a, b: T.bvnot(T.band(a, b)),
    "bvnor": lambda a, b: T.bvnot(T.bor(a, b)),
    "bvxnor": lambda a, b: T.bvnot(_bvxor(a, b)),
}


class _Parser:
    def __init__(self):
        self.script = Script()

    # -- sorts and literals -------------------------------------------------

    def sort(self, e):
        if isinstance(e, Tok):
            if e == "Bool":
                return 0
            raise _err(f"unsupported sort {e}", e, Unsupported)
        if len(e) == 3 and e[0] == "_" and e[1] == "BitVec":
            w = self.numeral(e[2])
            if w < 1:
                raise _err("bit-vector width must be positive", e)
            if w > bv.MAX_WIDTH:
                raise _err(f"width {w} exceeds the supported maximum {bv.MAX_WIDTH}", e, Unsupported)
            return w
        raise _err("unsupported sort", e, Unsupported)

    @staticmethod
    def numeral(e):
        if not isinstance(e, Tok) or e.kind != "symbol" or not e.isdigit():
            raise _err(f"expected a numeral, got {e}", e)
        return int(e)

    def literal(self, e):
        s = str(e)
        if s.startswith("#b") and len(s) > 2 and set(s[2:]) <= {"0", "1"}:
            return self.bv_const(int(s[2:], 2), len(s) - 2, e)
        if s.startswith("#x") and len(s) > 2:
            try:
                v = int(s[2:], 16)
            except ValueError:
                raise _err(f"bad hexadecimal literal {s}", e) from None
            return self.bv_const(v, 4 * (len(s) - 2), e)
        return None

    @staticmethod
    def bv_const(v, w, e):
        if w > bv.MAX_WIDTH:
            raise _err(f"width {w} exceeds the supported maximum {bv.MAX_WIDTH}", e, Unsupported)
        return T.const(v, w)

    # -- terms ----------------------------------------------------------------

    def term(self, e, env):
        if isinstance(e, Tok):
            if e.kind == "symbol":
                if e == "true":
                    return T.TRUE
                if e == "false":
                    return T.FALSE
                c = self.literal(e)
                if c is not None:
                    return c
            if e.kind in ("symbol", "quoted"):
                for scope in reversed(env):
                    if str(e) in scope:
                        return scope[str(e)]
                v = self.script.decls.get(str(e))
                if v is not None:
                    return v
                raise _err(f"unknown symbol {e}", e)
            raise _err(f"unexpected token {e}", e)
        if not e:
            raise _err("empty application", e)
        head = e[0]
        if isinstance(head, SList):
            return self.indexed(head, e[1:], env, e)
        name = str(head)
        if name == "let":
            return self.let(e, env)
        if name in ("forall", "exists"):
            return self.quant(name, e, env)
        if name == "_":
            if len(e) == 3 and isinstance(e[1], Tok) and e[1].startswith("bv") and e[1][2:].isdigit():
                w = self.numeral(e[2])
                if w < 1:
                    raise _err("bit-vector width must be positive", e)
                return self.bv_const(int(e[1][2:]), w, e)
            raise _err("unsupported indexed term", e, Unsupported)
        if name == "!":
            raise _err("annotations are not supported", e, Unsupported)
        args = [self.term(a, env) for a in e[1:]]
        try:
            return self.apply(name, args, e)
        except T.SortError as ex:
            raise _err(f"ill-sorted application of {name}: {ex}", e) from None

    def apply(self, name, args, e):
        def arity(n):
            if len(args) != n:
                raise _err(f"{name} expects {n} argument(s), got {len(args)}", e)

        def at_least(n):
            if len(args) < n:
                raise _err(f"{name} expects at least {n} arguments", e)

        if name == "not":
            arity(1)
            return T.not_(args[0])
        if name in ("and", "or"):
            if not args:
                return T.TRUE if name == "and" else T.FALSE
            return T.and_(*args) if name == "and" else T.or_(*args)
        if name == "=>":
            at_least(2)
            r = args[-1]
            for a in reversed(args[:-1]):
                r = T.implies(a, r)
            return r
        if name == "xor":
            at_least(2)
            r = args[0]
            for a in args[1:]:
                r = T.not_(T.iff(r, a))
            return r
        if name == "=":
            at_least(2)
            if args[0].is_bool:
                parts = [T.iff(a, b) for a, b in zip(args, args[1:])]
            else:
                parts = [T.eq(a, b) for a, b in zip(args, args[1:])]
            return T.and_(*parts)
        if name == "distinct":
            at_least(2)
            parts = []
            for i in range(len(args)):
                for j in range(i + 1, len(args)):
                    a, b = args[i], args[j]
                    parts.append(T.not_(T.iff(a, b)) if a.is_bool else T.ne(a, b))
            return T.and_(*parts)
        if name == "ite":
            arity(3)
            return T.ite(*args)
        if name in ("bvnot", "bvneg"):
            arity(1)
            return T.mk(name, args[0])
        if name in _REL:
            arity(2)
            return T.mk(_REL[name], *args)
        if name in _LEFT_ASSOC:
            at_least(2)
            f = T.concat if name == "concat" else (_DERIVED.get(name) or
                                                   (lambda a, b, n=name: T.mk(n, a, b)))
            r = args[0]
            for a in args[1:]:
                r = f(r, a)
            return r
        if name in _BV_BIN:
            arity(2)
            return T.mk(name, *args)
        if name in _DERIVED:
            arity(2)
            return _DERIVED[name](*args)
        raise _err(f"unsupported operator {name}", e, Unsupported)

    def indexed(self, head, rest, env, e):
        if len(head) < 2 or head[0] != "_":
            raise _err("unsupported application", e, Unsupported)
        op = str(head[1])
        idx = [self.numeral(i) for i in head[2:]]
        args = [self.term(a, env) for a in rest]
        if len(args) != 1:
            raise _err(f"{op} expects one argument", e)
        (a,) = args
        if a.is_bool:
            raise _err(f"{op} expects a bit-vector", e)
        try:
            if op == "extract" and len(idx) == 2:
                return T.extract(a, idx[0], idx[1])
            if op in ("zero_extend", "sign_extend") and len(idx) == 1:
                k = idx[0]
                if k == 0:
                    return a
                if a.width + k > bv.MAX_WIDTH:
                    raise _err(f"width {a.width + k} exceeds the supported maximum", e, Unsupported)
                if op == "zero_extend":
                    return T.concat(T.const(0, k), a)
                sign = T.eq(T.extract(a, a.width - 1, a.width - 1), T.const(1, 1))
                return T.concat(T.ite(sign, T.const(bv.mask(k), k), T.const(0, k)), a)
        except T.SortError as ex:
            raise _err(str(ex), e) from None
        raise _err(f"unsupported indexed operator {op}", e, Unsupported)

    def let(self, e, env):
        if len(e) != 3 or not isinstance(e[1], SList):
            raise _err("malformed let", e)
        scope = {}
        for b in e[1]:
            if not (isinstance(b, SList) and len(b) == 2 and isinstance(b[0], Tok)):
                raise _err("malformed let binding", b)
            scope[str(b[0])] = self.term(b[1], env)
        return self.term(e[2], env + [scope])

    def quant(self, q, e, env):
        if len(e) != 3 or not isinstance(e[1], SList) or not e[1]:
            raise _err(f"malformed {q}", e)
        scope = {}
        vs = []
        for b in e[1]:
            if not (isinstance(b, SList) and len(b) == 2 and isinstance(b[0], Tok)):
                raise _err("malformed sorted variable", b)
            w = self.sort(b[1])
            if w == 0:
                raise _err("quantified variables must be bit-vectors", b, Unsupported)
            v = T.var(str(b[0]), w)
            scope[str(b[0])] = v
            vs.append(v)
        body = self.term(e[2], env + [scope])
        if not body.is_bool:
            raise _err(f"body of {q} is not Boolean", e)
        return T.mk(q, *vs, body)

    # -- commands -------------------------------------------------------------

    def command(self, c):
        s = self.script
        if not isinstance(c, SList) or not c or not isinstance(c[0], Tok):
            raise _err("expected a command", c)
        name = str(c[0])
        if name == "set-logic":
            if len(c) != 2:
                raise _err("set-logic expects one argument", c)
            if s.logic is not None:
                raise _err("logic already set", c)
            if c[1] not in LOGICS:
                raise _err(f"unsupported logic {c[1]}", c[1], Unsupported)
            s.logic = str(c[1])
        elif name == "set-info":
            s.info.append(c[1:])
        elif name in ("declare-const", "declare-fun"):
            if name == "declare-const":
                if len(c) != 3:
                    raise _err("declare-const expects a name and a sort", c)
                sym, sort = c[1], c[2]
            else:
                if len(c) != 4 or not isinstance(c[2], SList):
                    raise _err("declare-fun expects a name, argument sorts and a sort", c)
                if len(c[2]):
                    raise _err("uninterpreted functions are not supported", c, Unsupported)
                sym, sort = c[1], c[3]
            if not isinstance(sym, Tok) or sym.kind not in ("symbol", "quoted"):
                raise _err("expected a symbol", sym)
            if sym.startswith("@") or sym.startswith("."):
                raise _err(f"symbol {sym} is reserved", sym)
            if str(sym) in s.decls:
                raise _err(f"{sym} is already declared", sym)
            s.decls[str(sym)] = T.var(str(sym), self.sort(sort))
        elif name == "assert":
            if len(c) != 2:
                raise _err("assert expects one term", c)
            f = self.term(c[1], [])
            if not f.is_bool:
                raise _err("asserted term is not Boolean", c)
            if s.logic == "QF_BV" and T.contains_binder(f, T.QUANTIFIERS):
                raise _err("quantifier in a QF_BV script", c)
            s.assertions.append(f)
        elif name == "check-sat":
            s.check_sat = True
        elif name == "exit":
            return False
        else:
            raise _err(f"unsupported command {name}", c, Unsupported)
        return True


def parse(text):
    p = _Parser()
    for c in parse_sexprs(text):
        if not p.command(c):
            break
    if p.script.logic is None:
        raise ParseError("missing set-logic", 1, 1)
    return p.script


def print_script(script):
    out = []
    if script.logic:
        out.append(f"(set-logic {script.logic})")
    for name, v in script.decls.items():
        out.append(f"(declare-fun {T.symbol(name)} () {T.sort_str(v.width)})")
    for a in script.assertions:
        out.append(f"(assert {T.to_smtlib(a)})")
    if script.check_sat:
        out.append("(check-sat)")
    return "\n".join(out) + "\n"


def script_for(formula, logic="BV", check_sat=True):
    """A script asserting ``formula`` with its free constants declared."""
    s = Script(logic=logic, check_sat=check_sat)
    for v in sorted(T.free_vars(formula), key=lambda v: v.name):
        s.decls[v.name] = v
    s.assertions.append(formula)
    return s
