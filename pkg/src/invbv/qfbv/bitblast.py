"""Tseitin bit-blasting of quantifier-free, choice-free formulas.

Bit-vectors become lists of literals, least significant bit first.  A gate
builder does constant folding and structural hashing; literal ``TRUE`` is a
variable fixed by a unit clause.
"""
from ..term import BINDERS


class CnfSink:
    """Collects a CNF in memory; stands in for a solver when only the CNF is wanted."""

    def __init__(self):
        self.nvars = 0
        self.clauses = []

    def new_var(self):
        self.nvars += 1
        return self.nvars

    def add_clause(self, lits):
        self.clauses.append(list(lits))
        return True


class GateBuilder:
    def __init__(self, sink):
        self.sink = sink
        self.TRUE = sink.new_var()
        self.FALSE = -self.TRUE
        sink.add_clause([self.TRUE])
        self.cache = {}

    def fresh(self):
        return self.sink.new_var()

    def clause(self, *lits):
        self.sink.add_clause(lits)

    def const(self, b):
        return self.TRUE if b else self.FALSE

    def and2(self, a, b):
        T, F = self.TRUE, self.FALSE
        if a == F or b == F or a == -b:
            return F
        if a == T or a == b:
            return b
        if b == T:
            return a
        if a > b:
            a, b = b, a
        key = ("and", a, b)
        g = self.cache.get(key)
        if g is None:
            g = self.fresh()
            self.clause(-g, a)
            self.clause(-g, b)
            self.clause(g, -a, -b)
            self.cache[key] = g
        return g

    def or2(self, a, b):
        return -self.and2(-a, -b)

    def and_n(self, lits):
        T, F = self.TRUE, self.FALSE
        out = []
        seen = set()
        for a in lits:
            if a == F or -a in seen:
                return F
            if a == T or a in seen:
                continue
            seen.add(a)
            out.append(a)
        if not out:
            return T
        if len(out) == 1:
            return out[0]
        if len(out) == 2:
            return self.and2(out[0], out[1])
        key = ("andn",) + tuple(sorted(out))
        g = self.cache.get(key)
        if g is None:
            g = self.fresh()
            for a in out:
                self.clause(-g, a)
            self.clause(g, *(-a for a in out))
            self.cache[key] = g
        return g

    def or_n(self, lits):
        return -self.and_n([-a for a in lits])

    def xor2(self, a, b):
        T, F = self.TRUE, self.FALSE
        if a == F:
            return b
        if b == F:
            return a
        if a == T:
            return -b
        if b == T:
            return -a
        if a == b:
            return F
        if a == -b:
            return T
        sign = 1
        if a < 0:
            a, sign = -a, -sign
        if b < 0:
            b, sign = -b, -sign
        if a > b:
            a, b = b, a
        key = ("xor", a, b)
        g = self.cache.get(key)
        if g is None:
            g = self.fresh()
            self.clause(-g, a, b)
            self.clause(-g, -a, -b)
            self.clause(g, -a, b)
            self.clause(g, a, -b)
            self.cache[key] = g
        return g * sign

    def mux(self, c, a, b):
        """``c ? a : b``"""
        T, F = self.TRUE, self.FALSE
        if c == T or a == b:
            return a
        if c == F:
            return b
        if a == T or a == c:
            return self.or2(c, b)
        if a == F or a == -c:
            return self.and2(-c, b)
        if b == T or b == -c:
            return self.or2(-c, a)
        if b == F or b == c:
            return self.and2(c, a)
        if c < 0:
            c, a, b = -c, b, a
        key = ("mux", c, a, b)
        g = self.cache.get(key)
        if g is None:
            g = self.fresh()
            self.clause(-c, -a, g)
            self.clause(-c, a, -g)
            self.clause(c, -b, g)
            self.clause(c, b, -g)
            self.clause(-a, -b, g)
            self.clause(a, b, -g)
            self.cache[key] = g
        return g

    def maj(self, a, b, c):
        return self.or2(self.and2(a, b), self.and2(c, self.xor2(a, b)))

    # -- word-level circuits ------------------------------------------------

    def add(self, a, b, cin=None):
        carry = self.FALSE if cin is None else cin
        out = []
        for x, y in zip(a, b):
            t = self.xor2(x, y)
            out.append(self.xor2(t, carry))
            carry = self.or2(self.and2(x, y), self.and2(carry, t))
        return out

    def neg(self, a):
        return self.add([-x for x in a], [self.FALSE] * len(a), self.TRUE)

    def mul(self, a, b):
        w = len(a)
        acc = [self.FALSE] * w
        for i in range(w):
            if b[i] == self.FALSE:
                continue
            pp = [self.FALSE] * i + [self.and2(a[j - i], b[i]) for j in range(i, w)]
            acc = acc[:i] + self.add(acc[i:], pp[i:])
        return acc

    def udivrem(self, a, b):
        """Restoring division array.  With ``b = 0`` every step subtracts
        nothing, which yields all-ones and ``a`` as SMT-LIB requires."""
        w = len(a)
        F, T = self.FALSE, self.TRUE
        rem = [F] * w
        q = [F] * w
        nb = [-x for x in b] + [T, T]
        for i in range(w - 1, -1, -1):
            cur = [a[i]] + rem  # rem shifted left by one, w + 1 bits
            # cur - b on w + 2 bits; the top bit is the sign of the difference
            diff = self.add(cur + [F], nb, T)
            ge = -diff[w + 1]
            q[i] = ge
            rem = [self.mux(ge, d, c) for d, c in zip(diff[:w], cur[:w])]
        return q, rem

    def eq(self, a, b):
        return self.and_n([-self.xor2(x, y) for x, y in zip(a, b)])

    def ult(self, a, b):
        lt = self.FALSE
        for x, y in zip(a, b):
            # a < b on bits 0..i: (~x & y) | (x == y & lt)
            same = -self.xor2(x, y)
            lt = self.or2(self.and2(-x, y), self.and2(same, lt))
        return lt

    def slt(self, a, b):
        return self.ult(a[:-1] + [-a[-1]], b[:-1] + [-b[-1]])

    def _overflow(self, b):
        # amount >= width once any bit at or above position ceil(log2 w) is set,
        # or when the low bits encode a value >= w
        w = len(b)
        k = max(1, (w - 1).bit_length())
        high = self.or_n(b[k:]) if k < w else self.FALSE
        if (1 << k) > w and k <= w:
            wbits = [self.const((w >> i) & 1) for i in range(k)]
            low_ge = -self.ult(b[:k], wbits)
            return self.or2(high, low_ge), k
        return high, k

    def shift(self, a, b, kind):
        w = len(a)
        fill = a[-1] if kind == "ashr" else self.FALSE
        over, k = self._overflow(b)
        cur = list(a)
        for i in range(min(k, w)):
            amt = 1 << i
            if amt >= w:
                break
            sel = b[i]
            if kind == "shl":
                moved = [self.FALSE] * amt + cur[:w - amt]
            else:
                moved = cur[amt:] + [fill] * amt
            cur = [self.mux(sel, m, c) for m, c in zip(moved, cur)]
        return [self.mux(over, fill, c) for c in cur]


class BitBlaster:
    """Maps terms to literals/bit-vectors, emitting clauses into ``sink``."""

    def __init__(self, sink):
        self.g = GateBuilder(sink)
        self.memo = {}
        self.var_bits = {}
        self.divs = {}

    def assert_formula(self, f):
        if f.op == "and":
            for a in f.args:
                self.assert_formula(a)
            return
        self.g.clause(self.lit(f))

    def lit(self, f):
        return self._go(f)

    def bits(self, t):
        return self._go(t)

    def _go(self, t):
        r = self.memo.get(t)
        if r is not None:
            return r
        # iterative post-order to stay clear of the recursion limit
        stack = [(t, False)]
        memo = self.memo
        while stack:
            n, ready = stack.pop()
            if n in memo:
                continue
            if not ready:
                stack.append((n, True))
                for a in n.args:
                    if a not in memo:
                        stack.append((a, False))
                continue
            memo[n] = self._encode(n)
        return memo[t]

    def _var(self, n):
        if n.width == 0:
            v = self.g.fresh()
            self.var_bits[n] = [v]
            return v
        bits = [self.g.fresh() for _ in range(n.width)]
        self.var_bits[n] = bits
        return bits

    def _divmod(self, a_node, b_node):
        key = (a_node, b_node)
        r = self.divs.get(key)
        if r is None:
            r = self.g.udivrem(self.memo[a_node], self.memo[b_node])
            self.divs[key] = r
        return r

    def _encode(self, n):
        g = self.g
        op = n.op
        m = self.memo
        if op == "const":
            return [g.const((n.payload >> i) & 1) for i in range(n.width)]
        if op == "bconst":
            return g.const(n.payload)
        if op == "var":
            return self._var(n)
        if op in BINDERS:
            raise ValueError("bit-blasting needs a quantifier-free, choice-free formula")
        args = [m[a] for a in n.args]
        if op == "bvnot":
            return [-x for x in args[0]]
        if op == "bvneg":
            return g.neg(args[0])
        if op == "bvadd":
            return g.add(args[0], args[1])
        if op == "bvmul":
            return g.mul(args[0], args[1])
        if op == "bvand":
            return [g.and2(x, y) for x, y in zip(*args)]
        if op == "bvor":
            return [g.or2(x, y) for x, y in zip(*args)]
        if op == "bvshl":
            return g.shift(args[0], args[1], "shl")
        if op == "bvlshr":
            return g.shift(args[0], args[1], "lshr")
        if op == "bvashr":
            return g.shift(args[0], args[1], "ashr")
        if op == "bvudiv":
            return self._divmod(n.args[0], n.args[1])[0]
        if op == "bvurem":
            return self._divmod(n.args[0], n.args[1])[1]
        if op == "concat":
            return args[1] + args[0]
        if op == "extract":
            hi, lo = n.payload
            return args[0][lo:hi + 1]
        if op == "eq":
            return g.eq(*args)
        if op == "ult":
            return g.ult(args[0], args[1])
        if op == "ugt":
            return g.ult(args[1], args[0])
        if op == "ule":
            return -g.ult(args[1], args[0])
        if op == "uge":
            return -g.ult(args[0], args[1])
        if op == "slt":
            return g.slt(args[0], args[1])
        if op == "sgt":
            return g.slt(args[1], args[0])
        if op == "sle":
            return -g.slt(args[1], args[0])
        if op == "sge":
            return -g.slt(args[0], args[1])
        if op == "not":
            return -args[0]
        if op == "and":
            return g.and_n(args)
        if op == "or":
            return g.or_n(args)
        if op == "implies":
            return g.or2(-args[0], args[1])
        if op == "iff":
            return -g.xor2(args[0], args[1])
        if op == "ite":
            c, a, b = args
            if n.width == 0:
                return g.mux(c, a, b)
            return [g.mux(c, x, y) for x, y in zip(a, b)]
        raise ValueError(f"cannot bit-blast {op}")

    def model_value(self, n, value_of):
        """Value of variable ``n`` given ``value_of(lit) -> bool``."""
        bits = self.var_bits.get(n)
        if bits is None:
            return False if n.width == 0 else 0
        if n.width == 0:
            return value_of(bits[0])
        return sum(1 << i for i, b in enumerate(bits) if value_of(b))


def bitblast(phi):
    """CNF for ``phi`` as ``(CnfSink, {var: bit literals})``."""
    sink = CnfSink()
    bb = BitBlaster(sink)
    bb.assert_formula(phi)
    return sink, bb.var_bits
