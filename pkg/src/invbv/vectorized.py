"""Array-at-a-time evaluation of terms over many assignments at once.

Bit-vectors are ``uint64`` arrays, Booleans are ``bool`` arrays; inputs are
broadcast against each other.  Binders iterate over the bound variable's
whole range, so this is an exhaustive-checking tool for small widths.
"""
import itertools

import numpy as np

from . import bv
from .term import (BINDERS, BV_BINARY, RELATIONS, EvaluationError, free_vars)

U64 = np.uint64


def _m(w):
    return U64(bv.mask(w))


def _signed_key(a, w):
    # order-preserving map from signed w-bit values to unsigned ones
    return a ^ U64(1 << (w - 1))


def _to_int64(a, w):
    if w == 64:
        return a.view(np.int64)
    s = a.astype(np.int64)
    return np.where(s >= (1 << (w - 1)), s - (1 << w), s)


def _binop(op, a, b, w):
    m = _m(w)
    if op == "bvadd":
        return (a + b) & m
    if op == "bvmul":
        return (a * b) & m
    if op == "bvand":
        return a & b
    if op == "bvor":
        return a | b
    if op == "bvshl":
        return np.where(b >= w, U64(0), (a << np.minimum(b, U64(63))) & m)
    if op == "bvlshr":
        return np.where(b >= w, U64(0), a >> np.minimum(b, U64(63)))
    if op == "bvashr":
        sa = _to_int64(np.asarray(a, dtype=U64), w)
        amt = np.minimum(b, U64(w - 1)).astype(np.int64)
        return (sa >> amt).astype(U64) & m
    if op == "bvudiv":
        z = b == 0
        return np.where(z, m, a // np.where(z, U64(1), b))
    if op == "bvurem":
        z = b == 0
        return np.where(z, a, a % np.where(z, U64(1), b))
    raise ValueError(op)


def _rel(op, a, b, w):
    if op == "eq":
        return a == b
    if op in ("slt", "sgt", "sle", "sge"):
        a, b = _signed_key(a, w), _signed_key(b, w)
        op = "u" + op[1:]
    if op == "ult":
        return a < b
    if op == "ugt":
        return a > b
    if op == "ule":
        return a <= b
    if op == "uge":
        return a >= b
    raise ValueError(op)


class VectorEvaluator:
    def __init__(self, env, cap=8):
        self.env = {k: self._lift(k, v) for k, v in env.items()}
        self.cap = cap
        self.depth = {}
        self.memos = [{}]

    @staticmethod
    def _lift(k, v):
        if k.width == 0:
            return np.asarray(v, dtype=bool)
        return np.asarray(v, dtype=U64)

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
        memo = self.memos[self.level(n)]
        r = memo.get(n)
        if r is None:
            r = self.compute(n)
            memo[n] = r
        return r

    def _values(self, v):
        if v.width > self.cap:
            raise EvaluationError(f"binder over {v.width} bits exceeds evaluation cap {self.cap}")
        if v.width == 0:
            return (np.asarray(False), np.asarray(True))
        return [np.asarray(i, dtype=U64) for i in range(1 << v.width)]

    def _bind(self, vs):
        base = len(self.memos)
        # a binder may shadow an enclosing one with the same variable
        saved = ({v: self.env[v] for v in vs if v in self.env},
                 {v: self.depth[v] for v in vs if v in self.depth})
        for i, v in enumerate(vs):
            self.depth[v] = base + i
            self.memos.append({})
        return base, saved

    def _unbind(self, vs, base, saved):
        for v in vs:
            del self.depth[v]
            self.env.pop(v, None)
        self.env.update(saved[0])
        self.depth.update(saved[1])
        del self.memos[base:]

    def _assign(self, vs, vals, base):
        for i, (v, val) in enumerate(zip(vs, vals)):
            self.env[v] = val
            self.memos[base + i] = {}

    def compute(self, n):
        op = n.op
        if op == "const":
            return np.asarray(n.payload, dtype=U64)
        if op == "bconst":
            return np.asarray(n.payload)
        if op == "var":
            try:
                return self.env[n]
            except KeyError:
                raise EvaluationError(f"no value for variable {n.name}") from None
        if op in BV_BINARY:
            return _binop(op, self.run(n.args[0]), self.run(n.args[1]), n.width)
        if op in RELATIONS:
            return _rel(op, self.run(n.args[0]), self.run(n.args[1]), n.args[0].width)
        if op == "bvnot":
            return self.run(n.args[0]) ^ _m(n.width)
        if op == "bvneg":
            return (~self.run(n.args[0]) + U64(1)) & _m(n.width)
        if op == "not":
            return np.logical_not(self.run(n.args[0]))
        if op == "and":
            r = self.run(n.args[0])
            for a in n.args[1:]:
                r = np.logical_and(r, self.run(a))
            return r
        if op == "or":
            r = self.run(n.args[0])
            for a in n.args[1:]:
                r = np.logical_or(r, self.run(a))
            return r
        if op == "implies":
            return np.logical_or(np.logical_not(self.run(n.args[0])), self.run(n.args[1]))
        if op == "iff":
            return self.run(n.args[0]) == self.run(n.args[1])
        if op == "ite":
            return np.where(self.run(n.args[0]), self.run(n.args[1]), self.run(n.args[2]))
        if op == "concat":
            wb = n.args[1].width
            return (self.run(n.args[0]) << U64(wb)) | self.run(n.args[1])
        if op == "extract":
            hi, lo = n.payload
            return (self.run(n.args[0]) >> U64(lo)) & _m(hi - lo + 1)
        if op in BINDERS:
            return self._binder(n)
        raise ValueError(f"cannot evaluate {op}")

    def _binder(self, n):
        vs = list(n.args[:-1])
        body = n.args[-1]
        base, saved = self._bind(vs)
        try:
            if n.op == "choice":
                result = np.asarray(0, dtype=U64)
                found = np.asarray(False)
                for val in self._values(vs[0]):
                    self._assign(vs, (val,), base)
                    hit = np.logical_and(self.run(body), np.logical_not(found))
                    result = np.where(hit, val, result)
                    found = np.logical_or(found, hit)
                return result
            want_any = n.op == "exists"
            acc = np.asarray(not want_any)
            for vals in itertools.product(*(self._values(v) for v in vs)):
                self._assign(vs, vals, base)
                b = self.run(body)
                acc = np.logical_or(acc, b) if want_any else np.logical_and(acc, b)
            return acc
        finally:
            self._unbind(vs, base, saved)


def veval(t, env, cap=8):
    with np.errstate(over="ignore"):
        return VectorEvaluator(env, cap).run(t)


def grid(variables):
    """Every assignment to ``variables`` as broadcast-free flat arrays.

    Returns ``(env, count)``; entry ``i`` of each array is the ``i``-th
    assignment in lexicographic order (first variable most significant).
    """
    total_bits = sum(max(v.width, 1) for v in variables)
    count = 1 << total_bits
    idx = np.arange(count, dtype=U64)
    env = {}
    shift = total_bits
    for v in variables:
        wv = max(v.width, 1)
        shift -= wv
        vals = (idx >> U64(shift)) & _m(wv)
        env[v] = vals.astype(bool) if v.width == 0 else vals
    return env, count
