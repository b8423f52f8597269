"""Fixed-width bit-vector values with SMT-LIB 2 operator semantics.

The integer kernels (``add``, ``udiv``, ...) work on plain Python ints that
are already reduced modulo ``2**w``; :class:`BitVec` wraps them for callers
that want width-checked values.
"""
from dataclasses import dataclass

MAX_WIDTH = 64


class WidthError(ValueError):
    """Operands of mismatched or unsupported width."""


def check_width(w):
    if not isinstance(w, int) or w < 1 or w > MAX_WIDTH:
        raise WidthError(f"bit-width {w!r} outside supported range 1..{MAX_WIDTH}")
    return w


def mask(w):
    return (1 << w) - 1


def min_signed_int(w):
    return 1 << (w - 1)


def max_signed_int(w):
    return (1 << (w - 1)) - 1


def to_signed(a, w):
    return a - (1 << w) if a >> (w - 1) else a


def from_signed(a, w):
    return a & mask(w)


# integer kernels; inputs must already be in range

def bvnot(a, w):
    return a ^ mask(w)


def bvneg(a, w):
    return -a & mask(w)


def bvadd(a, b, w):
    return (a + b) & mask(w)


def bvmul(a, b, w):
    return (a * b) & mask(w)


def bvand(a, b, w):
    return a & b


def bvor(a, b, w):
    return a | b


def bvshl(a, b, w):
    return 0 if b >= w else (a << b) & mask(w)


def bvlshr(a, b, w):
    return 0 if b >= w else a >> b


def bvashr(a, b, w):
    if a >> (w - 1):
        return mask(w) if b >= w else ((a - (1 << w)) >> b) & mask(w)
    return 0 if b >= w else a >> b


def bvudiv(a, b, w):
    return mask(w) if b == 0 else a // b


def bvurem(a, b, w):
    return a if b == 0 else a % b


UNOPS = {"bvnot": bvnot, "bvneg": bvneg}

BINOPS = {
    "bvadd": bvadd,
    "bvmul": bvmul,
    "bvand": bvand,
    "bvor": bvor,
    "bvshl": bvshl,
    "bvlshr": bvlshr,
    "bvashr": bvashr,
    "bvudiv": bvudiv,
    "bvurem": bvurem,
}


def _ult(a, b, w):
    return a < b


def _slt(a, b, w):
    return to_signed(a, w) < to_signed(b, w)


CMPS = {
    "eq": lambda a, b, w: a == b,
    "ne": lambda a, b, w: a != b,
    "ult": _ult,
    "ugt": lambda a, b, w: a > b,
    "ule": lambda a, b, w: a <= b,
    "uge": lambda a, b, w: a >= b,
    "slt": _slt,
    "sgt": lambda a, b, w: _slt(b, a, w),
    "sle": lambda a, b, w: not _slt(b, a, w),
    "sge": lambda a, b, w: not _slt(a, b, w),
}


def concat_int(a, b, wb):
    return (a << wb) | b


def extract_int(a, hi, lo):
    return (a >> lo) & mask(hi - lo + 1)


def mul_inverse_int(c, w):
    """Inverse of odd ``c`` modulo ``2**w``."""
    if c & 1 == 0:
        raise ValueError(f"{c} is even and has no inverse modulo 2**{w}")
    return pow(c, -1, 1 << w)


@dataclass(frozen=True)
class BitVec:
    width: int
    value: int

    def __post_init__(self):
        check_width(self.width)
        if not 0 <= self.value <= mask(self.width):
            object.__setattr__(self, "value", self.value & mask(self.width))

    @property
    def signed(self):
        return to_signed(self.value, self.width)

    def __repr__(self):
        return f"BitVec({self.width}, {self.value:#0{self.width + 2}b})"

    def __str__(self):
        return "#b" + format(self.value, f"0{self.width}b")


def _same_width(a, b):
    if a.width != b.width:
        raise WidthError(f"width mismatch: {a.width} vs {b.width}")
    return a.width


def eval_unop(op, a):
    return BitVec(a.width, UNOPS[op](a.value, a.width))


def eval_binop(op, a, b):
    w = _same_width(a, b)
    return BitVec(w, BINOPS[op](a.value, b.value, w))


def eval_cmp(rel, a, b):
    w = _same_width(a, b)
    return CMPS[rel](a.value, b.value, w)


def concat(a, b):
    return BitVec(check_width(a.width + b.width), concat_int(a.value, b.value, b.width))


def extract(a, hi, lo):
    if not 0 <= lo <= hi < a.width:
        raise WidthError(f"extract [{hi}:{lo}] out of range for width {a.width}")
    return BitVec(hi - lo + 1, extract_int(a.value, hi, lo))


def min_signed(w):
    return BitVec(w, min_signed_int(check_width(w)))


def max_signed(w):
    return BitVec(w, max_signed_int(check_width(w)))


def mul_inverse_odd(c):
    return BitVec(c.width, mul_inverse_int(c.value, c.width))
