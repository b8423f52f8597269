import itertools

import pytest

from invbv import bv


def ref(op, a, b, w):
    # textbook definitions over unbounded integers, reduced at the end
    m = 1 << w
    sa = a - m if a >= m // 2 else a
    if op == "bvadd":
        return (a + b) % m
    if op == "bvmul":
        return (a * b) % m
    if op == "bvand":
        return a & b
    if op == "bvor":
        return a | b
    if op == "bvudiv":
        return m - 1 if b == 0 else a // b
    if op == "bvurem":
        return a if b == 0 else a % b
    if op == "bvshl":
        return 0 if b >= w else (a * 2 ** b) % m
    if op == "bvlshr":
        return 0 if b >= w else a // 2 ** b
    if op == "bvashr":
        return (sa // 2 ** min(b, w)) % m
    raise KeyError(op)


@pytest.mark.parametrize("w", [1, 2, 3, 4])
@pytest.mark.parametrize("op", sorted(bv.BINOPS))
def test_binops_match_reference(op, w):
    for a, b in itertools.product(range(1 << w), repeat=2):
        assert bv.BINOPS[op](a, b, w) == ref(op, a, b, w), (op, a, b, w)


@pytest.mark.parametrize("w", [1, 3, 4])
def test_relations(w):
    m = 1 << w
    for a, b in itertools.product(range(m), repeat=2):
        sa, sb = bv.to_signed(a, w), bv.to_signed(b, w)
        assert bv.CMPS["ult"](a, b, w) == (a < b)
        assert bv.CMPS["uge"](a, b, w) == (a >= b)
        assert bv.CMPS["slt"](a, b, w) == (sa < sb)
        assert bv.CMPS["sge"](a, b, w) == (sa >= sb)
        assert bv.CMPS["eq"](a, b, w) == (a == b)


def test_division_by_zero():
    assert bv.bvudiv(5, 0, 4) == 15
    assert bv.bvurem(5, 0, 4) == 5


def test_wide_shift_amounts():
    w = 64
    top = 1 << 63
    assert bv.bvshl(1, 64, w) == 0
    assert bv.bvlshr(top, 1 << 40, w) == 0
    assert bv.bvashr(top, bv.mask(64), w) == bv.mask(64)
    assert bv.bvashr(top >> 1, 70, w) == 0


def test_signed_bounds():
    assert bv.min_signed(4).value == 8 and bv.min_signed(4).signed == -8
    assert bv.max_signed(4).value == 7
    assert bv.min_signed(1).signed == -1 and bv.max_signed(1).value == 0


def test_concat_extract():
    a, b = bv.BitVec(3, 0b101), bv.BitVec(2, 0b10)
    c = bv.concat(a, b)
    assert c == bv.BitVec(5, 0b10110)
    assert bv.extract(c, 4, 2) == a
    assert bv.extract(c, 1, 0) == b
    with pytest.raises(bv.WidthError):
        bv.extract(c, 5, 0)
    with pytest.raises(bv.WidthError):
        bv.concat(bv.BitVec(40, 1), bv.BitVec(30, 1))


def test_width_checks():
    for w in (0, 65, -1, "4"):
        with pytest.raises(bv.WidthError):
            bv.check_width(w)
    with pytest.raises(bv.WidthError):
        bv.eval_binop("bvadd", bv.BitVec(3, 1), bv.BitVec(4, 1))


def test_mul_inverse():
    for w in (1, 4, 8, 64):
        for c in (1, 3, 5, (1 << w) - 1):
            c &= bv.mask(w)
            if c % 2 == 0:
                continue
            inv = bv.mul_inverse_odd(bv.BitVec(w, c))
            assert bv.bvmul(c, inv.value, w) == 1


def test_values_are_reduced():
    assert bv.BitVec(4, 17).value == 1
    assert str(bv.BitVec(4, 5)) == "#b0101"
    assert bv.eval_unop("bvneg", bv.BitVec(4, 1)).value == 15
    assert bv.eval_unop("bvnot", bv.BitVec(4, 0)).value == 15
