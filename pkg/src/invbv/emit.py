"""Benchmark emitters: SMT-LIB equivalence checks for catalog rows and SyGuS problems."""
import os

from . import bv
from .catalog import CATALOG, lookup
from .smtlib import Script, print_script
from .term import (ALL_RELATIONS, const, exists, free_vars, iff, mk, not_, or_, rel, sexpr_str,
                   to_sexpr, var)
from .verifier import literal_for


def verification_shape(key, w):
    """``(wx, ws, wt, lo)`` used for the emitted script of ``key`` at total width ``w``.

    Concat splits ``w`` between ``x`` (upper half rounded up) and ``s``;
    extract takes the upper half of an ``x`` of width ``w``.  None when the
    row has no instance at that width.
    """
    if key.op == "concat":
        if w < 2:
            return None
        wx = (w + 1) // 2
        return wx, w - wx, w, 0
    if key.op == "extract":
        wt = (w + 1) // 2
        return w, None, wt, w - wt
    if key.op in ("var", "not", "neg"):
        return w, None, w, 0
    return w, w, w, 0


def verification_formula(key, w):
    shape = verification_shape(key, w)
    if shape is None:
        return None
    wx, ws, wt, lo = shape
    entry = lookup(key)
    x = var("x", wx)
    t = var("t", wt)
    s = var("s", ws) if ws else None
    lit = literal_for(key, x, s, t, lo)
    cond = entry.condition(s, t, x_width=wx)
    return not_(iff(cond, exists([x], lit)))


def emit_verification_smt2(key, w):
    """Script whose expected answer is unsat iff the row's condition is exact at ``w``."""
    f = verification_formula(key, w)
    if f is None:
        return None
    s = Script(logic="BV", check_sat=True)
    for v in sorted(free_vars(f), key=lambda v: v.name):
        s.decls[v.name] = v
    s.assertions.append(f)
    return f"; {key} at width {w}\n(set-info :status unsat)\n" + print_script(s)


def verification_filename(key, w):
    return f"ic_{key.op}_{key.side}_{key.rel}_w{w}.smt2"


def emit_verification_dir(out, widths=range(1, bv.MAX_WIDTH + 1), keys=None):
    """Write every script; returns the list of paths."""
    os.makedirs(out, exist_ok=True)
    paths = []
    for key in (keys or list(CATALOG)):
        for w in widths:
            text = emit_verification_smt2(key, w)
            if text is None:
                continue
            p = os.path.join(out, verification_filename(key, w))
            with open(p, "w") as fh:
                fh.write(text)
            paths.append(p)
    return paths


# -- SyGuS --------------------------------------------------------------------

SYGUS_OPS = ("bvmul", "bvurem", "bvudiv", "bvand", "bvor", "bvlshr", "bvashr", "bvshl")
# and/or are symmetric in x; the other six are emitted with x on either side
SYGUS_SIDES = {op: (("left",) if op in ("bvand", "bvor") else ("left", "right")) for op in SYGUS_OPS}

_B_R = ["(not B)", "(and B B)", "(= V V)", "(bvult V V)", "(bvslt V V)"]
_V_R = ["(bvnot V)", "(bvneg V)", "(bvand V V)", "(bvor V V)"]
_B_G = _B_R[:2] + ["(or B B)"] + _B_R[2:] + ["(bvuge V V)", "(bvsge V V)"]
_V_G = ["(bvnot V)", "(bvadd V V)", "(bvneg V)", "(bvand V V)", "(bvor V V)", "(bvlshr V V)",
        "(bvshl V V)"]
GRAMMARS = {"r": (_B_R, _V_R), "g": (_B_G, _V_G)}


def sygus_problems():
    """The ``(op, side, rel)`` grid: 14 operator placements times 10 relations."""
    return [(op, side, r) for op in SYGUS_OPS for side in SYGUS_SIDES[op] for r in ALL_RELATIONS]


def sygus_constraint(op, side, r, w=4):
    s, t = var("s", w), var("t", w)
    parts = []
    for i in range(1 << w):
        c = const(i, w)
        lhs = mk(op, c, s) if side == "left" else mk(op, s, c)
        parts.append(rel(r, lhs, t))
    return or_(*parts)


def emit_sygus(op, r, w=4, grammar="r", side="left"):
    if grammar not in GRAMMARS:
        raise ValueError(f"unknown grammar {grammar!r}")
    bools, bvs = GRAMMARS[grammar]
    srt = f"(_ BitVec {w})"
    consts = [const(0, w), const(bv.min_signed_int(w), w), const(bv.max_signed_int(w), w)]
    leaves = ["s", "t"] + [sexpr_str(to_sexpr(c)) for c in consts]
    body = sexpr_str(to_sexpr(sygus_constraint(op, side, r, w)))
    lines = [
        f"; x {'left' if side == 'left' else 'right'} of {op}, relation {r}, width {w}",
        "(set-logic BV)",
        f"(synth-fun C ((s {srt}) (t {srt})) Bool",
        f"  ((B Bool) (V {srt}))",
        f"  ((B Bool ({' '.join(bools)}))",
        f"   (V {srt} ({' '.join(leaves + bvs)}))))",
        f"(declare-var s {srt})",
        f"(declare-var t {srt})",
        f"(constraint (= {body} (C s t)))",
        "(check-synth)",
    ]
    return "\n".join(lines) + "\n"


def sygus_filename(op, side, r, grammar):
    return f"sygus_{grammar}_{op}_{side}_{r}.sl"


def emit_sygus_dir(out, grammar="r", w=4):
    os.makedirs(out, exist_ok=True)
    paths = []
    for op, side, r in sygus_problems():
        p = os.path.join(out, sygus_filename(op, side, r, grammar))
        with open(p, "w") as fh:
            fh.write(emit_sygus(op, r, w, grammar, side))
        paths.append(p)
    return paths
