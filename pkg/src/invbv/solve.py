"""Symbolic solutions for a variable in a literal that is linear in it.

``solve(x, lit)`` peels one operator at a time off the side holding ``x``.
Invertible operators ({~, -, +} and multiplication by an odd constant) are
undone exactly over (dis)equality; every other step introduces a choice
term ``eps y. (cond => d[y] rel t)`` guarded by the row's invertibility
condition, and the recursion continues with an equality against it.
"""
from dataclasses import dataclass

from . import catalog
from .catalog import CatalogMiss, IcKey, inverse_of, orient, shape
from .term import choice, fresh_var, free_vars, implies, mk, occurrences, rel, substitute, var

Unsupported = CatalogMiss


class NotLinear(ValueError):
    pass


@dataclass(frozen=True)
class SolvedForm:
    term: object
    used_choice: bool


# Bound name shared by every choice term.  It never occurs free (nested choices
# only appear inside ``t``, which is closed over it), so reusing it cannot
# capture, and alpha-equivalent solved forms come out identical.
BOUND_NAME = "@eps"


def mk_conditional_choice(cond, d, hole, rel_name, t):
    """``eps y. (cond => d[y] rel t)`` where ``d`` mentions the placeholder ``hole``."""
    y = var(BOUND_NAME, hole.width)
    return choice(y, implies(cond, rel(rel_name, substitute(d, {hole: y}), t)))


def _invertible(op, lhs, child):
    if op in ("bvnot", "bvneg", "bvadd"):
        return True
    if op == "bvmul":
        a, b = lhs.args
        other = b if a is child else a
        return other.op == "const" and other.payload & 1 == 1
    return False


def solve(x, lit):
    """Solved form for ``x`` in ``lit`` (a Literal or a Boolean relation term)."""
    lhs, r, t = orient(x, lit)
    if occurrences(x, lhs) != 1 or x in free_vars(t):
        raise NotLinear(f"literal is not linear in {x.name}")
    used = False
    while True:
        if lhs is x:
            if r == "eq":
                return SolvedForm(t, used)
            cond = catalog.base_case_ic(x, r, t)
            return SolvedForm(mk_conditional_choice(cond, x, x, r, t), True)
        op = lhs.op
        if op not in catalog.OP_NAMES:
            raise Unsupported(f"operator {op} cannot be solved for")
        name, side, s, child = shape(x, lhs)
        hole = fresh_var(child.width, "h")
        d = _replace_child(lhs, child, hole)
        if r in ("eq", "ne") and _invertible(op, lhs, child):
            t = inverse_of(hole, d, t)
            lhs = child
            continue
        key = IcKey(name, side, r)
        entry = catalog.lookup(key)
        if name == "add" or side == "unary":
            cond = entry.condition(None, t)
        else:
            cond = entry.condition(s, t, x_width=child.width)
        t = mk_conditional_choice(cond, d, hole, r, t)
        used = True
        lhs, r = child, "eq"


def _replace_child(lhs, child, hole):
    args = tuple(hole if a is child else a for a in lhs.args)
    return mk(lhs.op, *args, payload=lhs.payload)
