"""Ground satisfiability of quantifier-free BV formulas."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..rewrite import simplify
from ..term import BINDERS, contains_binder, evaluate, free_vars
from ..vectorized import grid, veval
from .bitblast import BitBlaster
from .sat import SAT, UNSAT, CDCLSolver


@dataclass
class GroundVerdict:
    status: str  # sat | unsat | unknown
    model: Optional[dict] = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def is_sat(self):
        return self.status == "sat"

    @property
    def is_unsat(self):
        return self.status == "unsat"


def _ordered_vars(phi):
    return sorted(free_vars(phi), key=lambda v: (v.name, v.width))


class Session:
    """Incremental ground context: assert formulas, then check under extra ones.

    ``check(extra)`` decides ``asserted and extra`` without keeping ``extra``;
    it is guarded by a fresh activation literal passed as an assumption.
    """

    def __init__(self, seed=0, solver_class=None):
        self.solver = (solver_class or CDCLSolver)(seed=seed)
        self.bb = BitBlaster(self.solver)
        self.vars = set()
        self.assertions = []

    def add(self, f):
        if contains_binder(f, BINDERS):
            raise ValueError("ground session accepts quantifier-free, choice-free formulas only")
        f = simplify(f)
        self.assertions.append(f)
        self.vars |= free_vars(f)
        self.bb.assert_formula(f)

    def check(self, extra=None, budget=-1):
        assumptions = []
        vs = set(self.vars)
        if extra is not None:
            extra = simplify(extra)
            vs |= free_vars(extra)
            act = self.bb.g.fresh()
            self.bb.g.clause(-act, self.bb.lit(extra))
            assumptions.append(act)
        status = self.solver.solve(assumptions, conflict_budget=budget)
        stats = self.solver.stats()
        if status == UNSAT:
            if assumptions:
                # the activation clause is dead from now on
                self.bb.g.clause(-assumptions[0])
            return GroundVerdict("unsat", stats=stats)
        if status != SAT:
            return GroundVerdict("unknown", reason="conflict budget exhausted", stats=stats)
        model = {}
        for v in sorted(vs, key=lambda v: (v.name, v.width)):
            model[v] = self.bb.model_value(v, self.solver.value)
        if assumptions:
            self.bb.g.clause(-assumptions[0])
        return GroundVerdict("sat", model, stats=stats)


def check(phi, budget=-1, seed=0, solver_class=None):
    """Decide ``phi`` by bit-blasting and CDCL; Sat models are re-evaluated."""
    s = Session(seed=seed, solver_class=solver_class)
    s.add(phi)
    v = s.check(budget=budget)
    if v.is_sat:
        for x in free_vars(phi):
            v.model.setdefault(x, False if x.width == 0 else 0)
        if evaluate(phi, v.model) is not True:
            raise AssertionError("bit-blasted model does not satisfy the formula")
    return v


DEFAULT_ENUM_BITS = 24


def enumerate_check(phi, max_bits=DEFAULT_ENUM_BITS, chunk_bits=18):
    """Exhaustive search over all assignments to the free variables."""
    vs = _ordered_vars(phi)
    total = sum(max(v.width, 1) for v in vs)
    if total > max_bits:
        return GroundVerdict("unknown", reason=f"state space 2^{total} exceeds 2^{max_bits}")
    if not vs:
        r = bool(veval(phi, {}))
        return GroundVerdict("sat" if r else "unsat", {} if r else None)
    # the first variables index chunks, the rest are swept as arrays
    outer, inner, bits = [], list(vs), total
    while bits > chunk_bits and inner:
        v = inner.pop(0)
        outer.append(v)
        bits -= max(v.width, 1)
    inner_env, count = grid(inner)
    outer_env, ocount = grid(outer) if outer else ({}, 1)
    for i in range(ocount):
        env = dict(inner_env)
        for v in outer:
            env[v] = outer_env[v][i]
        r = np.broadcast_to(veval(phi, env), (count,))
        hit = np.nonzero(r)[0]
        if len(hit):
            j = int(hit[0])
            model = {}
            for v in vs:
                val = env[v] if v in outer else env[v][j]
                model[v] = bool(val) if v.width == 0 else int(val)
            return GroundVerdict("sat", model)
    return GroundVerdict("unsat")
