"""Counterexample-guided instantiation for ``exists ys. forall xs. psi``."""
import time
from dataclasses import dataclass, field
from typing import Optional

from ..qfbv.check import Session, enumerate_check
from ..qfbv.external import external_check
from ..term import and_, fresh_var, free_vars, mk, not_, postorder, substitute
from .select import CONFIGS, select

SAT, UNSAT, RESOURCE_OUT = "sat", "unsat", "resource_out"
DEFAULT_BUDGET = 10_000


@dataclass
class Problem:
    matrix: object
    exists_vars: tuple
    forall_vars: tuple
    flip: bool = False  # answer belongs to the negation of the input

    def __post_init__(self):
        self.exists_vars = tuple(self.exists_vars)
        self.forall_vars = tuple(self.forall_vars)
        fv = free_vars(self.matrix)
        extra = fv - set(self.exists_vars) - set(self.forall_vars)
        if extra:
            # free constants are existential
            self.exists_vars += tuple(sorted(extra, key=lambda v: v.name))


@dataclass
class Round:
    model: dict
    terms: tuple
    fallback: list
    duplicate: bool = False


@dataclass
class Verdict:
    status: str
    model: Optional[dict] = None
    stats: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    reason: str = ""

    @property
    def answer(self):
        return "unknown" if self.status == RESOURCE_OUT else self.status


class IncrementalGround:
    """Bit-blasting backend that keeps clauses across rounds."""

    def __init__(self, seed=0, solver_class=None, budget=-1):
        self.session = Session(seed=seed, solver_class=solver_class)
        self.budget = budget
        self.checks = 0

    def add(self, f):
        self.session.add(f)

    def check(self, extra=None):
        self.checks += 1
        return self.session.check(extra, budget=self.budget)


class BatchGround:
    """Backend that re-decides the whole conjunction with ``decide(phi)`` each time."""

    def __init__(self, decide):
        self.decide = decide
        self.assertions = []
        self.checks = 0

    def add(self, f):
        self.assertions.append(f)

    def check(self, extra=None):
        self.checks += 1
        fs = self.assertions + ([extra] if extra is not None else [])
        return self.decide(and_(*fs))


def make_backend(spec="bitblast", seed=0, solver_class=None):
    if spec == "bitblast":
        return IncrementalGround(seed=seed, solver_class=solver_class)
    if spec == "enum":
        return BatchGround(enumerate_check)
    if spec.startswith("external:"):
        cmd = spec[len("external:"):]
        return BatchGround(lambda phi: external_check(phi, cmd))
    raise ValueError(f"unknown backend {spec!r}")


class ChoiceEliminator:
    """Replaces each distinct choice term by a fresh constant whose defining body is asserted."""

    def __init__(self):
        self.cache = {}

    def run(self, f):
        defs = []
        memo = {}
        for n in postorder(f):
            if n.op != "choice":
                continue
            k = self.cache.get(n)
            if k is None:
                y, body = n.args
                inner = self._replace(body, memo)
                k = fresh_var(n.width, "k")
                self.cache[n] = k
                defs.append(substitute(inner, {y: k}))
            memo[n] = k
        return self._replace(f, memo), defs

    @staticmethod
    def _replace(f, memo):
        if not memo:
            return f
        # choice terms mention only ground symbols, so replacing nodes is capture-free
        out = {}
        for n in postorder(f):
            if n in memo:
                out[n] = memo[n]
            elif not n.args:
                out[n] = n
            else:
                out[n] = mk(n.op, *(out[a] for a in n.args), payload=n.payload)
        return out[f]


def cegqi_check(problem, config="k", budget=DEFAULT_BUDGET, backend="bitblast", seed=0,
                solver_class=None):
    if config not in CONFIGS:
        raise ValueError(f"unknown configuration {config!r}")
    t0 = time.perf_counter()
    ground = backend if not isinstance(backend, str) else make_backend(backend, seed, solver_class)
    psi, xs, ys = problem.matrix, problem.forall_vars, problem.exists_vars
    neg_psi = not_(psi)
    elim = ChoiceEliminator()
    gamma = set()
    log = []
    stats = {"rounds": 0, "instantiations": 0, "fallbacks": 0, "choices": 0, "duplicates": 0}
    last_model = {}

    def finish(status, model=None, reason=""):
        stats["ground_checks"] = ground.checks
        stats["time"] = round(time.perf_counter() - t0, 6)
        if model is not None:
            model = {y: model.get(y, False if y.width == 0 else 0) for y in ys}
        return Verdict(status, model, stats, log, reason)

    while True:
        stats["rounds"] += 1
        v = ground.check()
        if v.status == "unknown":
            return finish(RESOURCE_OUT, reason=v.reason or "ground check gave up")
        if v.is_unsat:
            return finish(UNSAT)
        last_model = v.model
        v = ground.check(neg_psi)
        if v.status == "unknown":
            return finish(RESOURCE_OUT, reason=v.reason or "ground check gave up")
        if v.is_unsat:
            return finish(SAT, last_model)
        if stats["instantiations"] >= budget:
            return finish(RESOURCE_OUT, reason=f"instantiation budget {budget} exhausted")
        interp = dict(v.model)
        for x in free_vars(psi) | set(ys) | set(xs):
            interp.setdefault(x, False if x.width == 0 else 0)
        sel = select(config, xs, psi, interp, gamma)
        inst = substitute(psi, dict(zip(xs, sel.terms)))
        dup = inst in gamma
        if dup:
            stats["duplicates"] += 1
            if config == "m":
                raise AssertionError("model-value selection repeated an instance")
            sel = select("m", xs, psi, interp, gamma)
            inst = substitute(psi, dict(zip(xs, sel.terms)))
        stats["fallbacks"] += sum(sel.fallback)
        log.append(Round({x: interp[x] for x in list(ys) + list(xs)}, sel.terms, sel.fallback, dup))
        gamma.add(inst)
        stats["instantiations"] += 1
        ground_inst, defs = elim.run(inst)
        stats["choices"] += len(defs)
        for d in defs:
            ground.add(d)
        ground.add(ground_inst)
