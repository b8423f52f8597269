"""Pure-Python CDCL solver.

Same algorithm, tie-breaking and random stream as the compiled ``_cdcl``
module, so both produce identical verdicts and models for a given seed.
Literals are DIMACS integers at the interface and ``2*v + sign`` inside.
"""

SAT, UNSAT, UNKNOWN = 10, 20, 0

_M64 = (1 << 64) - 1
VAR_DECAY = 0.95
RESTART_BASE = 100
RANDOM_PERMILLE = 10


def luby(y, i):
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return y ** seq


class CDCLSolver:
    """Incremental CDCL with two watched literals, first-UIP learning and VSIDS."""

    def __init__(self, seed=0):
        self.nvars = 0
        self.vals = []      # per internal literal: 1 true, -1 false, 0 unassigned
        self.level = []
        self.reason = []
        self.phase = []
        self.act = []
        self.seen = []
        self.watches = []
        self.clauses = []   # list of literal lists, None once deleted
        self.learnt = []
        self.lbd = []
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.heap = []
        self.hpos = []
        self.var_inc = 1.0
        self.ok = True
        self.n_learnts = 0
        self.max_learnts = 0.0
        self.rng = (seed * 2654435761 + 1) & _M64 or 1
        self.model = []
        self.assumption_failed = False
        self.conflicts = self.decisions = self.propagations = self.restarts = 0

    # -- random stream ------------------------------------------------------

    def _rand(self):
        x = self.rng
        x ^= (x << 13) & _M64
        x ^= x >> 7
        x ^= (x << 17) & _M64
        self.rng = x
        return x

    # -- variable heap ------------------------------------------------------

    def _before(self, a, b):
        aa, ab = self.act[a], self.act[b]
        return aa > ab or (aa == ab and a < b)

    def _up(self, i):
        heap, pos = self.heap, self.hpos
        v = heap[i]
        while i > 0:
            p = (i - 1) >> 1
            if not self._before(v, heap[p]):
                break
            heap[i] = heap[p]
            pos[heap[i]] = i
            i = p
        heap[i] = v
        pos[v] = i

    def _down(self, i):
        heap, pos = self.heap, self.hpos
        v = heap[i]
        n = len(heap)
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            if c + 1 < n and self._before(heap[c + 1], heap[c]):
                c += 1
            if not self._before(heap[c], v):
                break
            heap[i] = heap[c]
            pos[heap[i]] = i
            i = c
        heap[i] = v
        pos[v] = i

    def _heap_insert(self, v):
        if self.hpos[v] >= 0:
            return
        self.heap.append(v)
        self.hpos[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def _heap_pop(self):
        heap = self.heap
        v = heap[0]
        last = heap.pop()
        self.hpos[v] = -1
        if heap:
            heap[0] = last
            self.hpos[last] = 0
            self._down(0)
        return v

    def _bump(self, v):
        self.act[v] += self.var_inc
        if self.act[v] > 1e100:
            for i in range(self.nvars):
                self.act[i] *= 1e-100
            self.var_inc *= 1e-100
        if self.hpos[v] >= 0:
            self._up(self.hpos[v])

    # -- interface ----------------------------------------------------------

    def new_var(self):
        v = self.nvars
        self.nvars += 1
        self.vals += (0, 0)
        self.level.append(0)
        self.reason.append(-1)
        self.phase.append(1)
        self.act.append(0.0)
        self.seen.append(0)
        self.watches += ([], [])
        self.hpos.append(-1)
        self._heap_insert(v)
        return v + 1

    def num_vars(self):
        return self.nvars

    def add_clause(self, lits):
        if not self.ok:
            return False
        ps = []
        for d in lits:
            v = abs(d) - 1
            if d == 0 or v >= self.nvars:
                raise ValueError(f"literal {d} out of range")
            ps.append(2 * v + (d < 0))
        ps = sorted(set(ps))
        out = []
        prev = -1
        for p in ps:
            if p == prev ^ 1 and prev >= 0 or self.vals[p] == 1:
                return True
            if self.vals[p] != -1:
                out.append(p)
            prev = p
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], -1)
            if self._propagate() >= 0:
                self.ok = False
            return self.ok
        self._attach(out, False, 0)
        return True

    def value(self, d):
        v = abs(d) - 1
        b = self.model[v]
        return b if d > 0 else not b

    # -- core ---------------------------------------------------------------

    def _attach(self, c, learnt, lbd):
        ci = len(self.clauses)
        self.clauses.append(c)
        self.learnt.append(learnt)
        self.lbd.append(lbd)
        self.watches[c[0]].append(ci)
        self.watches[c[1]].append(ci)
        if learnt:
            self.n_learnts += 1
        return ci

    def _enqueue(self, p, from_clause):
        v = p >> 1
        self.vals[p] = 1
        self.vals[p ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = from_clause
        self.trail.append(p)

    def _propagate(self):
        vals, clauses, watches, trail = self.vals, self.clauses, self.watches, self.trail
        confl = -1
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            fl = p ^ 1
            ws = watches[fl]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                if vals[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    q = c[k]
                    if vals[q] != -1:
                        c[1] = q
                        c[k] = fl
                        watches[q].append(ci)
                        found = True
                        break
                if found:
                    continue
                ws[j] = ci
                j += 1
                if vals[first] == -1:
                    confl = ci
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    self.qhead = len(trail)
                else:
                    self._enqueue(first, ci)
            del ws[j:]
            if confl >= 0:
                break
        return confl

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        trail = self.trail
        for k in range(len(trail) - 1, lim - 1, -1):
            p = trail[k]
            v = p >> 1
            self.vals[p] = 0
            self.vals[p ^ 1] = 0
            self.reason[v] = -1
            self.phase[v] = p & 1
            self._heap_insert(v)
        del trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = lim

    def _analyze(self, confl):
        seen, level, reason, clauses = self.seen, self.level, self.reason, self.clauses
        dl = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(self.trail) - 1
        while True:
            c = clauses[confl]
            start = 0 if p < 0 else 1
            for k in range(start, len(c)):
                q = c[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump(v)
                    seen[v] = 1
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r < 0:
                keep.append(q)
                continue
            rc = clauses[r]
            for k in range(1, len(rc)):
                u = rc[k] >> 1
                if not seen[u] and level[u] > 0:
                    keep.append(q)
                    break
        for q in learnt[1:]:
            seen[q >> 1] = 0
        learnt = keep
        if len(learnt) == 1:
            bt = 0
        else:
            mi = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[mi] >> 1]:
                    mi = k
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, bt, lbd

    def _locked(self, ci):
        c = self.clauses[ci]
        return self.reason[c[0] >> 1] == ci and self.vals[c[0]] == 1

    def _reduce(self):
        cand = [ci for ci in range(len(self.clauses))
                if self.learnt[ci] and self.clauses[ci] is not None]
        cand.sort(key=lambda ci: (-self.lbd[ci], -len(self.clauses[ci]), ci))
        limit = len(cand) // 2
        for ci in cand[:limit]:
            if self.lbd[ci] > 2 and not self._locked(ci):
                self.clauses[ci] = None
                self.n_learnts -= 1

    def _pick_branch(self):
        if self.heap and self._rand() % 1000 < RANDOM_PERMILLE:
            v = self.heap[self._rand() % len(self.heap)]
            if self.vals[2 * v] == 0:
                return 2 * v + self.phase[v]
        while self.heap:
            v = self._heap_pop()
            if self.vals[2 * v] == 0:
                return 2 * v + self.phase[v]
        return -1

    def _search(self, nof_conflicts, assumptions, budget_end):
        conflicts_here = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                conflicts_here += 1
                if not self.trail_lim:
                    return UNSAT
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt, True, lbd)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= VAR_DECAY
                continue
            if conflicts_here >= nof_conflicts or (budget_end >= 0 and self.conflicts >= budget_end):
                self._cancel_until(0)
                return UNKNOWN
            if self.n_learnts - len(self.trail) >= self.max_learnts:
                self._reduce()
                self.max_learnts *= 1.1
            nxt = -1
            while len(self.trail_lim) < len(assumptions):
                p = assumptions[len(self.trail_lim)]
                if self.vals[p] == 1:
                    self.trail_lim.append(len(self.trail))
                elif self.vals[p] == -1:
                    self.assumption_failed = True
                    return UNSAT
                else:
                    nxt = p
                    break
            if nxt < 0:
                self.decisions += 1
                nxt = self._pick_branch()
                if nxt < 0:
                    return SAT
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, -1)

    def solve(self, assumptions=(), conflict_budget=-1):
        """Returns SAT, UNSAT or UNKNOWN; on SAT the model is available via ``value``."""
        self.model = []
        self.assumption_failed = False
        if not self.ok:
            return UNSAT
        assume = []
        for d in assumptions:
            v = abs(d) - 1
            if d == 0 or v >= self.nvars:
                raise ValueError(f"literal {d} out of range")
            assume.append(2 * v + (d < 0))
        if self._propagate() >= 0:
            self.ok = False
            return UNSAT
        clause_count = sum(1 for ci, c in enumerate(self.clauses) if c is not None and not self.learnt[ci])
        self.max_learnts = max(clause_count / 3.0, 2000.0)
        budget_end = self.conflicts + conflict_budget if conflict_budget >= 0 else -1
        status = UNKNOWN
        curr = 0
        while status == UNKNOWN:
            if budget_end >= 0 and self.conflicts >= budget_end:
                break
            status = self._search(luby(2, curr) * RESTART_BASE, assume, budget_end)
            curr += 1
            if status == UNKNOWN:
                self.restarts += 1
        if status == SAT:
            self.model = [self.vals[2 * v] == 1 for v in range(self.nvars)]
        if status == UNSAT and not self.assumption_failed:
            self.ok = False
        self._cancel_until(0)
        return status

    def stats(self):
        return {"conflicts": self.conflicts, "decisions": self.decisions,
                "propagations": self.propagations, "restarts": self.restarts}
