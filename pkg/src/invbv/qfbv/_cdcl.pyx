# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CDCL solver; a line-for-line twin of ``_cdcl_py``."""
from libcpp.vector cimport vector
from libcpp.pair cimport pair
from libcpp.algorithm cimport sort

SAT, UNSAT, UNKNOWN = 10, 20, 0

cdef double VAR_DECAY = 0.95
cdef long long RESTART_BASE = 100
cdef unsigned long long RANDOM_PERMILLE = 10

ctypedef pair[pair[int, int], int] rank_t


cdef long long luby(long long y, long long i):
    cdef long long size = 1, seq = 0, r = 1
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    while seq > 0:
        r *= y
        seq -= 1
    return r


cdef class CDCLSolver:
    cdef int nvars
    cdef vector[signed char] vals
    cdef vector[int] level
    cdef vector[int] reason
    cdef vector[int] phase
    cdef vector[double] act
    cdef vector[char] seen
    cdef vector[vector[int]] watches
    cdef vector[vector[int]] clauses
    cdef vector[char] deleted
    cdef vector[char] learnt
    cdef vector[int] lbd
    cdef vector[int] trail
    cdef vector[int] trail_lim
    cdef int qhead
    cdef vector[int] heap
    cdef vector[int] hpos
    cdef double var_inc
    cdef bint ok
    cdef long long n_learnts
    cdef double max_learnts
    cdef unsigned long long rng
    cdef vector[char] model_
    cdef bint has_model
    cdef vector[int] stamp
    cdef int stamp_gen
    cdef public bint assumption_failed
    cdef public long long conflicts, decisions, propagations, restarts

    def __init__(self, seed=0):
        self.nvars = 0
        self.qhead = 0
        self.var_inc = 1.0
        self.ok = True
        self.n_learnts = 0
        self.max_learnts = 0.0
        r = (seed * 2654435761 + 1) & ((1 << 64) - 1)
        self.rng = r if r else 1
        self.has_model = False
        self.stamp_gen = 0
        self.assumption_failed = False
        self.conflicts = self.decisions = self.propagations = self.restarts = 0

    cdef unsigned long long _rand(self):
        cdef unsigned long long x = self.rng
        x ^= x << 13
        x ^= x >> 7
        x ^= x << 17
        self.rng = x
        return x

    # -- variable heap ------------------------------------------------------

    cdef inline bint _before(self, int a, int b):
        cdef double aa = self.act[a], ab = self.act[b]
        return aa > ab or (aa == ab and a < b)

    cdef void _up(self, int i):
        cdef int v = self.heap[i], p
        while i > 0:
            p = (i - 1) >> 1
            if not self._before(v, self.heap[p]):
                break
            self.heap[i] = self.heap[p]
            self.hpos[self.heap[i]] = i
            i = p
        self.heap[i] = v
        self.hpos[v] = i

    cdef void _down(self, int i):
        cdef int v = self.heap[i], c
        cdef int n = self.heap.size()
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            if c + 1 < n and self._before(self.heap[c + 1], self.heap[c]):
                c += 1
            if not self._before(self.heap[c], v):
                break
            self.heap[i] = self.heap[c]
            self.hpos[self.heap[i]] = i
            i = c
        self.heap[i] = v
        self.hpos[v] = i

    cdef void _heap_insert(self, int v):
        if self.hpos[v] >= 0:
            return
        self.heap.push_back(v)
        self.hpos[v] = self.heap.size() - 1
        self._up(self.heap.size() - 1)

    cdef int _heap_pop(self):
        cdef int v = self.heap[0]
        cdef int last = self.heap.back()
        self.heap.pop_back()
        self.hpos[v] = -1
        if self.heap.size() > 0:
            self.heap[0] = last
            self.hpos[last] = 0
            self._down(0)
        return v

    cdef void _bump(self, int v):
        cdef int i
        self.act[v] += self.var_inc
        if self.act[v] > 1e100:
            for i in range(self.nvars):
                self.act[i] *= 1e-100
            self.var_inc *= 1e-100
        if self.hpos[v] >= 0:
            self._up(self.hpos[v])

    # -- interface ----------------------------------------------------------

    def new_var(self):
        cdef int v = self.nvars
        self.nvars += 1
        self.vals.push_back(0)
        self.vals.push_back(0)
        self.level.push_back(0)
        self.reason.push_back(-1)
        self.phase.push_back(1)
        self.act.push_back(0.0)
        self.seen.push_back(0)
        self.watches.push_back(vector[int]())
        self.watches.push_back(vector[int]())
        self.hpos.push_back(-1)
        self._heap_insert(v)
        return v + 1

    def num_vars(self):
        return self.nvars

    def add_clause(self, lits):
        cdef vector[int] out
        cdef int p, prev = -1
        if not self.ok:
            return False
        ps = []
        for d in lits:
            v = abs(d) - 1
            if d == 0 or v >= self.nvars:
                raise ValueError(f"literal {d} out of range")
            ps.append(2 * v + (d < 0))
        for p in sorted(set(ps)):
            if (prev >= 0 and p == prev ^ 1) or self.vals[p] == 1:
                return True
            if self.vals[p] != -1:
                out.push_back(p)
            prev = p
        if out.size() == 0:
            self.ok = False
            return False
        if out.size() == 1:
            self._enqueue(out[0], -1)
            if self._propagate() >= 0:
                self.ok = False
            return self.ok
        self._attach(out, False, 0)
        return True

    def value(self, d):
        cdef int v = abs(d) - 1
        if not self.has_model or v < 0 or v >= <int>self.model_.size():
            raise IndexError("no model value for literal")
        b = self.model_[v] != 0
        return b if d > 0 else not b

    @property
    def model(self):
        return [self.model_[i] != 0 for i in range(self.model_.size())] if self.has_model else []

    # -- core ---------------------------------------------------------------

    cdef int _attach(self, vector[int]& c, bint is_learnt, int lb):
        cdef int ci = self.clauses.size()
        self.clauses.push_back(c)
        self.deleted.push_back(0)
        self.learnt.push_back(is_learnt)
        self.lbd.push_back(lb)
        self.watches[c[0]].push_back(ci)
        self.watches[c[1]].push_back(ci)
        if is_learnt:
            self.n_learnts += 1
        return ci

    cdef inline void _enqueue(self, int p, int from_clause):
        cdef int v = p >> 1
        self.vals[p] = 1
        self.vals[p ^ 1] = -1
        self.level[v] = self.trail_lim.size()
        self.reason[v] = from_clause
        self.trail.push_back(p)

    cdef int _propagate(self):
        cdef int confl = -1
        cdef int p, fl, ci, first, q, k, csize
        cdef size_t i, j, n
        cdef vector[int]* ws
        cdef vector[int]* c
        while self.qhead < <int>self.trail.size():
            p = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            fl = p ^ 1
            ws = &self.watches[fl]
            i = 0
            j = 0
            n = ws.size()
            while i < n:
                ci = ws[0][i]
                i += 1
                if self.deleted[ci]:
                    continue
                c = &self.clauses[ci]
                if c[0][0] == fl:
                    c[0][0] = c[0][1]
                    c[0][1] = fl
                first = c[0][0]
                if self.vals[first] == 1:
                    ws[0][j] = ci
                    j += 1
                    continue
                csize = c.size()
                k = 2
                while k < csize:
                    q = c[0][k]
                    if self.vals[q] != -1:
                        c[0][1] = q
                        c[0][k] = fl
                        self.watches[q].push_back(ci)
                        break
                    k += 1
                if k < csize:
                    continue
                ws[0][j] = ci
                j += 1
                if self.vals[first] == -1:
                    confl = ci
                    while i < n:
                        ws[0][j] = ws[0][i]
                        j += 1
                        i += 1
                    self.qhead = self.trail.size()
                else:
                    self._enqueue(first, ci)
            ws.resize(j)
            if confl >= 0:
                break
        return confl

    cdef void _cancel_until(self, int lvl):
        cdef int lim, k, p, v
        if <int>self.trail_lim.size() <= lvl:
            return
        lim = self.trail_lim[lvl]
        k = self.trail.size() - 1
        while k >= lim:
            p = self.trail[k]
            v = p >> 1
            self.vals[p] = 0
            self.vals[p ^ 1] = 0
            self.reason[v] = -1
            self.phase[v] = p & 1
            self._heap_insert(v)
            k -= 1
        self.trail.resize(lim)
        self.trail_lim.resize(lvl)
        self.qhead = lim

    cdef int _analyze(self, int confl, vector[int]& out, int* lbd_out):
        cdef int dl = self.trail_lim.size()
        cdef vector[int] learnt
        cdef int path = 0, p = -1, idx = self.trail.size() - 1
        cdef int start, k, q, v, r, u, mi, bt, lb
        cdef size_t a
        cdef bint keep_it
        cdef vector[int]* c
        learnt.push_back(0)
        while True:
            c = &self.clauses[confl]
            start = 0 if p < 0 else 1
            for k in range(start, <int>c.size()):
                q = c[0][k]
                v = q >> 1
                if not self.seen[v] and self.level[v] > 0:
                    self._bump(v)
                    self.seen[v] = 1
                    if self.level[v] >= dl:
                        path += 1
                    else:
                        learnt.push_back(q)
            while not self.seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            self.seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        out.clear()
        out.push_back(learnt[0])
        for a in range(1, learnt.size()):
            q = learnt[a]
            r = self.reason[q >> 1]
            if r < 0:
                out.push_back(q)
                continue
            c = &self.clauses[r]
            for k in range(1, <int>c.size()):
                u = c[0][k] >> 1
                if not self.seen[u] and self.level[u] > 0:
                    out.push_back(q)
                    break
        for a in range(1, learnt.size()):
            self.seen[learnt[a] >> 1] = 0
        if out.size() == 1:
            bt = 0
        else:
            mi = 1
            for k in range(2, <int>out.size()):
                if self.level[out[k] >> 1] > self.level[out[mi] >> 1]:
                    mi = k
            q = out[1]
            out[1] = out[mi]
            out[mi] = q
            bt = self.level[out[1] >> 1]
        # distinct decision levels
        self.stamp_gen += 1
        while <int>self.stamp.size() <= dl:
            self.stamp.push_back(0)
        lb = 0
        for a in range(out.size()):
            v = self.level[out[a] >> 1]
            if self.stamp[v] != self.stamp_gen:
                self.stamp[v] = self.stamp_gen
                lb += 1
        lbd_out[0] = lb
        return bt

    cdef bint _locked(self, int ci):
        cdef int c0 = self.clauses[ci][0]
        return self.reason[c0 >> 1] == ci and self.vals[c0] == 1

    cdef void _reduce(self):
        cdef vector[rank_t] cand
        cdef int ci, limit
        cdef size_t a
        for ci in range(<int>self.clauses.size()):
            if self.learnt[ci] and not self.deleted[ci]:
                cand.push_back(rank_t(pair[int, int](-self.lbd[ci], -<int>self.clauses[ci].size()), ci))
        sort(cand.begin(), cand.end())
        limit = cand.size() // 2
        for a in range(limit):
            ci = cand[a].second
            if self.lbd[ci] > 2 and not self._locked(ci):
                self.deleted[ci] = 1
                self.clauses[ci].clear()
                self.clauses[ci].shrink_to_fit()
                self.n_learnts -= 1

    cdef int _pick_branch(self):
        cdef int v
        if self.heap.size() > 0 and self._rand() % 1000 < RANDOM_PERMILLE:
            v = self.heap[self._rand() % self.heap.size()]
            if self.vals[2 * v] == 0:
                return 2 * v + self.phase[v]
        while self.heap.size() > 0:
            v = self._heap_pop()
            if self.vals[2 * v] == 0:
                return 2 * v + self.phase[v]
        return -1

    cdef int _search(self, long long nof_conflicts, vector[int]& assumptions, long long budget_end):
        cdef long long conflicts_here = 0
        cdef int confl, bt, ci, nxt, p, lb
        cdef vector[int] learnt
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                conflicts_here += 1
                if self.trail_lim.size() == 0:
                    return 20
                bt = self._analyze(confl, learnt, &lb)
                self._cancel_until(bt)
                if learnt.size() == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt, True, lb)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= VAR_DECAY
                continue
            if conflicts_here >= nof_conflicts or (budget_end >= 0 and self.conflicts >= budget_end):
                self._cancel_until(0)
                return 0
            if self.n_learnts - <long long>self.trail.size() >= self.max_learnts:
                self._reduce()
                self.max_learnts *= 1.1
            nxt = -1
            while self.trail_lim.size() < assumptions.size():
                p = assumptions[self.trail_lim.size()]
                if self.vals[p] == 1:
                    self.trail_lim.push_back(self.trail.size())
                elif self.vals[p] == -1:
                    self.assumption_failed = True
                    return 20
                else:
                    nxt = p
                    break
            if nxt < 0:
                self.decisions += 1
                nxt = self._pick_branch()
                if nxt < 0:
                    return 10
            self.trail_lim.push_back(self.trail.size())
            self._enqueue(nxt, -1)

    def solve(self, assumptions=(), conflict_budget=-1):
        """Returns SAT, UNSAT or UNKNOWN; on SAT the model is available via ``value``."""
        cdef vector[int] assume
        cdef long long budget_end, clause_count = 0
        cdef int status = 0, v
        cdef long long curr = 0
        cdef size_t ci
        self.model_.clear()
        self.has_model = False
        self.assumption_failed = False
        if not self.ok:
            return UNSAT
        for d in assumptions:
            v = abs(d) - 1
            if d == 0 or v >= self.nvars:
                raise ValueError(f"literal {d} out of range")
            assume.push_back(2 * v + (d < 0))
        if self._propagate() >= 0:
            self.ok = False
            return UNSAT
        for ci in range(self.clauses.size()):
            if not self.deleted[ci] and not self.learnt[ci]:
                clause_count += 1
        self.max_learnts = max(clause_count / 3.0, 2000.0)
        budget_end = self.conflicts + conflict_budget if conflict_budget >= 0 else -1
        while status == 0:
            if budget_end >= 0 and self.conflicts >= budget_end:
                break
            status = self._search(luby(2, curr) * RESTART_BASE, assume, budget_end)
            curr += 1
            if status == 0:
                self.restarts += 1
        if status == 10:
            self.has_model = True
            for v in range(self.nvars):
                self.model_.push_back(self.vals[2 * v] == 1)
        if status == 20 and not self.assumption_failed:
            self.ok = False
        self._cancel_until(0)
        return status

    def stats(self):
        return {"conflicts": self.conflicts, "decisions": self.decisions,
                "propagations": self.propagations, "restarts": self.restarts}
