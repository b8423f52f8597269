"""Exhaustive checking of catalog rows against brute force at small widths.

For a row and a width, every value of ``s`` and ``t`` is paired with every
value of ``x``; the condition must be true exactly for the ``(s, t)`` pairs
where some ``x`` satisfies the literal.
"""
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import catalog
from .catalog import IcKey, TERM_OPS
from .term import extract, mk, rel, var
from .vectorized import veval

DEFAULT_CAP = 8
CHUNK = 1 << 20


@dataclass
class VerificationReport:
    entry: str
    width: int
    status: str  # verified | refuted | skipped
    pairs: int = 0
    elapsed: float = 0.0
    counterexample: Optional[dict] = None
    reason: Optional[str] = None

    def record(self):
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None}, sort_keys=True)


def literal_for(key, x, s, t, lo=0):
    """``l[x]`` for a row: the literal whose solvability the condition describes."""
    op, side = key.op, key.side
    if op == "var":
        lhs = x
    elif op in ("not", "neg"):
        lhs = mk(TERM_OPS[op], x)
    elif op == "add":
        lhs = mk("bvadd", x, s)
    elif op == "extract":
        lhs = extract(x, lo + t.width - 1, lo)
    elif side == "left":
        lhs = mk(TERM_OPS[op], x, s)
    else:
        lhs = mk(TERM_OPS[op], s, x)
    return rel(key.rel, lhs, t)


def _shapes(key, w):
    """Variable widths ``(wx, ws, wt, lo)`` covered when checking ``key`` at ``w``."""
    if key.op == "concat":
        # every width pair whose larger member is w
        out = [(w, ws, w + ws, 0) for ws in range(1, w + 1)]
        out += [(wx, w, wx + w, 0) for wx in range(1, w)]
        return out
    if key.op == "extract":
        return [(wx, None, w, lo) for wx in range(w, w + 3) for lo in range(wx - w + 1)]
    if key.op in ("var", "not", "neg"):
        return [(w, None, w, 0)]
    return [(w, w, w, 0)]


def _sweep(key, entry, wx, ws, wt, lo):
    """Return (pairs, counterexample or None) for one width shape."""
    x = var("x", wx)
    t = var("t", wt)
    s = var("s", ws) if ws else None
    lit = literal_for(key, x, s, t, lo)
    cond = entry.condition(s, t, x_width=wx) if key.op != "extract" else entry.condition(None, t)
    xs = np.arange(1 << wx, dtype=np.uint64)[None, :]
    ts_all = np.arange(1 << wt, dtype=np.uint64)
    s_vals = [None] if s is None else range(1 << ws)
    # chunk along t so each block stays around CHUNK elements
    tblock = max(1, CHUNK >> wx)
    pairs = 0
    for sv in s_vals:
        for start in range(0, 1 << wt, tblock):
            tv = ts_all[start:start + tblock]
            env = {t: tv[:, None], x: xs}
            cenv = {t: tv}
            if s is not None:
                env[s] = np.uint64(sv)
                cenv[s] = np.uint64(sv)
            sat = np.broadcast_to(veval(lit, env), (len(tv), xs.shape[1])).any(axis=1)
            got = np.broadcast_to(veval(cond, cenv), (len(tv),))
            pairs += len(tv)
            bad = np.nonzero(sat != got)[0]
            if len(bad):
                i = int(bad[0])
                cex = {"t": int(tv[i]), "condition": bool(got[i]), "solvable": bool(sat[i]),
                       "x_width": wx}
                if s is not None:
                    cex["s"] = int(sv)
                if key.op == "extract":
                    cex["lo"] = lo
                return pairs, cex
    return pairs, None


def verify_ic(key, w, cap=DEFAULT_CAP):
    if isinstance(key, str):
        key = IcKey.parse(key)
    entry = catalog.lookup(key)
    if w > cap:
        return VerificationReport(str(key), w, "skipped", reason=f"width {w} above exhaustive cap {cap}")
    start = time.perf_counter()
    total = 0
    for wx, ws, wt, lo in _shapes(key, w):
        pairs, cex = _sweep(key, entry, wx, ws, wt, lo)
        total += pairs
        if cex is not None:
            return VerificationReport(str(key), w, "refuted", total, time.perf_counter() - start, cex)
    return VerificationReport(str(key), w, "verified", total, time.perf_counter() - start)


def _task(args):
    key, w, cap = args
    return verify_ic(IcKey(*key), w, cap)


def verify_all(widths, jobs=1, entries=None, cap=DEFAULT_CAP):
    """Run every (entry, width) task; returns the list of reports in task order."""
    keys = list(entries) if entries is not None else catalog.catalog_entries()
    tasks = [(tuple(k), w, cap) for w in widths for k in keys]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_task, tasks, chunksize=4))
    return [_task(a) for a in tasks]


def summarize(reports):
    """Per-width counts of each status."""
    out = {}
    for r in reports:
        row = out.setdefault(r.width, {"verified": 0, "refuted": 0, "skipped": 0})
        row[r.status] += 1
    return dict(sorted(out.items()))


def format_table(reports):
    lines = [f"{'width':>5} {'verified':>9} {'refuted':>8} {'skipped':>8} {'pct':>7}"]
    for w, row in summarize(reports).items():
        n = sum(row.values())
        pct = 100.0 * row["verified"] / n if n else 0.0
        lines.append(f"{w:>5} {row['verified']:>9} {row['refuted']:>8} {row['skipped']:>8} {pct:>6.1f}%")
    for r in reports:
        if r.status == "refuted":
            lines.append(f"refuted {r.entry} at width {r.width}: {json.dumps(r.counterexample, sort_keys=True)}")
    return "\n".join(lines)
