"""Client for an external SMT-LIB 2 solver process."""
import shlex
import subprocess

from ..sexpr import ParseError, parse_sexprs
from ..term import free_vars, sort_str, symbol, to_smtlib
from .check import GroundVerdict


def query_text(phi):
    lines = ["(set-logic QF_BV)"]
    for v in sorted(free_vars(phi), key=lambda v: v.name):
        lines.append(f"(declare-fun {symbol(v.name)} () {sort_str(v.width)})")
    lines.append(f"(assert {to_smtlib(phi)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def _const_value(e):
    if isinstance(e, str):
        if e.startswith("#b"):
            return int(e[2:], 2)
        if e.startswith("#x"):
            return int(e[2:], 16)
        if e in ("true", "false"):
            return e == "true"
    if isinstance(e, list) and len(e) == 3 and e[0] == "_" and isinstance(e[1], str) and e[1].startswith("bv"):
        return int(e[1][2:])
    raise ValueError(f"unsupported model value {e!r}")


def parse_solver_response(text, variables):
    """Turn a solver's output into a GroundVerdict; ``variables`` maps names to terms."""
    try:
        exprs = parse_sexprs(text)
    except ParseError as e:
        return GroundVerdict("unknown", reason=f"malformed solver output: {e}")
    if not exprs or not isinstance(exprs[0], str):
        return GroundVerdict("unknown", reason="solver printed no verdict")
    head = exprs[0]
    if head == "unsat":
        return GroundVerdict("unsat")
    if head == "unknown":
        return GroundVerdict("unknown", reason="solver answered unknown")
    if head != "sat":
        return GroundVerdict("unknown", reason=f"unexpected solver answer {head!r}")
    model = {}
    body = exprs[1] if len(exprs) > 1 and isinstance(exprs[1], list) else []
    if body and body[0] == "model":
        body = body[1:]
    try:
        for d in body:
            if not (isinstance(d, list) and len(d) == 5 and d[0] == "define-fun"):
                raise ValueError(f"unexpected model entry {d!r}")
            v = variables.get(d[1])
            if v is not None:
                model[v] = _const_value(d[4])
    except ValueError as e:
        return GroundVerdict("unknown", reason=f"malformed model: {e}")
    for v in variables.values():
        model.setdefault(v, False if v.width == 0 else 0)
    return GroundVerdict("sat", model)


def external_check(phi, command, timeout=None):
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    try:
        proc = subprocess.run(argv, input=query_text(phi), capture_output=True, text=True,
                              timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as e:
        return GroundVerdict("unknown", reason=f"external solver failed: {e}")
    if proc.returncode != 0 and not proc.stdout.strip():
        return GroundVerdict("unknown", reason=f"external solver exited with {proc.returncode}: "
                                               f"{proc.stderr.strip()[:200]}")
    names = {v.name: v for v in free_vars(phi)}
    return parse_solver_response(proc.stdout, names)
