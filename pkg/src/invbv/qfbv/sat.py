"""SAT backend selection.

The compiled solver is used when the extension was built; otherwise, or when
``INVBV_PURE_PYTHON=1`` is set, the pure-Python twin is used.  Both expose
``CDCLSolver`` with identical behaviour.
"""
import os

from . import _cdcl_py

SAT, UNSAT, UNKNOWN = _cdcl_py.SAT, _cdcl_py.UNSAT, _cdcl_py.UNKNOWN

BACKEND = "python"
CDCLSolver = _cdcl_py.CDCLSolver
if os.environ.get("INVBV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._cdcl import CDCLSolver  # noqa: F811
        BACKEND = "compiled"
    except ImportError:
        pass

PyCDCLSolver = _cdcl_py.CDCLSolver


def sat_solve(num_vars, clauses, budget=-1, seed=0, solver_class=None):
    """One-shot solve of a CNF.  Returns ``(status, model)`` with model as a bool list."""
    s = (solver_class or CDCLSolver)(seed=seed)
    for _ in range(num_vars):
        s.new_var()
    for c in clauses:
        if not s.add_clause(c):
            break
    status = s.solve(conflict_budget=budget)
    return status, (list(s.model) if status == SAT else None)
