"""Exhaustive reference deciders used as the independent side of the checks."""
import numpy as np

from invbv.term import free_vars
from invbv.vectorized import grid, veval


def exists_forall(matrix, ys, xs):
    """Truth of ``exists ys. forall xs. matrix`` by enumerating every assignment."""
    ys = [y for y in ys if y in free_vars(matrix)]
    xs = [x for x in xs if x in free_vars(matrix)]
    yenv, ny = grid(ys)
    xenv, nx = grid(xs)
    env = {}
    # y values vary along axis 0, x values along axis 1
    for y in ys:
        env[y] = np.asarray(yenv[y]).reshape(ny, 1)
    for x in xs:
        env[x] = np.asarray(xenv[x]).reshape(1, nx)
    r = np.broadcast_to(np.asarray(veval(matrix, env)), (ny, nx))
    return bool(r.all(axis=1).any())


def solved_form_gaps(x, lit, form, others):
    """Counts of assignments where ``lit[form]`` and ``exists x. lit`` disagree.

    Returns ``(unsound, incomplete)``: the solved form satisfying the literal
    while no ``x`` does is impossible by construction, so any unsound count
    means evaluation and the solver disagree; incomplete counts assignments
    where some ``x`` works but the solved form does not.
    """
    from invbv.term import exists, substitute
    vs = sorted(set(others) | (free_vars(lit) - {x}), key=lambda v: v.name)
    env, n = grid(vs)
    plugged = np.broadcast_to(np.asarray(veval(substitute(lit, {x: form}), env)), (n,))
    truth = np.broadcast_to(np.asarray(veval(exists([x], lit), env)), (n,))
    return int((plugged & ~truth).sum()), int((truth & ~plugged).sum())
