"""Small dense two-phase primal simplex with Bland's rule.

Solves   maximize c.x   s.t.   A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.

Problem sizes in this package are tiny (at most a few hundred rows), so a
dense tableau with anti-cycling Bland pivoting is plenty and keeps the
package free of external solver dependencies.  Callers split free
variables into positive/negative parts themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# Pivot eligibility threshold; feasibility decisions use the caller's tol.
PIVOT_TOL = 1e-10


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    value: float | None


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    basis[row] = col


def _bland_entering(obj_row: np.ndarray, eligible: np.ndarray) -> int:
    # Smallest-index column whose reduced cost still improves the objective.
    candidates = np.nonzero(eligible & (obj_row < -PIVOT_TOL))[0]
    return int(candidates[0]) if candidates.size else -1


def _bland_leaving(T: np.ndarray, basis: np.ndarray, col: int, nrows: int) -> int:
    pivcol = T[:nrows, col]
    rhs = T[:nrows, -1]
    rows = np.nonzero(pivcol > PIVOT_TOL)[0]
    if rows.size == 0:
        return -1
    ratios = rhs[rows] / pivcol[rows]
    best = ratios.min()
    # Bland tie-break: among (near-)minimal ratios, leave the smallest basis index.
    tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
    return int(tied[np.argmin(basis[tied])])


def _run(T: np.ndarray, basis: np.ndarray, ncols: int, nrows: int, max_iter: int) -> str:
    eligible = np.ones(ncols, dtype=bool)
    for _ in range(max_iter):
        eligible[:] = True
        eligible[basis] = False
        col = _bland_entering(T[-1, :ncols], eligible)
        if col < 0:
            return OPTIMAL
        row = _bland_leaving(T, basis, col, nrows)
        if row < 0:
            return UNBOUNDED
        _pivot(T, basis, row, col)
    raise SolverError(f"simplex did not converge within {max_iter} pivots")


def solve(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    *,
    feas_tol: float = 1e-9,
    max_iter: int | None = None,
) -> LpResult:
    """Maximize c.x over x >= 0 subject to A_ub x <= b_ub and A_eq x = b_eq."""
    c = np.asarray(c, dtype=float).ravel()
    n = c.shape[0]

    blocks, rhs, kinds = [], [], []
    if A_ub is not None and len(A_ub):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        b_ub = np.asarray(b_ub, dtype=float).ravel()
        blocks.append(A_ub)
        rhs.append(b_ub)
        kinds += ["ub"] * A_ub.shape[0]
    if A_eq is not None and len(A_eq):
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.asarray(b_eq, dtype=float).ravel()
        blocks.append(A_eq)
        rhs.append(b_eq)
        kinds += ["eq"] * A_eq.shape[0]
    if not blocks:
        raise SolverError("LP needs at least one constraint")

    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    m = A.shape[0]
    if A.shape[1] != n:
        raise SolverError(f"constraint matrix has {A.shape[1]} columns, objective has {n}")
    if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
        raise SolverError("LP data must be finite")

    n_slack = sum(1 for k in kinds if k == "ub")
    slack = np.zeros((m, n_slack))
    si = 0
    slack_of_row = [-1] * m
    for i, kind in enumerate(kinds):
        if kind == "ub":
            slack[i, si] = 1.0
            slack_of_row[i] = n + si
            si += 1

    body = np.hstack([A, slack])
    # Flip rows with negative rhs so the all-artificial/slack start is feasible.
    neg = b < 0
    body[neg] *= -1.0
    b = np.where(neg, -b, b)

    # Rows whose slack survived the flip keep it as the initial basic variable;
    # the rest (equalities and flipped inequalities) get an artificial.
    art_rows = [i for i in range(m) if kinds[i] == "eq" or neg[i]]
    n_art = len(art_rows)
    art = np.zeros((m, n_art))
    for j, i in enumerate(art_rows):
        art[i, j] = 1.0

    ncols = n + n_slack + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, : n + n_slack] = body
    T[:m, n + n_slack : ncols] = art
    T[:m, -1] = b

    basis = np.empty(m, dtype=int)
    next_art = n + n_slack
    for i in range(m):
        if i in art_rows:
            basis[i] = next_art
            next_art += 1
        else:
            basis[i] = slack_of_row[i]

    max_iter = max_iter if max_iter is not None else 100 * (m + ncols) + 500

    if n_art:
        # Phase 1: maximize -(sum of artificials).
        obj = np.zeros(ncols + 1)
        obj[n + n_slack : ncols] = 1.0
        T[-1] = obj
        for i in range(m):
            if T[-1, basis[i]] != 0.0:
                T[-1] -= T[-1, basis[i]] * T[i]
        status = _run(T, basis, ncols, m, max_iter)
        if status != OPTIMAL:
            raise SolverError("phase 1 terminated abnormally")
        if -T[-1, -1] > feas_tol:
            return LpResult(INFEASIBLE, None, None)
        # Drive leftover (zero-valued) artificials out of the basis.
        for i in range(m):
            if basis[i] >= n + n_slack:
                pivots = np.nonzero(np.abs(T[i, : n + n_slack]) > PIVOT_TOL)[0]
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
        keep = [i for i in range(m) if basis[i] < n + n_slack]
        rows = keep + [m]
        T = T[rows][:, list(range(n + n_slack)) + [ncols]]
        basis = basis[keep]
        m = len(keep)
        ncols = n + n_slack

    # Phase 2.
    obj = np.zeros(ncols + 1)
    obj[:n] = -c
    T[-1] = obj
    for i in range(m):
        if T[-1, basis[i]] != 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    status = _run(T, basis, ncols, m, max_iter)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)

    x = np.zeros(ncols)
    x[basis] = T[:m, -1]
    return LpResult(OPTIMAL, x[:n], float(T[-1, -1]))
