"""Exact balanced linear assignment with dual variables, plus fast leave-one-out costs.

The solver is a Jonker-Volgenant style successive-shortest-path algorithm
(no pre-solve heuristic; it is unreliable on double-precision costs). The
same augmenting-path kernel powers both the full solve and the O(n^2)
warm-start repair after a single diagonal entry changes, which is what
makes computing all n leave-one-out assignment costs an O(n^3) total
operation instead of O(n^4).

Conventions: for an n x n matrix ``c``, the solution pairs row ``i`` with
column ``sigma[i]`` and carries row duals ``u`` and column duals ``v``
satisfying ``u[i] + v[j] <= c[i, j]`` with equality on matched edges. The
reported objective is the mean matched cost, ``sum_i c[i, sigma[i]] / n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class AssignmentSolution:
    """Optimal matching with the dual certificate.

    sigma[i] is the column matched to row i; u, v are the row/column duals;
    objective is the mean matched cost.
    """

    sigma: np.ndarray
    u: np.ndarray
    v: np.ndarray
    objective: float

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    def column_to_row(self) -> np.ndarray:
        inv = np.empty_like(self.sigma)
        inv[self.sigma] = np.arange(self.sigma.shape[0])
        return inv


@dataclass(frozen=True)
class LeaveOneOutCosts:
    """Full-problem objective plus the n delete-one objectives.

    loo_costs[j] is the optimal mean cost of the (n-1)-sized problem with
    row j and column j removed (paired deletion of observation j).
    """

    full_cost: float
    loo_costs: np.ndarray


def _as_cost_matrix(costs) -> np.ndarray:
    c = np.ascontiguousarray(costs, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if c.shape[0] == 0:
        raise ValueError("cost matrix must have n >= 1")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix entries must all be finite")
    return c


@njit(cache=True, nogil=True)
def _augment(cost, u, v, col_of_row, row_of_col, cur_row):  # pragma: no cover
    """One shortest-augmenting-path iteration from the free row ``cur_row``.

    Requires dual feasibility (c[i,j] - u[i] - v[j] >= 0 over matched rows
    and, for repairs, the entering row) with matched edges tight. Updates
    duals and the matching in place. Ties in the path search break toward
    the lowest column index; comparisons are exact, no epsilon.
    """
    n = cost.shape[0]
    shortest = np.full(n, np.inf)
    path = np.full(n, -1, dtype=np.int64)
    remaining = np.arange(n)
    n_rem = n
    scanned_rows = np.empty(n, dtype=np.int64)
    n_sr = 0
    scanned_cols = np.empty(n, dtype=np.int64)
    n_sc = 0

    min_val = 0.0
    sink = -1
    i = cur_row
    while sink == -1:
        scanned_rows[n_sr] = i
        n_sr += 1
        lowest = np.inf
        index = -1
        best_col = -1
        for it in range(n_rem):
            j = remaining[it]
            r = min_val + cost[i, j] - u[i] - v[j]
            if r < shortest[j]:
                path[j] = i
                shortest[j] = r
            sj = shortest[j]
            if sj < lowest or (sj == lowest and j < best_col):
                lowest = sj
                index = it
                best_col = j
        min_val = lowest
        j = remaining[index]
        if row_of_col[j] == -1:
            sink = j
        else:
            i = row_of_col[j]
        scanned_cols[n_sc] = j
        n_sc += 1
        n_rem -= 1
        remaining[index] = remaining[n_rem]

    u[cur_row] += min_val
    for k in range(n_sr):
        ii = scanned_rows[k]
        if ii != cur_row:
            u[ii] += min_val - shortest[col_of_row[ii]]
    for k in range(n_sc):
        jj = scanned_cols[k]
        v[jj] -= min_val - shortest[jj]

    j = sink
    while True:
        i = path[j]
        row_of_col[j] = i
        j_next = col_of_row[i]
        col_of_row[i] = j
        j = j_next
        if i == cur_row:
            break


@njit(cache=True, nogil=True)
def _solve(cost):  # pragma: no cover
    n = cost.shape[0]
    u = np.zeros(n)
    v = np.zeros(n)
    col_of_row = np.full(n, -1, dtype=np.int64)
    row_of_col = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        _augment(cost, u, v, col_of_row, row_of_col, i)
    return col_of_row, row_of_col, u, v


@njit(cache=True, nogil=True)
def _leave_one_out(cost, col_of_row0, row_of_col0, u0, v0, eps):  # pragma: no cover
    """All n delete-one objectives by warm-start repair of the full optimum.

    For each j: free the edge into column j, drive c[j,j] down to ``eps``
    (small enough that any optimum must use the (j, j) edge), reset the
    column dual, re-augment the freed row, and report the mean cost of the
    matched edges other than (j, j). Every mutation is restored before the
    next j, so the iterations are order-independent.
    """
    n = cost.shape[0]
    loo = np.empty(n)
    work = cost.copy()
    u = np.empty(n)
    v = np.empty(n)
    col_of_row = np.empty(n, dtype=np.int64)
    row_of_col = np.empty(n, dtype=np.int64)
    for j in range(n):
        u[:] = u0
        v[:] = v0
        col_of_row[:] = col_of_row0
        row_of_col[:] = row_of_col0

        r = row_of_col[j]
        col_of_row[r] = -1
        row_of_col[j] = -1
        work[j, j] = eps
        m = np.inf
        for i in range(n):
            slack = work[i, j] - u[i]
            if slack < m:
                m = slack
        v[j] = m
        _augment(work, u, v, col_of_row, row_of_col, r)

        s = 0.0
        for i in range(n):
            if i != j:
                s += work[i, col_of_row[i]]
        loo[j] = s / (n - 1.0)
        work[j, j] = cost[j, j]
    return loo


def solve_assignment(costs) -> AssignmentSolution:
    """Solve the balanced linear assignment problem exactly.

    Returns a primal-optimal permutation together with dual-feasible,
    complementary-slack dual variables. Rejects non-square, empty, or
    non-finite input.
    """
    c = _as_cost_matrix(costs)
    n = c.shape[0]
    col_of_row, _, u, v = _solve(c)
    objective = float(c[np.arange(n), col_of_row].sum() / n)
    return AssignmentSolution(sigma=col_of_row, u=u, v=v, objective=objective)


def forcing_entry_value(costs: np.ndarray) -> float:
    """A diagonal value low enough to force its edge into any optimum.

    Any value strictly below 2*min(c) - max(c) works; the extra margin keeps
    the inequality strict even for constant matrices.
    """
    cmin = float(costs.min())
    cmax = float(costs.max())
    return 2.0 * cmin - cmax - 1.0 - abs(cmax)


def repair_after_entry_change(
    solution: AssignmentSolution, costs, j: int, new_cjj: float
) -> AssignmentSolution:
    """Re-optimize after the single diagonal entry c[j, j] changes.

    ``solution`` must be optimal for ``costs`` before the change. Runs at
    most one augmenting-path iteration from the repaired dual state, so the
    cost is O(n^2) instead of a fresh O(n^3) solve.
    """
    c = _as_cost_matrix(costs)
    n = c.shape[0]
    if not 0 <= j < n:
        raise ValueError(f"column index {j} out of range for n={n}")
    if not np.isfinite(new_cjj):
        raise ValueError("new entry must be finite")
    new_cjj = float(new_cjj)
    old_cjj = c[j, j]

    sigma = solution.sigma.astype(np.int64).copy()
    u = solution.u.astype(np.float64).copy()
    v = solution.v.astype(np.float64).copy()

    if sigma[j] != j and u[j] + v[j] <= new_cjj:
        # Entry unmatched and duals still feasible: nothing changes.
        return AssignmentSolution(sigma, u, v, solution.objective)
    if sigma[j] == j and new_cjj <= old_cjj:
        # Matched edge got cheaper: same matching, re-tighten the dual.
        v[j] += new_cjj - old_cjj
        return AssignmentSolution(
            sigma, u, v, solution.objective + (new_cjj - old_cjj) / n
        )

    modified = c.copy()
    modified[j, j] = new_cjj
    col_of_row = sigma
    row_of_col = np.empty(n, dtype=np.int64)
    row_of_col[col_of_row] = np.arange(n)
    r = row_of_col[j]
    col_of_row[r] = -1
    row_of_col[j] = -1
    v[j] = float((modified[:, j] - u).min())
    _augment(modified, u, v, col_of_row, row_of_col, r)
    objective = float(modified[np.arange(n), col_of_row].sum() / n)
    return AssignmentSolution(col_of_row, u, v, objective)


def flapjack(costs) -> LeaveOneOutCosts:
    """Full assignment cost plus all n leave-one-out costs in O(n^3) total.

    loo_costs[j] equals the from-scratch optimum of the problem with row j
    and column j deleted; computing the n subproblems independently would
    cost O(n^4).
    """
    c = _as_cost_matrix(costs)
    n = c.shape[0]
    if n < 2:
        raise ValueError("leave-one-out costs need n >= 2")
    col_of_row, row_of_col, u, v = _solve(c)
    full_cost = float(c[np.arange(n), col_of_row].sum() / n)
    eps = forcing_entry_value(c)
    loo = _leave_one_out(c, col_of_row, row_of_col, u, v, eps)
    return LeaveOneOutCosts(full_cost=full_cost, loo_costs=loo)
