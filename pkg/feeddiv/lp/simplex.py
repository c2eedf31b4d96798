"""
Two-phase dense-tableau simplex with Bland's anti-cycling rule.

Rows with a negative bound are negated first so every right-hand side is
nonnegative; <= rows start with their slack in the basis, >= rows get a
surplus column and an artificial basic variable. Phase 1 maximizes minus the
sum of artificials; artificials left in the basis at level zero are pivoted
out (or their row dropped as redundant) before phase 2.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
import structlog

from feeddiv.config import get_settings
from feeddiv.errors import IterationLimitError, NumericalError
from feeddiv.lp.program import LinearProgram, LpSolution, LpStatus, Relation

logger = structlog.get_logger(__name__)

# Constraint residual accepted on an optimal solution.
RESIDUAL_TOLERANCE = 1e-7


class _PivotBudget:
    def __init__(self, cap: int) -> None:
        self.cap = cap
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.cap:
            raise IterationLimitError(self.cap)


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int, tolerance: float) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    basis[row] = col
    # Only round-off below zero is absorbed; larger drift surfaces in the residual check.
    rhs = tableau[:, -1]
    rhs[(rhs < 0.0) & (rhs >= -tolerance)] = 0.0


def _iterate(
    tableau: np.ndarray,
    basis: np.ndarray,
    cost: np.ndarray,
    tolerance: float,
    budget: _PivotBudget,
) -> LpStatus:
    while True:
        reduced = cost - cost[basis] @ tableau[:, :-1]
        reduced[basis] = 0.0
        entering = np.flatnonzero(reduced > tolerance)
        if not entering.size:
            return LpStatus.OPTIMAL
        col = int(entering[0])

        column = tableau[:, col]
        rows = np.flatnonzero(column > tolerance)
        if not rows.size:
            return LpStatus.UNBOUNDED
        ratios = np.maximum(tableau[rows, -1], 0.0) / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tolerance * (1.0 + abs(best))]
        row = int(ties[np.argmin(basis[ties])])

        budget.spend()
        _pivot(tableau, basis, row, col, tolerance)


def _drop_artificials(tableau: np.ndarray, basis: np.ndarray, first_artificial: int, tolerance: float):
    keep = []
    for row in range(basis.size):
        if basis[row] < first_artificial:
            keep.append(row)
            continue
        candidates = np.flatnonzero(np.abs(tableau[row, :first_artificial]) > tolerance)
        if candidates.size:
            _pivot(tableau, basis, row, int(candidates[0]), tolerance)
            keep.append(row)
        else:
            logger.debug("simplex.redundant_row_dropped", row=row)
    tableau = np.hstack([tableau[keep, :first_artificial], tableau[keep, -1:]])
    return tableau, basis[keep]


def solve(
    lp: LinearProgram,
    *,
    tolerance: Optional[float] = None,
    iteration_factor: Optional[int] = None,
) -> LpSolution:
    """Solve a maximization LP; deterministic for identical input."""
    settings = get_settings()
    tol = tolerance if tolerance is not None else settings.LP_FEASIBILITY_TOLERANCE
    factor = iteration_factor if iteration_factor is not None else settings.LP_ITERATION_FACTOR

    m, k = lp.matrix.shape
    budget = _PivotBudget(factor * (m + k))

    matrix = lp.matrix.copy()
    rhs = lp.rhs.copy()
    ge = np.array([r is Relation.GE for r in lp.relations], dtype=bool)
    flip = rhs < 0
    matrix[flip] *= -1.0
    rhs[flip] *= -1.0
    ge ^= flip

    artificial_rows = np.flatnonzero(ge)
    n_artificial = artificial_rows.size
    first_artificial = k + m
    width = first_artificial + n_artificial

    tableau = np.zeros((m, width + 1))
    tableau[:, :k] = matrix
    tableau[np.arange(m), k + np.arange(m)] = np.where(ge, -1.0, 1.0)
    artificial_cols = first_artificial + np.arange(n_artificial)
    tableau[artificial_rows, artificial_cols] = 1.0
    tableau[:, -1] = rhs

    basis = k + np.arange(m)
    basis[artificial_rows] = artificial_cols

    if n_artificial:
        phase_one = np.zeros(width)
        phase_one[artificial_cols] = -1.0
        _iterate(tableau, basis, phase_one, tol, budget)
        infeasibility = float(tableau[basis >= first_artificial, -1].sum())
        if infeasibility > tol * (1.0 + float(rhs.max(initial=0.0))):
            logger.info("lp.infeasible", rows=m, cols=k, infeasibility=infeasibility)
            return LpSolution(LpStatus.INFEASIBLE, None, None, budget.used)
        tableau, basis = _drop_artificials(tableau, basis, first_artificial, tol)

    cost = np.zeros(first_artificial)
    cost[:k] = lp.objective
    status = _iterate(tableau, basis, cost, tol, budget)
    if status is LpStatus.UNBOUNDED:
        logger.info("lp.unbounded", rows=m, cols=k)
        return LpSolution(LpStatus.UNBOUNDED, None, None, budget.used)

    values = np.zeros(first_artificial)
    values[basis] = tableau[:, -1]
    x = np.maximum(values[:k], 0.0)
    x.setflags(write=False)

    violation = lp.max_violation(x)
    if violation > RESIDUAL_TOLERANCE:
        logger.error("lp.residual", violation=violation, rows=m, cols=k, pivots=budget.used)
        raise NumericalError(f"simplex solution violates a constraint by {violation!r}", violation=violation)

    objective = lp.evaluate(x)
    logger.debug("lp.solved", rows=m, cols=k, pivots=budget.used, objective=objective)
    return LpSolution(LpStatus.OPTIMAL, x, objective, budget.used)
