"""
Builders for the engagement-optimal and δ-diversity programs.

Variables are b[t, i] flattened in (t, i) order, index t * n + i.
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
import scipy.linalg as la
import structlog

from feeddiv.config import get_settings
from feeddiv.core.instance import InjectionPolicy, Instance, TypeMatrices, build_type_matrices
from feeddiv.errors import InfeasibleProgramError, NumericalError
from feeddiv.lp.program import LinearProgram, LpStatus, Relation
from feeddiv.lp.simplex import solve
from feeddiv.policies import Coefficients, check_delta, engagement_coefficients

logger = structlog.get_logger(__name__)


def _budget_rows(n_types: int, n_users: int) -> np.ndarray:
    return np.tile(np.eye(n_users), (1, n_types))


def build_engagement_lp(
    instance: Instance, coefficients: Optional[Coefficients] = None
) -> LinearProgram:
    """maximize sum_t c_t^T b_t  s.t.  sum_t b[t, i] <= 1."""
    coefficients = coefficients or engagement_coefficients(instance)
    n, T = instance.n_users, instance.n_types
    return LinearProgram(
        objective=coefficients.c.ravel(),
        matrix=_budget_rows(T, n),
        relations=(Relation.LE,) * n,
        rhs=np.ones(n),
        formulation="engagement",
        layout=(T, n),
    )


def build_diversity_lp(
    instance: Instance,
    delta: float,
    *,
    formulation: Optional[str] = None,
    matrices: Optional[TypeMatrices] = None,
    coefficients: Optional[Coefficients] = None,
) -> LinearProgram:
    """
    The engagement program plus (A*_t b_t)_i >= δ for every t, i.

    ``direct`` materializes A*_t = (I - A_t)^{-1} row by row through transposed
    solves. ``substituted`` uses y_t = A*_t b_t as variables instead:
    maximize sum_t w_t^T y_t  s.t.  y >= δ,  (I - A_t) y_t >= 0,
    sum_t ((I - A_t) y_t)_i <= 1.
    """
    delta = check_delta(delta, instance.n_types)
    formulation = formulation or get_settings().LP_DIVERSITY_FORMULATION
    matrices = matrices or build_type_matrices(instance)
    n, T = instance.n_users, instance.n_types
    identity = np.eye(n)

    if formulation == "direct":
        coefficients = coefficients or engagement_coefficients(instance, matrices)
        # Row i of A*_t is the transposed solve against e_i.
        blocks = [matrices.solvers[t].solve(identity, transpose=True).T for t in range(T)]
        matrix = np.vstack([_budget_rows(T, n), la.block_diag(*blocks)])
        objective = coefficients.c.ravel()
        relations = (Relation.LE,) * n + (Relation.GE,) * (T * n)
        rhs = np.concatenate([np.ones(n), np.full(T * n, delta)])
        name = "diversity"
    elif formulation == "substituted":
        systems = [identity - matrices[t].toarray() for t in range(T)]
        matrix = np.vstack([np.eye(T * n), la.block_diag(*systems), np.hstack(systems)])
        objective = instance.weights.ravel()
        relations = (Relation.GE,) * (2 * T * n) + (Relation.LE,) * n
        rhs = np.concatenate([np.full(T * n, delta), np.zeros(T * n), np.ones(n)])
        name = "diversity_substituted"
    else:
        raise ValueError(f"unknown diversity formulation {formulation!r}")

    logger.debug("lp.diversity_built", formulation=formulation, delta=delta, rows=matrix.shape[0])
    return LinearProgram(
        objective=objective,
        matrix=matrix,
        relations=relations,
        rhs=rhs,
        formulation=name,
        layout=(T, n),
    )


def opt_delta(
    instance: Instance,
    delta: float,
    *,
    formulation: Optional[str] = None,
    matrices: Optional[TypeMatrices] = None,
    coefficients: Optional[Coefficients] = None,
) -> Tuple[InjectionPolicy, float]:
    """Engagement-maximizing δ-diverse policy and its value OPT_δ."""
    matrices = matrices or build_type_matrices(instance)
    lp = build_diversity_lp(
        instance, delta, formulation=formulation, matrices=matrices, coefficients=coefficients
    )
    solution = solve(lp)
    if solution.status is LpStatus.INFEASIBLE:
        # The uniform policy 1/T is always feasible for δ <= 1/T.
        raise InfeasibleProgramError(f"δ-diversity program reported infeasible at delta={delta!r}")
    if solution.status is LpStatus.UNBOUNDED:
        raise NumericalError(f"δ-diversity program reported unbounded at delta={delta!r}")

    values = np.asarray(solution.values).reshape(instance.n_types, instance.n_users)
    if lp.formulation == "diversity_substituted":
        values = np.vstack([values[t] - matrices[t] @ values[t] for t in range(instance.n_types)])
    policy = InjectionPolicy(np.maximum(values, 0.0)).require_valid()

    logger.info("lp.opt_delta", delta=delta, value=solution.objective, pivots=solution.iterations)
    return policy, float(solution.objective)
