"""
Checks of the cost bounds and the analytical policies' guarantees on one instance.
"""
from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np
import structlog

from feeddiv.analysis.bounds import alpha_beta, homogeneous_bound
from feeddiv.analysis.frontier import default_grid, frontier
from feeddiv.core.instance import Instance, build_type_matrices
from feeddiv.core.state import diversity, limiting_state
from feeddiv.policies import delta_exact, delta_uniform, engagement_coefficients
from feeddiv.schemas import CheckResult, CostBoundsReport

logger = structlog.get_logger(__name__)

BOUND_TOLERANCE = 1e-7
DIVERSITY_TOLERANCE = 1e-9


def is_homogeneous(instance: Instance) -> bool:
    return bool(np.all(instance.p == instance.p[:, :1]))


def verify_cost_bounds(
    instance: Instance,
    grid: Optional[Sequence[float]] = None,
    *,
    instance_hash: str = "",
) -> CostBoundsReport:
    grid = list(grid) if grid is not None else default_grid(instance.n_types)
    T = instance.n_types
    inputs = alpha_beta(instance)
    rows = frontier(instance, grid)
    matrices = build_type_matrices(instance)
    coefficients = engagement_coefficients(instance, matrices)
    opt_eng = rows[0].opt_eng if rows else 0.0
    # The α/β bounds hold for the retweet-probability objective only.
    plain = instance.e is None
    homogeneous = plain and is_homogeneous(instance) and inputs.beta > 0

    checks: List[CheckResult] = []
    for row in rows:
        d = row.delta
        checks.append(CheckResult(
            name=f"cost_within_worst_case[delta={d!r}]",
            passed=row.cost <= row.bound_worst + BOUND_TOLERANCE,
            measured=row.cost,
            bound=row.bound_worst,
        ))
        if plain and inputs.beta > 0:
            checks.append(CheckResult(
                name=f"cost_within_main_bound[delta={d!r}]",
                passed=row.cost <= row.bound_main + BOUND_TOLERANCE,
                measured=row.cost,
                bound=row.bound_main,
            ))
            exact_floor = (1.0 - T * d * (1.0 - inputs.alpha / inputs.beta)) * opt_eng
            checks.append(CheckResult(
                name=f"delta_exact_guarantee[delta={d!r}]",
                passed=row.eng_exact >= exact_floor - BOUND_TOLERANCE * (1.0 + opt_eng),
                measured=row.eng_exact,
                bound=exact_floor,
            ))
        uniform_floor = (1.0 - (T - 1) * d) * opt_eng
        checks.append(CheckResult(
            name=f"delta_uniform_guarantee[delta={d!r}]",
            passed=row.eng_uniform >= uniform_floor - BOUND_TOLERANCE * (1.0 + opt_eng),
            measured=row.eng_uniform,
            bound=uniform_floor,
        ))
        for label, policy in (
            ("delta_uniform", delta_uniform(instance, d, coefficients)),
            ("delta_exact", delta_exact(instance, d, matrices, coefficients)),
        ):
            measured = diversity(limiting_state(matrices, policy))
            checks.append(CheckResult(
                name=f"{label}_diverse[delta={d!r}]",
                passed=measured >= d - DIVERSITY_TOLERANCE,
                measured=measured,
                bound=d,
            ))
        if homogeneous:
            bound = homogeneous_bound(instance.p[:, 0], d)
            checks.append(CheckResult(
                name=f"cost_within_homogeneous_bound[delta={d!r}]",
                passed=row.cost <= bound + BOUND_TOLERANCE,
                measured=row.cost,
                bound=bound,
            ))

    report = CostBoundsReport(
        instance_hash=instance_hash,
        alpha=inputs.alpha,
        beta=inputs.beta,
        opt_eng=opt_eng,
        checks=checks,
    )
    if not report.passed:
        failed = [c.name for c in checks if not c.passed]
        logger.warning("analysis.cost_checks_failed", instance_hash=instance_hash, failed=failed)
    return report
