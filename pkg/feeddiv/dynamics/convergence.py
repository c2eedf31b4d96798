"""
Empirical harness for the convergence and approximate-optimality guarantees
of the δ-diverse optimum b* under time-dependent dynamics:

1. average engagement along b*'s trajectory trails eng(b*) by at most C/K,
   C = T * lam * gamma / (1 - gamma);
2. diversity at step k is at least δ - lam * gamma^(k+1);
3. any schedule that is δ-diverse at every step (including step 0) has
   average engagement <= eng(b_av) <= eng(b*), b_av its time-averaged policy.
"""
from __future__ import annotations

from typing import List, Optional

import numpy as np
import structlog

from feeddiv.core.instance import InjectionPolicy, Instance, build_type_matrices
from feeddiv.core.state import diversity, engagement, limiting_state
from feeddiv.dynamics.simulate import (
    Schedule,
    average_engagement,
    average_policy,
    average_state,
    simulate,
    tail_bound,
)
from feeddiv.errors import ChallengerError
from feeddiv.lp.builders import opt_delta
from feeddiv.policies import check_delta
from feeddiv.schemas import CheckResult, ConvergenceReport

logger = structlog.get_logger(__name__)

# Slack for comparisons between LP values and simulated values.
CHECK_TOLERANCE = 1e-7


def verify_convergence(
    instance: Instance,
    delta: float,
    horizon: int,
    challenger: Optional[Schedule] = None,
) -> ConvergenceReport:
    delta = check_delta(delta, instance.n_types)
    matrices = build_type_matrices(instance)
    bound = tail_bound(matrices)

    if challenger is not None:
        challenger_trajectory = simulate(matrices, challenger)
        for k, state in enumerate(challenger_trajectory.states):
            if diversity(state) < delta - CHECK_TOLERANCE:
                raise ChallengerError(
                    f"challenger is not {delta!r}-diverse at step {k} (diversity {diversity(state)!r})"
                )

    policy, opt_value = opt_delta(instance, delta, matrices=matrices)
    trajectory = simulate(matrices, Schedule.constant(policy, horizon))
    limit_value = engagement(limiting_state(matrices, policy), instance)

    checks: List[CheckResult] = []

    # Part 1: average engagement converges from below at rate C / K.
    weight_scale = max(1.0, float(instance.weights.max()))
    constant = instance.n_types * bound.lam * bound.gamma / (1.0 - bound.gamma) * weight_scale
    gap = limit_value - average_engagement(trajectory, instance)
    allowed = constant / max(horizon, 1)
    checks.append(CheckResult(
        name="average_engagement_converges",
        passed=bool(-CHECK_TOLERANCE <= gap <= allowed + CHECK_TOLERANCE),
        measured=gap,
        bound=allowed,
        detail=f"C={constant!r}",
    ))

    # Part 2: diversity deficit decays geometrically.
    slacks = [diversity(s) - (delta - bound.at(k)) for k, s in enumerate(trajectory.states)]
    worst = int(np.argmin(slacks))
    checks.append(CheckResult(
        name="diversity_deficit_geometric",
        passed=bool(slacks[worst] >= -CHECK_TOLERANCE),
        measured=diversity(trajectory.states[worst]),
        bound=delta - bound.at(worst),
        detail=f"tightest step k={worst}",
    ))

    # Part 3: no δ-diverse schedule beats b* on average.
    if challenger is not None:
        averaged = average_policy(challenger)
        averaged_limit = limiting_state(matrices, averaged)
        averaged_value = engagement(averaged_limit, instance)
        challenger_value = average_engagement(challenger_trajectory, instance)
        dominance = float((averaged_limit.x - average_state(challenger_trajectory).x).min())
        checks.append(CheckResult(
            name="averaged_policy_dominates_states",
            passed=bool(dominance >= -CHECK_TOLERANCE),
            measured=dominance,
            bound=0.0,
        ))
        checks.append(CheckResult(
            name="challenger_below_averaged_policy",
            passed=bool(challenger_value <= averaged_value + CHECK_TOLERANCE),
            measured=challenger_value,
            bound=averaged_value,
        ))
        checks.append(CheckResult(
            name="averaged_policy_below_optimum",
            passed=bool(averaged_value <= opt_value + CHECK_TOLERANCE * (1.0 + abs(opt_value))),
            measured=averaged_value,
            bound=opt_value,
        ))

    report = ConvergenceReport(
        delta=delta,
        horizon=horizon,
        lam=bound.lam,
        gamma=bound.gamma,
        opt_delta=opt_value,
        checks=checks,
    )
    logger.info("dynamics.convergence_verified", delta=delta, horizon=horizon, passed=report.passed)
    return report


def random_challenger(
    n_users: int, n_types: int, delta: float, horizon: int, rng: np.random.Generator
) -> Schedule:
    """
    Random schedule with every b^(k) >= δ entrywise, hence δ-diverse at every step:
    b^(k)[:, i] = δ + (1 - T δ) * Dirichlet(1, ..., 1).
    """
    delta = check_delta(delta, n_types)
    spare = max(0.0, 1.0 - n_types * delta)
    policies = []
    for _ in range(horizon + 1):
        shares = rng.dirichlet(np.ones(n_types), size=n_users).T
        policies.append(InjectionPolicy(delta + spare * shares))
    return Schedule.from_policies(policies)
