"""
Per-step dynamics x^(k+1)_t = A_t x^(k)_t + b^(k)_t for fixed injection schedules.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import structlog

from feeddiv.config import get_settings
from feeddiv.core.instance import InjectionPolicy, Instance, TypeMatrices
from feeddiv.core.state import State, engagement
from feeddiv.errors import ConfigError, ShapeError

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Schedule:
    """Injection policies b^(0), ..., b^(K), one per timestep."""

    policies: Tuple[InjectionPolicy, ...]

    def __post_init__(self) -> None:
        if not self.policies:
            raise ConfigError("a schedule needs at least one policy")
        shape = self.policies[0].shape
        for k, policy in enumerate(self.policies):
            if policy.shape != shape:
                raise ShapeError(f"schedule entry {k} has shape {policy.shape}, expected {shape}")
            policy.require_valid()

    @classmethod
    def constant(cls, policy: InjectionPolicy, horizon: int) -> "Schedule":
        if horizon < 0:
            raise ConfigError(f"horizon must be >= 0, got {horizon}")
        return cls(tuple([policy] * (horizon + 1)))

    @classmethod
    def from_policies(cls, policies: Sequence[InjectionPolicy]) -> "Schedule":
        return cls(tuple(policies))

    @property
    def horizon(self) -> int:
        return len(self.policies) - 1


@dataclass(frozen=True)
class Trajectory:
    states: Tuple[State, ...]
    schedule: Schedule

    @property
    def final(self) -> State:
        return self.states[-1]


@dataclass(frozen=True)
class TailBound:
    """Certifies ||x(b) - x^(k)||_1 <= lam * gamma^(k+1) per type for any valid b."""

    lam: float
    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")

    def at(self, k: int) -> float:
        return self.lam * self.gamma ** (k + 1)


def step(matrices: TypeMatrices, state: State, injection: InjectionPolicy) -> State:
    expected = (matrices.n_types, matrices.n_users)
    if state.x.shape != expected or injection.shape != expected:
        raise ShapeError(f"state {state.x.shape} / injection {injection.shape} must be {expected}")
    x = np.vstack([matrices[t] @ state.x[t] + injection.b[t] for t in range(matrices.n_types)])
    return State(x)


def simulate(
    matrices: TypeMatrices,
    schedule: Schedule,
    *,
    cell_budget: Optional[int] = None,
) -> Trajectory:
    budget = cell_budget if cell_budget is not None else get_settings().TRAJECTORY_CELL_BUDGET
    cells = len(schedule.policies) * matrices.n_users * matrices.n_types
    if cells > budget:
        raise ConfigError(f"trajectory needs {cells} cells, budget is {budget}")

    states = [State(schedule.policies[0].b)]
    for injection in schedule.policies[1:]:
        states.append(step(matrices, states[-1], injection))

    logger.debug("dynamics.simulated", steps=len(states), n=matrices.n_users, T=matrices.n_types)
    return Trajectory(states=tuple(states), schedule=schedule)


def average_engagement(trajectory: Trajectory, instance: Instance) -> float:
    return float(np.mean([engagement(s, instance) for s in trajectory.states]))


def average_policy(schedule: Schedule) -> InjectionPolicy:
    return InjectionPolicy(np.mean([p.b for p in schedule.policies], axis=0))


def average_state(trajectory: Trajectory) -> State:
    return State(np.mean([s.x for s in trajectory.states], axis=0))


def tail_bound(matrices: TypeMatrices) -> TailBound:
    """gamma = max row sum over all types, lambda = n / (1 - gamma)."""
    gamma = float(matrices.inc.max()) if matrices.inc.size else 0.0
    if gamma >= 1.0:
        raise ValueError(f"max incoming weight {gamma} must be below 1")
    return TailBound(lam=matrices.n_users / (1.0 - gamma), gamma=gamma)
