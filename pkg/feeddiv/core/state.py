"""
Limiting states and the engagement / diversity functionals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from feeddiv.core.instance import InjectionPolicy, Instance, TypeMatrices
from feeddiv.errors import NumericalError, ShapeError

# Round-off below this is treated as an exact zero exposure.
_NEGATIVE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class State:
    """Expected tweet exposures x[t, i]."""

    x: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=float, copy=True)
        if x.ndim != 2:
            raise ShapeError(f"state must be a T x n matrix, got shape {x.shape}")
        if not np.all(np.isfinite(x)) or np.any(x < 0):
            raise NumericalError("state entries must be finite and nonnegative")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_raw(cls, x: np.ndarray) -> "State":
        """Clamp round-off negatives (> -1e-9) to zero before construction."""
        x = np.asarray(x, dtype=float)
        if x.size and x.min() < -_NEGATIVE_SLACK:
            raise NumericalError(f"state has a negative exposure {x.min()!r}")
        return cls(np.maximum(x, 0.0))

    @classmethod
    def zeros(cls, n_types: int, n_users: int) -> "State":
        return cls(np.zeros((n_types, n_users)))


def _check_policy_shape(matrices: TypeMatrices, policy: InjectionPolicy) -> None:
    if policy.shape != (matrices.n_types, matrices.n_users):
        raise ShapeError(
            f"policy shape {policy.shape} does not match {(matrices.n_types, matrices.n_users)}"
        )


def limiting_state(matrices: TypeMatrices, policy: InjectionPolicy) -> State:
    """x_t = (I - A_t)^{-1} b_t, computed per type by factorization (never by inversion)."""
    _check_policy_shape(matrices, policy)
    policy.require_valid()
    x = np.vstack([matrices.solvers[t].solve(policy.b[t]) for t in range(matrices.n_types)])
    return State.from_raw(x)


def engagement(state: State, instance: Instance) -> float:
    """Sum over types of <w_t, x_t>, w = affinities if set else retweet probabilities."""
    weights = instance.weights
    if state.x.shape != weights.shape:
        raise ShapeError(f"state shape {state.x.shape} does not match instance {weights.shape}")
    return float(np.sum(weights * state.x))


def diversity(state: State) -> float:
    """Fewest expected tweets of any type seen by any user."""
    return float(state.x.min())
