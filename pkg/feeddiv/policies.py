"""
Engagement coefficients and the closed-form injection policies.

c[t, i] is the limiting engagement produced by one unit of type t injected to
user i: c_t = (I - A_t)^{-T} w_t. The engagement-optimal policy spends each
user's whole budget on their favorite type f_i = argmax_t c[t, i].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog

from feeddiv.core.instance import InjectionPolicy, Instance, TypeMatrices, build_type_matrices
from feeddiv.errors import DeltaRangeError

logger = structlog.get_logger(__name__)

# Slack on the δ <= 1/T check so that grid points computed as i/(10T) pass.
DELTA_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class Coefficients:
    c: np.ndarray  # (T, n)
    favorite: np.ndarray  # (n,) type index, lowest index on ties


def check_delta(delta: float, n_types: int) -> float:
    if not np.isfinite(delta) or delta < 0 or delta > 1.0 / n_types + DELTA_SLACK:
        raise DeltaRangeError(delta, n_types)
    return min(float(delta), 1.0 / n_types)


def engagement_coefficients(
    instance: Instance, matrices: Optional[TypeMatrices] = None
) -> Coefficients:
    matrices = matrices or build_type_matrices(instance)
    c = np.vstack(
        [matrices.solvers[t].solve(instance.weights[t], transpose=True) for t in range(instance.n_types)]
    )
    c.setflags(write=False)
    favorite = np.argmax(c, axis=0)
    favorite.setflags(write=False)
    return Coefficients(c=c, favorite=favorite)


def optimal_policy(
    instance: Instance, coefficients: Optional[Coefficients] = None
) -> Tuple[InjectionPolicy, float]:
    """All budget on each user's favorite type; value sum_i max_t c[t, i]."""
    coefficients = coefficients or engagement_coefficients(instance)
    b = np.zeros((instance.n_types, instance.n_users))
    users = np.arange(instance.n_users)
    b[coefficients.favorite, users] = 1.0
    value = float(coefficients.c[coefficients.favorite, users].sum())
    logger.debug("policies.optimal", value=value)
    return InjectionPolicy(b), value


def delta_uniform(
    instance: Instance, delta: float, coefficients: Optional[Coefficients] = None
) -> InjectionPolicy:
    """δ of every type to every user, the rest on the favorite type."""
    delta = check_delta(delta, instance.n_types)
    coefficients = coefficients or engagement_coefficients(instance)
    b = np.full((instance.n_types, instance.n_users), delta)
    users = np.arange(instance.n_users)
    b[coefficients.favorite, users] = 1.0 - (instance.n_types - 1) * delta
    return InjectionPolicy(b)


def delta_exact(
    instance: Instance,
    delta: float,
    matrices: Optional[TypeMatrices] = None,
    coefficients: Optional[Coefficients] = None,
) -> InjectionPolicy:
    """
    δ(1 - inc[t, i]) of each non-favorite type, exactly enough for a limiting
    exposure of δ; the remaining 1 - δ(T - 1 - sum_{t != f_i} inc[t, i]) goes to f_i.
    """
    delta = check_delta(delta, instance.n_types)
    matrices = matrices or build_type_matrices(instance)
    coefficients = coefficients or engagement_coefficients(instance, matrices)
    users = np.arange(instance.n_users)
    fav = coefficients.favorite

    b = delta * (1.0 - matrices.inc)
    other_inc = matrices.inc.sum(axis=0) - matrices.inc[fav, users]
    remainder = 1.0 - delta * (instance.n_types - 1 - other_inc)
    if np.any(remainder < 0):
        logger.warning("policies.delta_exact_clamped", users=int((remainder < 0).sum()))
        remainder = np.maximum(remainder, 0.0)
    b[fav, users] = remainder
    return InjectionPolicy(b)
