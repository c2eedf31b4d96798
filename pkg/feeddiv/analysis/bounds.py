"""
Theoretical bounds on the cost of δ-diversity.

With alpha = smallest per-user mean retweet probability and beta = largest
retweet probability, cost <= min{T δ (1 - alpha/beta), (T - 1) δ} for δ <= 1/T.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from feeddiv.core.instance import Instance
from feeddiv.errors import DegenerateInstanceError
from feeddiv.policies import check_delta


@dataclass(frozen=True)
class BoundInputs:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= self.beta < 1.0:
            raise ValueError(f"need 0 <= alpha <= beta < 1, got alpha={self.alpha}, beta={self.beta}")


def alpha_beta(instance: Instance) -> BoundInputs:
    alpha = float(instance.p.mean(axis=0).min())
    beta = float(instance.p.max())
    # The mean can exceed the max by one ulp on constant columns.
    return BoundInputs(alpha=min(alpha, beta), beta=beta)


def worst_case_bound(n_types: int, delta: float) -> float:
    return (n_types - 1) * check_delta(delta, n_types)


def main_bound(n_types: int, delta: float, inputs: BoundInputs) -> float:
    delta = check_delta(delta, n_types)
    if inputs.beta <= 0.0:
        raise DegenerateInstanceError("beta = 0: every retweet probability is zero, the bound is undefined")
    return min(n_types * delta * (1.0 - inputs.alpha / inputs.beta), (n_types - 1) * delta)


def homogeneous_bound(probabilities: Sequence[float], delta: float) -> float:
    """δ * sum_{t != 1} (1 - p_t / p_1) for users sharing one probability vector."""
    ordered = np.sort(np.asarray(probabilities, dtype=float))[::-1]
    delta = check_delta(delta, ordered.size)
    if ordered[0] <= 0.0:
        raise DegenerateInstanceError("all probabilities are zero")
    return float(delta * np.sum(1.0 - ordered[1:] / ordered[0]))
