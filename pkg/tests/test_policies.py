from __future__ import annotations

import numpy as np
import pytest

from feeddiv.analysis.frontier import scale_probabilities
from feeddiv.core import InjectionPolicy, Instance, build_type_matrices, diversity, engagement, limiting_state
from feeddiv.errors import ConfigError, DeltaRangeError
from feeddiv.instances import random_corpus
from feeddiv.lp import opt_delta
from feeddiv.policies import (
    check_delta,
    delta_exact,
    delta_uniform,
    engagement_coefficients,
    optimal_policy,
)


def test_chain2_coefficients(chain2):
    coefficients = engagement_coefficients(chain2)
    np.testing.assert_allclose(coefficients.c, [[0.2, 0.6], [0.4, 0.14]], atol=1e-12)
    assert coefficients.favorite.tolist() == [1, 0]


def test_chain2_optimal_policy(chain2):
    policy, value = optimal_policy(chain2)
    assert policy.b.tolist() == [[0.0, 1.0], [1.0, 0.0]]
    assert value == pytest.approx(1.0, abs=1e-12)
    state = limiting_state(build_type_matrices(chain2), policy)
    assert engagement(state, chain2) == pytest.approx(value, abs=1e-12)


def test_chain2_delta_uniform(chain2):
    policy = delta_uniform(chain2, 0.25)
    np.testing.assert_allclose(policy.b, [[0.25, 0.75], [0.75, 0.25]])
    state = limiting_state(build_type_matrices(chain2), policy)
    np.testing.assert_allclose(state.x, [[0.625, 0.75], [0.775, 0.25]], atol=1e-12)
    assert engagement(state, chain2) == pytest.approx(0.835, abs=1e-9)


def test_chain2_delta_exact(chain2):
    policy = delta_exact(chain2, 0.25)
    np.testing.assert_allclose(policy.b, [[0.125, 0.75], [0.875, 0.25]], atol=1e-12)
    state = limiting_state(build_type_matrices(chain2), policy)
    assert engagement(state, chain2) == pytest.approx(0.86, abs=1e-9)
    assert diversity(state) == pytest.approx(0.25, abs=1e-12)


def test_ties_go_to_lowest_type():
    instance = Instance.from_edges(2, [[0.3, 0.1], [0.3, 0.2]])
    assert engagement_coefficients(instance).favorite.tolist() == [0, 1]


def test_delta_zero_policies_are_optimal(chain2):
    optimal, _ = optimal_policy(chain2)
    np.testing.assert_allclose(delta_uniform(chain2, 0.0).b, optimal.b)
    np.testing.assert_allclose(delta_exact(chain2, 0.0).b, optimal.b)


def test_check_delta():
    assert check_delta(0.5, 2) == 0.5
    assert check_delta(10 / (10 * 3), 3) == pytest.approx(1 / 3)
    for bad in (-0.01, 0.51, float("nan")):
        with pytest.raises(DeltaRangeError):
            check_delta(bad, 2)
    with pytest.raises(ConfigError):
        check_delta(0.6, 2)
    with pytest.raises(ValueError):
        check_delta(0.6, 2)


@pytest.mark.parametrize("delta_fraction", [0.1, 0.5, 1.0])
def test_closed_form_policies_on_random_instances(delta_fraction):
    for instance in random_corpus(25, 12, 4, seed=11):
        T = instance.n_types
        delta = delta_fraction / T
        matrices = build_type_matrices(instance)
        for policy in (delta_uniform(instance, delta), delta_exact(instance, delta, matrices)):
            assert policy.b.min() >= 0.0
            np.testing.assert_allclose(policy.b.sum(axis=0), 1.0, atol=1e-12)
            assert diversity(limiting_state(matrices, policy)) >= delta - 1e-9


def test_optimal_policy_beats_random_policies():
    rng = np.random.default_rng(5)
    for instance in random_corpus(10, 10, 3, seed=2):
        matrices = build_type_matrices(instance)
        _, value = optimal_policy(instance)
        for _ in range(5):
            policy = InjectionPolicy(rng.dirichlet(np.ones(instance.n_types), size=instance.n_users).T)
            assert engagement(limiting_state(matrices, policy), instance) <= value + 1e-9


def test_delta_exact_sits_between_uniform_and_the_lp_optimum():
    for instance in random_corpus(15, 30, 4, seed=19):
        matrices = build_type_matrices(instance)
        _, opt_eng = optimal_policy(instance)
        for fraction in (0.25, 0.5, 1.0):
            delta = fraction / instance.n_types
            uniform = engagement(limiting_state(matrices, delta_uniform(instance, delta)), instance)
            exact = engagement(limiting_state(matrices, delta_exact(instance, delta, matrices)), instance)
            _, opt = opt_delta(instance, delta, matrices=matrices)
            slack = 1e-9 * (1.0 + opt_eng)
            assert exact >= uniform - slack
            assert exact <= opt + slack
            assert opt <= opt_eng + slack


def test_favorites_survive_scaling_on_empty_graph():
    rng = np.random.default_rng(23)
    instance = Instance.from_edges(12, rng.uniform(0.01, 0.45, size=(4, 12)))
    scaled = scale_probabilities(instance, 2.0)
    assert scaled.p.max() < 0.99
    np.testing.assert_array_equal(
        engagement_coefficients(scaled).favorite, engagement_coefficients(instance).favorite
    )
