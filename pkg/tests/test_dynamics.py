from __future__ import annotations

import numpy as np
import pytest

from feeddiv.core import InjectionPolicy, State, build_type_matrices, diversity, engagement, limiting_state
from feeddiv.dynamics.simulate import (
    Schedule,
    TailBound,
    average_engagement,
    average_policy,
    average_state,
    simulate,
    step,
    tail_bound,
)
from feeddiv.dynamics.convergence import random_challenger, verify_convergence
from feeddiv.errors import ChallengerError, ConfigError, PolicyError, ShapeError
from feeddiv.instances import generate, random_corpus
from feeddiv.schemas import GeneratorSpec


def _random_policy(rng, T, n):
    return InjectionPolicy(rng.dirichlet(np.ones(T), size=n).T * rng.uniform(0.5, 1.0, size=n))


def test_first_steps_chain2(chain2):
    matrices = build_type_matrices(chain2)
    b = InjectionPolicy(np.array([[0.125, 0.75], [0.875, 0.25]]))
    trajectory = simulate(matrices, Schedule.constant(b, 2))
    assert len(trajectory.states) == 3
    np.testing.assert_allclose(trajectory.states[0].x, b.b)
    np.testing.assert_allclose(trajectory.states[1].x, [[0.5, 0.75], [0.9, 0.25]])
    # The chain is acyclic, so the limit is reached after one step.
    np.testing.assert_allclose(trajectory.final.x, limiting_state(matrices, b).x)


def test_tail_bound_chain2(chain2):
    bound = tail_bound(build_type_matrices(chain2))
    assert bound.gamma == pytest.approx(0.5)
    assert bound.lam == pytest.approx(4.0)
    assert bound.at(0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        TailBound(lam=1.0, gamma=1.0)


def test_simulation_converges_to_limiting_state():
    rng = np.random.default_rng(17)
    for k in range(20):
        n, T = int(rng.integers(2, 25)), int(rng.integers(1, 5))
        instance = generate(GeneratorSpec(kind="random_graph", n=n, T=T, seed=k, edge_probability=0.3, p_high=0.5))
        matrices = build_type_matrices(instance)
        policy = _random_policy(rng, T, n)
        final = simulate(matrices, Schedule.constant(policy, 200)).final
        limit = limiting_state(matrices, policy)
        bound = tail_bound(matrices)
        errors = np.abs(final.x - limit.x).sum(axis=1)
        assert errors.max() <= bound.at(200) + 1e-12
        assert errors.max() <= 1e-8


def test_deficit_follows_tail_bound_at_every_step():
    instance = generate(GeneratorSpec(kind="random_graph", n=15, T=3, seed=4, edge_probability=0.4, p_high=0.9))
    matrices = build_type_matrices(instance)
    policy = InjectionPolicy(np.full((3, 15), 1 / 3))
    bound = tail_bound(matrices)
    limit = limiting_state(matrices, policy)
    for k, state in enumerate(simulate(matrices, Schedule.constant(policy, 60)).states):
        assert np.all(limit.x - state.x >= -1e-12)
        assert np.abs(limit.x - state.x).sum(axis=1).max() <= bound.at(k) + 1e-12


def test_schedule_validation(chain2):
    good = InjectionPolicy(np.full((2, 2), 0.5))
    with pytest.raises(ConfigError):
        Schedule(())
    with pytest.raises(ShapeError):
        Schedule.from_policies([good, InjectionPolicy(np.full((1, 2), 0.5))])
    with pytest.raises(PolicyError):
        Schedule.from_policies([good, InjectionPolicy(np.full((2, 2), 0.7))])
    with pytest.raises(ConfigError):
        Schedule.constant(good, -1)
    assert Schedule.constant(good, 4).horizon == 4


def test_cell_budget(chain2):
    schedule = Schedule.constant(InjectionPolicy(np.full((2, 2), 0.5)), 9)
    with pytest.raises(ConfigError):
        simulate(build_type_matrices(chain2), schedule, cell_budget=39)
    assert len(simulate(build_type_matrices(chain2), schedule, cell_budget=40).states) == 10


def test_step_shape_mismatch(chain2):
    with pytest.raises(ShapeError):
        step(build_type_matrices(chain2), State.zeros(2, 3), InjectionPolicy(np.full((2, 2), 0.5)))


def test_averages(chain2):
    matrices = build_type_matrices(chain2)
    schedule = Schedule.from_policies(
        [InjectionPolicy(np.array([[1.0, 0.0], [0.0, 1.0]])), InjectionPolicy(np.array([[0.0, 1.0], [1.0, 0.0]]))]
    )
    trajectory = simulate(matrices, schedule)
    np.testing.assert_allclose(average_policy(schedule).b, 0.5)
    np.testing.assert_allclose(average_state(trajectory).x, (trajectory.states[0].x + trajectory.states[1].x) / 2)
    expected = (engagement(trajectory.states[0], chain2) + engagement(trajectory.states[1], chain2)) / 2
    assert average_engagement(trajectory, chain2) == pytest.approx(expected)


def test_random_challenger_is_diverse_at_every_step():
    instance = random_corpus(1, 12, 4, seed=3)[0]
    matrices = build_type_matrices(instance)
    delta = 0.8 / instance.n_types
    schedule = random_challenger(instance.n_users, instance.n_types, delta, 30, np.random.default_rng(0))
    assert schedule.horizon == 30
    for state in simulate(matrices, schedule).states:
        assert diversity(state) >= delta - 1e-12


def test_convergence_harness_on_random_instances():
    rng = np.random.default_rng(9)
    for instance in random_corpus(20, 12, 4, seed=13):
        delta = float(rng.uniform(0.1, 1.0)) / instance.n_types
        challenger = random_challenger(instance.n_users, instance.n_types, delta, 100, rng)
        report = verify_convergence(instance, delta, 100, challenger=challenger)
        assert report.passed, [c for c in report.checks if not c.passed]
        assert len(report.checks) == 5


def test_convergence_harness_chain2(chain2):
    report = verify_convergence(chain2, 0.25, 100)
    assert report.passed
    assert report.opt_delta == pytest.approx(0.885, abs=1e-9)
    assert [c.name for c in report.checks] == ["average_engagement_converges", "diversity_deficit_geometric"]


def test_non_diverse_challenger_is_rejected(chain2):
    zero_start = Schedule.from_policies([InjectionPolicy(np.zeros((2, 2)))] + [InjectionPolicy(np.full((2, 2), 0.5))] * 3)
    with pytest.raises(ChallengerError):
        verify_convergence(chain2, 0.25, 10, challenger=zero_start)


def test_constant_schedule_states_increase_towards_the_limit():
    rng = np.random.default_rng(29)
    for instance in random_corpus(10, 20, 4, seed=31):
        matrices = build_type_matrices(instance)
        policy = _random_policy(rng, instance.n_types, instance.n_users)
        trajectory = simulate(matrices, Schedule.constant(policy, 60))
        for before, after in zip(trajectory.states, trajectory.states[1:]):
            assert np.all(after.x >= before.x - 1e-12)
        averages = [
            average_engagement(simulate(matrices, Schedule.constant(policy, horizon)), instance)
            for horizon in (1, 2, 5, 10, 30, 60)
        ]
        assert all(later >= earlier - 1e-12 for earlier, later in zip(averages, averages[1:]))
