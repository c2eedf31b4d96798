from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from feeddiv.analysis import frontier as frontier_module
from feeddiv.analysis.bounds import BoundInputs, alpha_beta, homogeneous_bound, main_bound, worst_case_bound
from feeddiv.analysis.frontier import (
    cost_of_diversity,
    default_grid,
    frontier,
    scale_probabilities,
    write_frontier_csv,
)
from feeddiv.analysis.guarantees import is_homogeneous, verify_cost_bounds
from feeddiv.analysis.plot import plot_frontier
from feeddiv.core import Instance
from feeddiv.errors import ConfigError, DegenerateInstanceError, FrontierError, IterationLimitError
from feeddiv.instances import generate, random_corpus
from feeddiv.schemas import FRONTIER_COLUMNS, GeneratorSpec


def tightness(alpha: float, beta: float) -> Instance:
    return generate(GeneratorSpec(kind="tightness", n=10, T=4, seed=0, alpha=alpha, beta=beta))


def test_default_grid():
    assert default_grid(4) == pytest.approx([i / 40 for i in range(1, 11)])
    assert default_grid(2, 4, include_zero=True) == pytest.approx([0.0, 0.125, 0.25, 0.375, 0.5])


def test_chain2_cost(chain2):
    assert cost_of_diversity(chain2, 0.25) == pytest.approx(0.115, abs=1e-9)
    assert cost_of_diversity(chain2, 0.0) == pytest.approx(0.0, abs=1e-12)
    inputs = alpha_beta(chain2)
    assert (inputs.alpha, inputs.beta) == pytest.approx((0.3, 0.5))
    assert main_bound(2, 0.25, inputs) == pytest.approx(0.2)
    assert worst_case_bound(2, 0.25) == pytest.approx(0.25)


def test_tightness_example_cost(tight):
    assert cost_of_diversity(tight, 0.25) == pytest.approx(0.375, abs=1e-7)


@pytest.mark.parametrize("alpha, beta", [(0.5, 0.8), (0.1, 0.8), (0.4, 0.4)])
def test_tightness_instances_meet_the_bound(alpha, beta):
    instance = tightness(alpha, beta)
    for row in frontier(instance):
        assert row.cost == pytest.approx(row.bound_main, abs=1e-7)


def test_clamped_tightness_reduces_to_worst_case():
    instance = tightness(0.1, 0.8)
    assert alpha_beta(instance).alpha == pytest.approx(0.2)
    assert main_bound(4, 0.2, alpha_beta(instance)) == pytest.approx(0.6)


def test_bounds_validation():
    with pytest.raises(ValueError):
        BoundInputs(alpha=0.6, beta=0.5)
    with pytest.raises(DegenerateInstanceError):
        main_bound(3, 0.1, BoundInputs(0.0, 0.0))
    with pytest.raises(DegenerateInstanceError):
        homogeneous_bound([0.0, 0.0], 0.1)
    assert homogeneous_bound([0.2, 0.8, 0.4], 0.25) == pytest.approx(0.25 * ((1 - 0.4 / 0.8) + (1 - 0.2 / 0.8)))


def test_zero_engagement_instance_has_zero_cost():
    instance = Instance.from_edges(3, np.zeros((2, 3)), [(0, 1)])
    assert cost_of_diversity(instance, 0.3) == 0.0
    rows = frontier(instance, [0.1, 0.5])
    assert [row.cost for row in rows] == [0.0, 0.0]
    assert [row.bound_main for row in rows] == [0.0, 0.0]


def test_cost_bounds_on_random_corpus():
    failures = []
    for k, instance in enumerate(random_corpus(200, 30, 4, seed=2024)):
        report = verify_cost_bounds(instance, instance_hash=str(k))
        failures += [(k, check.name) for check in report.checks if not check.passed]
    assert failures == []


def test_frontier_is_monotone():
    for instance in random_corpus(20, 15, 4, seed=77):
        rows = frontier(instance, default_grid(instance.n_types, include_zero=True))
        assert rows[0].delta == 0.0
        assert rows[0].opt_delta == pytest.approx(rows[0].opt_eng, abs=1e-9 * (1 + rows[0].opt_eng))
        for before, after in zip(rows, rows[1:]):
            assert after.opt_delta <= before.opt_delta + 1e-9
            assert after.cost >= before.cost - 1e-9


def test_homogeneous_instances_meet_the_homogeneous_bound():
    for seed in range(5):
        instance = generate(GeneratorSpec(kind="homogeneous", n=8, T=3, seed=seed, edge_probability=0.3))
        assert is_homogeneous(instance)
        report = verify_cost_bounds(instance)
        names = [check.name for check in report.checks]
        assert any(name.startswith("cost_within_homogeneous_bound") for name in names)
        assert report.passed


def test_affinity_instances_skip_probability_bounds(chain2):
    weighted = Instance.from_edges(2, chain2.p, chain2.edges, e=[[1.0, 2.0], [0.5, 0.5]])
    report = verify_cost_bounds(weighted, [0.25])
    names = [check.name for check in report.checks]
    assert not any(name.startswith(("cost_within_main_bound", "delta_exact_guarantee")) for name in names)
    assert any(name.startswith("delta_uniform_guarantee") for name in names)
    assert report.passed


def test_scale_probabilities(chain2):
    scaled = scale_probabilities(chain2, 3.0, cap=0.99)
    np.testing.assert_allclose(scaled.p, [[0.6, 0.99], [0.99, 0.3]])
    np.testing.assert_array_equal(scaled.edges, chain2.edges)
    with pytest.raises(ConfigError):
        scale_probabilities(chain2, 0.0)
    with pytest.raises(ConfigError):
        scale_probabilities(chain2, 2.0, cap=1.0)


def test_frontier_rows_do_not_depend_on_threads():
    instance = random_corpus(1, 20, 3, seed=5)[0]
    sequential = frontier(instance, scale=3.0, prob_source="mode")
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = frontier(instance, executor=pool, scale=3.0, prob_source="mode")
    assert [row.model_dump() for row in threaded] == [row.model_dump() for row in sequential]
    assert {row.prob_source for row in sequential} == {"mode"}


def test_frontier_wraps_solver_failures(chain2, monkeypatch):
    def exhausted(*args, **kwargs):
        raise IterationLimitError(7)

    monkeypatch.setattr(frontier_module, "opt_delta", exhausted)
    with pytest.raises(FrontierError) as info:
        frontier(chain2, [0.1])
    assert info.value.delta == 0.1
    assert info.value.exit_code == 4


def test_frontier_rejects_out_of_range_delta(chain2):
    with pytest.raises(ConfigError):
        frontier(chain2, [0.1, 0.6])


def test_frontier_csv_is_reproducible(tight, tmp_path):
    first = write_frontier_csv(frontier(tight), tmp_path / "a.csv").read_bytes()
    second = write_frontier_csv(frontier(tight), tmp_path / "b.csv").read_bytes()
    assert first == second
    with (tmp_path / "a.csv").open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == FRONTIER_COLUMNS
    assert len(rows) == 10
    assert float(rows[-1]["cost"]) == pytest.approx(0.375, abs=1e-7)


def test_frontier_plot(tight, tmp_path):
    rows = frontier(tight, prob_source="mode") + frontier(scale_probabilities(tight, 3.0), scale=3.0, prob_source="mode")
    rows += frontier(tight, prob_source="beta_sample_1")
    path = plot_frontier(rows, tmp_path / "frontier.svg", tight.n_types)
    text = path.read_text(encoding="utf-8")
    assert "<svg" in text


def test_affinity_frontier_leaves_the_probability_bound_blank(chain2, tmp_path):
    weighted = Instance.from_edges(2, chain2.p, chain2.edges, e=[[1.0, 2.0], [0.5, 0.5]])
    rows = frontier(weighted, [0.125, 0.25])
    assert [row.bound_main for row in rows] == [None, None]
    assert all(row.bound_worst == pytest.approx((2 - 1) * row.delta) for row in rows)
    with write_frontier_csv(rows, tmp_path / "weighted.csv").open(newline="") as fh:
        assert [line["bound_main"] for line in csv.DictReader(fh)] == ["", ""]
    assert plot_frontier(rows, tmp_path / "weighted.svg", 2).exists()
