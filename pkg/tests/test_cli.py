from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from feeddiv.instances import instance_hash, read_instance, write_instance
from feeddiv.main import main
from feeddiv.policies import optimal_policy

from tests.corpus import write_planted_corpus


def read_rows(path):
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def tight_file(tmp_path):
    out = tmp_path / "gen"
    assert main(["gen", "tight", "--n", "10", "--T", "4", "--alpha", "0.5", "--beta", "0.8", "--out", str(out)]) == 0
    return out / "instance.json"


def test_gen_writes_instance_and_manifest(tight_file):
    manifest = json.loads((tight_file.parent / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "gen"
    assert manifest["outputs"] == ["instance.json"]
    assert manifest["instance_hashes"]["instance.json"] == instance_hash(read_instance(tight_file))
    assert "numpy" in manifest["versions"]


def test_tight_frontier_meets_bound(tight_file, tmp_path):
    out = tmp_path / "frontier"
    assert main(["frontier", "--instance", str(tight_file), "--scales", "1", "--out", str(out)]) == 0
    rows = read_rows(out / "frontier.csv")
    assert len(rows) == 10
    for row in rows:
        assert float(row["cost"]) == pytest.approx(float(row["bound_main"]), abs=1e-7)
    assert (out / "frontier.svg").exists()


def test_frontier_is_byte_identical_across_runs_and_threads(tmp_path):
    instance_dir = tmp_path / "gen"
    assert main(["gen", "random", "--n", "12", "--T", "3", "--edge-prob", "0.3", "--seed", "5",
                 "--out", str(instance_dir)]) == 0
    outputs = []
    for threads in ("1", "3", "1"):
        out = tmp_path / f"run{len(outputs)}"
        assert main(["frontier", "--instance", str(instance_dir / "instance.json"), "--scales", "1,3",
                     "--with-zero", "--threads", threads, "--seed", "5", "--out", str(out)]) == 0
        outputs.append((out / "frontier.csv").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    rows = read_rows(tmp_path / "run0" / "frontier.csv")
    assert len(rows) == 22
    assert float(rows[0]["delta"]) == 0.0


def test_solve_delta_zero_reports_closed_form(tight_file, tmp_path):
    out = tmp_path / "solve"
    assert main(["solve", "--instance", str(tight_file), "--delta", "0", "--out", str(out)]) == 0
    report = json.loads((out / "solve.json").read_text(encoding="utf-8"))
    _, closed_form = optimal_policy(read_instance(tight_file))
    assert report["opt_eng"] == pytest.approx(closed_form, abs=1e-12)
    assert report["point"]["opt_delta"] == pytest.approx(closed_form, abs=1e-9)
    for name in ("policy_optimal.json", "policy_lp.json", "policy_delta_uniform.json", "policy_delta_exact.json"):
        assert (out / name).exists()


def test_solve_chain2_with_mps(chain2, tmp_path):
    path = write_instance(chain2, tmp_path / "chain2.json")
    out = tmp_path / "solve"
    assert main(["solve", "--instance", str(path), "--delta", "0.25", "--formulation", "substituted",
                 "--mps", str(tmp_path / "chain2.mps"), "--out", str(out)]) == 0
    report = json.loads((out / "solve.json").read_text(encoding="utf-8"))
    assert report["point"]["opt_delta"] == pytest.approx(0.885, abs=1e-9)
    assert report["point"]["cost"] == pytest.approx(0.115, abs=1e-9)
    assert report["point"]["eng_exact"] == pytest.approx(0.86, abs=1e-9)
    assert (tmp_path / "chain2.mps").read_text(encoding="utf-8").endswith("ENDATA\n")


def test_exit_codes(chain2, tmp_path):
    path = write_instance(chain2, tmp_path / "chain2.json")
    assert main(["solve", "--instance", str(path), "--delta", "0.75", "--out", str(tmp_path / "a")]) == 2
    assert main(["solve", "--instance", str(tmp_path / "missing.json"), "--out", str(tmp_path / "b")]) == 3
    assert main(["gen", "tight", "--n", "10", "--T", "4", "--alpha", "0.9", "--beta", "0.8",
                 "--out", str(tmp_path / "c")]) == 2
    assert main(["simulate", "--instance", str(path), "--method", "lp", "--out", str(tmp_path / "d")]) == 2


def test_simulate_writes_trajectory(chain2, tmp_path):
    path = write_instance(chain2, tmp_path / "chain2.json")
    out = tmp_path / "sim"
    assert main(["simulate", "--instance", str(path), "--method", "delta_exact", "--delta", "0.25",
                 "--steps", "5", "--out", str(out)]) == 0
    rows = read_rows(out / "trajectory.csv")
    assert len(rows) == 6 * 2 * 2
    assert list(rows[0]) == ["step", "type", "user", "exposure"]
    final = json.loads((out / "state_final.json").read_text(encoding="utf-8"))["x"]
    np.testing.assert_allclose(final, [[0.5, 0.75], [0.9, 0.25]], atol=1e-9)


def test_simulate_from_policy_file(chain2, tmp_path):
    path = write_instance(chain2, tmp_path / "chain2.json")
    assert main(["solve", "--instance", str(path), "--delta", "0.25", "--out", str(tmp_path / "solve")]) == 0
    out = tmp_path / "sim"
    assert main(["simulate", "--instance", str(path), "--policy", str(tmp_path / "solve" / "policy_lp.json"),
                 "--steps", "3", "--out", str(out)]) == 0
    final = json.loads((out / "state_final.json").read_text(encoding="utf-8"))["x"]
    np.testing.assert_allclose(final, [[0.375, 0.75], [1.025, 0.25]], atol=1e-9)


def test_verify_random_corpus(tmp_path):
    out = tmp_path / "verify"
    assert main(["verify", "--random", "6", "--max-n", "8", "--max-T", "3", "--steps", "50", "--seed", "3",
                 "--out", str(out)]) == 0
    report = json.loads((out / "verify.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert len(report["entries"]) == 6
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["exit_code"] == 0


def test_verify_needs_targets(tmp_path):
    assert main(["verify", "--out", str(tmp_path)]) == 2


def test_ingest_then_frontier(tmp_path):
    tweets, edges = write_planted_corpus(tmp_path)
    first, second = tmp_path / "ingest1", tmp_path / "ingest2"
    for out in (first, second):
        assert main(["ingest", "--tweets", str(tweets), "--edges", str(edges), "--seed", "9", "--out", str(out)]) == 0
    names = ["instance_beta_sample_1.json", "instance_beta_sample_2.json", "instance_mode.json"]
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()
    types = read_rows(first / "types.csv")
    assert {row["community"] for row in types} == {"0", "1"}
    stats = json.loads((first / "graph_stats.json").read_text(encoding="utf-8"))
    assert (stats["users"], stats["edges"], stats["mean_following"]) == (12, 36, 3.0)
    degrees = read_rows(first / "degrees.csv")
    assert [row["user"] for row in degrees] == [f"u{k:02d}" for k in range(12)]
    assert {(row["following"], row["followers"]) for row in degrees} == {("3", "3")}
    manifest = json.loads((first / "manifest.json").read_text(encoding="utf-8"))
    assert {"graph_stats.json", "degrees.csv", "types.csv"} <= set(manifest["outputs"])

    out = tmp_path / "frontier"
    args = ["frontier", "--scales", "1,3,10,30", "--cap", "0.99", "--out", str(out)]
    for name in names:
        args += ["--instance", str(first / name)]
    assert main(args) == 0
    rows = read_rows(out / "frontier.csv")
    assert {row["prob_source"] for row in rows} == {"mode", "beta_sample_1", "beta_sample_2"}
    assert {float(row["scale"]) for row in rows} == {1.0, 3.0, 10.0, 30.0}
    assert len(rows) == 3 * 4 * 10
    for row in rows:
        assert float(row["cost"]) <= float(row["bound_worst"]) + 1e-7
