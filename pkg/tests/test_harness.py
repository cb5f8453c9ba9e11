"""Tests for experiment specs, the runners and CSV output."""

import csv
import json
import os
import tempfile

import numpy as np
import pytest

from submodmm.core import ArgumentError
from submodmm.harness import (
    ExperimentSpec,
    build_constraint,
    run_constrained_min,
    run_experiment,
    run_lattice_reduction,
    run_max_comparison,
    summarize,
    write_csv,
    write_result,
)


def _read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def _lattice_spec(**overrides):
    data = {
        "name": "lattice",
        "kind": "lattice_reduction",
        "families": ["IWATA", "BN"],
        "n_values": [6],
        "seeds": [0, 1],
    }
    data.update(overrides)
    return ExperimentSpec.from_dict(data)


class TestExperimentSpec:
    def test_from_dict_shortcuts(self):
        """Test family, n, seed and instances shortcuts."""
        spec = ExperimentSpec.from_dict(
            {"name": "x", "kind": "lattice_reduction", "family": "CM", "n": 8, "seed": 3, "instances": 4}
        )
        assert spec.families == ["CM"]
        assert spec.n_values == [8]
        assert spec.seeds == [3, 4, 5, 6]
        assert spec.brute_force is True
        assert spec.timing is False

    def test_validation(self):
        """Test malformed specs."""
        with pytest.raises(ArgumentError, match="missing required fields: kind"):
            ExperimentSpec.from_dict({"name": "x"})
        with pytest.raises(ArgumentError, match="Unknown experiment kind"):
            ExperimentSpec(name="x", kind="sweep", families=["CM"], n_values=[4])
        with pytest.raises(ArgumentError, match="Unknown function family"):
            ExperimentSpec(name="x", kind="lattice_reduction", families=["XYZ"], n_values=[4])
        with pytest.raises(ArgumentError, match="needs n_values"):
            ExperimentSpec(name="x", kind="lattice_reduction", families=["CM"])
        with pytest.raises(ArgumentError, match="at least one constraint"):
            ExperimentSpec(name="x", kind="constrained_min", families=["CM"])
        with pytest.raises(ArgumentError, match="needs algorithms"):
            ExperimentSpec(name="x", kind="max_comparison", families=["DR"], n_values=[4])
        with pytest.raises(ArgumentError, match="Unknown schedule 'tabu'"):
            ExperimentSpec(name="x", kind="max_comparison", families=["DR"], n_values=[4], algorithms=["tabu"])
        with pytest.raises(ArgumentError, match="repetitions"):
            _lattice_spec(repetitions=0)

    def test_load(self):
        """Test loading specs from files."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "spec.json")
            with open(path, "w") as f:
                json.dump({"name": "x", "kind": "lattice_reduction", "families": ["CM"], "n_values": [4]}, f)
            spec = ExperimentSpec.load(path)
            assert spec.name == "x"
            assert spec.to_dict()["n_values"] == [4]

            bad = os.path.join(tmpdir, "bad.json")
            with open(bad, "w") as f:
                f.write("{not json")
            with pytest.raises(ArgumentError, match="Invalid JSON"):
                ExperimentSpec.load(bad)
            with pytest.raises(FileNotFoundError):
                ExperimentSpec.load(os.path.join(tmpdir, "missing.json"))


class TestBuildConstraint:
    def test_generator(self):
        """Test graph constraints from named generators."""
        C = build_constraint({"kind": "spanning_tree", "generator": "grid", "args": [3, 3]})
        assert C.kind == "spanning_tree" and C.n == 12

    def test_random_generator_uses_seed(self):
        """Test seeded random graphs are reproducible."""
        descriptor = {"kind": "perfect_bipartite_matching", "generator": "bipartite_sparse", "args": [5]}
        a = build_constraint(descriptor, seed=4)
        b = build_constraint(descriptor, seed=4)
        assert a.graph.edges == b.graph.edges

    def test_plain_descriptor(self):
        """Test non-graph constraints pass through from_dict."""
        C = build_constraint({"kind": "cardinality_lower", "n": 6, "k": 2})
        assert (C.kind, C.n, C.k) == ("cardinality_lower", 6, 2)

    def test_unknown_generator(self):
        """Test unknown generator names."""
        with pytest.raises(ArgumentError, match="Unknown graph generator"):
            build_constraint({"kind": "spanning_tree", "generator": "torus", "args": [3]})


class TestRunners:
    def test_lattice_reduction(self):
        """Test one certified row per instance and one summary row per group."""
        result = run_lattice_reduction(_lattice_spec())
        assert len(result.rows) == 4
        assert result.passed and result.failures == []
        row = result.rows[0]
        assert row["family"] == "iwata" and row["n"] == 6 and row["seed"] == 0
        assert row["size_A"] <= row["size_A_plus"] <= row["size_B_plus"] <= row["size_B"]
        assert row["width_mmin12"] <= row["width_mmin3"]
        assert row["min_size_x_star"] <= row["max_size_x_star"]
        assert [s["family"] for s in result.summary] == ["iwata", "bipartite_neighborhood"]
        assert all(s["instances"] == 2 and s["failures"] == 0 for s in result.summary)

    def test_constrained_min(self):
        """Test constrained runs stay within their bounds."""
        spec = ExperimentSpec.from_dict(
            {
                "name": "cmin",
                "kind": "constrained_min",
                "families": ["CM", "BS"],
                "seeds": [0, 1],
                "constraints": [
                    {"kind": "spanning_tree", "generator": "grid", "args": [3, 3]},
                    {"kind": "cardinality_lower", "n": 8, "k": 3},
                ],
            }
        )
        result = run_constrained_min(spec)
        assert len(result.rows) == 8
        assert result.passed, result.failures
        for row in result.rows:
            assert row["value"] <= row["mu_value"] + 1e-9
            assert row["factor"] >= 1.0 - 1e-9
        assert len(result.summary) == 4
        assert all(s["worst_factor"] >= s["mean_factor"] - 1e-12 for s in result.summary)

    def test_max_comparison(self):
        """Test schedules on a lambda sweep with empirical factors at most one."""
        spec = ExperimentSpec.from_dict(
            {
                "name": "max",
                "kind": "max_comparison",
                "families": ["DR"],
                "n_values": [8],
                "lam_values": [0.5, 1.0],
                "algorithms": ["bg", "dls", "rg"],
                "seeds": [0],
                "repetitions": 2,
            }
        )
        result = run_max_comparison(spec)
        assert len(result.rows) == 6
        assert result.passed, result.failures
        assert all(0.0 <= row["factor"] <= 1.0 + 1e-9 for row in result.rows)
        assert {(s["lam"], s["schedule"]) for s in result.summary} == {
            (lam, s) for lam in (0.5, 1.0) for s in ("bg", "dls", "rg")
        }
        assert all(s["worst_factor"] <= s["mean_factor"] + 1e-12 for s in result.summary)

    def test_kind_mismatch(self):
        """Test the typed runners check the experiment kind."""
        with pytest.raises(ArgumentError, match="Expected a max_comparison experiment"):
            run_max_comparison(_lattice_spec())

    def test_parallel_matches_serial(self):
        """Test worker processes reproduce the in-process rows in order."""
        spec = _lattice_spec(seeds=[0, 1, 2])
        serial = run_experiment(spec, jobs=1)
        parallel = run_experiment(spec, jobs=2)
        assert parallel.rows == serial.rows

    def test_bad_jobs(self):
        """Test the worker count must be positive."""
        with pytest.raises(ArgumentError, match="jobs must be at least 1"):
            run_experiment(_lattice_spec(), jobs=0)

    def test_timing_column(self):
        """Test wall time is recorded only on request."""
        assert "wall_time_s" not in run_experiment(_lattice_spec()).rows[0]
        timed = run_experiment(_lattice_spec(timing=True)).rows[0]
        assert timed["wall_time_s"] >= 0.0


class TestSummarize:
    def test_means_worst_and_failures(self):
        """Test averaging, worst factors and skipped missing values."""
        rows = [
            {"g": "a", "factor": 1.0, "calls": 10, "ok": True},
            {"g": "a", "factor": 1.5, "calls": None, "ok": False},
            {"g": "b", "factor": None, "calls": 4},
        ]
        out = summarize(rows, ("g",), ("factor", "calls"), worst="max")
        assert out[0] == {
            "g": "a",
            "instances": 2,
            "mean_factor": 1.25,
            "worst_factor": 1.5,
            "mean_calls": 10.0,
            "failures": 1,
        }
        assert out[1]["mean_factor"] is None and out[1]["worst_factor"] is None
        assert summarize(rows[:2], ("g",), ("factor",), worst="min")[0]["worst_factor"] == 1.0


class TestCsv:
    def test_write_csv(self):
        """Test first-seen columns and cell formatting."""
        rows = [{"a": 1, "b": 0.1, "ok": True}, {"a": 2, "c": None, "ok": np.bool_(False)}]
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write_csv(rows, os.path.join(tmpdir, "sub", "rows.csv"))
            with open(path, newline="") as f:
                header = next(csv.reader(f))
            assert header == ["a", "b", "ok", "c"]
            data = _read_csv(path)
            assert data[0] == {"a": "1", "b": "0.1", "ok": "true", "c": ""}
            assert data[1] == {"a": "2", "b": "", "ok": "false", "c": ""}

    def test_write_result(self):
        """Test the rows and summary files of an experiment."""
        result = run_experiment(_lattice_spec(families=["IWATA"], seeds=[0]))
        with tempfile.TemporaryDirectory() as tmpdir:
            rows_path, summary_path = write_result(result, tmpdir)
            assert os.path.basename(rows_path) == "lattice.csv"
            assert os.path.basename(summary_path) == "lattice_summary.csv"
            assert len(_read_csv(rows_path)) == 1
            assert _read_csv(summary_path)[0]["instances"] == "1"
