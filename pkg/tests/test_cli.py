"""End-to-end command-line behavior via click's test runner."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from sliced_transport import (
    est_plan_tempered,
    io,
    make_measure,
    sample_sphere,
    validate_coupling,
    wasserstein_exact,
)
from sliced_transport.cli import main
from util import random_pair


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def pair_files(tmp_path):
    mu, nu = random_pair(1, max_n=12, max_d=3)
    a = tmp_path / "mu.csv"
    b = tmp_path / "nu.csv"
    io.write_measure_csv(mu, a)
    io.write_measure_csv(nu, b)
    return str(a), str(b), mu, nu


def test_distance_matches_library(runner, pair_files):
    a, b, mu, nu = pair_files
    result = runner.invoke(main, ["distance", a, b, "--slices", "32", "--seed", "3"])
    assert result.exit_code == 0, result.output
    dirs = sample_sphere(32, mu.dim, 3)
    expect = est_plan_tempered(mu, nu, dirs, tau=0.0).distance
    assert result.output.strip() == f"{expect:.12g}"


def test_distance_method_exact(runner, pair_files):
    a, b, mu, nu = pair_files
    result = runner.invoke(main, ["distance", a, b, "--method", "exact"])
    assert result.exit_code == 0, result.output
    expect = wasserstein_exact(mu, nu)[1]
    assert result.output.strip() == f"{expect:.12g}"


def test_distance_per_slice_rows(runner, pair_files):
    a, b, *_ = pair_files
    result = runner.invoke(
        main, ["distance", a, b, "--slices", "8", "--per-slice"]
    )
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert len(lines) == 1 + 8
    for k, line in enumerate(lines[1:]):
        idx, cost, weight = line.split(",")
        assert int(idx) == k
        assert float(weight) == 1.0 / 8.0
        assert float(cost) >= 0.0


def test_distance_json_format(runner, pair_files):
    a, b, *_ = pair_files
    result = runner.invoke(
        main,
        ["distance", a, b, "--slices", "8", "--format", "json", "--per-slice"],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["method"] == "est"
    assert payload["seed"] == 0
    assert len(payload["per_slice"]) == 8


def test_distance_deterministic_output(runner, pair_files, monkeypatch):
    a, b, *_ = pair_files
    args = ["distance", a, b, "--slices", "16", "--seed", "5"]
    first = runner.invoke(main, args).output
    second = runner.invoke(main, args).output
    assert first == second
    monkeypatch.setenv("EST_THREADS", "4")
    pooled = runner.invoke(main, args).output
    assert pooled == first


def test_plan_writes_csv_and_meta(runner, pair_files, tmp_path):
    a, b, mu, nu = pair_files
    out = tmp_path / "out" / "plan.csv"
    result = runner.invoke(
        main, ["plan", a, b, str(out), "--slices", "16", "--seed", "2"]
    )
    assert result.exit_code == 0, result.output
    plan = io.read_plan_csv(out, source_size=len(mu), target_size=len(nu))
    ok, dev = validate_coupling(plan, mu, nu)
    assert ok, dev
    meta = json.loads((tmp_path / "out" / "plan.csv.meta.json").read_text())
    assert meta["seed"] == 2
    assert meta["method"] == "est"
    assert meta["slices"] == 16


def test_plan_sinkhorn_reports_marginal_error(runner, pair_files, tmp_path):
    a, b, *_ = pair_files
    out = tmp_path / "plan.csv"
    result = runner.invoke(
        main, ["plan", a, b, str(out), "--method", "sinkhorn", "--lambda", "1.0"]
    )
    assert result.exit_code == 0, result.output
    assert result.output.startswith("marginal_error ")
    err = float(result.output.split()[1])
    meta = json.loads((tmp_path / "plan.csv.meta.json").read_text())
    assert meta["marginal_error"] == err
    assert meta["lambda"] == 1.0


def test_interpolate_writes_frames(runner, pair_files, tmp_path):
    a, b, mu, nu = pair_files
    out = tmp_path / "frames"
    result = runner.invoke(
        main,
        ["interpolate", a, b, str(out), "--steps", "4", "--slices", "8"],
    )
    assert result.exit_code == 0, result.output
    files = sorted(f.name for f in out.glob("t_*.csv"))
    assert files == [f"t_{k:03d}.csv" for k in range(5)]
    meta = json.loads((out / "meta.json").read_text())
    assert meta["steps"] == 4
    # each frame is a valid measure of the shared dimension
    for name in files:
        frame = io.read_measure(out / name)
        assert frame.dim == mu.dim


def test_dimension_mismatch_exit_code(runner, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    io.write_measure_csv(make_measure([(0.0, 0.0)], [1.0]), a)
    io.write_measure_csv(make_measure([(0.0,)], [1.0]), b)
    result = runner.invoke(main, ["distance", str(a), str(b)])
    assert result.exit_code == 3
    assert "dimension mismatch" in result.output


def test_unparsable_input_exit_code(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,measure\n1,2,3\n")
    ok = tmp_path / "ok.csv"
    io.write_measure_csv(make_measure([(0.0,)], [1.0]), ok)
    result = runner.invoke(main, ["distance", str(bad), str(ok)])
    assert result.exit_code == 2
    result = runner.invoke(main, ["distance", str(tmp_path / "missing.csv"), str(ok)])
    assert result.exit_code == 2


def test_unwritable_output_exit_code(runner, pair_files, tmp_path):
    a, b, *_ = pair_files
    blocker = tmp_path / "blocker"
    blocker.write_text("i am a file, not a directory")
    result = runner.invoke(main, ["interpolate", a, b, str(blocker), "--slices", "4"])
    assert result.exit_code == 4


def test_unknown_experiment_exit_code(runner, tmp_path):
    result = runner.invoke(main, ["experiment", "no-such-study", str(tmp_path)])
    assert result.exit_code == 5
    assert "unknown experiment" in result.output


def test_experiment_temperature_sweep(runner, tmp_path):
    out = tmp_path / "sweep"
    result = runner.invoke(
        main,
        [
            "experiment",
            "temperature-sweep",
            str(out),
            "--slices",
            "16",
            "--taus",
            "0,1,1e6",
        ],
    )
    assert result.exit_code == 0, result.output
    lines = (out / "temperature_sweep.csv").read_text().strip().splitlines()
    assert lines[0] == "tau,distance,entries"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 3
    distances = [float(r[1]) for r in rows]
    # heavier weighting of cheap slices never increases the distance
    assert distances[0] >= distances[1] >= distances[2]
    meta = json.loads((out / "meta.json").read_text())
    assert meta["experiment"] == "temperature-sweep"


def test_experiment_weak_convergence_small(runner, tmp_path):
    out = tmp_path / "weak"
    result = runner.invoke(
        main,
        [
            "experiment",
            "weak-convergence",
            str(out),
            "--slices",
            "8",
            "--taus",
            "0",
            "--lambdas",
            "1",
        ],
    )
    assert result.exit_code == 0, result.output
    lines = (out / "weak_convergence.csv").read_text().strip().splitlines()
    assert lines[0] == "t,est_tau_0,w_exact,sinkhorn_lam_1,product"
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    assert len(rows) == 12
    w_exact = [r[2] for r in rows]
    assert all(a > b for a, b in zip(w_exact[:-1], w_exact[1:]))
    assert w_exact[-1] == pytest.approx(0.0, abs=1e-9)


def test_rejects_bad_option_values(runner, pair_files):
    a, b, *_ = pair_files
    assert runner.invoke(main, ["distance", a, b, "--p", "1.0"]).exit_code != 0
    assert runner.invoke(main, ["distance", a, b, "--slices", "0"]).exit_code != 0
    assert runner.invoke(main, ["distance", a, b, "--tau", "-1"]).exit_code != 0
