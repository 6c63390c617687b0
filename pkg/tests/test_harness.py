import csv
import math

import numpy as np
import pytest

import pairbench.harness as harness
from pairbench.errors import InvalidArgumentError
from pairbench.harness import (
    CSV_HEADER,
    ExperimentConfig,
    checkpoint_schedule,
    evaluate_scores,
    export_results,
    load_config,
    read_results,
    run_experiment,
    run_repeat,
)
from pairbench.samplers import KINDS


@pytest.mark.parametrize("n, trials, interval, budget, count", [
    (8, 15, 7, 420, 60),
    (16, 1, 30, 120, 4),
    (2, 15, 1, 15, 15),
    (32, 15, 124, 7440, 60),
    (7, 2, 5, 42, 8),      # 5.25 rounds to 5
    (5, 3, 3, 30, 10),     # 2.5 rounds half up
])
def test_schedule_examples(n, trials, interval, budget, count):
    s = checkpoint_schedule(n, trials)
    assert (s.interval, s.budget, len(s.checkpoints)) == (interval, budget, count)


@pytest.mark.parametrize("n", range(2, 33))
def test_schedule_invariants(n):
    for trials in (0, 1, 3, 15):
        s = checkpoint_schedule(n, trials)
        assert s.budget == trials * n * (n - 1) // 2
        assert s.interval == max(1, round(n * (n - 1) / 8 + 1e-9))
        assert all(b > a for a, b in zip(s.checkpoints, s.checkpoints[1:]))
        assert all(c % s.interval == 0 for c in s.checkpoints)
        assert not s.checkpoints or s.checkpoints[-1] <= s.budget < s.checkpoints[-1] + s.interval


def test_schedule_errors():
    with pytest.raises(InvalidArgumentError):
        checkpoint_schedule(1, 3)
    with pytest.raises(InvalidArgumentError):
        checkpoint_schedule(4, -1)


@pytest.mark.parametrize("kwargs", [dict(n=1), dict(trials=-1), dict(repeats=0),
                                    dict(epsilon=0.6), dict(sigma_max=0.0),
                                    dict(samplers=("random", "bogus")), dict(samplers=()),
                                    dict(prior_strength=-1.0), dict(seed=-3)])
def test_config_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(**kwargs)


def test_config_samplers_from_string():
    assert ExperimentConfig(samplers="random, swiss").samplers == ("random", "swiss")


def test_load_config(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# condition\nn = 8\nsigma-max = 0.4\nsamplers = random,sort-mst\n"
                    "trials = 3  # short\njobs = 4\n")
    cfg = load_config(path, trials=5, seed=None)
    assert cfg.n == 8 and cfg.sigma_max == 0.4 and cfg.trials == 5 and cfg.seed == 0
    assert cfg.samplers == ("random", "sort-mst")


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(InvalidArgumentError):
        load_config(bad)
    bad.write_text("n 8\n")
    with pytest.raises(InvalidArgumentError):
        load_config(bad)


def test_evaluate_scores_missing_values():
    truth = np.array([0.5, 1.0, 2.0, 4.0, 3.0])
    assert all(math.isnan(v) for v in evaluate_scores(np.zeros(5), truth))
    pcc, rocc, rmse = evaluate_scores(truth[:3], truth[:3])
    assert pcc == pytest.approx(1) and rocc == pytest.approx(1) and math.isnan(rmse)
    assert all(math.isnan(v) for v in evaluate_scores([0.1, -0.1], [1.0, 2.0]))


def test_zero_trials_gives_no_points():
    cfg = ExperimentConfig(n=6, trials=0, repeats=2)
    assert run_repeat(cfg, "random", 0) == []
    series = run_experiment(cfg, jobs=1)
    assert all(s.comparisons.size == 0 for s in series)


@pytest.mark.parametrize("kind", KINDS)
def test_budget_and_conservation(kind, monkeypatch):
    calls = {"judged": 0, "fits": []}
    real_sim, real_fit = harness.simulate_comparison, harness.fit_bt

    def counting_sim(*args):
        calls["judged"] += 1
        return real_sim(*args)

    def recording_fit(wins, prior):
        calls["fits"].append(int(wins.sum()))
        return real_fit(wins, prior)

    monkeypatch.setattr(harness, "simulate_comparison", counting_sim)
    monkeypatch.setattr(harness, "fit_bt", recording_fit)
    cfg = ExperimentConfig(n=7, trials=3, repeats=1)
    points = run_repeat(cfg, kind, 0)
    assert calls["judged"] == 3 * 21
    assert [p.comparisons for p in points] == list(cfg.schedule.checkpoints)
    assert calls["fits"] == list(cfg.schedule.checkpoints)


@pytest.mark.parametrize("kind", KINDS)
def test_run_repeat_deterministic(kind):
    cfg = ExperimentConfig(n=6, trials=2, seed=42)
    a, b = run_repeat(cfg, kind, 3), run_repeat(cfg, kind, 3)
    np.testing.assert_array_equal(np.array(a, dtype=float), np.array(b, dtype=float))


def test_metric_bounds():
    cfg = ExperimentConfig(n=8, trials=2, seed=1)
    for kind in KINDS:
        for p in run_repeat(cfg, kind, 0):
            assert -1 <= p.pcc <= 1 and -1 <= p.rocc <= 1 and p.rmse >= 0


def test_ground_truth_shared_across_samplers():
    a = harness._streams(5, 2, "random")[0].random(3)
    b = harness._streams(5, 2, "swiss")[0].random(3)
    np.testing.assert_array_equal(a, b)
    c = harness._streams(5, 2, "random")[1].random(3)
    d = harness._streams(5, 2, "swiss")[1].random(3)
    assert not np.array_equal(c, d)


def test_single_repeat_intervals_collapse():
    series = run_experiment(ExperimentConfig(n=5, trials=2, repeats=1, samplers="random"), jobs=1)
    assert len(series) == 1
    s = series[0]
    for metric in ("pcc", "rocc", "rmse"):
        ok = ~np.isnan(s.mean[metric])
        np.testing.assert_array_equal(s.ci_lo[metric][ok], s.mean[metric][ok])
        np.testing.assert_array_equal(s.ci_hi[metric][ok], s.mean[metric][ok])


def test_series_ci_brackets_mean():
    s = run_experiment(ExperimentConfig(n=6, trials=2, repeats=8, samplers="swiss"), jobs=1)[0]
    assert s.comparisons.size == 7  # interval 4, budget 30
    for metric in ("pcc", "rocc", "rmse"):
        assert np.all(s.ci_lo[metric] <= s.mean[metric])
        assert np.all(s.mean[metric] <= s.ci_hi[metric])
        assert np.all(s.valid[metric] == 8)


def test_aggregation_order_independent():
    cfg = ExperimentConfig(n=5, trials=2, repeats=6, samplers="random")
    per_repeat = {r: run_repeat(cfg, "random", r) for r in range(6)}
    shuffled = {r: per_repeat[r] for r in (4, 1, 5, 0, 3, 2)}
    a = harness._aggregate(cfg, "random", per_repeat)
    b = harness._aggregate(cfg, "random", shuffled)
    for metric in ("pcc", "rocc", "rmse"):
        np.testing.assert_array_equal(a.mean[metric], b.mean[metric])
        np.testing.assert_array_equal(a.ci_lo[metric], b.ci_lo[metric])


def test_export_schema_and_round_trip(tmp_path):
    cfg = ExperimentConfig(n=4, trials=1, repeats=5, samplers=("swiss", "random"), seed=3)
    series = run_experiment(cfg, jobs=1)
    path = export_results(series, tmp_path / "r.csv")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER
    body = rows[1:]
    assert len(body) == 2 * len(cfg.schedule.checkpoints) * 3
    keys = [(r[0], int(r[4]), r[5]) for r in body]
    assert keys == sorted(keys)
    parsed = read_results(path)
    by_key = {(r["sampler"], r["comparisons"], r["metric"]): r for r in parsed}
    for s in series:
        for c, comp in enumerate(s.comparisons):
            for metric in ("pcc", "rocc", "rmse"):
                got = by_key[(s.sampler, int(comp), metric)]["mean"]
                want = s.mean[metric][c]
                assert (math.isnan(got) and math.isnan(want)) or got == float(f"{want:.6g}")


def test_export_one_checkpoint_three_rows(tmp_path):
    series = run_experiment(ExperimentConfig(n=3, trials=1, repeats=2, samplers="random"), jobs=1)
    assert series[0].comparisons.tolist() == [1, 2, 3]
    series[0].comparisons = series[0].comparisons[:1]
    path = export_results(series, tmp_path / "one.csv")
    assert len(read_results(path)) == 3


def test_export_missing_values(tmp_path):
    cfg = ExperimentConfig(n=2, trials=1, repeats=4, samplers="random")
    path = export_results(run_experiment(cfg, jobs=1), tmp_path / "m.csv")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    for row in rows:
        assert row["mean"] == "" and row["ci_lo"] == "" and int(row["repeats_valid"]) < 4


def test_export_errors(tmp_path):
    with pytest.raises(InvalidArgumentError):
        export_results([], tmp_path / "x.csv")
    series = run_experiment(ExperimentConfig(n=3, trials=1, repeats=1, samplers="random"), jobs=1)
    with pytest.raises(OSError, match="missing"):
        export_results(series, tmp_path / "missing" / "x.csv")


def test_jobs_do_not_change_output(tmp_path):
    cfg = ExperimentConfig(n=6, trials=2, repeats=4, samplers=("random", "hybrid-mst"), seed=9)
    a = export_results(run_experiment(cfg, jobs=1), tmp_path / "a.csv").read_bytes()
    b = export_results(run_experiment(cfg, jobs=2), tmp_path / "b.csv").read_bytes()
    assert a == b


def test_jobs_from_environment(monkeypatch):
    monkeypatch.setenv("PAIRBENCH_JOBS", "0")
    with pytest.raises(InvalidArgumentError):
        run_experiment(ExperimentConfig(n=3, trials=1, repeats=1, samplers="random"))
