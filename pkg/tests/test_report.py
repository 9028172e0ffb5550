import csv
import json
import math

import numpy as np
import pytest

from tailcount import (
    BootstrapDistribution,
    CountSeries,
    EventSpec,
    RunConfig,
    SimConfig,
    emit_plot_data,
    fit_power_law,
    run_pipeline,
    score_interval,
    simulate_panel,
)
from tailcount.errors import InvalidConfigError, InvalidIntervalError
from tailcount.report import dumps, round_sig

REPORT_KEYS = ["report_version", "software_version", "task", "point_estimate", "ci", "fit", "count_series", "bootstrap"]


@pytest.fixture(scope="module")
def comonotone_panel():
    return simulate_panel(SimConfig(dims=(25, 1, 40, 365), alpha=6.0, seed=21))


class TestScoreInterval:
    def test_covered(self):
        assert score_interval(0.0, 1.0, 0.5, 0.05) == 1.0

    def test_above(self):
        assert score_interval(0.0, 1.0, 1.5, 0.05) == pytest.approx(21.0)

    def test_below(self):
        assert score_interval(2.0, 3.0, 1.0, 0.1) == pytest.approx(1.0 + 20.0)

    def test_published_interval_width(self):
        for truth in (0.03, 0.5, 0.98):
            assert score_interval(0.03, 0.98, truth, 0.05) == pytest.approx(0.95)

    def test_invalid(self):
        with pytest.raises(InvalidIntervalError):
            score_interval(1.0, 0.0, 0.5)
        with pytest.raises(InvalidIntervalError):
            score_interval(0.0, 1.0, 0.5, 1.5)


class TestSerialization:
    def test_round_sig(self):
        assert round_sig(0.1 + 0.2) == 0.3
        assert round_sig(123456789.123456789) == 123456789.123
        assert round_sig(math.nan) != round_sig(math.nan)

    def test_dumps_deterministic_and_null(self):
        obj = {"b": np.float64(1 / 3), "a": [np.int64(2), math.inf], "c": np.bool_(True)}
        text = dumps(obj)
        assert text == dumps(obj)
        assert list(json.loads(text)) == ["b", "a", "c"]
        assert json.loads(text)["a"] == [2, None]
        assert "0.333333333333" in text and "0.3333333333333" not in text


class TestEmitPlotData:
    def test_noiseless(self, tmp_path, rng):
        u = np.linspace(1.1, 2.0, 10)
        series = CountSeries(u, 5000 * u**-4, EventSpec(m=None))
        dist = BootstrapDistribution(rng.lognormal(size=500), 0, 500, 0)
        paths = emit_plot_data(series, fit_power_law(series), dist, tmp_path, bins=30)
        assert [p.split("/")[-1] for p in paths] == ["loglog.csv", "hist.csv"]
        with open(paths[0]) as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == ["u", "count", "log_u", "log_count", "fitted_log_count"]
        for r in rows:
            assert float(r["fitted_log_count"]) == pytest.approx(float(r["log_count"]), abs=1e-10)
        with open(paths[1]) as fh:
            hist = list(csv.DictReader(fh))
        assert list(hist[0]) == ["bin_left", "bin_right", "count"]
        assert len(hist) == 30 and sum(int(h["count"]) for h in hist) == 500

    def test_zero_counts_left_blank(self, tmp_path):
        u = np.array([1.0, 1.5, 2.0, 2.5, 3.0])
        series = CountSeries(u, np.array([100, 30, 12, 4, 0]), EventSpec(m=None))
        emit_plot_data(series, fit_power_law(series), None, tmp_path)
        last = (tmp_path / "loglog.csv").read_text().splitlines()[-1].split(",")
        assert last[1] == "0" and last[3] == ""
        assert not (tmp_path / "hist.csv").exists()


class TestRunConfig:
    def test_task_defaults(self):
        cfg = RunConfig(task="task2").resolved()
        assert (cfg.m, cfg.u_target, cfg.temporal) == (6, 5.7, "single_day")
        assert (cfg.grid_min, cfg.grid_max) == (1.10, 5.50)
        cfg = RunConfig(task="task3").resolved()
        assert (cfg.m, cfg.u_target, cfg.temporal) == (3, 5.0, "run_at_least_two_days")

    @pytest.mark.parametrize("kwargs", [
        {"task": "task9"},
        {"task": "custom", "m": 3},
        {"grid_min": 2.0, "grid_max": 1.0},
        {"grid_step": 0.0},
        {"B": 0},
        {"ci_level": 1.0},
        {"block_mode": "weekly"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidConfigError):
            RunConfig(**kwargs).resolved()

    def test_unknown_key(self):
        with pytest.raises(InvalidConfigError):
            RunConfig.from_dict({"tsk": "task1"})

    def test_warns_inside_grid(self, caplog):
        RunConfig(u_target=1.3).resolved()
        assert "inside the threshold grid" in caplog.text


class TestRunPipeline:
    def test_estimate_only(self, tmp_path, comonotone_panel):
        report = run_pipeline(RunConfig(output_dir=str(tmp_path)), panel=comonotone_panel, with_bootstrap=False)
        names = {p.name for p in tmp_path.iterdir()}
        assert names == {"report.json", "counts.csv", "fit.json", "fit.csv", "loglog.csv"}
        d = json.loads((tmp_path / "report.json").read_text())
        assert list(d) == REPORT_KEYS
        assert d["ci"] is None and d["bootstrap"] is None
        assert report.task["m"] == 25

    def test_point_estimate_near_truth(self, tmp_path, comonotone_panel):
        report = run_pipeline(RunConfig(output_dir=str(tmp_path)), panel=comonotone_panel, with_bootstrap=False)
        truth = 40 * 365 * 1.7**-6
        assert abs(report.point_estimate / truth - 1) < 0.25
        assert abs(-report.fit["alpha_prime"] - 6) < 0.3

    def test_full_files_and_consistency(self, tmp_path, comonotone_panel):
        cfg = RunConfig(output_dir=str(tmp_path), B=50, seed=4)
        run_pipeline(cfg, panel=comonotone_panel)
        names = {p.name for p in tmp_path.iterdir()}
        assert names == {"report.json", "counts.csv", "fit.json", "fit.csv", "loglog.csv",
                         "distribution.csv", "bootstrap_summary.json", "hist.csv"}
        d = json.loads((tmp_path / "report.json").read_text())
        recomputed = math.exp(d["fit"]["c_prime"]) * d["task"]["u_target"] ** d["fit"]["alpha_prime"]
        assert d["point_estimate"] == pytest.approx(recomputed, rel=1e-9)
        assert d["ci"][0] <= d["ci"][1]
        assert d["bootstrap"] == {"B": 50, "n_failed": 0, "seed": 4, "block_mode": "per_run_pooled"}
        summary = json.loads((tmp_path / "bootstrap_summary.json").read_text())
        assert [summary["ci_low"], summary["ci_high"]] == d["ci"]
        assert len((tmp_path / "distribution.csv").read_text().splitlines()) == 51

    def test_task2_echo(self, tmp_path, comonotone_panel):
        report = run_pipeline(RunConfig(task="task2", output_dir=str(tmp_path)), panel=comonotone_panel,
                              with_bootstrap=False)
        assert report.task["m"] == 6 and report.task["u_target"] == 5.7
        assert report.task["name"] == "task2"

    def test_byte_identical(self, tmp_path, comonotone_panel):
        texts = []
        for i, threads in enumerate((1, 4)):
            out = tmp_path / str(i)
            run_pipeline(RunConfig(output_dir=str(out), B=30, seed=9, threads=threads), panel=comonotone_panel)
            texts.append((out / "report.json").read_bytes())
        assert texts[0] == texts[1]
