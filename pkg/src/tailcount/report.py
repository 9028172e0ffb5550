"""
End-to-end estimation runs, report serialization and interval scoring.

Reports are written with a fixed key order and floats rounded to 12
significant digits, so identical inputs give byte-identical files.
"""

from dataclasses import dataclass, replace
import csv
import json
import logging
import math
import os

import numpy as np

from . import __version__
from .bootstrap import (
    BLOCK_MODES,
    bootstrap_target,
    percentile_ci,
    write_distribution,
    write_histogram,
)
from .counting import (
    RUN_EVENT,
    SINGLE_DAY,
    TASK1,
    TASK2,
    TASK3,
    EventSpec,
    make_grid,
    sweep_thresholds,
    write_count_series,
)
from .errors import InvalidConfigError, InvalidIntervalError, IoFailureError
from .panel import load_panel
from .regression import FIT_KEYS, fit_power_law, goodness_report, predict_count

logger = logging.getLogger(__name__)

REPORT_VERSION = 1
SIG_DIGITS = 12

TASKS = {
    "task1": (TASK1, (1.10, 1.50, 0.01)),
    "task2": (TASK2, (1.10, 5.50, 0.01)),
    "task3": (TASK3, (1.10, 4.50, 0.01)),
}


def round_sig(x, digits=SIG_DIGITS):
    """Round to ``digits`` significant digits; serializes as shortest repr."""
    if x is None or not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def _normalize(obj):
    if isinstance(obj, dict):
        return {k: _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return round_sig(v) if math.isfinite(v) else None
    return obj


def dumps(obj):
    """Deterministic JSON text: insertion key order, 12 significant digits."""
    return json.dumps(_normalize(obj), indent=2, allow_nan=False) + "\n"


def _write_text(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def score_interval(low, high, truth, alpha_level=0.05):
    """Interval score of the central (1 - alpha_level) interval [low, high]; lower is better."""
    if not low <= high:
        raise InvalidIntervalError(f"interval lower bound {low} exceeds upper bound {high}")
    if not 0.0 < alpha_level < 1.0:
        raise InvalidIntervalError(f"alpha_level must be in (0, 1), got {alpha_level}")
    score = high - low
    if truth < low:
        score += 2.0 / alpha_level * (low - truth)
    elif truth > high:
        score += 2.0 / alpha_level * (truth - high)
    return score


@dataclass
class RunConfig:
    input_path: str | None = None
    task: str = "task1"
    m: int | None = None
    u_target: float | None = None
    temporal: str | None = None
    grid_min: float | None = None
    grid_max: float | None = None
    grid_step: float | None = None
    B: int = 500
    seed: int = 0
    ci_level: float = 0.95
    output_dir: str = "."
    layout: str = "long"
    block_mode: str = "per_run_pooled"
    hist_bins: int = 30
    threads: int | None = None

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def resolved(self):
        """Copy with task defaults filled in and invariants checked."""
        if self.task == "custom":
            if self.m is None or self.u_target is None:
                raise InvalidConfigError("custom task needs m and u_target")
            base = EventSpec(m=self.m, u=self.u_target, temporal=self.temporal or SINGLE_DAY)
            grid = (self.grid_min, self.grid_max, self.grid_step)
            if None in grid:
                raise InvalidConfigError("custom task needs grid_min, grid_max and grid_step")
        elif self.task in TASKS:
            base, grid = TASKS[self.task]
        else:
            raise InvalidConfigError(f"task must be one of {sorted(TASKS) + ['custom']}, got {self.task!r}")

        cfg = replace(
            self,
            m=self.m if self.m is not None else base.m,
            u_target=self.u_target if self.u_target is not None else base.u,
            temporal=self.temporal or base.temporal,
            grid_min=self.grid_min if self.grid_min is not None else grid[0],
            grid_max=self.grid_max if self.grid_max is not None else grid[1],
            grid_step=self.grid_step if self.grid_step is not None else grid[2],
        )
        if not cfg.grid_min < cfg.grid_max:
            raise InvalidConfigError(f"grid_min {cfg.grid_min} must be below grid_max {cfg.grid_max}")
        if not cfg.grid_step > 0:
            raise InvalidConfigError(f"grid_step must be > 0, got {cfg.grid_step}")
        if cfg.temporal not in (SINGLE_DAY, RUN_EVENT):
            raise InvalidConfigError(f"unknown temporal mode {cfg.temporal!r}")
        if cfg.block_mode not in BLOCK_MODES:
            raise InvalidConfigError(f"block_mode must be one of {BLOCK_MODES}")
        if cfg.B < 1:
            raise InvalidConfigError(f"B must be >= 1, got {cfg.B}")
        if not 0.0 < cfg.ci_level < 1.0:
            raise InvalidConfigError(f"ci_level must be in (0, 1), got {cfg.ci_level}")
        if cfg.u_target <= cfg.grid_max:
            logger.warning("u_target %.4g is inside the threshold grid; no extrapolation", cfg.u_target)
        return cfg

    @property
    def spec(self):
        return EventSpec(m=self.m, u=self.u_target, temporal=self.temporal)

    @property
    def grid(self):
        return make_grid(self.grid_min, self.grid_max, self.grid_step)


@dataclass
class Report:
    task: dict
    point_estimate: float
    fit: dict
    count_series: str
    ci: list | None = None
    bootstrap: dict | None = None
    software_version: str = __version__

    def to_dict(self):
        return {
            "report_version": REPORT_VERSION,
            "software_version": self.software_version,
            "task": self.task,
            "point_estimate": self.point_estimate,
            "ci": self.ci,
            "fit": self.fit,
            "count_series": self.count_series,
            "bootstrap": self.bootstrap,
        }

    def to_json(self):
        return dumps(self.to_dict())


def write_fit(fit, json_path=None, csv_path=None):
    if json_path:
        _write_text(json_path, dumps(fit.to_dict()))
    if csv_path:
        d = fit.to_dict()
        _write_text(csv_path, ",".join(FIT_KEYS) + "\n" + ",".join(repr(d[k]) for k in FIT_KEYS) + "\n")


def emit_plot_data(series, fit, dist, output_dir, bins=30):
    """
    Write ``loglog.csv`` and, when ``dist`` is given, ``hist.csv``.

    Returns the list of paths written.
    """
    os.makedirs(output_dir, exist_ok=True)
    good = goodness_report(fit, series)
    loglog = os.path.join(output_dir, "loglog.csv")
    try:
        with open(loglog, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "count", "log_u", "log_count", "fitted_log_count"])
            for row in zip(good["u"], good["count"], good["log_u"], good["log_count"], good["fitted_log_count"]):
                u, z, lu, lz, fz = (float(v) for v in row)
                w.writerow([repr(u), int(z), repr(lu), "" if math.isnan(lz) else repr(lz), repr(fz)])
    except OSError as exc:
        raise IoFailureError(f"cannot write {loglog}: {exc}") from exc
    paths = [loglog]
    if dist is not None:
        hist = os.path.join(output_dir, "hist.csv")
        write_histogram(dist, hist, bins)
        paths.append(hist)
    return paths


def run_pipeline(cfg, panel=None, with_bootstrap=True):
    """
    load -> sweep -> fit -> predict [-> bootstrap] -> report.

    Writes into ``cfg.output_dir``: ``report.json``, ``counts.csv``,
    ``fit.json``, ``fit.csv``, ``loglog.csv`` and, with the bootstrap,
    ``distribution.csv``, ``bootstrap_summary.json`` and ``hist.csv``.
    """
    cfg = cfg.resolved()
    if panel is None:
        if cfg.input_path is None:
            raise InvalidConfigError("no input panel given")
        panel = load_panel(cfg.input_path, cfg.layout)
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)

    spec = cfg.spec
    m = spec.n_required(panel.n_sites)
    series = sweep_thresholds(panel, spec, cfg.grid)
    fit = fit_power_law(series)
    estimate = predict_count(fit, cfg.u_target)

    write_count_series(series, os.path.join(out, "counts.csv"))
    write_fit(fit, os.path.join(out, "fit.json"), os.path.join(out, "fit.csv"))

    dist = None
    ci = None
    boot = None
    if with_bootstrap:
        dist = bootstrap_target(
            panel, spec, cfg.grid, cfg.u_target, B=cfg.B, base_seed=cfg.seed,
            mode=cfg.block_mode, n_threads=cfg.threads,
        )
        lo, hi = percentile_ci(dist, cfg.ci_level) if dist.estimates.size >= 2 else (math.nan, math.nan)
        ci = [lo, hi]
        boot = {"B": dist.B, "n_failed": dist.n_failed, "seed": dist.base_seed, "block_mode": cfg.block_mode}
        write_distribution(dist, os.path.join(out, "distribution.csv"))
        summary = {
            "estimate": estimate,
            "ci_low": lo,
            "ci_high": hi,
            "level": cfg.ci_level,
            "B": dist.B,
            "n_failed": dist.n_failed,
            "base_seed": dist.base_seed,
        }
        _write_text(os.path.join(out, "bootstrap_summary.json"), dumps(summary))

    emit_plot_data(series, fit, dist, out, cfg.hist_bins)

    report = Report(
        task={
            "name": cfg.task,
            "m": m,
            "n_sites": panel.n_sites,
            "u_target": cfg.u_target,
            "temporal": cfg.temporal,
            "grid": {"min": cfg.grid_min, "max": cfg.grid_max, "step": cfg.grid_step, "n": len(series)},
            "ci_level": cfg.ci_level,
        },
        point_estimate=estimate,
        fit=fit.to_dict(),
        count_series="counts.csv",
        ci=ci,
        bootstrap=boot,
    )
    _write_text(os.path.join(out, "report.json"), report.to_json())
    return report
