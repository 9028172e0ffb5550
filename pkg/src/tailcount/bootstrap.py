"""
Year-block nonparametric bootstrap of the count -> fit -> predict pipeline.

Each block is the full ``S x T2`` slab of one (run, year). Replicate ``b``
draws its blocks from a generator seeded by ``(base_seed, b)`` alone, so
the distribution does not depend on how replicates are scheduled.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import csv
import logging
import os

import numpy as np

from .counting import CountSeries, check_grid, order_statistic_field, sweep_field
from .errors import (
    AllReplicatesFailedError,
    IoFailureError,
    TooFewPointsError,
    TooFewReplicatesError,
)
from .panel import DailyPanel
from .regression import fit_power_law, predict_count

logger = logging.getLogger(__name__)

BLOCK_MODES = ("per_run_pooled", "same_years_all_runs")
THREADS_ENV = "TAILCOUNT_THREADS"


@dataclass(frozen=True)
class BootstrapDistribution:
    """Replicate estimates, in replicate order, for the successful replicates."""

    estimates: np.ndarray
    base_seed: int
    B: int
    n_failed: int
    replicate_index: np.ndarray = None

    def __post_init__(self):
        est = np.asarray(self.estimates, dtype=float)
        if est.size != self.B - self.n_failed:
            raise ValueError("estimates length must equal B - n_failed")
        idx = self.replicate_index
        if idx is None:
            idx = np.arange(1, est.size + 1)
        object.__setattr__(self, "estimates", est)
        object.__setattr__(self, "replicate_index", np.asarray(idx, dtype=np.int64))


def replicate_seed(base_seed, b):
    """Integer seed of replicate ``b`` derived from ``base_seed``."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(b),))
    return int(ss.generate_state(1, np.uint64)[0])


def draw_blocks(rng, n_runs, n_years, mode="per_run_pooled"):
    """
    Source (run, year) for every destination (run, year).

    Returns two integer arrays of shape ``(R, T1)``.
    """
    if mode == "per_run_pooled":
        flat = rng.integers(0, n_runs * n_years, size=n_runs * n_years)
        return np.divmod(flat.reshape(n_runs, n_years), n_years)
    if mode == "same_years_all_runs":
        years = rng.integers(0, n_years, size=n_years)
        runs = np.broadcast_to(np.arange(n_runs)[:, None], (n_runs, n_years))
        return runs, np.broadcast_to(years, (n_runs, n_years))
    raise ValueError(f"block mode must be one of {BLOCK_MODES}, got {mode!r}")


def _resample_runs_years(arr, seed, mode, run_axis):
    rng = np.random.default_rng(seed)
    R, T1 = arr.shape[run_axis], arr.shape[run_axis + 1]
    src_r, src_y = draw_blocks(rng, R, T1, mode)
    if run_axis == 0:
        return arr[src_r, src_y]
    return arr[:, src_r, src_y]


def resample_year_blocks(panel, replicate_seed, mode="per_run_pooled"):
    """Panel of identical dims assembled from (run, year) blocks drawn with replacement."""
    values = _resample_runs_years(panel.values, replicate_seed, mode, run_axis=1)
    return DailyPanel(values, origin_year=panel.origin_year, validate=False)


def resolve_threads(n_threads=None):
    """Thread count from the argument or ``TAILCOUNT_THREADS`` (0 means auto)."""
    if n_threads is None:
        n_threads = int(os.environ.get(THREADS_ENV, "0") or 0)
    if n_threads <= 0:
        n_threads = os.cpu_count() or 1
    return n_threads


def _estimate_from_field(field, grid, temporal, u_target):
    counts = sweep_field(field, grid, temporal)
    fit = fit_power_law(CountSeries(grid, counts, None))
    return predict_count(fit, u_target)


def bootstrap_target(
    panel,
    spec_template,
    grid,
    u_target,
    B=500,
    base_seed=0,
    mode="per_run_pooled",
    n_threads=None,
):
    """
    Bootstrap distribution of the extrapolated count at ``u_target``.

    Resampling whole (run, year) slabs commutes with taking the site order
    statistic of each day, so the order-statistic field is computed once
    and its blocks are resampled instead of the full panel.

    Replicates whose regression has fewer than three positive counts are
    excluded and tallied in ``n_failed``.
    """
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    grid = check_grid(grid)
    field = order_statistic_field(panel, spec_template.order_index(panel.n_sites))
    temporal = spec_template.temporal

    def one(b):
        seed = replicate_seed(base_seed, b)
        resampled = _resample_runs_years(field, seed, mode, run_axis=0)
        try:
            return _estimate_from_field(resampled, grid, temporal, u_target)
        except TooFewPointsError:
            return None

    n_threads = resolve_threads(n_threads)
    replicates = range(1, B + 1)
    if n_threads == 1:
        results = [one(b) for b in replicates]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(one, replicates))

    ok = [(b, est) for b, est in zip(replicates, results) if est is not None]
    n_failed = B - len(ok)
    if not ok:
        raise AllReplicatesFailedError(f"all {B} bootstrap replicates failed to fit")
    if n_failed:
        logger.warning("%d of %d bootstrap replicates failed to fit", n_failed, B)
    return BootstrapDistribution(
        estimates=np.array([e for _, e in ok]),
        base_seed=int(base_seed),
        B=int(B),
        n_failed=n_failed,
        replicate_index=np.array([b for b, _ in ok]),
    )


def percentile_ci(dist, level=0.95):
    """Percentile interval with linear interpolation between order statistics."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    est = np.sort(np.asarray(dist.estimates if hasattr(dist, "estimates") else dist, dtype=float))
    if est.size < 2:
        raise TooFewReplicatesError(f"need at least 2 replicate estimates, got {est.size}")
    lo, hi = np.quantile(est, [(1.0 - level) / 2.0, (1.0 + level) / 2.0])
    return float(lo), float(hi)


def histogram_bins(dist, bins=30):
    """Equal-width bins spanning [min, max] of the replicate estimates."""
    est = np.asarray(dist.estimates, dtype=float)
    counts, edges = np.histogram(est, bins=bins, range=(est.min(), est.max()))
    return edges[:-1], edges[1:], counts


def write_distribution(dist, path):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["replicate", "estimate"])
            for b, e in zip(dist.replicate_index, dist.estimates):
                w.writerow([int(b), repr(float(e))])
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def write_histogram(dist, path, bins=30):
    left, right, counts = histogram_bins(dist, bins)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["bin_left", "bin_right", "count"])
            for a, b, c in zip(left, right, counts):
                w.writerow([repr(float(a)), repr(float(b)), int(c)])
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc
