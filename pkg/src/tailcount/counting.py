"""
Compound-event indicators and empirical counts.

A compound event is "at least ``m`` of the ``S`` sites exceed ``u``",
either on a single day or over a run of two or more consecutive days.
"At least m of S exceed u" is the same as "the (S - m + 1)-th smallest
site value exceeds u", so every indicator reduces to one order statistic
per (run, year, day).

Run events are counted as adjacent pairs minus adjacent triples, with
years concatenated inside each ensemble run (never across runs). This
counts every maximal block of length >= 2 exactly once.
"""

from dataclasses import dataclass, replace
import csv

import numpy as np

from .errors import (
    DimensionTooSmallError,
    EmptyGridError,
    IndexOutOfRangeError,
    IoFailureError,
    NonIncreasingGridError,
)

SINGLE_DAY = "single_day"
RUN_EVENT = "run_at_least_two_days"
TEMPORAL_MODES = (SINGLE_DAY, RUN_EVENT)


@dataclass(frozen=True)
class EventSpec:
    """``m`` of the sites exceed ``u`` on one day or on a run of days.

    ``m=None`` means "all sites" and is resolved against the panel.
    ``u`` may be left unset in a sweep template.
    """

    m: int | None
    u: float | None = None
    temporal: str = SINGLE_DAY

    def __post_init__(self):
        if self.temporal not in TEMPORAL_MODES:
            raise ValueError(f"temporal must be one of {TEMPORAL_MODES}, got {self.temporal!r}")
        if self.m is not None and self.m < 1:
            raise IndexOutOfRangeError(f"m must be >= 1, got {self.m}")
        if self.u is not None and not self.u > 0:
            raise ValueError(f"threshold u must be > 0, got {self.u}")

    def with_threshold(self, u):
        return replace(self, u=float(u))

    def n_required(self, n_sites):
        m = n_sites if self.m is None else self.m
        if not 1 <= m <= n_sites:
            raise IndexOutOfRangeError(f"m={m} is outside 1..{n_sites}")
        return m

    def order_index(self, n_sites):
        """1-based ascending order statistic that controls the event."""
        return n_sites - self.n_required(n_sites) + 1


TASK1 = EventSpec(m=None, u=1.7, temporal=SINGLE_DAY)
TASK2 = EventSpec(m=6, u=5.7, temporal=SINGLE_DAY)
TASK3 = EventSpec(m=3, u=5.0, temporal=RUN_EVENT)


@dataclass(frozen=True)
class IndicatorTensor:
    """Binary event indicator indexed (run, year, day)."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 3:
            raise ValueError(f"indicator must be 3-d (run, year, day), got {bits.ndim}-d")
        if bits.dtype != bool:
            if not np.all((bits == 0) | (bits == 1)):
                raise ValueError("indicator entries must be 0 or 1")
            bits = bits.astype(bool)
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True)
class CountSeries:
    """Thresholds ``u_1 < ... < u_L`` and empirical counts ``Z_l``."""

    thresholds: np.ndarray
    counts: np.ndarray
    spec_template: EventSpec

    def __post_init__(self):
        if len(self.thresholds) != len(self.counts):
            raise ValueError("thresholds and counts must have equal length")

    def __len__(self):
        return len(self.thresholds)


def site_order_statistic(day_vector, k):
    """k-th smallest value (1-based) of ``day_vector``, ties kept."""
    v = np.asarray(day_vector, dtype=float)
    if not 1 <= k <= v.size:
        raise IndexOutOfRangeError(f"k={k} is outside 1..{v.size}")
    return float(np.partition(v, k - 1)[k - 1])


def order_statistic_field(panel, k):
    """k-th smallest site value for every (run, year, day); shape (R, T1, T2)."""
    S = panel.n_sites
    if not 1 <= k <= S:
        raise IndexOutOfRangeError(f"k={k} is outside 1..{S}")
    if k == 1:
        return panel.values.min(axis=0)
    if k == S:
        return panel.values.max(axis=0)
    return np.partition(panel.values, k - 1, axis=0)[k - 1]


def event_indicator(panel, spec):
    if spec.u is None:
        raise ValueError("event_indicator needs a threshold; spec.u is unset")
    field = order_statistic_field(panel, spec.order_index(panel.n_sites))
    return IndicatorTensor(field > spec.u)


def count_single_day(indic):
    return int(np.count_nonzero(indic.bits))


def count_runs(indic):
    """
    Number of runs of at least two consecutive event days.

    Adjacent pairs minus adjacent triples, summed over ensemble runs,
    including the pair and the two triples that straddle each year
    boundary inside a run.
    """
    K = indic.bits.astype(np.int64)
    R, T1, T2 = K.shape
    if T2 < 2:
        raise DimensionTooSmallError(f"run counting needs at least 2 days per year, got {T2}")

    pairs = np.sum(K[:, :, :-1] * K[:, :, 1:])
    pairs += np.sum(K[:, :-1, -1] * K[:, 1:, 0])

    triples = np.sum(K[:, :, :-2] * K[:, :, 1:-1] * K[:, :, 2:])
    triples += np.sum(K[:, :-1, -2] * K[:, :-1, -1] * K[:, 1:, 0])
    triples += np.sum(K[:, :-1, -1] * K[:, 1:, 0] * K[:, 1:, 1])
    return int(pairs - triples)


def maximal_runs_oracle(indic):
    """Count maximal blocks of 1s of length >= 2 by a direct scan."""
    R, T1, T2 = indic.bits.shape
    total = 0
    for r in range(R):
        length = 0
        for b in indic.bits[r].ravel():
            if b:
                length += 1
            else:
                if length >= 2:
                    total += 1
                length = 0
        if length >= 2:
            total += 1
    return total


def make_grid(start, stop, step):
    """Regular grid from ``start`` to ``stop`` inclusive, rounded to suppress drift."""
    if step <= 0:
        raise NonIncreasingGridError(f"grid step must be > 0, got {step}")
    if stop < start:
        raise EmptyGridError(f"grid stop {stop} is below start {start}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 10)


def check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise EmptyGridError("threshold grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise NonIncreasingGridError("threshold grid must be strictly increasing")
    if grid[0] <= 0:
        raise NonIncreasingGridError("thresholds must be > 0")
    return grid


def _count_above(sorted_values, grid):
    """#{v > u} for each u, given ascending ``sorted_values``."""
    return sorted_values.size - np.searchsorted(sorted_values, grid, side="right")


def sweep_field(field, grid, temporal):
    """
    Counts at every threshold from a precomputed order-statistic field.

    Uses the fact that a pair (or triple) of days is jointly above ``u``
    iff its minimum is above ``u``, so each threshold is a binary search.
    """
    grid = check_grid(grid)
    R, T1, T2 = field.shape
    if temporal == SINGLE_DAY:
        counts = _count_above(np.sort(field, axis=None), grid)
    else:
        if T2 < 2:
            raise DimensionTooSmallError(f"run counting needs at least 2 days per year, got {T2}")
        seq = field.reshape(R, T1 * T2)
        pair_min = np.minimum(seq[:, :-1], seq[:, 1:])
        triple_min = np.minimum(pair_min[:, :-1], seq[:, 2:])
        counts = _count_above(np.sort(pair_min, axis=None), grid) - _count_above(
            np.sort(triple_min, axis=None), grid
        )
    return counts.astype(np.int64)


def sweep_thresholds(panel, spec_template, grid):
    """Empirical count of ``spec_template`` at each threshold in ``grid``."""
    grid = check_grid(grid)
    field = order_statistic_field(panel, spec_template.order_index(panel.n_sites))
    counts = sweep_field(field, grid, spec_template.temporal)
    return CountSeries(thresholds=grid, counts=counts, spec_template=replace(spec_template, u=None))


def write_count_series(series, path):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "count"])
            for u, z in zip(series.thresholds, series.counts):
                w.writerow([repr(float(u)), int(z)])
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def read_count_series(path, spec_template=None):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return CountSeries(
        thresholds=data[:, 0],
        counts=data[:, 1].astype(np.int64),
        spec_template=spec_template or EventSpec(m=None),
    )
