"""
Daily multi-run intensity panel: loading, validation, persistence and
the simple transforms used by the exploratory diagnostics.

Values are stored as a float64 array of shape ``(S, R, T1, T2)``:
site, ensemble run, year and day of year.
"""

from dataclasses import dataclass, field
import logging
import os

import numpy as np
import pandas as pd

from .errors import (
    LengthMismatchError,
    MissingCellError,
    NegativeValueError,
    NonNumericError,
    RaggedYearError,
    IoFailureError,
)
from .smoothing import lowess_smooth

logger = logging.getLogger(__name__)

INDEX_COLUMNS = ("run", "year", "day")
LAYOUTS = ("long", "wide")
POOLING = ("per_run", "pooled_all_runs")


@dataclass(frozen=True)
class DailyPanel:
    """Immutable (site, run, year, day) array of nonnegative intensities."""

    values: np.ndarray
    origin_year: int = 1
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 4:
            raise ValueError(f"panel values must be 4-d (site, run, year, day), got {values.ndim}-d")
        if min(values.shape) < 1:
            raise ValueError(f"all panel dimensions must be >= 1, got {values.shape}")
        if self.validate:
            _check_values(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dims(self):
        return self.values.shape

    @property
    def n_sites(self):
        return self.values.shape[0]

    @property
    def n_runs(self):
        return self.values.shape[1]

    @property
    def n_years(self):
        return self.values.shape[2]

    @property
    def n_days(self):
        return self.values.shape[3]


def _check_values(values):
    if not np.all(np.isfinite(values)):
        raise NonNumericError("panel contains non-finite values")
    if np.any(values < 0):
        raise NegativeValueError("panel contains negative values")


@dataclass(frozen=True)
class SeasonalProfile:
    """Day-of-year mean intensity and its LOWESS smooth.

    For ``pooled_over="per_run"`` both vectors have shape ``(R, T2)``,
    one profile per ensemble run; otherwise shape ``(T2,)``.
    """

    day_mean: np.ndarray
    smoothed: np.ndarray
    pooled_over: str = "pooled_all_runs"

    @property
    def n_days(self):
        return self.day_mean.shape[-1]


def _complete_index(codes, name):
    """Check that 1-based integer labels cover 1..n; return n."""
    uniq = np.unique(codes)
    n = uniq.size
    if uniq[0] != 1 or uniq[-1] != n:
        raise MissingCellError(f"{name} indices must cover 1..{n} without gaps, got {uniq[0]}..{uniq[-1]}")
    return n


def _integer_column(frame, name):
    col = pd.to_numeric(frame[name], errors="coerce")
    if col.isna().any() or not np.all(np.mod(col.to_numpy(), 1) == 0):
        raise NonNumericError(f"column {name!r} must hold integers")
    return col.to_numpy().astype(np.int64)


def _value_array(frame, columns):
    raw = frame[list(columns)].to_numpy()
    try:
        # Per-string float conversion is exact, unlike the pandas fast parser.
        vals = raw.astype(np.float64)
    except (TypeError, ValueError):
        vals = frame[list(columns)].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(vals)
    if bad.any():
        row = int(np.argwhere(bad)[0][0])
        raise NonNumericError(f"non-numeric or non-finite value in data row {row + 1}")
    if np.any(vals < 0):
        row = int(np.argwhere(vals < 0)[0][0])
        raise NegativeValueError(f"negative value in data row {row + 1}")
    return vals


def _read_csv(path):
    if not os.path.exists(path):
        raise IoFailureError(f"no such file: {path}")
    try:
        # Values stay text so that non-numeric cells are reported, not silently coerced.
        return pd.read_csv(path, dtype=str, skipinitialspace=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc


def load_panel(path, layout="long"):
    """
    Read a panel from CSV.

    Parameters
    ----------
    path : str or path-like
        CSV file. ``long`` layout has header ``run,year,day,site,value``;
        ``wide`` layout has ``run,year,day,site_1,...,site_S``.
    layout : {"long", "wide"}

    Returns
    -------
    DailyPanel

    Raises
    ------
    MissingCellError, NonNumericError, NegativeValueError, RaggedYearError
    """
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    frame = _read_csv(path)
    header = [c.strip() for c in frame.columns]
    frame.columns = header

    if layout == "long":
        expected = ["run", "year", "day", "site", "value"]
        if header != expected:
            raise MissingCellError(f"long layout header must be {','.join(expected)}, got {','.join(header)}")
        site = _integer_column(frame, "site")
        values = _value_array(frame, ["value"])[:, 0]
    else:
        if header[:3] != list(INDEX_COLUMNS) or len(header) < 4:
            raise MissingCellError(f"wide layout header must start with run,year,day,site_1, got {','.join(header)}")
        site_cols = header[3:]
        expected_sites = [f"site_{i}" for i in range(1, len(site_cols) + 1)]
        if site_cols != expected_sites:
            raise MissingCellError(f"wide layout site columns must be site_1..site_{len(site_cols)}")
        wide_vals = _value_array(frame, site_cols)

    run = _integer_column(frame, "run")
    year = _integer_column(frame, "year")
    day = _integer_column(frame, "day")

    if layout == "wide":
        n_sites = wide_vals.shape[1]
        site = np.tile(np.arange(1, n_sites + 1), len(frame))
        run, year, day = (np.repeat(a, n_sites) for a in (run, year, day))
        values = wide_vals.ravel()

    if values.size == 0:
        raise MissingCellError("panel file has no data rows")

    n_runs = _complete_index(run, "run")
    n_years = _complete_index(year, "year")
    n_sites = _complete_index(site, "site")
    if day.min() < 1:
        raise RaggedYearError("day indices must be >= 1")

    # Every (run, year) must carry the same set of days 1..T2.
    ry = (run - 1) * n_years + (year - 1)
    last_day = np.full(n_runs * n_years, 0, dtype=np.int64)
    np.maximum.at(last_day, ry, day)
    n_days = int(last_day.max())
    if np.any(last_day != n_days):
        bad = int(np.argmax(last_day != n_days))
        raise RaggedYearError(
            f"run {bad // n_years + 1}, year {bad % n_years + 1} has {last_day[bad]} days, expected {n_days}"
        )

    shape = (n_sites, n_runs, n_years, n_days)
    flat = np.ravel_multi_index((site - 1, run - 1, year - 1, day - 1), shape)
    seen = np.bincount(flat, minlength=int(np.prod(shape)))
    if np.any(seen > 1):
        cell = np.unravel_index(int(np.argmax(seen > 1)), shape)
        raise MissingCellError(f"duplicate cell (site, run, year, day) = {tuple(int(c) + 1 for c in cell)}")
    if np.any(seen == 0):
        cell = np.unravel_index(int(np.argmax(seen == 0)), shape)
        raise MissingCellError(f"missing cell (site, run, year, day) = {tuple(int(c) + 1 for c in cell)}")

    out = np.empty(int(np.prod(shape)))
    out[flat] = values
    logger.debug("loaded panel with dims %s from %s", shape, path)
    return DailyPanel(out.reshape(shape))


def write_panel(panel, path, layout="long"):
    """Write ``panel`` to CSV at full (round-trip) precision."""
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    S, R, T1, T2 = panel.dims
    r, t1, t2 = np.meshgrid(np.arange(1, R + 1), np.arange(1, T1 + 1), np.arange(1, T2 + 1), indexing="ij")
    cols = {"run": r.ravel(), "year": t1.ravel(), "day": t2.ravel()}
    if layout == "long":
        n = R * T1 * T2
        frame = pd.DataFrame({
            "run": np.tile(cols["run"], S),
            "year": np.tile(cols["year"], S),
            "day": np.tile(cols["day"], S),
            "site": np.repeat(np.arange(1, S + 1), n),
            "value": panel.values.reshape(S, n).ravel(),
        })
        frame = frame.sort_values(["run", "year", "day", "site"], kind="stable")
    else:
        frame = pd.DataFrame(cols)
        for i in range(S):
            frame[f"site_{i + 1}"] = panel.values[i].ravel()
    try:
        frame.to_csv(path, index=False, float_format="%.17g")
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def yearly_maxima(panel):
    """Annual maxima, shape ``(S, R, T1)``."""
    return panel.values.max(axis=3)


def seasonal_profile(panel, lowess_fraction=0.1, pooled_over="pooled_all_runs", iterations=3):
    """
    Day-of-year mean intensity and its LOWESS smooth.

    The mean is taken over sites and years, and also over runs when
    ``pooled_over="pooled_all_runs"``.
    """
    if pooled_over not in POOLING:
        raise ValueError(f"pooled_over must be one of {POOLING}, got {pooled_over!r}")
    days = np.arange(1, panel.n_days + 1, dtype=float)
    if pooled_over == "pooled_all_runs":
        day_mean = panel.values.mean(axis=(0, 1, 2))
        smoothed = lowess_smooth(days, day_mean, lowess_fraction, iterations)
    else:
        day_mean = panel.values.mean(axis=(0, 2))
        smoothed = np.vstack([lowess_smooth(days, m, lowess_fraction, iterations) for m in day_mean])
    return SeasonalProfile(day_mean=day_mean, smoothed=smoothed, pooled_over=pooled_over)


def deseasonalize(panel, profile):
    """
    Subtract the smoothed seasonal cycle.

    The result is a plain float array of shape ``(S, R, T1, T2)``, not a
    :class:`DailyPanel`, since it may hold negative values.
    """
    smooth = np.asarray(profile.smoothed)
    if smooth.shape[-1] != panel.n_days:
        raise LengthMismatchError(f"profile has {smooth.shape[-1]} days, panel has {panel.n_days}")
    if smooth.ndim == 1:
        return panel.values - smooth
    if smooth.shape[0] != panel.n_runs:
        raise LengthMismatchError(f"per-run profile has {smooth.shape[0]} runs, panel has {panel.n_runs}")
    return panel.values - smooth[None, :, None, :]
