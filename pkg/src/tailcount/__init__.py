"""
tailcount
=========

Expected counts of compound precipitation exceedances (all sites, m of S
sites, m of S on two or more consecutive days) from a daily multi-run
panel: empirical counts at moderate thresholds, a log-log power-law
regression to extrapolate to extreme thresholds, and a year-block
bootstrap for confidence intervals.
"""

__version__ = "0.1.0"

from .panel import (
    DailyPanel,
    SeasonalProfile,
    deseasonalize,
    load_panel,
    seasonal_profile,
    write_panel,
    yearly_maxima,
)
from .smoothing import lowess_smooth
from .counting import (
    RUN_EVENT,
    SINGLE_DAY,
    TASK1,
    TASK2,
    TASK3,
    CountSeries,
    EventSpec,
    IndicatorTensor,
    count_runs,
    count_single_day,
    event_indicator,
    make_grid,
    maximal_runs_oracle,
    order_statistic_field,
    site_order_statistic,
    sweep_thresholds,
)
from .regression import PowerLawFit, fit_power_law, goodness_report, predict_count
from .bootstrap import (
    BootstrapDistribution,
    bootstrap_target,
    percentile_ci,
    resample_year_blocks,
)
from .diagnostics import (
    GevTrendFit,
    TestResult,
    adf_test,
    chi_lag1,
    diagnose_panel,
    fit_gev_trend,
    gev_neg_log_likelihood,
    runs_test,
)
from .simulator import SimConfig, simulate_panel, true_expected_count
from .report import Report, RunConfig, emit_plot_data, run_pipeline, score_interval
