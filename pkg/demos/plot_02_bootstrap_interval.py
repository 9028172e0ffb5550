"""
Year-block bootstrap interval
=============================

Resample whole (run, year) blocks to get a distribution of the
extrapolated count and a percentile interval.
"""

from tailcount import SimConfig, TASK1, bootstrap_target, make_grid, percentile_ci, simulate_panel
from tailcount import true_expected_count
from tailcount.bootstrap import histogram_bins

cfg = SimConfig(dims=(25, 2, 60, 365), alpha=6.0, seed=3)
panel = simulate_panel(cfg)
grid = make_grid(1.10, 1.50, 0.01)

# Each replicate has its own seed derived from (base_seed, b), so the
# distribution does not depend on how many worker threads are used.
dist = bootstrap_target(panel, TASK1, grid, u_target=1.7, B=300, base_seed=11)
low, high = percentile_ci(dist, level=0.95)
truth = true_expected_count(cfg, TASK1.with_threshold(1.7))
print(f"95% interval ({low:.1f}, {high:.1f}); exact value {truth:.1f}; failed replicates {dist.n_failed}")

# A text histogram of the replicates.
left, right, counts = histogram_bins(dist, bins=12)
for lo, hi, c in zip(left, right, counts):
    print(f"{lo:8.1f} - {hi:8.1f} | {'#' * int(c)}")
