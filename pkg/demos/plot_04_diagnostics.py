"""
Exploratory diagnostics
=======================

Trend in annual maxima, randomness and stationarity of the maxima, and
lag-1 extremal dependence of the daily series.
"""

import numpy as np

from tailcount import SimConfig, adf_test, chi_lag1, fit_gev_trend, runs_test, simulate_panel, yearly_maxima

panel = simulate_panel(SimConfig(dims=(2, 4, 165, 365), alpha=6.0, dependence="independent", seed=8))
maxima = yearly_maxima(panel)[0]            # (runs, years) for site 1
pooled = maxima.ravel()
years = np.tile(np.arange(1, 166), 4)

# GEV with location linear in rescaled year; no trend was simulated.
gev = fit_gev_trend(pooled, years)
lo, hi = gev.beta1_ci
print(f"beta1 = {gev.beta1:.4f}, 95% CI ({lo:.4f}, {hi:.4f}), xi = {gev.xi:.3f}")

print("runs test p =", round(runs_test(pooled).p_value, 4))
adf = adf_test(pooled)
print("ADF statistic =", round(adf.statistic, 2), "p =", adf.p_value, adf.clamped or "")

# Independent days: chi(q) should sit near 1 - q.
daily = panel.values[0, 0].ravel()
for q in (0.975, 0.99):
    print(f"chi({q}) = {chi_lag1(daily, q):.4f}")
