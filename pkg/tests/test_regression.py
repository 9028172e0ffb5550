import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailcount import CountSeries, EventSpec, PowerLawFit, fit_power_law, goodness_report, predict_count
from tailcount.errors import DegenerateDesignError, NonpositiveThresholdError, TooFewPointsError
from tailcount.regression import FIT_KEYS


def series(u, z):
    return CountSeries(np.asarray(u, float), np.asarray(z, float), EventSpec(m=None))


def fit_from(c_prime, alpha_prime):
    return PowerLawFit(c_prime, alpha_prime, 0.0, 0.0, 1.0, 3, 0)


def normal_equations(x, y):
    X = np.column_stack([np.ones_like(x), x])
    beta = np.linalg.solve(X.T @ X, X.T @ y)
    resid = y - X @ beta
    s2 = resid @ resid / (x.size - 2)
    se = np.sqrt(np.diag(s2 * np.linalg.inv(X.T @ X)))
    return beta, se


def test_noiseless_power_law():
    u = np.array([1.0, 2.0, 4.0])
    f = fit_power_law(series(u, 10.0 * u**-2))
    assert f.c_prime == pytest.approx(math.log(10.0), abs=1e-12)
    assert f.alpha_prime == pytest.approx(-2.0, abs=1e-12)
    assert f.r_squared == pytest.approx(1.0)
    assert f.se_c_prime == pytest.approx(0.0, abs=1e-10)
    assert f.se_alpha_prime == pytest.approx(0.0, abs=1e-10)
    assert f.alpha == pytest.approx(2.0)
    assert f.scale == pytest.approx(10.0)


def test_noisy_matches_normal_equations(rng):
    u = np.sort(rng.uniform(1.1, 3.0, 50))
    z = np.round(5000 * u**-4.0 * np.exp(rng.normal(0, 0.1, 50))) + 1
    f = fit_power_law(series(u, z))
    beta, se = normal_equations(np.log(u), np.log(z))
    assert f.c_prime == pytest.approx(beta[0], abs=1e-10)
    assert f.alpha_prime == pytest.approx(beta[1], abs=1e-10)
    assert f.se_c_prime == pytest.approx(se[0], abs=1e-10)
    assert f.se_alpha_prime == pytest.approx(se[1], abs=1e-10)
    y = np.log(z)
    resid = y - (beta[0] + beta[1] * np.log(u))
    r2 = 1 - resid @ resid / np.sum((y - y.mean()) ** 2)
    assert f.r_squared == pytest.approx(r2, abs=1e-12)
    assert goodness_report(f, series(u, z))["r_squared"] == pytest.approx(r2, abs=1e-12)


def test_zero_counts_dropped():
    u = [1.0, 1.5, 2.0, 2.5, 3.0]
    f = fit_power_law(series(u, [100, 30, 12, 0, 0]))
    assert f.n_used == 3 and f.dropped_zero_counts == 2


def test_too_few_points():
    with pytest.raises(TooFewPointsError):
        fit_power_law(series([1.0, 2.0, 3.0], [5, 2, 0]))


def test_degenerate_design():
    with pytest.raises(DegenerateDesignError):
        fit_power_law(series([2.0, 2.0, 2.0], [5, 4, 3]))


@pytest.mark.parametrize(
    "c_prime,alpha_prime,u,expected",
    [(2.3, -6.44, 1.7, 0.33), (8.86, -5.71, 5.7, 0.34), (7.12, -5.28, 5.0, 0.25)],
)
def test_predict_reproduces_published_estimates(c_prime, alpha_prime, u, expected):
    assert abs(predict_count(fit_from(c_prime, alpha_prime), u) - expected) <= 0.005


def test_predict_unit_threshold():
    assert predict_count(fit_from(1.234, -3.0), 1.0) == pytest.approx(math.exp(1.234))


def test_predict_rejects_nonpositive():
    with pytest.raises(NonpositiveThresholdError):
        predict_count(fit_from(1.0, -2.0), 0.0)


def test_predict_strictly_decreasing():
    f = fit_from(3.0, -4.5)
    values = [predict_count(f, u) for u in np.linspace(0.5, 8.0, 200)]
    assert np.all(np.diff(values) < 0)


def test_goodness_report_noiseless():
    u = np.linspace(1.1, 2.0, 10)
    s = series(u, 300 * u**-3.5)
    rep = goodness_report(fit_power_law(s), s)
    assert np.allclose(rep["residual"], 0.0, atol=1e-12)
    assert np.allclose(rep["fitted_log_count"], rep["log_count"], atol=1e-10)


def test_json_export():
    f = fit_power_law(series([1.0, 2.0, 4.0, 8.0], [100, 25, 7, 1]))
    d = json.loads(f.to_json())
    assert tuple(d) == FIT_KEYS
    assert PowerLawFit.from_dict(d) == f


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 100.0), st.integers(0, 2**32 - 1))
def test_count_rescaling(c, seed):
    rng = np.random.default_rng(seed)
    u = np.sort(rng.uniform(1.0, 4.0, 12))
    z = 1000 * u**-3 * np.exp(rng.normal(0, 0.2, 12))
    a = fit_power_law(series(u, z))
    b = fit_power_law(series(u, c * z))
    assert b.c_prime == pytest.approx(a.c_prime + math.log(c), abs=1e-9)
    assert b.alpha_prime == pytest.approx(a.alpha_prime, abs=1e-9)
    assert b.r_squared == pytest.approx(a.r_squared, abs=1e-9)
    assert b.se_alpha_prime == pytest.approx(a.se_alpha_prime, rel=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10.0), st.integers(0, 2**32 - 1))
def test_threshold_rescaling(c, seed):
    rng = np.random.default_rng(seed)
    u = np.sort(rng.uniform(1.0, 4.0, 12))
    z = 1000 * u**-3 * np.exp(rng.normal(0, 0.2, 12))
    a = fit_power_law(series(u, z))
    b = fit_power_law(series(c * u, z))
    assert b.alpha_prime == pytest.approx(a.alpha_prime, abs=1e-9)
    assert b.c_prime == pytest.approx(a.c_prime - a.alpha_prime * math.log(c), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(-5.0, 10.0),
    st.floats(0.2, 12.0),
    st.floats(0.05, 2.0),
    st.floats(0.001, 1.0),
    st.integers(3, 60),
)
def test_noiseless_recovery(log_c, alpha, u0, width, n):
    u = u0 + np.linspace(0.0, width, n)
    f = fit_power_law(series(u, np.exp(log_c) * u**-alpha))
    assert f.c_prime == pytest.approx(log_c, abs=1e-7)
    assert f.alpha_prime == pytest.approx(-alpha, abs=1e-7)
