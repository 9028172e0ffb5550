"""
Exploratory diagnostics for the daily panel.

* GEV regression of annual maxima with a location linear in rescaled year
  (scale and shape constant), fitted by Nelder-Mead.
* Wald-Wolfowitz runs test about the median.
* Augmented Dickey-Fuller test, constant-only, with p-values interpolated
  in the Dickey-Fuller critical-value table.
* Empirical lag-1 extremal dependence chi(q).
"""

from dataclasses import dataclass, asdict
import math

import numpy as np
from scipy import optimize, stats

from .errors import (
    DegenerateSeriesError,
    LengthMismatchError,
    NoExceedancesError,
    NonpositiveScaleError,
    SeriesTooShortError,
    SingularDesignError,
)
from .panel import deseasonalize, seasonal_profile, yearly_maxima

EULER_GAMMA = 0.5772156649015329
GUMBEL_XI_TOL = 1e-8


@dataclass(frozen=True)
class GevTrendFit:
    beta0: float
    beta1: float
    sigma: float
    xi: float
    ses: tuple
    convergence: bool
    n_obs: int
    neg_log_likelihood: float = math.nan

    @property
    def beta1_ci(self):
        se = self.ses[1]
        return self.beta1 - 1.96 * se, self.beta1 + 1.96 * se

    def to_dict(self):
        d = asdict(self)
        d["ses"] = list(self.ses)
        lo, hi = self.beta1_ci
        d["beta1_ci"] = [lo, hi]
        return d


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    p_value: float
    method: str
    n_obs: int
    # "below" / "above" when the p-value was clamped at the table edge.
    clamped: str | None = None

    def to_dict(self):
        return asdict(self)


# --- GEV -------------------------------------------------------------------


def gev_neg_log_likelihood(params, maxima, covariate):
    """
    Negative log-likelihood of a GEV with location ``beta0 + beta1 * x``.

    ``params`` is ``(beta0, beta1, sigma, xi)``. Returns ``inf`` when any
    observation falls outside the support.
    """
    beta0, beta1, sigma, xi = (float(p) for p in params)
    y = np.asarray(maxima, dtype=float)
    x = np.asarray(covariate, dtype=float)
    if y.shape != x.shape:
        raise LengthMismatchError(f"maxima and covariate lengths differ: {y.shape} vs {x.shape}")
    if not sigma > 0:
        raise NonpositiveScaleError(f"sigma must be > 0, got {sigma}")
    z = (y - (beta0 + beta1 * x)) / sigma
    n = y.size
    if abs(xi) < GUMBEL_XI_TOL:
        return float(n * math.log(sigma) + np.sum(z) + np.sum(np.exp(-z)))
    t = xi * z
    if np.any(t <= -1.0):
        return math.inf
    log_t = np.log1p(t)
    return float(n * math.log(sigma) + (1.0 + 1.0 / xi) * np.sum(log_t) + np.sum(np.exp(-log_t / xi)))


def gev_nll_gradient(params, maxima, covariate):
    """Analytic gradient of :func:`gev_neg_log_likelihood` (inside the support)."""
    beta0, beta1, sigma, xi = (float(p) for p in params)
    y = np.asarray(maxima, dtype=float)
    x = np.asarray(covariate, dtype=float)
    z = (y - (beta0 + beta1 * x)) / sigma
    if abs(xi) < GUMBEL_XI_TOL:
        ez = np.exp(-z)
        d_mu = -(1.0 - ez) / sigma
        d_sigma = np.sum(1.0 / sigma - (1.0 - ez) * z / sigma)
        d_xi = np.sum(z - 0.5 * z**2 * (1.0 - ez))
    else:
        t = 1.0 + xi * z
        if np.any(t <= 0):
            return np.full(4, np.nan)
        log_t = np.log(t)
        tp = np.exp(-log_t / xi)
        d_t = (1.0 + 1.0 / xi) / t - tp / (xi * t)
        d_mu = d_t * (-xi / sigma)
        d_sigma = np.sum(1.0 / sigma + d_t * (-xi * z / sigma))
        d_xi = np.sum(
            -log_t / xi**2 + (1.0 + 1.0 / xi) * z / t + tp * (log_t / xi**2 - z / (xi * t))
        )
    return np.array([np.sum(d_mu), np.sum(d_mu * x), d_sigma, d_xi])


def _rescale(years):
    years = np.asarray(years, dtype=float)
    span = years.max() - years.min()
    if span <= 0:
        raise SingularDesignError("years must take at least two distinct values")
    return (years - years.min()) / span


def gev_initial_params(maxima):
    """Gumbel moment estimates used to start the optimizer."""
    y = np.asarray(maxima, dtype=float)
    sigma0 = math.sqrt(6.0) * float(np.std(y, ddof=1)) / math.pi
    sigma0 = sigma0 if sigma0 > 0 else 1.0
    return np.array([float(np.mean(y)) - EULER_GAMMA * sigma0, 0.0, sigma0, 0.1])


def _hessian(f, x, rel_step=1e-4):
    """Central finite-difference Hessian."""
    x = np.asarray(x, dtype=float)
    k = x.size
    h = rel_step * np.maximum(np.abs(x), 1e-2)
    H = np.empty((k, k))
    f0 = f(x)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h[i]
        H[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / h[i] ** 2
        for j in range(i + 1, k):
            ej = np.zeros(k)
            ej[j] = h[j]
            val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4.0 * h[i] * h[j])
            H[i, j] = H[j, i] = val
    return H


def fit_gev_trend(maxima, years, max_restarts=3):
    """
    Maximum-likelihood GEV fit with location linear in years rescaled to [0, 1].

    Parameters
    ----------
    maxima : array_like
        Annual maxima; several runs may be pooled by repeating ``years``.
    years : array_like
        Year label of each maximum.

    Returns
    -------
    GevTrendFit
        ``beta1`` is the location change over the full span of years.
        Standard errors come from the inverse finite-difference Hessian;
        they are NaN when the Hessian is not positive definite, in which
        case ``convergence`` is False.
    """
    y = np.asarray(maxima, dtype=float)
    if y.size < 20:
        raise SeriesTooShortError(f"GEV trend fit needs at least 20 maxima, got {y.size}")
    x = _rescale(years)
    if x.shape != y.shape:
        raise LengthMismatchError("maxima and years lengths differ")

    def nll_raw(p):
        if not p[2] > 0:
            return math.inf
        return gev_neg_log_likelihood(p, y, x)

    # Optimize on log(sigma) to keep the scale positive.
    def objective(theta):
        return nll_raw((theta[0], theta[1], math.exp(theta[2]), theta[3]))

    start = gev_initial_params(y)
    if not math.isfinite(nll_raw(start)):
        start[3] = 0.0
    theta = np.array([start[0], start[1], math.log(start[2]), start[3]])
    res = None
    for _ in range(max_restarts):
        res = optimize.minimize(
            objective,
            theta,
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 20000, "maxfev": 40000},
        )
        converged = res.success and np.allclose(res.x, theta, rtol=1e-6, atol=1e-8)
        theta = res.x
        if converged:
            break

    est = np.array([theta[0], theta[1], math.exp(theta[2]), theta[3]])
    fval = nll_raw(est)
    H = _hessian(nll_raw, est)
    ok = bool(res.success) and math.isfinite(fval)
    try:
        cov = np.linalg.inv(H)
        var = np.diag(cov)
        if np.all(var > 0) and np.all(np.isfinite(var)):
            ses = tuple(float(s) for s in np.sqrt(var))
        else:
            ses, ok = (math.nan,) * 4, False
    except np.linalg.LinAlgError:
        ses, ok = (math.nan,) * 4, False

    return GevTrendFit(
        beta0=float(est[0]),
        beta1=float(est[1]),
        sigma=float(est[2]),
        xi=float(est[3]),
        ses=ses,
        convergence=ok,
        n_obs=int(y.size),
        neg_log_likelihood=float(fval),
    )


# --- runs test -----------------------------------------------------------


def runs_test(series):
    """Wald-Wolfowitz runs test about the sample median (median ties dropped)."""
    x = np.asarray(series, dtype=float)
    med = np.median(x)
    x = x[x != med]
    above = x > med
    n1 = int(above.sum())
    n2 = int(above.size - n1)
    if n1 < 2 or n2 < 2:
        raise DegenerateSeriesError(f"need >= 2 values on each side of the median, got {n1} above and {n2} below")
    n_runs = 1 + int(np.count_nonzero(above[1:] != above[:-1]))
    n = n1 + n2
    mean = 2.0 * n1 * n2 / n + 1.0
    var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n1 - n2) / (n**2 * (n - 1.0))
    z = (n_runs - mean) / math.sqrt(var)
    p = 2.0 * stats.norm.sf(abs(z))
    return TestResult(statistic=float(z), p_value=float(min(p, 1.0)), method="runs_test", n_obs=n)


# --- augmented Dickey-Fuller ---------------------------------------------

# Quantiles of the Dickey-Fuller t statistic, regression with constant.
# Rows: sample size (inf last); columns: probability levels.
DF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
DF_SIZES = np.array([25, 50, 100, 250, 500, np.inf])
DF_TABLE = np.array([
    [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
    [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
    [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
    [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
    [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
    [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
])


def df_critical_values(n):
    """Table row for sample size ``n``, linear in 1/n between tabulated sizes."""
    inv = 1.0 / DF_SIZES
    inv_n = 1.0 / max(float(n), DF_SIZES[0])
    # np.interp needs increasing abscissae; 1/n decreases with n.
    return np.array([np.interp(inv_n, inv[::-1], DF_TABLE[::-1, j]) for j in range(DF_PROBS.size)])


def df_pvalue(statistic, n):
    """Interpolated p-value and clamp flag ("below", "above" or None)."""
    crit = df_critical_values(n)
    if statistic < crit[0]:
        return float(DF_PROBS[0]), "below"
    if statistic > crit[-1]:
        return float(DF_PROBS[-1]), "above"
    return float(np.interp(statistic, crit, DF_PROBS)), None


def default_adf_lag(n):
    return int(math.floor((n - 1) ** (1.0 / 3.0)))


def adf_regression(series, max_lag):
    """
    OLS of dy_t on (1, y_{t-1}, dy_{t-1}, ..., dy_{t-max_lag}).

    Returns coefficients, their standard errors and the number of rows.
    """
    y = np.asarray(series, dtype=float)
    if y.size <= max_lag + 3:
        raise SeriesTooShortError(f"series of length {y.size} too short for lag {max_lag}")
    dy = np.diff(y)
    rows = dy.size - max_lag
    X = np.empty((rows, 2 + max_lag))
    X[:, 0] = 1.0
    X[:, 1] = y[max_lag:-1]
    for j in range(1, max_lag + 1):
        X[:, 1 + j] = dy[max_lag - j:dy.size - j]
    target = dy[max_lag:]
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularDesignError("ADF design matrix is rank deficient")
    coef, _, _, _ = np.linalg.lstsq(X, target, rcond=None)
    resid = target - X @ coef
    dof = rows - X.shape[1]
    if dof <= 0:
        raise SeriesTooShortError("no residual degrees of freedom in ADF regression")
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    return coef, np.sqrt(np.diag(cov)), rows


def adf_test(series, max_lag=None):
    """Augmented Dickey-Fuller test with constant; small p rejects a unit root."""
    y = np.asarray(series, dtype=float)
    if max_lag is None:
        max_lag = default_adf_lag(y.size)
    coef, se, rows = adf_regression(y, max_lag)
    if not se[1] > 0:
        raise SingularDesignError("zero standard error for the lagged level")
    stat = float(coef[1] / se[1])
    p, clamped = df_pvalue(stat, rows)
    return TestResult(statistic=stat, p_value=p, method="adf_test", n_obs=rows, clamped=clamped)


# --- lag-1 extremal dependence -------------------------------------------


def chi_lag1(series, q):
    """Share of exceedances of the empirical q-quantile followed by another exceedance."""
    x = np.asarray(series, dtype=float)
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0, 1), got {q}")
    threshold = np.quantile(x, q)
    exc = x > threshold
    lead = exc[:-1]
    den = int(lead.sum())
    if den == 0:
        raise NoExceedancesError(f"no exceedances of the {q} quantile among the first n-1 points")
    return float(np.count_nonzero(lead & exc[1:])) / den


# --- panel-level summaries -----------------------------------------------

CHI_LEVELS = (0.975, 0.98, 0.985, 0.99)


def _safe(test, *args):
    try:
        return test(*args).to_dict()
    except (DegenerateSeriesError, SeriesTooShortError, SingularDesignError) as exc:
        return {"error": exc.code, "message": str(exc)}


def diagnose_panel(panel, pooled=True, chi_levels=CHI_LEVELS, lowess_fraction=0.1, adf_lag=None):
    """
    Site-by-site diagnostics.

    Annual maxima from all runs are pooled (run after run) for the GEV
    trend fit. Runs and ADF tests use the pooled series when ``pooled``,
    otherwise one test per run. Lag-1 chi is computed per run on the
    deseasonalized daily series with years concatenated.

    Returns
    -------
    report : list of dict
        One entry per site.
    slopes : list of dict
        ``site, beta1, ci_low, ci_high`` rows.
    """
    S, R, T1, T2 = panel.dims
    maxima = yearly_maxima(panel)
    years = np.tile(np.arange(1, T1 + 1) + panel.origin_year - 1, R)
    daily = deseasonalize(panel, seasonal_profile(panel, lowess_fraction))

    report, slopes = [], []
    for i in range(S):
        pooled_max = maxima[i].ravel()
        entry = {"site": i + 1}
        try:
            gev = fit_gev_trend(pooled_max, years)
            entry["gev_trend"] = gev.to_dict()
            lo, hi = gev.beta1_ci
            slopes.append({"site": i + 1, "beta1": gev.beta1, "ci_low": lo, "ci_high": hi})
        except (SeriesTooShortError, SingularDesignError) as exc:
            entry["gev_trend"] = {"error": exc.code, "message": str(exc)}

        if pooled:
            entry["runs_test"] = _safe(runs_test, pooled_max)
            entry["adf_test"] = _safe(adf_test, pooled_max, adf_lag)
        else:
            entry["runs_test"] = [dict(run=r + 1, **_safe(runs_test, maxima[i, r])) for r in range(R)]
            entry["adf_test"] = [dict(run=r + 1, **_safe(adf_test, maxima[i, r], adf_lag)) for r in range(R)]

        chis = []
        for r in range(R):
            seq = daily[i, r].ravel()
            for q in chi_levels:
                try:
                    value = chi_lag1(seq, q)
                except NoExceedancesError:
                    value = None
                chis.append({"run": r + 1, "q": q, "chi": value})
        entry["chi_lag1"] = chis
        report.append(entry)
    return report, slopes
