"""
Power-law tail regression of empirical counts on thresholds.

Under regular variation the expected count of a tail event above ``u``
behaves like ``C * u**(-alpha)``, so ``log Z`` is linear in ``log u``:

    log Z_l = c_prime + alpha_prime * log u_l,   C = exp(c_prime), alpha = -alpha_prime
"""

from dataclasses import asdict, dataclass
import json
import math

import numpy as np

from .errors import DegenerateDesignError, NonpositiveThresholdError, TooFewPointsError

FIT_KEYS = (
    "c_prime",
    "alpha_prime",
    "se_c_prime",
    "se_alpha_prime",
    "r_squared",
    "n_used",
    "dropped_zero_counts",
)


@dataclass(frozen=True)
class PowerLawFit:
    c_prime: float
    alpha_prime: float
    se_c_prime: float
    se_alpha_prime: float
    r_squared: float
    n_used: int
    dropped_zero_counts: int

    @property
    def alpha(self):
        return -self.alpha_prime

    @property
    def scale(self):
        return math.exp(self.c_prime)

    def to_dict(self):
        d = asdict(self)
        return {k: d[k] for k in FIT_KEYS}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d[k] for k in FIT_KEYS})


def _ols_line(x, y):
    """Intercept, slope, their standard errors and R^2 for y ~ 1 + x."""
    n = x.size
    xbar = x.mean()
    ybar = y.mean()
    dx = x - xbar
    sxx = np.dot(dx, dx)
    if not sxx > 0:
        raise DegenerateDesignError("all thresholds are equal on the log scale")
    slope = np.dot(dx, y - ybar) / sxx
    intercept = ybar - slope * xbar
    resid = y - (intercept + slope * x)
    rss = float(np.dot(resid, resid))
    tss = float(np.dot(y - ybar, y - ybar))
    s2 = rss / (n - 2)
    se_slope = math.sqrt(s2 / sxx)
    se_intercept = math.sqrt(s2 * (1.0 / n + xbar**2 / sxx))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    return intercept, slope, se_intercept, se_slope, min(max(r2, 0.0), 1.0)


def fit_power_law(series):
    """
    Ordinary least squares of ``log Z`` on ``log u``.

    Thresholds with zero count are dropped before taking logs; the number
    dropped is recorded on the fit.

    Raises
    ------
    TooFewPointsError
        Fewer than three positive counts.
    DegenerateDesignError
        All retained thresholds coincide.
    """
    u = np.asarray(series.thresholds, dtype=float)
    z = np.asarray(series.counts, dtype=float)
    keep = z > 0
    n = int(keep.sum())
    if n < 3:
        raise TooFewPointsError(f"need at least 3 thresholds with positive counts, got {n}")
    if np.any(u[keep] <= 0):
        raise NonpositiveThresholdError("thresholds must be > 0")
    c, a, se_c, se_a, r2 = _ols_line(np.log(u[keep]), np.log(z[keep]))
    return PowerLawFit(
        c_prime=float(c),
        alpha_prime=float(a),
        se_c_prime=float(se_c),
        se_alpha_prime=float(se_a),
        r_squared=float(r2),
        n_used=n,
        dropped_zero_counts=int(keep.size - n),
    )


def predict_count(fit, u_target):
    """Extrapolated expected count ``exp(c_prime) * u_target**alpha_prime``."""
    if not u_target > 0:
        raise NonpositiveThresholdError(f"u_target must be > 0, got {u_target}")
    return math.exp(fit.c_prime + fit.alpha_prime * math.log(u_target))


def goodness_report(fit, series):
    """
    Per-threshold fitted values and log-scale residuals.

    Returns a dict of equal-length arrays ``u``, ``count``, ``log_u``,
    ``log_count``, ``fitted_log_count``, ``residual`` (NaN where the count
    is zero) together with the scalar ``r_squared`` recomputed over the
    retained points.
    """
    u = np.asarray(series.thresholds, dtype=float)
    z = np.asarray(series.counts, dtype=float)
    log_u = np.log(u)
    fitted = fit.c_prime + fit.alpha_prime * log_u
    with np.errstate(divide="ignore"):
        log_z = np.where(z > 0, np.log(np.where(z > 0, z, 1.0)), np.nan)
    resid = log_z - fitted
    keep = z > 0
    rss = float(np.sum(resid[keep] ** 2))
    tss = float(np.sum((log_z[keep] - log_z[keep].mean()) ** 2))
    return {
        "u": u,
        "count": z,
        "log_u": log_u,
        "log_count": log_z,
        "fitted_log_count": fitted,
        "residual": resid,
        "r_squared": 1.0 - rss / tss if tss > 0 else 1.0,
    }
