"""
LOWESS: locally weighted linear regression with tricube weights
and bisquare robustness iterations (Cleveland 1979).
"""

import numpy as np

from .errors import LengthMismatchError


def _tricube(d):
    d = np.clip(np.abs(d), 0.0, 1.0)
    return (1.0 - d**3) ** 3


def _bisquare(d):
    d = np.clip(np.abs(d), 0.0, 1.0)
    return (1.0 - d**2) ** 2


def _local_linear(xs, ys, x0, w):
    """Weighted least-squares line through (xs, ys) evaluated at x0."""
    sw = w.sum()
    if sw <= 0:
        return np.nan
    xbar = np.dot(w, xs) / sw
    ybar = np.dot(w, ys) / sw
    dx = xs - xbar
    sxx = np.dot(w, dx * dx)
    # Relative cutoff guards against a numerically flat neighbourhood.
    if sxx <= 1e-12 * max(1.0, np.dot(w, xs * xs)):
        return ybar
    slope = np.dot(w, dx * (ys - ybar)) / sxx
    return ybar + slope * (x0 - xbar)


def lowess_smooth(x, y, frac=0.1, iterations=3):
    """
    Smooth ``y`` against ``x`` with LOWESS.

    Parameters
    ----------
    x, y : array_like, shape (n,)
        Design points and responses. ``x`` need not be sorted.
    frac : float
        Fraction of points in each local neighbourhood, in (0, 1].
    iterations : int
        Number of robustness reweighting passes after the initial fit.

    Returns
    -------
    ndarray, shape (n,)
        Fitted values at each ``x``, in the input order.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatchError("x and y must be 1-d arrays of equal length")
    if not 0.0 < frac <= 1.0:
        raise ValueError(f"frac must be in (0, 1], got {frac}")
    n = x.size
    if n == 0:
        return np.empty(0)
    k = min(n, max(2, int(frac * n + 1e-10)))

    dist = np.abs(x[:, None] - x[None, :])
    h = np.partition(dist, k - 1, axis=1)[:, k - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(h[:, None] > 0, dist / h[:, None], np.where(dist == 0, 0.0, 1.0))
    base_w = _tricube(scaled)

    robust = np.ones(n)
    fitted = np.empty(n)
    for it in range(iterations + 1):
        w_all = base_w * robust[None, :]
        for i in range(n):
            fitted[i] = _local_linear(x, y, x[i], w_all[i])
        if it == iterations:
            break
        resid = y - fitted
        s = np.median(np.abs(resid))
        if s <= 0:
            break
        robust = _bisquare(resid / (6.0 * s))
    return fitted
