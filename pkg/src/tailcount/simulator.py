"""
Synthetic regularly varying panels with known tail index.

Marginals are Pareto(alpha) on [1, inf), so P(Y > u) = u**(-alpha)
exactly for u >= 1 and the power-law regression is correctly specified.
The common-factor mixture ``W**w * V**(1 - w)`` has marginal tail index
``alpha / max(w, 1 - w)``; it equals ``alpha`` only for w in {0, 1}.
Each (run, year) block draws from its own stream, derived from the seed
and the block position, so generation order does not matter.
"""

from dataclasses import asdict, dataclass
import json

import numpy as np
from scipy import stats

from .counting import SINGLE_DAY
from .errors import InvalidConfigError, UnsupportedConfigError
from .panel import DailyPanel

DEPENDENCE = ("comonotone", "independent", "common_factor")


@dataclass(frozen=True)
class SimConfig:
    dims: tuple = (25, 4, 165, 365)
    alpha: float = 6.0
    dependence: str = "comonotone"
    factor_weight: float = 0.5
    seasonal_amplitude: float = 0.0
    trend_slope: float = 0.0
    seed: int = 0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) != 4 or min(dims) < 1:
            raise InvalidConfigError(f"dims must be four positive integers, got {self.dims}")
        if not self.alpha > 0:
            raise InvalidConfigError(f"alpha must be > 0, got {self.alpha}")
        if self.dependence not in DEPENDENCE:
            raise InvalidConfigError(f"dependence must be one of {DEPENDENCE}, got {self.dependence!r}")
        if not 0.0 <= self.factor_weight <= 1.0:
            raise InvalidConfigError(f"factor_weight must be in [0, 1], got {self.factor_weight}")
        if not 0.0 <= self.seasonal_amplitude <= 1.0:
            # Larger amplitudes would make the multiplicative factor negative.
            raise InvalidConfigError(f"seasonal_amplitude must be in [0, 1], got {self.seasonal_amplitude}")
        if self.seed < 0:
            raise InvalidConfigError(f"seed must be nonnegative, got {self.seed}")

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"invalid simulation config JSON: {exc}") from exc
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidConfigError(f"unknown simulation config keys: {sorted(unknown)}")
        return cls(**d)

    def to_json(self):
        d = asdict(self)
        d["dims"] = list(self.dims)
        return json.dumps(d, indent=2)


def _pareto(rng, alpha, size):
    # Inverse CDF on (0, 1]; 1 - random() avoids a zero base.
    return (1.0 - rng.random(size)) ** (-1.0 / alpha)


def _block(cfg, rng):
    S, _, _, T2 = cfg.dims
    if cfg.dependence == "comonotone":
        w = _pareto(rng, cfg.alpha, T2)
        return np.broadcast_to(w, (S, T2)).copy()
    if cfg.dependence == "independent":
        return _pareto(rng, cfg.alpha, (S, T2))
    w = _pareto(rng, cfg.alpha, T2)
    v = _pareto(rng, cfg.alpha, (S, T2))
    return w ** cfg.factor_weight * v ** (1.0 - cfg.factor_weight)


def simulate_panel(cfg):
    """Draw a :class:`DailyPanel` according to ``cfg``."""
    S, R, T1, T2 = cfg.dims
    values = np.empty((S, R, T1, T2))
    for r in range(R):
        for t in range(T1):
            rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(r, t)))
            values[:, r, t, :] = _block(cfg, rng)
    if cfg.seasonal_amplitude:
        day = np.arange(1, T2 + 1)
        values *= 1.0 + cfg.seasonal_amplitude * np.sin(2.0 * np.pi * day / T2)
    if cfg.trend_slope:
        year = np.arange(1, T1 + 1)
        values += cfg.trend_slope * (year / T1)[None, None, :, None]
    if np.any(values < 0):
        raise InvalidConfigError("trend_slope drives simulated values below zero")
    return DailyPanel(values)


def true_expected_count(cfg, spec):
    """
    Exact expected single-day count of ``spec`` under ``cfg``.

    Available for homogeneous comonotone and independent panels only.
    """
    if cfg.seasonal_amplitude or cfg.trend_slope:
        raise UnsupportedConfigError("analytic counts assume no seasonality and no trend")
    if spec.temporal != SINGLE_DAY:
        raise UnsupportedConfigError("no closed form for run events")
    if cfg.dependence not in ("comonotone", "independent"):
        raise UnsupportedConfigError(f"no closed form for {cfg.dependence} dependence")
    if spec.u is None:
        raise ValueError("spec needs a threshold")
    S, R, T1, T2 = cfg.dims
    m = spec.n_required(S)
    n_days = R * T1 * T2
    p = min(1.0, spec.u ** (-cfg.alpha))
    if cfg.dependence == "comonotone":
        return n_days * p
    # P(Binomial(S, p) >= m)
    return n_days * float(stats.binom.sf(m - 1, S, p))
