"""Simple linear regression with diagnostics, and nearest-neighbour spread samples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import betainc

from .symbolize import UndefinedStatistic


class DegenerateSample(ValueError):
    """Too few points, or no spread in x."""


@dataclass(frozen=True)
class Sample:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError("x and y differ in length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "Sample":
        pairs = list(pairs)
        if not pairs:
            return cls(np.empty(0), np.empty(0))
        xs, ys = zip(*pairs)
        return cls(np.array(xs), np.array(ys))

    def __len__(self):
        return len(self.x)


def _as_sample(sample) -> Sample:
    if isinstance(sample, Sample):
        return sample
    if isinstance(sample, tuple) and len(sample) == 2 and np.ndim(sample[0]) == 1:
        return Sample(sample[0], sample[1])
    return Sample.from_pairs(sample)


REPORT_FIELDS = (
    "n", "intercept", "slope", "r_squared", "se", "s", "slope_se",
    "f_stat", "f_ratio_total", "p_value", "durbin_watson", "x_mean", "sxx",
)


@dataclass
class RegressionReport:
    """Least-squares fit ``y ~ intercept + slope * x``.

    ``se`` is sqrt(SS_R / n) (no degrees-of-freedom correction); ``s`` is
    sqrt(SS_R / (n - 2)) and drives intervals and bands.  ``f_stat`` is the
    usual overall F, MS_regression / MS_residual; ``f_ratio_total`` is the
    ratio of total to residual mean squares, (SS/(n-1)) / (SS_R/(n-2)).
    ``durbin_watson`` is NaN when every residual is exactly zero.
    """

    n: int
    intercept: float
    slope: float
    r_squared: float
    se: float
    s: float
    slope_se: float
    f_stat: float
    f_ratio_total: float
    p_value: float
    durbin_watson: float
    x_mean: float
    sxx: float
    residuals: np.ndarray = field(repr=False)

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=float)

    def root_predict(self, x):
        """sqrt of the fitted value, clamped at 0 where the line is negative."""
        return np.sqrt(np.maximum(0.0, self.predict(x)))

    def slope_interval(self, level: float = 0.95) -> tuple[float, float]:
        half = t_quantile((1.0 + level) / 2.0, self.n - 2) * self.slope_se
        return self.slope - half, self.slope + half

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}

    def to_text(self, prefix: str = "") -> str:
        return "".join(f"{prefix}{k}={_fmt(v)}\n" for k, v in self.as_dict().items())

    def csv_row(self) -> str:
        return ",".join(_fmt(v) for v in self.as_dict().values())


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.9g}"


def pearson_r(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0:
        raise UndefinedStatistic("correlation undefined for a constant variable")
    return float(dx @ dy) / denom


def linfit(sample) -> RegressionReport:
    """Ordinary least squares with intercept and the full diagnostic set.

    Raises DegenerateSample for fewer than 3 points or constant x.  When y is
    constant, R^2 is reported as 0.
    """
    sample = _as_sample(sample)
    x, y = sample.x, sample.y
    n = len(x)
    if n < 3:
        raise DegenerateSample(f"need at least 3 points, got {n}")
    x_mean = float(x.mean())
    y_mean = float(y.mean())
    dx = x - x_mean
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateSample("all x values are identical")
    slope = float(dx @ (y - y_mean)) / sxx
    intercept = y_mean - slope * x_mean
    residuals = y - (intercept + slope * x)
    ss_res = float(residuals @ residuals)
    dy = y - y_mean
    ss_tot = float(dy @ dy)

    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    df = n - 2
    mse = ss_res / df
    s = math.sqrt(mse)
    if ss_res > 0:
        f_stat = max(ss_tot - ss_res, 0.0) / mse
        f_ratio = (ss_tot / (n - 1)) / mse
        p_value = f_survival(f_stat, 1, df)
        dw = durbin_watson(residuals)
    else:
        f_stat = f_ratio = math.inf if ss_tot > 0 else math.nan
        p_value = 0.0 if ss_tot > 0 else 1.0
        dw = math.nan
    return RegressionReport(
        n=n, intercept=intercept, slope=slope, r_squared=r_squared,
        se=math.sqrt(ss_res / n), s=s, slope_se=s / math.sqrt(sxx),
        f_stat=f_stat, f_ratio_total=f_ratio, p_value=p_value,
        durbin_watson=dw, x_mean=x_mean, sxx=sxx, residuals=residuals,
    )


def durbin_watson(residuals: Sequence[float]) -> float:
    e = np.asarray(residuals, dtype=float)
    if e.size < 2:
        raise ValueError("Durbin-Watson needs at least 2 residuals")
    denom = float(e @ e)
    if denom == 0.0:
        raise UndefinedStatistic("Durbin-Watson undefined for all-zero residuals")
    diff = np.diff(e)
    return float(diff @ diff) / denom


def confidence_band(report: RegressionReport, x, level: float = 0.95, sample=None):
    """Pointwise confidence limits of the regression line at ``x``.

    ``sample`` is accepted for symmetry with :func:`linfit`; everything
    needed is already in the report.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    x = np.asarray(x, dtype=float)
    t = t_quantile((1.0 + level) / 2.0, report.n - 2)
    half = t * report.s * np.sqrt(1.0 / report.n + (x - report.x_mean) ** 2 / report.sxx)
    fit = report.predict(x)
    return fit - half, fit + half


# -- distributions ----------------------------------------------------------

def f_survival(f: float, d1: float, d2: float) -> float:
    """P(F > f) for F ~ F(d1, d2)."""
    if d1 <= 0 or d2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isnan(f) or f < 0:
        raise ValueError(f"F statistic must be >= 0, got {f!r}")
    if math.isinf(f):
        return 0.0
    return float(betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)))


def t_cdf(t: float, df: float) -> float:
    x = df / (df + t * t)
    tail = 0.5 * float(betainc(df / 2.0, 0.5, x))
    return 1.0 - tail if t >= 0 else tail


def t_quantile(q: float, df: float) -> float:
    """Student-t quantile by bisection on :func:`t_cdf`."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q!r}")
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -t_quantile(1.0 - q, df)
    hi = 1.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- nearest-neighbour spread ----------------------------------------------

def _left_windows(x: np.ndarray, k: int):
    """For each point, indices of the k points ending at it in (x, index) order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    order = np.lexsort((np.arange(len(x)), x))
    for pos, i in enumerate(order):
        yield i, order[max(0, pos - k + 1):pos + 1]


def nn_spread_z(sample, k: int = 7) -> Sample:
    """z_i = y_i - min of y over the k nearest points with x_j <= x_i.

    The neighbourhood is the point itself plus its k-1 predecessors when the
    sample is sorted by x with ties kept in original order.
    """
    sample = _as_sample(sample)
    z = np.empty(len(sample))
    for i, window in _left_windows(sample.x, k):
        z[i] = sample.y[i] - sample.y[window].min()
    return Sample(sample.x.copy(), z)


def nn_spread_w(sample, k: int = 7) -> Sample:
    """w_i = max - min of y over the same neighbourhood as :func:`nn_spread_z`."""
    sample = _as_sample(sample)
    w = np.empty(len(sample))
    for i, window in _left_windows(sample.x, k):
        ys = sample.y[window]
        w[i] = ys.max() - ys.min()
    return Sample(sample.x.copy(), w)


def sqrt_model_fit(sample) -> RegressionReport:
    """Fit w^2 linearly in x; ``report.root_predict`` gives the spread itself."""
    sample = _as_sample(sample)
    if (sample.y < 0).any():
        raise ValueError("spreads must be non-negative")
    return linfit(Sample(sample.x, sample.y ** 2))


def trend_test(x, y) -> tuple[float, float]:
    """One-sided test for an increasing linear trend: (slope, p-value)."""
    report = linfit(Sample(x, y))
    if report.s == 0:
        return report.slope, 0.0 if report.slope > 0 else 1.0
    t = report.slope / report.slope_se
    return report.slope, t_cdf(-t, report.n - 2)
