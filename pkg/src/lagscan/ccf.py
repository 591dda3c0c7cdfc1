"""Sample cross-correlation over a lag window and white-noise significance bands.

Lag convention: ``r(lag)`` estimates ``corr(x[t], y[t + lag])``. A negative
lag therefore means the second series leads the first.

The estimator uses full-series means and divide-by-n moments (the usual
``ccf``/``acf`` convention)::

    r(lag) = sum_overlap (x[t] - xbar)(y[t+lag] - ybar) / sqrt(Sxx * Syy)

which is bounded by 1 in absolute value (Cauchy-Schwarz) up to rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import List, Sequence, Union

import numpy as np

from . import _kernels
from .errors import (
    CcfError,
    IndexMismatchError,
    LengthMismatchError,
    MaxLagError,
    TooShortError,
    ZeroVarianceError,
)
from .series import TimeSeries

BOUND_SLACK = 1e-9

SeriesLike = Union[TimeSeries, Sequence[float], np.ndarray]


class Sign(str, enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"


@dataclass(frozen=True, eq=False)
class CcfResult:
    lags: np.ndarray
    correlations: np.ndarray
    n: int
    threshold: float
    alpha: float

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=np.int64).reshape(-1)
        corr = np.asarray(self.correlations, dtype=np.float64).reshape(-1)
        if lags.shape != corr.shape:
            raise CcfError("lags and correlations differ in length")
        if lags.size == 0 or np.any(np.diff(lags) <= 0) or not np.array_equal(lags, -lags[::-1]):
            raise CcfError("lags must be strictly increasing and symmetric around 0")
        if np.any(np.abs(corr) > 1 + BOUND_SLACK) or not np.all(np.isfinite(corr)):
            raise CcfError("correlations must lie in [-1, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise CcfError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.n < 1 or self.threshold < 0:
            raise CcfError("n must be positive and threshold nonnegative")
        lags.flags.writeable = False
        corr.flags.writeable = False
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "correlations", corr)

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])

    def at(self, lag: int) -> float:
        return float(self.correlations[lag + self.max_lag])

    def argmax_abs(self) -> int:
        """Lag with the largest ``|r|`` (first one on ties)."""
        return int(self.lags[int(np.argmax(np.abs(self.correlations)))])


@dataclass(frozen=True)
class SignificantLag:
    lag: int
    correlation: float
    sign: Sign

    def label(self, ascii: bool = False) -> str:
        return f"{self.lag}{self.sign.value}" if ascii else f"{self.lag}^{self.sign.value}"


def normal_quantile(p: float) -> float:
    """Standard normal quantile.

    Delegates to :class:`statistics.NormalDist`, which implements Wichura's
    AS 241 rational approximation (relative accuracy about 1e-16).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    return NormalDist().inv_cdf(p)


def significance_threshold(n: int, alpha: float) -> float:
    """Half-width ``z_{1-alpha/2} / sqrt(n)`` of the white-noise band."""
    if not 0.0 < alpha < 1.0:
        raise CcfError(f"alpha must be in (0, 1), got {alpha}")
    if n < 1:
        raise CcfError(f"n must be >= 1, got {n}")
    return normal_quantile(1.0 - alpha / 2.0) / math.sqrt(n)


def _as_array(s: SeriesLike) -> np.ndarray:
    if isinstance(s, TimeSeries):
        return s.values
    return np.asarray(s, dtype=np.float64).reshape(-1)


def cross_correlation(x: SeriesLike, y: SeriesLike, max_lag: int, alpha: float = 0.1) -> CcfResult:
    """Cross-correlation of ``x`` and ``y`` for lags ``-max_lag..max_lag``."""
    if isinstance(x, TimeSeries) and isinstance(y, TimeSeries):
        if len(x) != len(y):
            raise LengthMismatchError(f"series lengths differ: {len(x)} vs {len(y)}")
        if x.frequency is not y.frequency or x.times != y.times:
            raise IndexMismatchError("series do not share identical time indices")
    xv = np.ascontiguousarray(_as_array(x))
    yv = np.ascontiguousarray(_as_array(y))
    n = xv.shape[0]
    if n != yv.shape[0]:
        raise LengthMismatchError(f"series lengths differ: {n} vs {yv.shape[0]}")
    if n < 3:
        raise TooShortError(f"cross-correlation needs at least 3 points, got {n}")
    if int(max_lag) != max_lag or max_lag < 1:
        raise MaxLagError(f"max_lag must be a positive integer, got {max_lag!r}")
    max_lag = int(max_lag)
    if max_lag > n - 2:
        raise MaxLagError(f"max_lag {max_lag} exceeds n - 2 = {n - 2}")
    if not (np.all(np.isfinite(xv)) and np.all(np.isfinite(yv))):
        raise CcfError("series contain non-finite values")
    for name, v in (("x", xv), ("y", yv)):
        if np.all(v == v[0]):
            raise ZeroVarianceError(f"{name} is constant; correlation undefined")
    threshold = significance_threshold(n, alpha)

    sxy, sxx, syy = _kernels.ccf_sums(xv, yv, max_lag)
    denom = math.sqrt(sxx * syy)
    if not denom > 0.0:
        raise ZeroVarianceError("sample variance underflows to zero")
    corr = np.asarray(sxy) / denom
    worst = float(np.max(np.abs(corr)))
    if worst > 1.0 + BOUND_SLACK:
        raise AssertionError(f"|r| = {worst!r} exceeds 1; estimator invariant broken")
    np.clip(corr, -1.0, 1.0, out=corr)
    return CcfResult(np.arange(-max_lag, max_lag + 1), corr, n, threshold, alpha)


def significant_lags(r: CcfResult) -> List[SignificantLag]:
    """Lags whose ``|r|`` strictly exceeds the band, ascending by lag."""
    out = []
    for lag, c in zip(r.lags, r.correlations):
        if abs(c) > r.threshold:
            out.append(SignificantLag(int(lag), float(c), Sign.POSITIVE if c > 0 else Sign.NEGATIVE))
    return out
