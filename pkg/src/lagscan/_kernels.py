"""Hot numeric kernels.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with the same contract. The numba path is used when numba imports
and ``LAGSCAN_DISABLE_NUMBA`` is unset (or ``0``); set it to ``1`` to force
the numpy path, e.g. for debugging or on platforms without LLVM.

Both paths accumulate each lag's products in ascending index order of the
first argument, so swapping the arguments and negating the lag reproduces
the same floating-point result bit for bit.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = "LAGSCAN_DISABLE_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() not in ("", "0", "false", "no")


try:
    if _numba_disabled():
        raise ImportError(f"{_FLAG} is set")
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return decorator


def ccf_sums_numpy(x: np.ndarray, y: np.ndarray, max_lag: int):
    """Centered cross-products per lag plus the two centered sums of squares.

    Returns ``(sxy, sxx, syy)`` where ``sxy[j]`` is the sum over the overlap
    of ``(x[t] - mean x) * (y[t + lag] - mean y)`` for ``lag = j - max_lag``.
    """
    n = x.shape[0]
    xc = x - x.mean()
    yc = y - y.mean()
    sxy = np.empty(2 * max_lag + 1)
    for j, lag in enumerate(range(-max_lag, max_lag + 1)):
        if lag >= 0:
            sxy[j] = np.dot(xc[: n - lag], yc[lag:])
        else:
            sxy[j] = np.dot(xc[-lag:], yc[: n + lag])
    return sxy, float(np.dot(xc, xc)), float(np.dot(yc, yc))


@njit(cache=True, nogil=True)
def ccf_sums_numba(x, y, max_lag):
    n = x.shape[0]
    mx = 0.0
    my = 0.0
    for t in range(n):
        mx += x[t]
        my += y[t]
    mx /= n
    my /= n
    xc = np.empty(n)
    yc = np.empty(n)
    sxx = 0.0
    syy = 0.0
    for t in range(n):
        xc[t] = x[t] - mx
        yc[t] = y[t] - my
        sxx += xc[t] * xc[t]
        syy += yc[t] * yc[t]
    sxy = np.empty(2 * max_lag + 1)
    for j in range(2 * max_lag + 1):
        lag = j - max_lag
        acc = 0.0
        if lag >= 0:
            for t in range(n - lag):
                acc += xc[t] * yc[t + lag]
        else:
            for t in range(-lag, n):
                acc += xc[t] * yc[t + lag]
        sxy[j] = acc
    return sxy, sxx, syy


def backend() -> str:
    return "numba" if NUMBA_AVAILABLE else "numpy"


def ccf_sums(x: np.ndarray, y: np.ndarray, max_lag: int):
    if NUMBA_AVAILABLE:
        return ccf_sums_numba(x, y, max_lag)
    return ccf_sums_numpy(x, y, max_lag)
