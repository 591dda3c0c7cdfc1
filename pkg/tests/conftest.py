from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
STUDY_CONFIG = ROOT / "fixtures" / "study" / "study.toml"
ERROR_FIXTURES = ROOT / "tests" / "data" / "errors"


@pytest.fixture
def study_config():
    return STUDY_CONFIG


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel path."""
    from lagscan import _kernels

    if request.param == "numba":
        if not _kernels.NUMBA_AVAILABLE:
            pytest.skip("numba path disabled or unavailable")
    else:
        monkeypatch.setattr(_kernels, "NUMBA_AVAILABLE", False)
    return request.param


def normal_cdf(z):
    import math

    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def bisect_quantile(p, lo=-40.0, hi=40.0):
    """Independent normal quantile by bisection on erfc.

    The upper half solves on the survival function so tail digits survive.
    """
    import math

    if p > 0.5:
        q = 1.0 - p
        below = lambda z: 0.5 * math.erfc(z / math.sqrt(2.0)) > q
    else:
        below = lambda z: normal_cdf(z) < p
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if below(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
