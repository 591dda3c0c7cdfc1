"""Time-series value type and the transforms applied before correlation.

All functions here are pure: they return new :class:`TimeSeries` objects and
never mutate their input. Value arrays are stored read-only.
"""

from __future__ import annotations

import datetime as _dt
import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import (
    EmptySeriesError,
    FrequencyMismatchError,
    GapError,
    InvalidSeriesError,
    NonPositiveValueError,
    PreprocessError,
    TooShortError,
)

WeekIndex = Tuple[int, int]
TimeIndex = Union[int, WeekIndex]

# years with fewer weekly observations than this get a note on aggregation
PARTIAL_YEAR_WEEKS = 26


class Frequency(str, enum.Enum):
    WEEKLY = "weekly"
    ANNUAL = "annual"


class Aggregation(str, enum.Enum):
    ANNUAL_MEAN = "annual-mean"
    NONE = "none"


class TransformOrder(str, enum.Enum):
    LOG_THEN_DIFFERENCE = "log-then-difference"
    DIFFERENCE_THEN_LOG = "difference-then-log"
    DIFFERENCE_ONLY = "difference-only"


def _check_week(year: int, week: int) -> None:
    try:
        _dt.date.fromisocalendar(year, week, 1)
    except ValueError as exc:
        raise InvalidSeriesError(f"invalid ISO week {year}-W{week:02d}") from exc


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Ordered, timestamped, finite real observations at a declared frequency.

    ``times`` holds ISO years (annual) or ``(year, iso_week)`` tuples (weekly).
    """

    frequency: Frequency
    times: tuple
    values: np.ndarray
    notes: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        freq = Frequency(self.frequency)
        object.__setattr__(self, "frequency", freq)
        times = tuple(self.times)
        if freq is Frequency.ANNUAL:
            times = tuple(int(t) for t in times)
        else:
            times = tuple((int(t[0]), int(t[1])) for t in times)
            for y, w in times:
                _check_week(y, w)
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if len(times) == 0:
            raise EmptySeriesError("time series must contain at least one point")
        if len(times) != values.shape[0]:
            raise InvalidSeriesError(
                f"{len(times)} time indices but {values.shape[0]} values"
            )
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            i = int(bad[0])
            raise InvalidSeriesError(f"non-finite value {values[i]!r} at index {i}")
        for i in range(1, len(times)):
            if not times[i - 1] < times[i]:
                raise InvalidSeriesError(
                    f"time indices must be strictly increasing: {times[i - 1]!r} then {times[i]!r} at index {i}"
                )
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "notes", tuple(self.notes))

    @classmethod
    def annual(cls, values: Sequence[float], start: int = 2004) -> "TimeSeries":
        return cls(Frequency.ANNUAL, range(start, start + len(values)), values)

    @classmethod
    def from_pairs(cls, frequency, pairs: Iterable[tuple]) -> "TimeSeries":
        pairs = list(pairs)
        return cls(frequency, [p[0] for p in pairs], [p[1] for p in pairs])

    def __len__(self) -> int:
        return len(self.times)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.frequency is other.frequency
            and self.times == other.times
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.frequency, self.times, self.values.tobytes()))

    def __repr__(self) -> str:
        head = ", ".join(f"{t}: {v:g}" for t, v in list(zip(self.times, self.values))[:4])
        more = ", ..." if len(self) > 4 else ""
        return f"TimeSeries({self.frequency.value}, n={len(self)}, [{head}{more}])"

    def points(self) -> list:
        return [(t, float(v)) for t, v in zip(self.times, self.values)]

    def years(self) -> list:
        if self.frequency is Frequency.ANNUAL:
            return list(self.times)
        return sorted({t[0] for t in self.times})

    def with_values(self, values, times=None, notes=None) -> "TimeSeries":
        return TimeSeries(
            self.frequency,
            self.times if times is None else times,
            values,
            self.notes if notes is None else notes,
        )


@dataclass(frozen=True)
class PreprocessSpec:
    aggregation: Aggregation = Aggregation.NONE
    order: TransformOrder = TransformOrder.LOG_THEN_DIFFERENCE

    def __post_init__(self):
        object.__setattr__(self, "aggregation", Aggregation(self.aggregation))
        object.__setattr__(self, "order", TransformOrder(self.order))

    @classmethod
    def for_frequency(cls, frequency, order=TransformOrder.LOG_THEN_DIFFERENCE) -> "PreprocessSpec":
        """Default: weekly input is averaged to annual, annual input is left alone."""
        agg = Aggregation.ANNUAL_MEAN if Frequency(frequency) is Frequency.WEEKLY else Aggregation.NONE
        return cls(agg, order)

    def describe(self) -> str:
        return f"{self.aggregation.value}/{self.order.value}"


def aggregate_annual_mean(s: TimeSeries) -> TimeSeries:
    """Average weekly values into one point per calendar (ISO) year.

    Partial years are averaged over the weeks present; a note is attached
    for any year with fewer than 26 weeks.
    """
    if s.frequency is not Frequency.WEEKLY:
        raise FrequencyMismatchError("annual-mean aggregation needs weekly input, got annual")
    groups: dict = {}
    for (year, _week), v in zip(s.times, s.values):
        groups.setdefault(year, []).append(float(v))
    years = sorted(groups)
    means = [math.fsum(groups[y]) / len(groups[y]) for y in years]
    notes = list(s.notes)
    for y in years:
        if len(groups[y]) < PARTIAL_YEAR_WEEKS:
            notes.append(f"year {y}: mean of only {len(groups[y])} weekly values")
    return TimeSeries(Frequency.ANNUAL, years, means, tuple(notes))


def check_contiguous(s: TimeSeries) -> None:
    """Reject annual series with missing interior years."""
    if s.frequency is not Frequency.ANNUAL:
        return
    for prev, cur in zip(s.times, s.times[1:]):
        if cur != prev + 1:
            raise GapError(f"missing year(s) between {prev} and {cur}")


def difference(s: TimeSeries) -> TimeSeries:
    """First differences, each stamped with the later period's index."""
    if len(s) < 2:
        raise TooShortError(f"differencing needs at least 2 points, got {len(s)}")
    check_contiguous(s)
    return s.with_values(np.diff(s.values), times=s.times[1:])


def log_transform(s: TimeSeries) -> TimeSeries:
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        i = int(bad[0])
        raise NonPositiveValueError(i, float(s.values[i]))
    return s.with_values(np.log(s.values))


def restrict_years(s: TimeSeries, first: int, last: int) -> TimeSeries:
    """Keep only points whose calendar year lies in ``[first, last]``."""
    year_of = (lambda t: t) if s.frequency is Frequency.ANNUAL else (lambda t: t[0])
    keep = [i for i, t in enumerate(s.times) if first <= year_of(t) <= last]
    if not keep:
        raise EmptySeriesError(f"no observations between {first} and {last}")
    return s.with_values(s.values[keep], times=[s.times[i] for i in keep])


def preprocess(s: TimeSeries, spec: PreprocessSpec) -> TimeSeries:
    """Aggregate (if requested) then apply the transform chain in order.

    Failures are re-raised as :class:`PreprocessError` carrying the stage.
    """
    out = s
    if spec.aggregation is Aggregation.ANNUAL_MEAN:
        out = _stage("aggregate", aggregate_annual_mean, out)
    _stage("validate", check_contiguous, out)
    if spec.order is TransformOrder.LOG_THEN_DIFFERENCE:
        steps = (("log", log_transform), ("difference", difference))
    elif spec.order is TransformOrder.DIFFERENCE_THEN_LOG:
        steps = (("difference", difference), ("log", log_transform))
    else:
        steps = (("difference", difference),)
    for name, fn in steps:
        out = _stage(name, fn, out)
    return out


def _stage(name, fn, s):
    try:
        result = fn(s)
    except PreprocessError:
        raise
    except Exception as exc:
        if not isinstance(exc, ValueError):
            raise
        raise PreprocessError(name, exc) from exc
    return s if result is None else result
