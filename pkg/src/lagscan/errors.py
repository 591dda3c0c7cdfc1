"""Exception hierarchy.

Everything raised on bad data derives from :class:`LagscanError` so callers
(and the CLI) can separate data problems from programming errors.
"""

from __future__ import annotations


class LagscanError(ValueError):
    """Base class for data, configuration and precondition failures."""


# -- series_core -------------------------------------------------------------

class SeriesError(LagscanError):
    pass


class EmptySeriesError(SeriesError):
    pass


class FrequencyMismatchError(SeriesError):
    pass


class TooShortError(SeriesError):
    pass


class InvalidSeriesError(SeriesError):
    """Non-finite value or non-increasing time index."""


class GapError(SeriesError):
    """Annual series with a missing interior year."""


class NonPositiveValueError(SeriesError):
    def __init__(self, index: int, value: float, message: str | None = None):
        self.index = index
        self.value = value
        super().__init__(message or f"value {value!r} at index {index} is not strictly positive; log undefined")


class PreprocessError(SeriesError):
    """A component failure inside :func:`lagscan.series.preprocess`, labelled by stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


# -- ccf_engine --------------------------------------------------------------

class CcfError(LagscanError):
    pass


class LengthMismatchError(CcfError):
    pass


class IndexMismatchError(CcfError):
    pass


class ZeroVarianceError(CcfError):
    pass


class MaxLagError(CcfError):
    pass


# -- ingest / screening ------------------------------------------------------

class IngestError(LagscanError):
    """File-level failure. ``kind`` is a stable machine-readable tag."""

    def __init__(self, kind: str, message: str, *, path=None, row: int | None = None):
        self.kind = kind
        self.path = path
        self.row = row
        where = ""
        if path is not None:
            where += f"{path}"
        if row is not None:
            where += f" row {row}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigError(LagscanError):
    """Schema problem in a run config; ``key`` names the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key {key!r}: {message}")


class PairError(LagscanError):
    """A word x cohort pair failed alignment or CCF preconditions."""

    def __init__(self, word: str, cohort: str, cause: Exception):
        self.word = word
        self.cohort = cohort
        self.cause = cause
        super().__init__(f"pair ({word}, {cohort}): {cause}")
