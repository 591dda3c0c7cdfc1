"""CSV series files and TOML run configs.

Series CSV
    UTF-8 (a BOM is tolerated), comma separated, LF or CRLF line endings,
    one header row. Annual time cells look like ``2004``; weekly cells are
    ISO weeks like ``2004-W03``. Values are plain decimals with optional
    exponent (``12.5``, ``-3``, ``1.2e-3``); thousands separators, ``nan``
    and ``inf`` are rejected. Row numbers in errors are file line numbers,
    the header being row 1. Blank lines are ignored.

Run config (TOML)::

    alpha = 0.1                 # optional, in (0, 1)
    max_lag = 3                 # optional, positive integer
    correction = "none"         # optional, "none" | "bonferroni"
    skip_on_error = false       # optional

    [transform_order]           # optional, per group
    words = "log-then-difference"
    cohorts = "log-then-difference"

    [[words]]                   # one table per series, at least one
    name = "hate"
    path = "words/hate.csv"     # relative to the config file
    frequency = "weekly"        # "weekly" | "annual"
    time_column = "week"        # optional, default: first column
    value_column = "value"      # optional, default: second column

    [[cohorts]]
    ...

Unknown keys anywhere are errors.
"""

from __future__ import annotations

import csv
import datetime as _dt
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .errors import ConfigError, IngestError, LagscanError
from .screening import Correction, ScreenConfig
from .series import Aggregation, Frequency, PreprocessSpec, TimeSeries, TransformOrder

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_YEAR = re.compile(r"(\d{4})")
_WEEK = re.compile(r"(\d{4})-W(\d{2})")

TOP_KEYS = {"alpha", "max_lag", "correction", "skip_on_error", "transform_order", "words", "cohorts"}
SERIES_KEYS = {"name", "path", "frequency", "time_column", "value_column"}
GROUPS = ("words", "cohorts")


@dataclass(frozen=True)
class SeriesFileSpec:
    path: Path
    name: str
    frequency: Optional[Frequency] = None
    time_column: Optional[str] = None
    value_column: Optional[str] = None

    def __post_init__(self):
        if not self.name:
            raise ConfigError("name", "series name must be nonempty")
        object.__setattr__(self, "path", Path(self.path))
        if self.frequency is not None:
            object.__setattr__(self, "frequency", Frequency(self.frequency))


def parse_value(text: str) -> float:
    t = text.strip()
    if not _NUMBER.fullmatch(t):
        raise ValueError(f"not a decimal number: {text!r}")
    v = float(t)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"value out of range: {text!r}")
    return v


def parse_time(text: str, frequency: Frequency):
    t = text.strip()
    if frequency is Frequency.ANNUAL:
        if not _YEAR.fullmatch(t):
            raise ValueError(f"expected a year like 2004, got {text!r}")
        return int(t)
    m = _WEEK.fullmatch(t)
    if not m:
        raise ValueError(f"expected an ISO week like 2004-W03, got {text!r}")
    year, week = int(m.group(1)), int(m.group(2))
    try:
        _dt.date.fromisocalendar(year, week, 1)
    except ValueError:
        raise ValueError(f"{text!r} is not a valid ISO week") from None
    return (year, week)


def infer_frequency(text: str) -> Frequency:
    t = text.strip()
    if _WEEK.fullmatch(t):
        return Frequency.WEEKLY
    if _YEAR.fullmatch(t):
        return Frequency.ANNUAL
    raise ValueError(f"cannot infer frequency from time cell {text!r}")


def read_series(spec: SeriesFileSpec) -> TimeSeries:
    path = spec.path
    if not path.is_file():
        raise IngestError("missing-file", "file not found", path=path)
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    except UnicodeDecodeError as exc:
        raise IngestError("unparseable-value", f"not UTF-8 text ({exc.reason})", path=path) from None
    except csv.Error as exc:
        raise IngestError("unparseable-value", f"malformed CSV: {exc}", path=path) from None
    if not rows:
        raise IngestError("empty-file", "no header row", path=path)
    _, header = rows[0]
    header = [h.strip() for h in header]
    data = rows[1:]
    if not data:
        raise IngestError("empty-file", "header but no data rows", path=path)

    def column(name, default_pos, label):
        if name is None:
            if len(header) <= default_pos:
                raise IngestError("missing-column", f"no {label} column (header has {len(header)})", path=path, row=1)
            return default_pos
        if name not in header:
            raise IngestError("missing-column", f"column {name!r} not in header {header}", path=path, row=1)
        return header.index(name)

    ti = column(spec.time_column, 0, "time")
    vi = column(spec.value_column, 1, "value")

    freq = spec.frequency
    if freq is None:
        first_row, first = data[0]
        try:
            freq = infer_frequency(first[ti] if ti < len(first) else "")
        except ValueError as exc:
            raise IngestError("unparseable-time", str(exc), path=path, row=first_row) from None

    seen: Dict[object, int] = {}
    points = []
    for rowno, row in data:
        cell_t = row[ti] if ti < len(row) else ""
        cell_v = row[vi] if vi < len(row) else ""
        try:
            t = parse_time(cell_t, freq)
        except ValueError as exc:
            raise IngestError("unparseable-time", str(exc), path=path, row=rowno) from None
        try:
            v = parse_value(cell_v)
        except ValueError as exc:
            raise IngestError("unparseable-value", str(exc), path=path, row=rowno) from None
        if t in seen:
            raise IngestError(
                "duplicate-time-index", f"time {cell_t.strip()!r} already on row {seen[t]}", path=path, row=rowno
            )
        seen[t] = rowno
        points.append((t, v))
    points.sort(key=lambda p: p[0])
    return TimeSeries.from_pairs(freq, points)


def write_series(s: TimeSeries, path, time_column: str = "time", value_column: str = "value", fmt=repr) -> None:
    """Write ``s`` in the format :func:`read_series` accepts.

    The default ``repr`` formatting round-trips every float exactly.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([time_column, value_column])
        for t, v in zip(s.times, s.values):
            label = str(t) if s.frequency is Frequency.ANNUAL else f"{t[0]:04d}-W{t[1]:02d}"
            w.writerow([label, fmt(float(v))])


# ---------------------------------------------------------------------------
# run config


def _type_name(v) -> str:
    return type(v).__name__


def _series_entries(doc: dict, group: str, base: Path) -> List[SeriesFileSpec]:
    entries = doc.get(group)
    if entries is None:
        raise ConfigError(group, "missing; at least one series is required")
    if not isinstance(entries, list):
        raise ConfigError(group, f"must be an array of tables, got {_type_name(entries)}")
    if not entries:
        raise ConfigError(group, "at least one series is required")
    out = []
    for k, e in enumerate(entries):
        where = f"{group}[{k}]"
        if not isinstance(e, dict):
            raise ConfigError(where, "must be a table")
        for key in e:
            if key not in SERIES_KEYS:
                raise ConfigError(f"{where}.{key}", "unknown key")
        for key in ("name", "path", "frequency"):
            if key not in e:
                raise ConfigError(f"{where}.{key}", "required")
        for key, val in e.items():
            if not isinstance(val, str):
                raise ConfigError(f"{where}.{key}", f"must be a string, got {_type_name(val)}")
        if not e["name"].strip():
            raise ConfigError(f"{where}.name", "must be nonempty")
        try:
            freq = Frequency(e["frequency"])
        except ValueError:
            raise ConfigError(f"{where}.frequency", f"must be 'weekly' or 'annual', got {e['frequency']!r}") from None
        path = Path(e["path"])
        if not path.is_absolute():
            path = base / path
        out.append(SeriesFileSpec(path, e["name"], freq, e.get("time_column"), e.get("value_column")))
    return out


def parse_config(doc: dict, base: Path) -> Tuple[List[SeriesFileSpec], List[SeriesFileSpec], dict]:
    """Validate a decoded config document; returns file specs and options."""
    for key in doc:
        if key not in TOP_KEYS:
            raise ConfigError(key, "unknown key")
    opts: dict = {}
    if "alpha" in doc:
        a = doc["alpha"]
        if isinstance(a, bool) or not isinstance(a, (int, float)) or not 0.0 < a < 1.0:
            raise ConfigError("alpha", f"must be a number in (0, 1), got {a!r}")
        opts["alpha"] = float(a)
    if "max_lag" in doc:
        m = doc["max_lag"]
        if isinstance(m, bool) or not isinstance(m, int) or m < 1:
            raise ConfigError("max_lag", f"must be a positive integer, got {m!r}")
        opts["max_lag"] = m
    if "correction" in doc:
        try:
            opts["correction"] = Correction(doc["correction"])
        except (ValueError, TypeError):
            raise ConfigError("correction", f"must be 'none' or 'bonferroni', got {doc['correction']!r}") from None
    if "skip_on_error" in doc:
        if not isinstance(doc["skip_on_error"], bool):
            raise ConfigError("skip_on_error", "must be true or false")
        opts["skip_on_error"] = doc["skip_on_error"]
    orders = {g: TransformOrder.LOG_THEN_DIFFERENCE for g in GROUPS}
    if "transform_order" in doc:
        to = doc["transform_order"]
        if not isinstance(to, dict):
            raise ConfigError("transform_order", "must be a table with 'words' and/or 'cohorts'")
        for g, v in to.items():
            if g not in GROUPS:
                raise ConfigError(f"transform_order.{g}", "unknown key")
            try:
                orders[g] = TransformOrder(v)
            except (ValueError, TypeError):
                choices = ", ".join(o.value for o in TransformOrder)
                raise ConfigError(f"transform_order.{g}", f"must be one of {choices}; got {v!r}") from None
    words = _series_entries(doc, "words", base)
    cohorts = _series_entries(doc, "cohorts", base)
    names = [s.name for s in words + cohorts]
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        raise ConfigError("name", f"series names must be unique within a run; repeated: {', '.join(dup)}")
    opts["orders"] = orders
    return words, cohorts, opts


def _group_spec(specs: List[SeriesFileSpec], order: TransformOrder) -> PreprocessSpec:
    weekly = any(s.frequency is Frequency.WEEKLY for s in specs)
    return PreprocessSpec(Aggregation.ANNUAL_MEAN if weekly else Aggregation.NONE, order)


def load_series(spec: SeriesFileSpec) -> TimeSeries:
    """:func:`read_series` with the series name attached to any error."""
    try:
        return read_series(spec)
    except IngestError as exc:
        wrapped = IngestError(exc.kind, f"series {spec.name!r}: {exc}")
        wrapped.path, wrapped.row = exc.path, exc.row
        raise wrapped from exc
    except LagscanError as exc:
        raise IngestError("invalid-series", f"series {spec.name!r}: {spec.path}: {exc}") from exc


def load_run(config_path, overrides: Optional[dict] = None):
    """Load a run config and every series it names.

    Returns ``(words, cohorts, cfg)`` where ``words`` and ``cohorts`` are
    lists of ``(name, TimeSeries)`` in file order. ``overrides`` may replace
    ``alpha``, ``max_lag`` or ``correction`` after validation.
    """
    path = Path(config_path)
    if not path.is_file():
        raise IngestError("missing-file", "config file not found", path=path)
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("(syntax)", f"{path}: {exc}") from None
    except UnicodeDecodeError:
        raise ConfigError("(syntax)", f"{path}: not UTF-8 text") from None
    word_specs, cohort_specs, opts = parse_config(doc, path.parent)
    orders = opts.pop("orders")
    for k, v in (overrides or {}).items():
        if v is not None:
            opts[k] = v
    cfg = ScreenConfig(
        preprocess_word=_group_spec(word_specs, orders["words"]),
        preprocess_cohort=_group_spec(cohort_specs, orders["cohorts"]),
        **opts,
    )
    words = [(s.name, load_series(s)) for s in word_specs]
    cohorts = [(s.name, load_series(s)) for s in cohort_specs]
    return words, cohorts, cfg
