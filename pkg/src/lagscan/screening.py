"""Word x cohort grid screening with optional Bonferroni correction."""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .ccf import CcfResult, SignificantLag, cross_correlation, significant_lags
from .errors import ConfigError, IndexMismatchError, LagscanError, PairError
from .series import (
    Aggregation,
    Frequency,
    PreprocessSpec,
    TimeSeries,
    TransformOrder,
    preprocess,
    restrict_years,
)

NamedSeries = Union[Mapping[str, TimeSeries], Sequence[Tuple[str, TimeSeries]]]

LAG_CONVENTION = (
    "r(lag) = corr(word[t], cohort[t+lag]); negative lag means the cohort series leads the word series"
)


class Correction(str, enum.Enum):
    NONE = "none"
    BONFERRONI = "bonferroni"


def bonferroni_alpha(alpha: float, m: int) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    return alpha / m


@dataclass(frozen=True)
class ScreenConfig:
    alpha: float = 0.1
    max_lag: int = 3
    correction: Correction = Correction.NONE
    preprocess_word: PreprocessSpec = PreprocessSpec(Aggregation.ANNUAL_MEAN, TransformOrder.LOG_THEN_DIFFERENCE)
    preprocess_cohort: PreprocessSpec = PreprocessSpec(Aggregation.NONE, TransformOrder.LOG_THEN_DIFFERENCE)
    skip_on_error: bool = False

    def __post_init__(self):
        object.__setattr__(self, "correction", Correction(self.correction))
        if isinstance(self.alpha, bool) or not isinstance(self.alpha, (int, float)) or not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha", f"must be a number in (0, 1), got {self.alpha!r}")
        if isinstance(self.max_lag, bool) or not isinstance(self.max_lag, int) or self.max_lag < 1:
            raise ConfigError("max_lag", f"must be a positive integer, got {self.max_lag!r}")

    def effective_alpha(self, n_words: int, n_cohorts: int) -> float:
        if self.correction is Correction.BONFERRONI:
            return bonferroni_alpha(self.alpha, n_words * n_cohorts)
        return self.alpha


@dataclass(frozen=True)
class ScreenMeta:
    alpha: float
    corrected_alpha: Optional[float]
    correction: Correction
    max_lag: int
    n: Tuple[Tuple[Optional[int], ...], ...]
    preprocess_word: str
    preprocess_cohort: str
    errors: Dict[Tuple[int, int], str] = field(default_factory=dict)

    @property
    def tests(self) -> int:
        return sum(len(row) for row in self.n)

    def n_summary(self) -> str:
        ns = sorted({v for row in self.n for v in row if v is not None})
        if not ns:
            return "n/a"
        if len(ns) == 1:
            return str(ns[0])
        return f"{ns[0]}..{ns[-1]}"


@dataclass(frozen=True)
class ScreenTable:
    word_names: Tuple[str, ...]
    cohort_names: Tuple[str, ...]
    cells: Tuple[Tuple[Tuple[SignificantLag, ...], ...], ...]
    meta: ScreenMeta
    results: Tuple[Tuple[Optional[CcfResult], ...], ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if len(self.cells) != len(self.word_names) or any(len(r) != len(self.cohort_names) for r in self.cells):
            raise ValueError("cell matrix does not match words x cohorts")

    def cell(self, word: str, cohort: str) -> Tuple[SignificantLag, ...]:
        return self.cells[self.word_names.index(word)][self.cohort_names.index(cohort)]

    def findings(self) -> set:
        """Flat set of ``(word, cohort, lag, sign)`` tuples."""
        out = set()
        for w, row in zip(self.word_names, self.cells):
            for c, cell in zip(self.cohort_names, row):
                out.update((w, c, f.lag, f.sign.value) for f in cell)
        return out

    def count(self) -> int:
        return sum(len(cell) for row in self.cells for cell in row)


def _named(items: NamedSeries) -> List[Tuple[str, TimeSeries]]:
    pairs = list(items.items()) if isinstance(items, Mapping) else [tuple(p) for p in items]
    names = [n for n, _ in pairs]
    if len(set(names)) != len(names):
        raise ConfigError("name", "series names must be unique within a group")
    return pairs


def _fit_spec(spec: PreprocessSpec, s: TimeSeries) -> PreprocessSpec:
    # annual-mean on already-annual data is a no-op for grid purposes
    if spec.aggregation is Aggregation.ANNUAL_MEAN and s.frequency is Frequency.ANNUAL:
        return PreprocessSpec(Aggregation.NONE, spec.order)
    return spec


def align_pair(word: TimeSeries, cohort: TimeSeries, cfg: ScreenConfig) -> Tuple[TimeSeries, TimeSeries]:
    """Trim both series to their common calendar years, then preprocess each."""
    wy, cy = word.years(), cohort.years()
    first, last = max(wy[0], cy[0]), min(wy[-1], cy[-1])
    if first > last:
        raise IndexMismatchError(f"no overlapping years ({wy[0]}-{wy[-1]} vs {cy[0]}-{cy[-1]})")
    w = preprocess(restrict_years(word, first, last), _fit_spec(cfg.preprocess_word, word))
    c = preprocess(restrict_years(cohort, first, last), _fit_spec(cfg.preprocess_cohort, cohort))
    if w.frequency is not c.frequency or w.times != c.times:
        raise IndexMismatchError(
            f"preprocessed indices differ: {w.frequency.value} {w.times[0]}..{w.times[-1]} "
            f"vs {c.frequency.value} {c.times[0]}..{c.times[-1]}"
        )
    return w, c


def screen_pair(word: TimeSeries, cohort: TimeSeries, cfg: ScreenConfig, alpha: float) -> CcfResult:
    w, c = align_pair(word, cohort, cfg)
    return cross_correlation(w, c, cfg.max_lag, alpha)


def run_grid(words: NamedSeries, cohorts: NamedSeries, cfg: ScreenConfig, workers: int = 1) -> ScreenTable:
    """CCF every word against every cohort and collect the significant lags.

    Any failing pair aborts the run with :class:`PairError` unless
    ``cfg.skip_on_error`` is set, in which case the cell stays empty and the
    error text is kept in ``meta.errors``.
    """
    words_l = _named(words)
    cohorts_l = _named(cohorts)
    if not words_l:
        raise ConfigError("words", "at least one word series is required")
    if not cohorts_l:
        raise ConfigError("cohorts", "at least one cohort series is required")
    eff_alpha = cfg.effective_alpha(len(words_l), len(cohorts_l))

    jobs = [(i, j) for i in range(len(words_l)) for j in range(len(cohorts_l))]

    def one(ij):
        i, j = ij
        (wn, ws), (cn, cs) = words_l[i], cohorts_l[j]
        try:
            return screen_pair(ws, cs, cfg, eff_alpha), None
        except LagscanError as exc:
            err = PairError(wn, cn, exc)
            if not cfg.skip_on_error:
                raise err from exc
            return None, str(err)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, jobs))
    else:
        outcomes = [one(ij) for ij in jobs]

    nc = len(cohorts_l)
    results, cells, ns, errors = [], [], [], {}
    for i in range(len(words_l)):
        res_row, cell_row, n_row = [], [], []
        for j in range(nc):
            res, err = outcomes[i * nc + j]
            res_row.append(res)
            cell_row.append(tuple(significant_lags(res)) if res is not None else ())
            n_row.append(res.n if res is not None else None)
            if err is not None:
                errors[(i, j)] = err
        results.append(tuple(res_row))
        cells.append(tuple(cell_row))
        ns.append(tuple(n_row))

    meta = ScreenMeta(
        alpha=cfg.alpha,
        corrected_alpha=eff_alpha if cfg.correction is Correction.BONFERRONI else None,
        correction=cfg.correction,
        max_lag=cfg.max_lag,
        n=tuple(ns),
        preprocess_word=cfg.preprocess_word.describe(),
        preprocess_cohort=cfg.preprocess_cohort.describe(),
        errors=errors,
    )
    return ScreenTable(
        tuple(n for n, _ in words_l),
        tuple(n for n, _ in cohorts_l),
        tuple(cells),
        meta,
        tuple(results),
    )
