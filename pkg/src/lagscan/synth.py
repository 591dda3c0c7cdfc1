"""Seeded synthetic series, a brute-force CCF oracle, and the bundled study fixture.

Random numbers
--------------
Noise comes from a counter-based SplitMix64 stream so any language can
regenerate the fixtures exactly:

* draw ``i`` (0-based) of stream ``seed`` is
  ``mix64((seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2**64)`` where ``mix64``
  is the SplitMix64 finalizer (xor-shift 30/27/31, multipliers
  ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``);
* a uniform in (0, 1) is ``((z >> 11) + 0.5) * 2**-53``;
* normals come in Box-Muller pairs from consecutive uniforms ``u1, u2``:
  ``sqrt(-2 ln u1) * cos(2 pi u2)`` then ``sqrt(-2 ln u1) * sin(2 pi u2)``.

The oracle (:func:`oracle_ccf`) is written with explicit Python loops and
shares no numeric code with :mod:`lagscan.ccf` on purpose.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from .errors import (
    LagscanError,
    LengthMismatchError,
    MaxLagError,
    TooShortError,
    ZeroVarianceError,
)
from .ingest import write_series
from .series import Frequency, TimeSeries

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class NormalStream:
    """Deterministic standard-normal draws from a seeded SplitMix64 counter."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.counter = 0
        self._spare = None

    def uniform(self) -> float:
        z = mix64(self.seed + (self.counter + 1) * _GOLDEN)
        self.counter += 1
        return ((z >> 11) + 0.5) * 2.0 ** -53

    def normal(self) -> float:
        if self._spare is not None:
            v, self._spare = self._spare, None
            return v
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normals(self, k: int) -> List[float]:
        return [self.normal() for _ in range(k)]


class PlantSpecError(LagscanError):
    pass


@dataclass(frozen=True)
class PlantSpec:
    n: int
    lag: int
    strength: float
    seed: int
    start_year: int = 2004

    def __post_init__(self):
        if self.n < 3:
            raise PlantSpecError(f"n must be at least 3, got {self.n}")
        if not abs(self.lag) < self.n - 2:
            raise PlantSpecError(f"|lag| must be < n - 2 = {self.n - 2}, got lag={self.lag}")
        if not 0.0 <= self.strength <= 1.0:
            raise PlantSpecError(f"strength must be in [0, 1], got {self.strength}")
        if not 0 <= self.seed <= _MASK:
            raise PlantSpecError("seed must be an unsigned 64-bit integer")


def generate_lagged_pair(spec: PlantSpec) -> Tuple[TimeSeries, TimeSeries]:
    """``y[t] = strength * x[t - lag] + (1 - strength) * noise[t]``.

    Both series are trimmed to the ``n - |lag|`` periods where the shifted
    term exists, so the returned pair shares its time indices. The draw
    order is: ``n`` normals for ``x``, then ``n - |lag|`` normals of noise.
    """
    rng = NormalStream(spec.seed)
    x = rng.normals(spec.n)
    lo = max(0, spec.lag)
    hi = min(spec.n, spec.n + spec.lag)
    noise = rng.normals(hi - lo)
    s = spec.strength
    ts = list(range(lo, hi))
    yv = [s * x[t - spec.lag] + (1.0 - s) * e for t, e in zip(ts, noise)]
    xv = [x[t] for t in ts]
    times = [spec.start_year + t for t in ts]
    return TimeSeries(Frequency.ANNUAL, times, xv), TimeSeries(Frequency.ANNUAL, times, yv)


def oracle_ccf(x: Sequence[float], y: Sequence[float], lag: int) -> float:
    """Direct evaluation of the sample cross-correlation at one lag."""
    n = len(x)
    if len(y) != n:
        raise LengthMismatchError(f"lengths differ: {n} vs {len(y)}")
    if n < 3:
        raise TooShortError(f"need at least 3 points, got {n}")
    if abs(lag) > n - 2:
        raise MaxLagError(f"|lag| {abs(lag)} exceeds n - 2 = {n - 2}")
    mx = 0.0
    my = 0.0
    for i in range(n):
        mx += x[i]
        my += y[i]
    mx = mx / n
    my = my / n
    cov = 0.0
    for t in range(n):
        s = t + lag
        if 0 <= s < n:
            cov += (x[t] - mx) * (y[s] - my)
    cov = cov / n
    vx = 0.0
    vy = 0.0
    for i in range(n):
        vx += (x[i] - mx) ** 2
        vy += (y[i] - my) ** 2
    vx = vx / n
    vy = vy / n
    if all(v == x[0] for v in x) or all(v == y[0] for v in y) or vx == 0.0 or vy == 0.0:
        raise ZeroVarianceError("constant series")
    return cov / (math.sqrt(vx) * math.sqrt(vy))


def oracle_ccf_all(x, y, max_lag: int) -> List[float]:
    return [oracle_ccf(x, y, k) for k in range(-max_lag, max_lag + 1)]


# ---------------------------------------------------------------------------
# file output


def to_levels(s: TimeSeries, base: float = 100.0, scale: float = 0.05) -> TimeSeries:
    """Positive annual levels whose log-differences equal ``scale * s``.

    The output has one more point than ``s``; the extra leading point is
    stamped one year before ``s`` starts.
    """
    if s.frequency is not Frequency.ANNUAL:
        raise ValueError("to_levels expects an annual series")
    levels = [base]
    for v in s.values:
        levels.append(levels[-1] * math.exp(scale * float(v)))
    return TimeSeries(Frequency.ANNUAL, [s.times[0] - 1] + list(s.times), levels)


def _toml_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_config(words: Sequence[dict], cohorts: Sequence[dict], *, alpha=None, max_lag=None,
                  correction=None, transform_order=None) -> str:
    """Text of a run config (TOML) referencing the given series entries."""
    lines = []
    if alpha is not None:
        lines.append(f"alpha = {alpha!r}")
    if max_lag is not None:
        lines.append(f"max_lag = {int(max_lag)}")
    if correction is not None:
        lines.append(f"correction = {_toml_str(correction)}")
    if transform_order:
        lines += ["", "[transform_order]"]
        for group, order in transform_order.items():
            lines.append(f"{group} = {_toml_str(order)}")
    for group, entries in (("words", words), ("cohorts", cohorts)):
        for e in entries:
            lines += ["", f"[[{group}]]"]
            for key in ("name", "path", "frequency", "time_column", "value_column"):
                lines.append(f"{key} = {_toml_str(str(e[key]))}")
    return "\n".join(lines).lstrip("\n") + "\n"


def write_simulation(spec: PlantSpec, out_dir, *, alpha=None, max_lag=None) -> Dict[str, Path]:
    """Write a planted pair as positive annual level CSVs plus a screen config.

    Levels are chosen so the default log-then-difference preprocessing
    recovers the generated pair exactly up to rounding.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    x, y = generate_lagged_pair(spec)
    paths = {"word": out / "word.csv", "cohort": out / "cohort.csv", "config": out / "screen.toml"}
    write_series(to_levels(x), paths["word"], "year", "value")
    write_series(to_levels(y), paths["cohort"], "year", "value")
    entry = dict(frequency="annual", time_column="year", value_column="value")
    text = render_config(
        [dict(entry, name="word", path="word.csv")],
        [dict(entry, name="cohort", path="cohort.csv")],
        alpha=alpha,
        max_lag=max_lag,
    )
    paths["config"].write_text(text, encoding="utf-8")
    return paths


# ---------------------------------------------------------------------------
# bundled 9 x 9 study

STUDY_WORDS = (
    "marijuana-like", "alcohol-like", "debt-like", "foreclosure-like", "bunnies-like",
    "stress-like", "hate-like", "ship-like", "obesity-like",
)
STUDY_COHORTS = (
    "all", "male", "female", "white", "black",
    "white-male", "white-female", "black-male", "black-female",
)
STUDY_FIRST_YEAR = 2004
STUDY_LAST_YEAR = 2010
STUDY_SEED = 20120427
STUDY_ALPHA = 0.1
STUDY_MAX_LAG = 3
# rows/columns are 0-based here: word 7 -> index 6, word 4 -> index 3
STUDY_PLANTS = {
    **{(6, j): (-1, "+") for j in range(8)},
    **{(3, j): (-1, "-") for j in range(5)},
}
# distance kept between every |r| and the n=6 band while building
STUDY_MARGIN = 0.06


def _scan_ok(word, cohort, band, planted):
    """All |r| clear the band by the margin; only ``planted`` (lag, sign) is above."""
    max_lag = STUDY_MAX_LAG
    for k in range(-max_lag, max_lag + 1):
        r = oracle_ccf(word, cohort, k)
        if planted is not None and k == planted[0]:
            want = 1.0 if planted[1] == "+" else -1.0
            if r * want < band + STUDY_MARGIN:
                return False
        elif abs(r) > band - STUDY_MARGIN:
            return False
    return True


def build_study_growth(seed: int = STUDY_SEED):
    """Log-growth vectors (6 per series) for the 9 words and 9 cohorts.

    Cohorts 1-5 load on two latent patterns ``a + b``; cohorts 6-8 load on
    ``a`` only; cohort 9 is independent. The hate-shaped word follows
    ``a + b/2`` one year later and the foreclosure-shaped word follows
    ``-(b + a/2)`` one year later. Every other word is drawn as plain noise.
    Each draw is rejected and redrawn until all 81 cells match the plan with
    margin, as judged by :func:`oracle_ccf`.
    """
    from .ccf import significance_threshold

    m = STUDY_LAST_YEAR - STUDY_FIRST_YEAR  # growth points
    band = significance_threshold(m, STUDY_ALPHA)
    rng = NormalStream(seed)

    def lead_by_one(pattern):
        # word[t] = pattern[t - 1]; the free first point sits at the mean
        body = pattern[:-1]
        return [sum(body) / len(body)] + body

    for _attempt in range(100000):
        a = rng.normals(m)
        b = rng.normals(m)
        cohorts = []
        for j in range(9):
            e = rng.normals(m)
            if j < 5:
                c = [ai + bi + 0.25 * ei for ai, bi, ei in zip(a, b, e)]
            elif j < 8:
                c = [ai + 0.25 * ei for ai, ei in zip(a, e)]
            else:
                c = e
            cohorts.append(c)
        hate = lead_by_one([ai + 0.5 * bi for ai, bi in zip(a, b)])
        foreclosure = lead_by_one([-(bi + 0.5 * ai) for ai, bi in zip(a, b)])
        ok = all(
            _scan_ok(w, cohorts[j], band, STUDY_PLANTS.get((i, j)))
            for i, w in ((6, hate), (3, foreclosure))
            for j in range(9)
        )
        if ok:
            break
    else:  # pragma: no cover - construction is deterministic and terminates early
        raise RuntimeError("study construction did not converge")

    words: List[List[float]] = []
    for i in range(9):
        if i == 6:
            words.append(hate)
            continue
        if i == 3:
            words.append(foreclosure)
            continue
        while True:
            w = rng.normals(m)
            if all(_scan_ok(w, c, band, None) for c in cohorts):
                words.append(w)
                break
    return words, cohorts


def _weekly_from_annual(levels: TimeSeries, amplitude: float = 0.05, digits: int = 6) -> TimeSeries:
    """Spread annual levels over ISO weeks with a zero-mean seasonal wiggle."""
    times, values = [], []
    for year, level in zip(levels.times, levels.values):
        weeks = _dt.date(year, 12, 28).isocalendar()[1]
        for w in range(1, weeks + 1):
            times.append((year, w))
            values.append(round(float(level) * (1.0 + amplitude * math.sin(2 * math.pi * (w - 1) / weeks)), digits))
    return TimeSeries(Frequency.WEEKLY, times, values)


def build_study_series(seed: int = STUDY_SEED):
    """Named word (weekly) and cohort (annual) level series for 2004-2010."""
    words_g, cohorts_g = build_study_growth(seed)
    first_growth_year = STUDY_FIRST_YEAR + 1
    words, cohorts = {}, {}
    for name, g in zip(STUDY_WORDS, words_g):
        gs = TimeSeries.annual(g, start=first_growth_year)
        words[name] = _weekly_from_annual(to_levels(gs, base=50.0, scale=0.1))
    for name, g in zip(STUDY_COHORTS, cohorts_g):
        gs = TimeSeries.annual(g, start=first_growth_year)
        lv = to_levels(gs, base=800.0, scale=0.02)
        cohorts[name] = lv.with_values([round(float(v), 4) for v in lv.values])
    return words, cohorts


def write_study_fixture(out_dir, seed: int = STUDY_SEED) -> Path:
    """Write the 9 x 9 study (CSVs + ``study.toml``) and return the config path."""
    out = Path(out_dir)
    words, cohorts = build_study_series(seed)
    word_entries, cohort_entries = [], []
    for name, s in words.items():
        rel = f"words/{name}.csv"
        write_series(s, out / rel, "week", "search_index", fmt=lambda v: f"{v:.6f}")
        word_entries.append(dict(name=name, path=rel, frequency="weekly", time_column="week",
                                 value_column="search_index"))
    for name, s in cohorts.items():
        rel = f"cohorts/{name}.csv"
        write_series(s, out / rel, "year", "death_rate", fmt=lambda v: f"{v:.4f}")
        cohort_entries.append(dict(name=name, path=rel, frequency="annual", time_column="year",
                                   value_column="death_rate"))
    cfg = out / "study.toml"
    cfg.write_text(
        "# Synthetic 9 x 9 study: planted lag -1 effects for hate-like (cohorts 1-8, +)\n"
        "# and foreclosure-like (cohorts 1-5, -). Regenerate with lagscan.synth.write_study_fixture.\n"
        + render_config(word_entries, cohort_entries, alpha=STUDY_ALPHA, max_lag=STUDY_MAX_LAG,
                        correction="none"),
        encoding="utf-8",
    )
    return cfg


def default_study_path() -> Path:
    """Location of the bundled study config inside a source checkout."""
    return Path(__file__).resolve().parents[2] / "fixtures" / "study" / "study.toml"
