import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagscan.ccf import cross_correlation, significant_lags
from lagscan.errors import ConfigError, PairError
from lagscan.report import render_table
from lagscan.screening import (
    Correction,
    ScreenConfig,
    align_pair,
    bonferroni_alpha,
    run_grid,
    screen_pair,
)
from lagscan.series import Aggregation, Frequency, PreprocessSpec, TimeSeries, TransformOrder
from lagscan.synth import NormalStream, oracle_ccf_all

DIFF_ONLY = PreprocessSpec(Aggregation.NONE, TransformOrder.DIFFERENCE_ONLY)


def noise_series(seed, n=30, start=2000):
    return TimeSeries.annual(NormalStream(seed).normals(n), start=start)


class TestBonferroni:
    def test_identity(self):
        assert bonferroni_alpha(0.1, 1) == 0.1

    def test_81_tests(self):
        assert bonferroni_alpha(0.1, 81) == 0.1 / 81
        assert bonferroni_alpha(0.1, 81) == pytest.approx(0.0012345679012345679, rel=1e-15)

    def test_five(self):
        assert bonferroni_alpha(0.05, 5) == pytest.approx(0.01, rel=1e-15)

    @pytest.mark.parametrize("alpha, m", [(0.0, 1), (1.0, 3), (0.1, 0), (0.1, 2.5)])
    def test_domain(self, alpha, m):
        with pytest.raises(ValueError):
            bonferroni_alpha(alpha, m)


class TestConfig:
    def test_defaults(self):
        cfg = ScreenConfig()
        assert (cfg.alpha, cfg.max_lag, cfg.correction) == (0.1, 3, Correction.NONE)
        assert cfg.preprocess_word.aggregation is Aggregation.ANNUAL_MEAN
        assert cfg.preprocess_cohort.order is TransformOrder.LOG_THEN_DIFFERENCE

    @pytest.mark.parametrize("kw, key", [({"alpha": 1.5}, "alpha"), ({"max_lag": 0}, "max_lag"),
                                         ({"alpha": True}, "alpha")])
    def test_invalid(self, kw, key):
        with pytest.raises(ConfigError) as ei:
            ScreenConfig(**kw)
        assert ei.value.key == key

    def test_effective_alpha(self):
        cfg = ScreenConfig(correction="bonferroni")
        assert cfg.effective_alpha(9, 9) == 0.1 / 81


class TestRunGrid:
    def test_identical_pair_flags_lag_zero(self):
        s = TimeSeries.annual([3.0, 5.0, 4.0, 8.0, 7.0, 9.0, 12.0])
        t = run_grid({"w": s}, {"c": s}, ScreenConfig())
        cell = t.cell("w", "c")
        assert (0, "+") in {(f.lag, f.sign.value) for f in cell}
        assert t.meta.n == ((6,),)

    def test_independent_noise_low_alpha_empty(self):
        words = {"w1": noise_series(101), "w2": noise_series(102)}
        cohorts = {"c1": noise_series(201), "c2": noise_series(202)}
        cfg = ScreenConfig(alpha=0.001, preprocess_word=DIFF_ONLY, preprocess_cohort=DIFF_ONLY)
        t = run_grid(words, cohorts, cfg)
        assert t.count() == 0
        # the oracle agrees no lag clears the band for these frozen seeds
        for wn, ws in words.items():
            for cn, cs in cohorts.items():
                w, c = align_pair(ws, cs, cfg)
                band = t.results[0][0].threshold
                assert max(abs(v) for v in oracle_ccf_all(list(w.values), list(c.values), 3)) < band

    def test_cell_independence(self):
        words = [(f"w{i}", noise_series(300 + i)) for i in range(3)]
        cohorts = [(f"c{j}", noise_series(400 + j)) for j in range(2)]
        cfg = ScreenConfig(preprocess_word=DIFF_ONLY, preprocess_cohort=DIFF_ONLY, correction="bonferroni")
        t = run_grid(words, cohorts, cfg)
        eff = bonferroni_alpha(0.1, 6)
        for i, (wn, ws) in enumerate(words):
            for j, (cn, cs) in enumerate(cohorts):
                alone = significant_lags(screen_pair(ws, cs, cfg, eff))
                assert list(t.cells[i][j]) == alone

    def test_overlap_restriction_before_preprocessing(self):
        word = TimeSeries.annual([1, 2, 4, 8, 16, 32, 64, 128, 256], start=2000)
        cohort = TimeSeries.annual([5, 3, 6, 2, 7, 4, 8], start=2003)
        w, c = align_pair(word, cohort, ScreenConfig(preprocess_word=DIFF_ONLY, preprocess_cohort=DIFF_ONLY))
        assert w.times == c.times == tuple(range(2004, 2009))
        # common span 2003-2008 holds word levels 8..256; 2002 -> 2003 must not appear
        assert list(w.values) == [8.0, 16.0, 32.0, 64.0, 128.0]

    def test_weekly_word_against_annual_cohort(self):
        pairs = [((y, w), float(y - 2000 + w % 2)) for y in range(2004, 2011) for w in range(1, 53)]
        word = TimeSeries.from_pairs(Frequency.WEEKLY, pairs)
        cohort = TimeSeries.annual([800, 810, 790, 805, 820, 815, 830], start=2004)
        w, c = align_pair(word, cohort, ScreenConfig())
        assert w.frequency is Frequency.ANNUAL and len(w) == 6

    def test_failure_names_pair(self):
        short = TimeSeries.annual([1.0, 2.0, 3.0], start=2000)
        with pytest.raises(PairError) as ei:
            run_grid({"word-a": short}, {"cohort-b": short}, ScreenConfig())
        assert "word-a" in str(ei.value) and "cohort-b" in str(ei.value)

    def test_skip_on_error_marks_cell(self):
        good = TimeSeries.annual([3.0, 5.0, 4.0, 8.0, 7.0, 9.0, 12.0])
        bad = TimeSeries.annual([5.0, 4.0, 3.0], start=2004)
        cfg = ScreenConfig(skip_on_error=True)
        t = run_grid({"w": good}, {"ok": good, "bad": bad}, cfg)
        assert (0, 1) in t.meta.errors and t.cells[0][1] == ()
        assert "error" in render_table(t).splitlines()[2]

    def test_requires_words_and_cohorts(self):
        s = TimeSeries.annual([1.0, 2.0, 3.0, 5.0, 4.0, 6.0])
        with pytest.raises(ConfigError):
            run_grid({}, {"c": s}, ScreenConfig())
        with pytest.raises(ConfigError):
            run_grid({"w": s}, [], ScreenConfig())

    def test_parallel_equals_serial(self):
        words = [(f"w{i}", noise_series(500 + i)) for i in range(4)]
        cohorts = [(f"c{j}", noise_series(600 + j)) for j in range(4)]
        cfg = ScreenConfig(preprocess_word=DIFF_ONLY, preprocess_cohort=DIFF_ONLY)
        assert render_table(run_grid(words, cohorts, cfg, workers=4)) == render_table(run_grid(words, cohorts, cfg))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4), st.integers(1, 4), st.floats(0.01, 0.5))
def test_bonferroni_subset_and_determinism(seed, nw, nc, alpha):
    rng = NormalStream(seed)
    words = [(f"w{i}", TimeSeries.annual(rng.normals(12))) for i in range(nw)]
    cohorts = [(f"c{j}", TimeSeries.annual(rng.normals(12))) for j in range(nc)]
    base = ScreenConfig(alpha=alpha, preprocess_word=DIFF_ONLY, preprocess_cohort=DIFF_ONLY)
    corr = ScreenConfig(alpha=alpha, correction="bonferroni", preprocess_word=DIFF_ONLY,
                        preprocess_cohort=DIFF_ONLY)
    plain = run_grid(words, cohorts, base)
    fixed = run_grid(words, cohorts, corr)
    assert fixed.findings() <= plain.findings()
    assert render_table(run_grid(words, cohorts, base)) == render_table(plain)
