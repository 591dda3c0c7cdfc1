import csv
import io
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagscan.ccf import CcfResult, Sign, SignificantLag, significance_threshold
from lagscan.report import (
    PlotGeometry,
    RenderOptions,
    parse_markdown_table,
    render_ccf_plot,
    render_table,
)
from lagscan.screening import Correction, ScreenMeta, ScreenTable

SVG = "{http://www.w3.org/2000/svg}"


def make_table(matrix, words=None, cohorts=None, corrected=None):
    words = words or [f"w{i}" for i in range(len(matrix))]
    cohorts = cohorts or [f"c{j}" for j in range(len(matrix[0]))]
    cells = tuple(
        tuple(tuple(SignificantLag(lag, 0.9 if s == "+" else -0.9, Sign(s)) for lag, s in cell) for cell in row)
        for row in matrix
    )
    meta = ScreenMeta(
        alpha=0.1,
        corrected_alpha=corrected,
        correction=Correction.BONFERRONI if corrected else Correction.NONE,
        max_lag=3,
        n=tuple(tuple(6 for _ in row) for row in matrix),
        preprocess_word="annual-mean/log-then-difference",
        preprocess_cohort="none/log-then-difference",
    )
    return ScreenTable(tuple(words), tuple(cohorts), cells, meta)


class TestTable:
    def test_all_empty(self):
        text = render_table(make_table([[(), ()], [(), ()]]))
        rows = text.splitlines()[2:4]
        assert rows == ["| w0 | x | x |", "| w1 | x | x |"]

    def test_signed_lag(self):
        text = render_table(make_table([[((-1, "+"),)]]))
        assert "| w0 | -1^+ |" in text

    def test_multi_finding_cell(self):
        text = render_table(make_table([[((0, "-"), (1, "+"))]]))
        assert "| w0 | 0^-;1^+ |" in text

    def test_csv_ascii_default_and_quoting(self):
        t = make_table([[((-1, "-"),), ()]], cohorts=["all", "white, male"])
        text = render_table(t, RenderOptions(format="csv"))
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["word", "all", "white, male"]
        assert rows[1] == ["w0", "-1-", "x"]

    def test_custom_marker_and_notation(self):
        t = make_table([[(), ((2, "+"),)]])
        text = render_table(t, RenderOptions(empty_marker="-", sign_notation="ascii"))
        assert "| w0 | - | 2+ |" in text
        with pytest.raises(ValueError):
            RenderOptions(empty_marker="")

    def test_footer(self):
        text = render_table(make_table([[()]], corrected=0.1 / 81))
        footer = text.split("\n\n", 1)[1]
        assert "alpha=0.1" in footer and "corrected alpha=0.001234567901" in footer
        assert "max_lag=3" in footer and "n=6" in footer

    def test_nine_by_nine_shape(self):
        t = make_table([[()] * 9 for _ in range(9)])
        rows = [ln for ln in render_table(t).splitlines() if ln.startswith("|")]
        assert len(rows) == 11  # header, rule, 9 data rows
        assert all(ln.count("|") == 11 for ln in rows)

    def test_pipe_in_name_survives(self):
        t = make_table([[((1, "+"),)]], words=["a|b"], cohorts=["c\\d"])
        words, cohorts, m = parse_markdown_table(render_table(t))
        assert words == ("a|b",) and cohorts == ("c\\d",) and m == ((((1, "+"),),),)


findings = st.lists(st.tuples(st.integers(-5, 5), st.sampled_from("+-")), max_size=3, unique_by=lambda f: f[0]).map(
    lambda fs: tuple(sorted(fs))
)
matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(lambda c: st.lists(st.lists(findings, min_size=c, max_size=c), min_size=r, max_size=r))
)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_markdown_roundtrip(matrix):
    t = make_table(matrix)
    words, cohorts, got = parse_markdown_table(render_table(t))
    assert words == t.word_names and cohorts == t.cohort_names
    assert got == tuple(tuple(tuple(cell) for cell in row) for row in matrix)


@settings(max_examples=200, deadline=None)
@given(matrices, matrices)
def test_render_injective(a, b):
    shape = lambda m: (len(m), len(m[0]))
    if shape(a) != shape(b):
        return
    ta, tb = make_table(a), make_table(b)
    if render_table(ta) == render_table(tb):
        assert [[tuple(c) for c in r] for r in a] == [[tuple(c) for c in r] for r in b]


def ccf_result(corr, threshold=0.6715, n=6, alpha=0.1):
    m = (len(corr) - 1) // 2
    return CcfResult(np.arange(-m, m + 1), corr, n, threshold, alpha)


def parse_svg(text):
    root = ET.fromstring(text.encode("utf-8"))
    stems = {int(e.get("data-lag")): e for e in root.iter(SVG + "line") if e.get("class") == "stem"}
    bands = {e.get("data-side"): e for e in root.iter(SVG + "line") if e.get("class") == "band"}
    return root, stems, bands


class TestPlot:
    def test_zero_correlations(self):
        root, stems, bands = parse_svg(render_ccf_plot(ccf_result([0.0] * 7)))
        assert root.get("version") == "1.1"
        assert len(stems) == 7 and set(bands) == {"upper", "lower"}
        for e in stems.values():
            assert e.get("y1") == e.get("y2")

    def test_single_stem_crosses_band(self):
        corr = [0.1, -0.3, 0.8, 0.2, -0.5, 0.0, 0.3]
        _, stems, bands = parse_svg(render_ccf_plot(ccf_result(corr)))
        up = float(bands["upper"].get("y1"))
        lo = float(bands["lower"].get("y1"))
        crossing = []
        for lag, e in stems.items():
            top = min(float(e.get("y1")), float(e.get("y2")))
            bottom = max(float(e.get("y1")), float(e.get("y2")))
            if top < up or bottom > lo:
                crossing.append(lag)
        assert crossing == [-1]

    def test_band_at_threshold(self):
        thr = significance_threshold(6, 0.1)
        opts = RenderOptions()
        _, stems, bands = parse_svg(render_ccf_plot(ccf_result([0.0] * 7, threshold=thr), opts))
        g = PlotGeometry(opts.width, opts.height, 3)
        assert float(bands["upper"].get("y1")) == pytest.approx(g.y(thr), abs=1e-3)
        assert float(bands["lower"].get("y1")) == pytest.approx(g.y(-thr), abs=1e-3)
        # +/-0.6715 of a 2-unit axis spanning the plot height
        span = g.y_bottom - g.y_top
        assert g.y(0.0) - g.y(thr) == pytest.approx(0.6715 * span / 2, abs=0.05)

    def test_deterministic(self):
        r = ccf_result([0.1, 0.2, -0.3, 0.9, 0.0, 0.2, -0.1])
        assert render_ccf_plot(r, title="a & b") == render_ccf_plot(r, title="a & b")

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(1, 12).flatmap(lambda m: st.lists(st.floats(-1, 1), min_size=2 * m + 1, max_size=2 * m + 1)),
        st.floats(0, 2),
        st.text(max_size=20),
    )
    def test_fuzzed_wellformed(self, corr, thr, title):
        text = render_ccf_plot(ccf_result(corr, threshold=thr), title=title)
        root, stems, _ = parse_svg(text)
        assert len(stems) == len(corr)
