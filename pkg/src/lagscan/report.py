"""Text renderers: the significant-lag matrix (markdown / CSV) and SVG CCF stem plots."""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple
from xml.sax.saxutils import escape

from .ccf import CcfResult, Sign
from .screening import LAG_CONVENTION, ScreenTable


class TableFormat(str, enum.Enum):
    MARKDOWN = "markdown"
    CSV = "csv"


class SignNotation(str, enum.Enum):
    SUPERSCRIPT = "superscript"
    ASCII = "ascii"


ERROR_MARKER = "error"


@dataclass(frozen=True)
class RenderOptions:
    format: TableFormat = TableFormat.MARKDOWN
    sign_notation: Optional[SignNotation] = None  # None: superscript for markdown, ascii for csv
    empty_marker: str = "x"
    width: int = 640
    height: int = 480

    def __post_init__(self):
        object.__setattr__(self, "format", TableFormat(self.format))
        if self.sign_notation is not None:
            object.__setattr__(self, "sign_notation", SignNotation(self.sign_notation))
        if not self.empty_marker:
            raise ValueError("empty-cell marker must be nonempty")
        if self.width < 100 or self.height < 100:
            raise ValueError("plot size must be at least 100 x 100 pixels")

    @property
    def notation(self) -> SignNotation:
        if self.sign_notation is not None:
            return self.sign_notation
        return SignNotation.SUPERSCRIPT if self.format is TableFormat.MARKDOWN else SignNotation.ASCII


def format_finding(lag: int, sign: str, notation: SignNotation) -> str:
    sign = Sign(sign).value
    return f"{lag}^{sign}" if notation is SignNotation.SUPERSCRIPT else f"{lag}{sign}"


def _cell_text(table: ScreenTable, i: int, j: int, opts: RenderOptions) -> str:
    if (i, j) in table.meta.errors:
        return ERROR_MARKER
    cell = table.cells[i][j]
    if not cell:
        return opts.empty_marker
    return ";".join(format_finding(f.lag, f.sign, opts.notation) for f in cell)


def _fmt_alpha(a: float) -> str:
    return f"{a:.10g}"


def footer_lines(table: ScreenTable) -> List[str]:
    m = table.meta
    corrected = _fmt_alpha(m.corrected_alpha) if m.corrected_alpha is not None else "none"
    lines = [
        f"alpha={_fmt_alpha(m.alpha)}; correction={m.correction.value}; corrected alpha={corrected}; "
        f"max_lag={m.max_lag}; n={m.n_summary()}; tests={m.tests}",
        f"preprocessing: words={m.preprocess_word}; cohorts={m.preprocess_cohort}",
        f"lag convention: {LAG_CONVENTION}",
    ]
    for (i, j), msg in sorted(m.errors.items()):
        lines.append(f"error at ({table.word_names[i]}, {table.cohort_names[j]}): {msg}")
    return lines


def _md_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|")


def render_table(table: ScreenTable, opts: RenderOptions = RenderOptions()) -> str:
    """One row per word, one column per cohort, then a metadata footer."""
    nrows, ncols = len(table.word_names), len(table.cohort_names)
    if opts.format is TableFormat.CSV:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", *table.cohort_names])
        for i in range(nrows):
            w.writerow([table.word_names[i], *(_cell_text(table, i, j, opts) for j in range(ncols))])
        for line in footer_lines(table):
            w.writerow(["# " + line])
        return buf.getvalue()

    head = "| Word | " + " | ".join(_md_escape(c) for c in table.cohort_names) + " |"
    rule = "|---|" + "---|" * ncols
    lines = [head, rule]
    for i in range(nrows):
        cells = [_md_escape(_cell_text(table, i, j, opts)) for j in range(ncols)]
        lines.append(f"| {_md_escape(table.word_names[i])} | " + " | ".join(cells) + " |")
    lines.append("")
    lines += footer_lines(table)
    return "\n".join(lines) + "\n"


_FINDING = re.compile(r"(-?\d+)\^?([+-])")


def _split_md_row(line: str) -> List[str]:
    body = line.strip()
    if not (body.startswith("|") and body.endswith("|")):
        raise ValueError(f"not a table row: {line!r}")
    cells, cur, k = [], [], 1
    while k < len(body) - 1:
        ch = body[k]
        if ch == "\\" and k + 1 < len(body) - 1:
            cur.append(body[k + 1])
            k += 2
            continue
        if ch == "|":
            cells.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
        k += 1
    cells.append("".join(cur).strip())
    return cells


def parse_finding_cell(text: str, empty_marker: str = "x") -> Tuple[Tuple[int, str], ...]:
    if text == empty_marker:
        return ()
    out = []
    for part in text.split(";"):
        m = _FINDING.fullmatch(part.strip())
        if not m:
            raise ValueError(f"unrecognized finding {part!r}")
        out.append((int(m.group(1)), m.group(2)))
    return tuple(out)


def parse_markdown_table(text: str, empty_marker: str = "x"):
    """Recover ``(word_names, cohort_names, matrix)`` from :func:`render_table` markdown.

    ``matrix[i][j]`` is a tuple of ``(lag, sign)`` pairs.
    """
    lines = text.splitlines()
    header = _split_md_row(lines[0])
    cohorts = tuple(header[1:])
    words, matrix = [], []
    for line in lines[2:]:
        if not line.startswith("|"):
            break
        cells = _split_md_row(line)
        words.append(cells[0])
        matrix.append(tuple(parse_finding_cell(c, empty_marker) for c in cells[1:]))
    return tuple(words), cohorts, tuple(matrix)


# ---------------------------------------------------------------------------
# SVG stem plot

_MARGIN_LEFT = 64
_MARGIN_RIGHT = 24
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 56


def _f(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


@dataclass(frozen=True)
class PlotGeometry:
    """Pixel mapping shared by the renderer and its tests."""

    width: int
    height: int
    max_lag: int

    @property
    def x0(self) -> float:
        return _MARGIN_LEFT

    @property
    def x1(self) -> float:
        return self.width - _MARGIN_RIGHT

    @property
    def y_top(self) -> float:
        return _MARGIN_TOP

    @property
    def y_bottom(self) -> float:
        return self.height - _MARGIN_BOTTOM

    def x(self, lag: int) -> float:
        span = 2 * self.max_lag + 2
        return self.x0 + (lag + self.max_lag + 1) * (self.x1 - self.x0) / span

    def y(self, r: float) -> float:
        # correlation axis spans [-1, 1]
        return self.y_top + (1.0 - r) * (self.y_bottom - self.y_top) / 2.0


def render_ccf_plot(r: CcfResult, opts: RenderOptions = RenderOptions(), title: str = "") -> str:
    """SVG 1.1 stem plot of ``r`` with dashed lines at +/- the band half-width."""
    g = PlotGeometry(opts.width, opts.height, r.max_lag)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{opts.width}" height="{opts.height}" '
        f'viewBox="0 0 {opts.width} {opts.height}">',
        f'<rect x="0" y="0" width="{opts.width}" height="{opts.height}" fill="white"/>',
    ]
    title = "".join(ch for ch in title if ch.isprintable())
    if title:
        out.append(f'<text x="{_f(opts.width / 2)}" y="{_f(_MARGIN_TOP / 2 + 4)}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{escape(title)}</text>')
    # frame + correlation ticks
    out.append(f'<rect class="frame" x="{_f(g.x0)}" y="{_f(g.y_top)}" width="{_f(g.x1 - g.x0)}" '
               f'height="{_f(g.y_bottom - g.y_top)}" fill="none" stroke="black" stroke-width="1"/>')
    for tick in (-1.0, -0.5, 0.0, 0.5, 1.0):
        y = g.y(tick)
        out.append(f'<line class="ytick" x1="{_f(g.x0 - 5)}" y1="{_f(y)}" x2="{_f(g.x0)}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{_f(g.x0 - 8)}" y="{_f(y + 4)}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{tick:g}</text>')
    for lag in r.lags:
        x = g.x(int(lag))
        out.append(f'<line class="xtick" x1="{_f(x)}" y1="{_f(g.y_bottom)}" x2="{_f(x)}" y2="{_f(g.y_bottom + 5)}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(g.y_bottom + 18)}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{int(lag)}</text>')
    out.append(f'<text x="{_f((g.x0 + g.x1) / 2)}" y="{_f(opts.height - 12)}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">lag</text>')
    out.append(f'<text x="16" y="{_f((g.y_top + g.y_bottom) / 2)}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 16 {_f((g.y_top + g.y_bottom) / 2)})">correlation</text>')
    # zero axis and significance band
    out.append(f'<line class="zero" x1="{_f(g.x0)}" y1="{_f(g.y(0.0))}" x2="{_f(g.x1)}" y2="{_f(g.y(0.0))}" '
               f'stroke="black" stroke-width="1"/>')
    for side, level in (("upper", r.threshold), ("lower", -r.threshold)):
        y = g.y(level)
        out.append(f'<line class="band" data-side="{side}" x1="{_f(g.x0)}" y1="{_f(y)}" x2="{_f(g.x1)}" y2="{_f(y)}" '
                   f'stroke="blue" stroke-width="1" stroke-dasharray="6,4"/>')
    for lag, c in zip(r.lags, r.correlations):
        x = g.x(int(lag))
        out.append(f'<line class="stem" data-lag="{int(lag)}" data-r="{float(c):.6f}" x1="{_f(x)}" '
                   f'y1="{_f(g.y(0.0))}" x2="{_f(x)}" y2="{_f(g.y(float(c)))}" stroke="black" stroke-width="2"/>')
    note = f"n={r.n}, alpha={_fmt_alpha(r.alpha)}, band=±{r.threshold:.4f}"
    out.append(f'<text class="caption" x="{_f(g.x1)}" y="{_f(g.y_top - 6)}" text-anchor="end" '
               f'font-family="sans-serif" font-size="11">{escape(note)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


__all__ = [
    "PlotGeometry",
    "RenderOptions",
    "SignNotation",
    "TableFormat",
    "format_finding",
    "parse_markdown_table",
    "render_ccf_plot",
    "render_table",
]
