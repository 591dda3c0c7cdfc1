"""``lagscan`` command line.

Exit codes: 0 success, 1 runtime or data error, 2 usage error. Results go
to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .ccf import cross_correlation, significant_lags
from .errors import LagscanError
from .ingest import SeriesFileSpec, load_run, read_series
from .report import RenderOptions, TableFormat, render_ccf_plot, render_table
from .screening import LAG_CONVENTION, Correction, ScreenConfig, align_pair, run_grid
from .series import Aggregation, PreprocessSpec, TransformOrder
from .synth import PlantSpec, PlantSpecError, write_simulation

SMALL_N = 10
PROG = "lagscan"


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


class _Stage:
    """``with _Stage("read"):`` tags data/IO failures with the stage name."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (LagscanError, OSError)):
            raise StageError(self.name, exc) from exc
        return False


def _err(msg: str) -> None:
    print(f"{PROG}: {msg}", file=sys.stderr)


def _small_n_notice(n: int, enabled: bool) -> None:
    if enabled and n < SMALL_N:
        _err(f"notice: effective sample size n={n} is below {SMALL_N}; significance bands are wide "
             f"and findings are fragile")


def _alpha(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 1), got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _strength(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"strength must be in [0, 1], got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=PROG, description="Screen time-series pairs for significant lagged cross-correlations.")
    sub = p.add_subparsers(dest="command", metavar="{ccf,screen,simulate}")
    sub.required = True
    orders = [o.value for o in TransformOrder]

    c = sub.add_parser("ccf", help="cross-correlate one word series with one cohort series")
    c.add_argument("--word", required=True, type=Path, help="word (search) series CSV")
    c.add_argument("--cohort", required=True, type=Path, help="cohort (mortality) series CSV")
    c.add_argument("--alpha", type=_alpha, default=0.1)
    c.add_argument("--max-lag", type=_positive_int, default=3)
    c.add_argument("--transform-order", choices=orders, default=TransformOrder.LOG_THEN_DIFFERENCE.value)
    c.add_argument("--plot", type=Path, help="write an SVG stem plot here")
    c.add_argument("--warn-small-n", action=argparse.BooleanOptionalAction, default=True)

    s = sub.add_parser("screen", help="run a word x cohort grid from a config file")
    s.add_argument("--config", required=True, type=Path)
    s.add_argument("--out", type=Path, help="write the table here instead of stdout")
    s.add_argument("--format", choices=[f.value for f in TableFormat], default=TableFormat.MARKDOWN.value)
    s.add_argument("--correction", choices=[c.value for c in Correction], help="override the config's correction")
    s.add_argument("--alpha", type=_alpha, help="override the config's alpha")
    s.add_argument("--warn-small-n", action=argparse.BooleanOptionalAction, default=True)

    m = sub.add_parser("simulate", help="write a planted-lag fixture pair and a screen config")
    m.add_argument("--seed", required=True, type=int)
    m.add_argument("--n", required=True, type=int)
    m.add_argument("--lag", required=True, type=int)
    m.add_argument("--strength", required=True, type=_strength)
    m.add_argument("--out-dir", required=True, type=Path)
    m.add_argument("--alpha", type=_alpha, help="alpha written into the generated config")
    m.add_argument("--max-lag", type=_positive_int, help="max_lag written into the generated config")
    m.set_defaults(subparser=m)
    return p


def cmd_ccf(args) -> int:
    order = TransformOrder(args.transform_order)
    with _Stage("read"):
        word = read_series(SeriesFileSpec(args.word, "word"))
        cohort = read_series(SeriesFileSpec(args.cohort, "cohort"))
    cfg = ScreenConfig(
        alpha=args.alpha,
        max_lag=args.max_lag,
        preprocess_word=PreprocessSpec(Aggregation.ANNUAL_MEAN, order),
        preprocess_cohort=PreprocessSpec(Aggregation.ANNUAL_MEAN, order),
    )
    with _Stage("preprocess"):
        w, c = align_pair(word, cohort, cfg)
    with _Stage("ccf"):
        r = cross_correlation(w, c, args.max_lag, args.alpha)
    _small_n_notice(r.n, args.warn_small_n)
    flagged = {f.lag for f in significant_lags(r)}
    out = sys.stdout
    out.write(f"# {LAG_CONVENTION}\n")
    out.write(f"# n={r.n} alpha={args.alpha:g} threshold={r.threshold:.6f}\n")
    out.write("lag\tcorrelation\tsignificant\n")
    for lag, v in zip(r.lags, r.correlations):
        out.write(f"{int(lag)}\t{v:.6f}\t{'yes' if int(lag) in flagged else 'no'}\n")
    if args.plot is not None:
        with _Stage("plot"):
            svg = render_ccf_plot(r, RenderOptions(), title=f"{args.word.stem} vs {args.cohort.stem}")
            args.plot.write_text(svg, encoding="utf-8")
    return 0


def cmd_screen(args) -> int:
    overrides = {"correction": Correction(args.correction) if args.correction else None, "alpha": args.alpha}
    with _Stage("config"):
        words, cohorts, cfg = load_run(args.config, overrides)
    with _Stage("screen"):
        table = run_grid(words, cohorts, cfg)
    ns = [v for row in table.meta.n for v in row if v is not None]
    if ns:
        _small_n_notice(min(ns), args.warn_small_n)
    for msg in table.meta.errors.values():
        _err(f"skipped {msg}")
    text = render_table(table, RenderOptions(format=args.format))
    if args.out is not None:
        with _Stage("write"):
            args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(
        f"{table.count()} significant findings across {table.meta.tests} tests "
        f"(alpha={cfg.alpha:g}, correction={cfg.correction.value})"
    )
    return 0


def cmd_simulate(args) -> int:
    try:
        spec = PlantSpec(n=args.n, lag=args.lag, strength=args.strength, seed=args.seed)
    except PlantSpecError as exc:
        args.subparser.error(str(exc))
    with _Stage("write"):
        paths = write_simulation(spec, args.out_dir, alpha=args.alpha, max_lag=args.max_lag)
    for key in ("word", "cohort", "config"):
        print(paths[key])
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ccf":
            return cmd_ccf(args)
        if args.command == "screen":
            return cmd_screen(args)
        return cmd_simulate(args)
    except StageError as exc:
        _err(" ".join(str(exc).split()))
        return 1
    except LagscanError as exc:
        _err(" ".join(str(exc).split()))
        return 1


if __name__ == "__main__":
    sys.exit(main())
