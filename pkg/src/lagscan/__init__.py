"""Screen pairs of time series for statistically significant lagged cross-correlations."""

from .ccf import (
    CcfResult,
    Sign,
    SignificantLag,
    cross_correlation,
    normal_quantile,
    significance_threshold,
    significant_lags,
)
from .errors import LagscanError
from .ingest import SeriesFileSpec, load_run, read_series, write_series
from .report import RenderOptions, parse_markdown_table, render_ccf_plot, render_table
from .screening import Correction, ScreenConfig, ScreenTable, bonferroni_alpha, run_grid
from .series import (
    Aggregation,
    Frequency,
    PreprocessSpec,
    TimeSeries,
    TransformOrder,
    aggregate_annual_mean,
    difference,
    log_transform,
    preprocess,
)
from .synth import PlantSpec, generate_lagged_pair, oracle_ccf

__version__ = "0.1.0"
