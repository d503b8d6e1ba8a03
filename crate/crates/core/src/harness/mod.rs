//! Experiment runner: sweeps sample fractions and trials for a set of
//! samplers, compares every estimate against the exact spectrum and writes
//! one CSV row per (sampler, fraction, trial, target rank).

mod config;
mod experiment;
mod slope;
mod spec;

pub use config::{ExperimentConfig, TargetIndex, KEYS as CONFIG_KEYS};
pub use experiment::{
    exact_spectrum_cached, format_float, read_results, run_experiment, run_sampler, write_results, write_results_to, ResultRow, CSV_HEADER,
    ZERO_BASELINE,
};
pub use slope::{aggregate_series, slope_fit, SeriesPoint};
pub use spec::{MatrixSpec, TestMatrix};
