"""Experiment harness: rate sweeps, sketch-dimension sweeps, diagnostics, benchmarks."""
from .config import ExperimentConfig, load_config, parse_config, rate_exponent, sketch_dim, target_slope
from .ingest import emit_dataset, ingest_dataset
from .report import RateFit, emit_report, fit_rate
from .runs import Table, run_bench, run_diagnose, run_rates, run_sketchdim, trial_seeds
