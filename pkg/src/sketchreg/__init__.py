"""Sketched and Nyström spectral-filter regression with rate diagnostics."""
from .errors import SketchRegError
from .estimator import FitResult, PrimalFit, RegConfig, extract_primal_weights, fit, fit_linear, predict
from .filters import FilterSpec, apply_filter, qualification_check, residual
from .kernels import DataSet, KernelSpec, cross_gram, eval_kernel, gram
from .sketching import SketchOperator, apply_sketch, distortion_probe, fwht, make_sketch, row_selection
from .subsampling import (
    LeverageScores,
    leverage_scores_approx,
    leverage_scores_exact,
    nystrom_als,
    nystrom_uniform,
)
from .synthworld import NormSpec, SynthModel, error_norm, make_model, sample

__version__ = "0.1.0"
