"""Synthetic regression problems with a known spectrum and source condition.

Inputs are ``x = (sqrt(sigma_1) z_1, ..., sqrt(sigma_d) z_d)`` with
Rademacher ``z``, so ``|x|^2 = sum(sigma)`` for every draw and the coordinate
functions ``x_i / sqrt(sigma_i)`` are an orthonormal eigenbasis of the
integral operator with eigenvalues ``sigma_i = i^(-1/gamma)``. The target is
linear, ``f_H(x) = <w_true, x>``, with eigen-coefficients
``c_i = sqrt(sigma_i) w_true_i`` placed on the edge of the source condition:
``c_i = R' sigma_i^zeta i^(-1/2 - eps)`` with ``sum (c_i sigma_i^-zeta)^2 = R^2``.
Labels add Gaussian noise.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidModel, InvalidNormSpec
from .kernels import DataSet

MC_CHUNK = 16384


@dataclass(frozen=True, eq=False)
class SynthModel:
    gamma: float
    zeta: float
    R: float
    noise_sigma: float
    eps: float
    sigma: np.ndarray
    w_true: np.ndarray

    @property
    def d(self):
        return self.sigma.shape[0]

    @property
    def kappa_sq(self):
        return math.fsum(self.sigma)

    @property
    def coefficients(self):
        """Coefficients of ``f_H`` in the normalized eigenbasis."""
        return np.sqrt(self.sigma) * self.w_true

    def source_norm(self):
        """``|g_0|`` where ``f_H = L^zeta g_0``."""
        g0 = self.coefficients * self.sigma ** (-self.zeta)
        return math.sqrt(math.fsum(g0**2))

    def f_H(self, X):
        return np.asarray(X, dtype=float) @ self.w_true


def default_dimension(gamma, zeta, n_max, floor=1000, factor=10):
    """Truncation dimension keeping ``factor`` times the active eigen-directions.

    At the theory-rule ``lam`` the estimator resolves about ``lam^-gamma =
    n^(gamma / (1 v (2 zeta + gamma)))`` directions.
    """
    expo = gamma / max(1.0, 2 * zeta + gamma)
    return int(max(floor, math.ceil(factor * n_max**expo)))


def make_model(gamma, zeta, d, R=1.0, noise_sigma=0.5, eps=0.05, seed=None):
    """Build a :class:`SynthModel`; ``seed`` (if given) randomizes coefficient signs."""
    if not 0 < gamma <= 1:
        raise InvalidModel("gamma must lie in (0, 1]")
    if zeta < 0:
        raise InvalidModel("zeta must be nonnegative")
    if int(d) != d or d < 8:
        raise InvalidModel("d must be an integer >= 8")
    if not R > 0 or noise_sigma < 0 or not eps > 0:
        raise InvalidModel("need R > 0, noise_sigma >= 0, eps > 0")
    d = int(d)
    i = np.arange(1, d + 1, dtype=float)
    sigma = i ** (-1.0 / gamma)
    shape = i ** (-0.5 - eps)
    scale = R / math.sqrt(math.fsum(shape**2))
    c = scale * sigma**zeta * shape
    if seed is not None:
        c = c * (2.0 * np.random.default_rng(seed).integers(0, 2, size=d) - 1.0)
    w = c / np.sqrt(sigma)
    return SynthModel(float(gamma), float(zeta), float(R), float(noise_sigma),
                      float(eps), sigma, w)


def sample(model, n, seed=0):
    """Draw ``n`` labelled points from the model."""
    if int(n) < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    z = 2.0 * rng.integers(0, 2, size=(int(n), model.d), dtype=np.int8) - 1.0
    X = z * np.sqrt(model.sigma)
    y = X @ model.w_true
    if model.noise_sigma > 0:
        y = y + model.noise_sigma * rng.standard_normal(int(n))
    return DataSet(X, y)


@dataclass(frozen=True)
class NormSpec:
    a: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.a <= 0.5:
            raise InvalidNormSpec("a must lie in [0, 1/2]")


def error_norm(model, w_hat, spec=NormSpec()):
    """``|L^-a (f_hat - f_H)|_rho = sqrt(sum sigma_i^(1-2a) (w_hat_i - w_i)^2)``.

    ``a = 0`` gives the root excess risk.
    """
    a = spec.a if isinstance(spec, NormSpec) else float(spec)
    if not 0.0 <= a <= 0.5 or a > model.zeta:
        raise InvalidNormSpec(f"a={a} must lie in [0, min(1/2, zeta={model.zeta})]")
    diff = np.asarray(w_hat, dtype=float) - model.w_true
    if diff.shape != model.w_true.shape:
        raise ValueError("w_hat has the wrong length")
    return math.sqrt(math.fsum(model.sigma ** (1 - 2 * a) * diff**2))


def excess_risk_mc(model, predictor, n_mc, seed=0, return_se=False):
    """Monte Carlo estimate of ``E (predictor(x) - f_H(x))^2`` on fresh inputs."""
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    left = int(n_mc)
    if left < 1:
        raise ValueError("n_mc must be positive")
    while left:
        k = min(left, MC_CHUNK)
        z = 2.0 * rng.integers(0, 2, size=(k, model.d), dtype=np.int8) - 1.0
        X = z * np.sqrt(model.sigma)
        sq = (np.asarray(predictor(X), dtype=float) - model.f_H(X)) ** 2
        total += sq.sum()
        total_sq += (sq**2).sum()
        left -= k
    mean = total / n_mc
    if not return_se:
        return mean
    var = max(total_sq / n_mc - mean**2, 0.0)
    return mean, math.sqrt(var / n_mc)


def population_effective_dim(model, lam):
    """``N(lam) = sum sigma_i / (sigma_i + lam)`` over the retained spectrum."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return math.fsum(model.sigma / (model.sigma + lam))

