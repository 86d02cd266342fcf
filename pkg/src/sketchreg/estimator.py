"""Projected spectral-filter regression.

The estimator is ``w = P g_lam(P T_x P) P S_x^* y_bar`` where ``P`` projects
onto ``span{X^T G^T}`` (the sketched span of the training inputs). With an
identity sketch this is the classic spectral-filter estimator; with
``iterated_ridge`` of order 1 it is kernel ridge regression.

Kernel coordinates
------------------
With ``K_bar = K / n``, ``A = G K_bar`` and ``M = A G^T``, a whitening
``W`` of ``M`` gives an orthonormal basis of the sketched span. The reduced
operator ``H = W^T A A^T W`` represents ``P T_x P`` in that basis, and

    beta = W V g(Lambda) V^T W^T A y / n,       H = V Lambda V^T,

predicts ``f(x) = k_x^T G^T beta``. The ``1/sqrt(n)`` of the sampling
operator and the ``1/sqrt(n)`` in ``y_bar`` combine into the single ``1/n``.

For linear kernels :func:`fit_linear` runs the same computation directly in
R^d, which is what the rate experiments use at large n.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidRegularization, ShapeMismatch, UnsupportedKernel
from .filters import FilterSpec, apply_filter
from .linalg import DEFAULT_TOL, as_symmetric, orthonormal_basis, sym_eig, whitening_transform
from .sketching import SketchOperator


@dataclass(frozen=True)
class RegConfig:
    lam: float
    filter: FilterSpec = field(default_factory=FilterSpec.iterated_ridge)
    allow_out_of_range: bool = False

    def check(self, n):
        """Enforce ``1/n <= lam <= 1``; with the override flag only warn."""
        if not self.lam > 0:
            raise InvalidRegularization(f"lambda must be positive, got {self.lam}")
        if not 1.0 / n <= self.lam <= 1.0:
            msg = f"lambda={self.lam} outside [1/n, 1] for n={n}"
            if not self.allow_out_of_range:
                raise InvalidRegularization(msg)
            warnings.warn(msg, stacklevel=3)


@dataclass(frozen=True, eq=False)
class FitResult:
    beta: np.ndarray
    sketch: SketchOperator
    rank: int
    lam: float
    filter: FilterSpec
    kernel: object = None

    @property
    def dual_coef(self):
        """``G^T beta``: coefficients against the training kernel rows."""
        return self.sketch.apply_transpose(self.beta)


def _filter_on(eigenvalues, cfg):
    return apply_filter(cfg.filter, np.clip(eigenvalues, 0.0, None), cfg.lam)


def fit(K, y, G, cfg, tol=DEFAULT_TOL, kernel=None):
    """Fit the sketched estimator from an unnormalized Gram matrix ``K``."""
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(y))):
        raise InvalidInput("NaN or infinite values in Gram matrix or labels")
    K = as_symmetric(K, "Gram matrix")
    n = K.shape[0]
    if y.shape[0] != n or G.n != n:
        raise ShapeMismatch(f"Gram is {n}x{n}, labels {y.shape[0]}, sketch {G.shape}")
    cfg.check(n)
    K_bar = K / n
    A = G.apply(K_bar)
    M = G.apply(A.T).T
    W, rank = whitening_transform(0.5 * (M + M.T), tol)
    if rank == 0:
        return FitResult(np.zeros(G.m), G, 0, cfg.lam, cfg.filter, kernel)
    B = W.T @ A
    eig = sym_eig(B @ B.T)
    V = eig.eigenvectors
    coef = V.T @ (B @ y)
    beta = W @ (V @ (_filter_on(eig.eigenvalues, cfg) * coef)) / n
    return FitResult(beta, G, rank, cfg.lam, cfg.filter, kernel)


def predict(fit_result, cross):
    """Evaluate at test points given their kernel rows against the training set."""
    C = np.asarray(cross, dtype=float)
    vec = C.ndim == 1
    if vec:
        C = C[None, :]
    if C.shape[1] != fit_result.sketch.n:
        raise ShapeMismatch(f"kernel rows must have {fit_result.sketch.n} columns")
    out = C @ fit_result.dual_coef
    return out[0] if vec else out


def extract_primal_weights(fit_result, X, kernel=None, check=True):
    """Weight vector ``w = X^T G^T beta`` of a linear-kernel fit.

    ``<w, x>`` equals :func:`predict` on ``x``; with ``check`` this is
    verified on five random probes.
    """
    kernel = kernel if kernel is not None else fit_result.kernel
    if kernel is None or getattr(kernel, "family", None) != "linear":
        raise UnsupportedKernel("primal weights exist only for the linear kernel")
    X = np.asarray(X, dtype=float)
    if X.shape[0] != fit_result.sketch.n:
        raise ShapeMismatch("design matrix does not match the fit")
    w = X.T @ fit_result.dual_coef
    if check:
        probes = np.random.default_rng(0).standard_normal((5, X.shape[1]))
        via_kernel = predict(fit_result, probes @ X.T)
        direct = probes @ w
        scale = 1.0 + np.max(np.abs(via_kernel))
        if np.max(np.abs(direct - via_kernel)) > 1e-10 * scale:
            raise InvalidInput("primal weights disagree with kernel predictions")
    return w


@dataclass(frozen=True, eq=False)
class PrimalFit:
    """Feature-space fit of a linear kernel; ``weights`` lives in R^d."""

    weights: np.ndarray
    rank: int
    lam: float
    filter: FilterSpec
    sketch: SketchOperator
    # nonzero spectrum of T_x, available when the identity sketch was used
    tx_eigenvalues: np.ndarray = None

    def predict(self, X):
        return np.asarray(X, dtype=float) @ self.weights


def sketched_basis(X, G, tol=DEFAULT_TOL):
    """Orthonormal basis (d, r) of ``span{X^T G^T}``, the range of ``P``."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    Z = G.apply(X).T
    if G.m <= d:
        W, _ = whitening_transform(Z.T @ Z, tol)
        return Z @ W
    return orthonormal_basis(Z, tol)


def fit_linear(X, y, G, cfg, tol=DEFAULT_TOL):
    """Fit the sketched estimator for the linear kernel directly in R^d."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise InvalidInput("NaN or infinite values in design or labels")
    n, d = X.shape
    if y.shape[0] != n or G.n != n:
        raise ShapeMismatch(f"design is {X.shape}, labels {y.shape[0]}, sketch {G.shape}")
    cfg.check(n)
    if G.kind == "identity":
        if n < d:
            eig = sym_eig(X @ X.T / n)
        else:
            eig = sym_eig(X.T @ X / n)
        s = np.clip(eig.eigenvalues, 0.0, None)
        keep = s > tol * s[0] if s[0] > 0 else np.zeros(s.shape, bool)
        s, V = s[keep], eig.eigenvectors[:, keep]
        g = _filter_on(s, cfg)
        if n < d:
            w = X.T @ (V @ (g * (V.T @ y))) / n
        else:
            w = V @ (g * (V.T @ (X.T @ y))) / n
        return PrimalFit(w, int(keep.sum()), cfg.lam, cfg.filter, G, s)
    Q = sketched_basis(X, G, tol)
    r = Q.shape[1]
    if r == 0:
        return PrimalFit(np.zeros(d), 0, cfg.lam, cfg.filter, G)
    XQ = X @ Q
    eig = sym_eig(XQ.T @ XQ / n)
    V = eig.eigenvectors
    coef = V.T @ (XQ.T @ y) / n
    w = Q @ (V @ (_filter_on(eig.eigenvalues, cfg) * coef))
    return PrimalFit(w, r, cfg.lam, cfg.filter, G)
