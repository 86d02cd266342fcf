"""Computable quantities around the sketched estimator.

* empirical effective dimension ``N_x(lam) = tr(T_x (T_x + lam)^-1)``;
* empirical projection error ``|(I - P) T_x^(1/2)|^2``;
* population projection error ``|(I - P) T^(1/2)|^2`` (synthetic models);
* a randomized probe of the operator inequality
  ``|A^s (I-P) A^t| <= |A-B|^(s+t) + |B^(1/2) (I-P) B^(1/2)|^(s+t)``.

Spectral norms come from full symmetric eigendecompositions.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidProjection, InvalidRegularization, ShapeMismatch, UnsupportedSize
from .estimator import sketched_basis
from .linalg import DEFAULT_TOL, as_symmetric, pinv_psd, psd_power, spectral_norm, sym_eigvals
from .synthworld import population_effective_dim

MAX_POPULATION_DIM = 100_000


@dataclass(frozen=True)
class ProjectionReport:
    lam: float
    empirical_sq: float
    population_sq: float = None

    @property
    def bound_6lambda_ok(self):
        return self.empirical_sq <= 6 * self.lam

    @property
    def bound_3lambda_ok(self):
        return self.empirical_sq <= 3 * self.lam


@dataclass(frozen=True)
class EffectiveDimReport:
    lam: float
    empirical: float
    population: float = None


def _effdim_from_spectrum(s, lam):
    s = np.clip(s, 0.0, None)
    return float(np.sum(s / (s + lam)))


def empirical_effective_dim(K_bar, lam):
    """``sum s / (s + lam)`` over the eigenvalues of ``K_bar``.

    Any PSD matrix with the same nonzero spectrum as ``T_x`` works, e.g.
    ``X^T X / n`` for a linear kernel.
    """
    if not lam > 0:
        raise InvalidRegularization(f"lambda must be positive, got {lam}")
    return _effdim_from_spectrum(sym_eigvals(K_bar), lam)


def effective_dim_report(K_bar, lam, model=None):
    pop = population_effective_dim(model, lam) if model is not None else None
    return EffectiveDimReport(float(lam), empirical_effective_dim(K_bar, lam), pop)


def projection_error_empirical(K_bar, G, tol=DEFAULT_TOL):
    """``|K_bar - K_bar G^T M^+ G K_bar|`` with ``M = G K_bar G^T``.

    Its nonzero spectrum is that of ``(I - P) T_x (I - P)``, so the value is
    ``|(I - P) T_x^(1/2)|^2``.
    """
    K_bar = as_symmetric(K_bar)
    if G.n != K_bar.shape[0]:
        raise ShapeMismatch(f"sketch has {G.n} columns, K_bar is {K_bar.shape}")
    A = G.apply(K_bar)
    M = G.apply(A.T).T
    E = K_bar - A.T @ pinv_psd(0.5 * (M + M.T), tol) @ A
    return max(spectral_norm(0.5 * (E + E.T)), 0.0)


def projection_error_features(X, G, tol=DEFAULT_TOL):
    """Linear-kernel version of :func:`projection_error_empirical` computed in R^d."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if G.n != n:
        raise ShapeMismatch(f"sketch has {G.n} columns, design has {n} rows")
    if G.kind == "identity":
        return 0.0
    Q = sketched_basis(X, G, tol)
    R = X - (X @ Q) @ Q.T
    if R.shape[1] <= n:
        E = R.T @ R / n
    else:
        E = R @ R.T / n
    return max(spectral_norm(0.5 * (E + E.T)), 0.0)


def projection_error_population(model, X, G, tol=DEFAULT_TOL):
    """``|T^(1/2) (I - P) T^(1/2)|`` with ``T = diag(sigma)`` of a synthetic model."""
    if model.d > MAX_POPULATION_DIM:
        raise UnsupportedSize(f"d={model.d} too large to materialize")
    Q = sketched_basis(X, G, tol)
    r = np.sqrt(model.sigma)
    RQ = r[:, None] * Q
    E = np.diag(model.sigma) - RQ @ RQ.T
    return max(spectral_norm(0.5 * (E + E.T)), 0.0)


def projection_report(X, G, lam, model=None, tol=DEFAULT_TOL):
    emp = projection_error_features(X, G, tol)
    pop = projection_error_population(model, X, G, tol) if model is not None else None
    return ProjectionReport(float(lam), emp, pop)


@dataclass(frozen=True)
class ProjectedPowerResult:
    lhs: float
    rhs: float
    holds: bool


def projected_power_probe(A, B, P_basis, s, t):
    """Evaluate both sides of the projection inequality for PSD ``A``, ``B``.

    ``P_basis`` holds an orthonormal basis of the range of ``P`` as columns
    (zero columns means ``P = 0``).
    """
    A = as_symmetric(A)
    B = as_symmetric(B)
    if A.shape != B.shape:
        raise ShapeMismatch("A and B must have the same shape")
    if not (0 <= s <= 0.5 and 0 <= t <= 0.5):
        raise ValueError("s and t must lie in [0, 1/2]")
    Q = np.asarray(P_basis, dtype=float).reshape(A.shape[0], -1)
    if np.max(np.abs(Q.T @ Q - np.eye(Q.shape[1])), initial=0.0) > 1e-10:
        raise InvalidProjection("P_basis columns are not orthonormal")
    I_P = np.eye(A.shape[0]) - Q @ Q.T
    lhs_mat = psd_power(A, s) @ I_P @ psd_power(A, t)
    lhs = float(np.linalg.norm(lhs_mat, 2))
    Bh = psd_power(B, 0.5)
    e = s + t
    rhs = spectral_norm(A - B) ** e + spectral_norm(Bh @ I_P @ Bh) ** e
    # absolute slack absorbs rounding when both sides vanish
    return ProjectedPowerResult(lhs, float(rhs), bool(lhs <= rhs * (1 + 1e-8) + 1e-12))
