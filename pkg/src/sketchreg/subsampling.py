"""Nyström column selection and ridge leverage scores.

``K_bar`` always denotes the normalized Gram matrix ``gram / n``. Leverage
scores at level ``lam`` are the diagonal of ``K_bar (K_bar + lam I)^{-1}``;
they sum to the empirical effective dimension.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScores, InvalidDimension, InvalidRegularization
from .linalg import as_symmetric, sym_eig
from .sketching import row_selection

# exact reference scores are only computed for als_factor up to this size
ALS_VERIFY_MAX_N = 4096


@dataclass(frozen=True)
class LeverageScores:
    lam: float
    scores: np.ndarray
    als_factor: float = 1.0  # None when no exact reference was computed

    @property
    def n(self):
        return self.scores.shape[0]


def _check_lam(lam):
    if not lam > 0:
        raise InvalidRegularization(f"lambda must be positive, got {lam}")


def _exact_scores(K_bar, lam):
    eig = sym_eig(K_bar)
    s = np.clip(eig.eigenvalues, 0.0, None)
    V = eig.eigenvectors
    return np.clip((V**2) @ (s / (s + lam)), 0.0, 1.0)


def leverage_scores_exact(K_bar, lam):
    _check_lam(lam)
    return LeverageScores(float(lam), _exact_scores(as_symmetric(K_bar), lam), 1.0)


def leverage_scores_features(X, lam):
    """Exact scores for a linear kernel, computed in feature space.

    ``l_i = x_i^T (X^T X + n lam I)^{-1} x_i``, which equals the Gram-based
    definition but costs O(n d^2) instead of O(n^3).
    """
    _check_lam(lam)
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    A = X.T @ X + n * lam * np.eye(d)
    sol = np.linalg.solve(A, X.T)
    return LeverageScores(float(lam), np.clip(np.einsum("ij,ji->i", X, sol), 0.0, 1.0), 1.0)


def _ridge_nystrom_scores(diag, C, W, lam, m0, n):
    # l_i ~ (K_ii - C_i (W + lam*m0/n I)^{-1} C_i^T) / lam, with C = K[:, S], W = K[S, S]
    R = W + lam * (m0 / n) * np.eye(m0)
    sol = np.linalg.solve(0.5 * (R + R.T), C.T)
    quad = np.einsum("ij,ji->i", C, sol)
    return np.clip((diag - quad) / lam, 0.0, 1.0)


def _als_factor(exact, approx):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.maximum(exact / approx, approx / exact)
    r[(exact == 0) & (approx == 0)] = 1.0
    return float(np.max(r))


def leverage_scores_approx(K_bar, lam, m0, seed=0, verify=True):
    """Approximate ridge leverage scores from ``m0`` uniformly drawn columns.

    Uses the regularized Nyström estimate
    ``(K_ii - K_iS (K_SS + lam m0/n I)^{-1} K_Si) / lam``, clipped to [0, 1];
    with ``m0 = n`` it reproduces the exact scores. When ``n`` is small enough
    the exact scores are computed too and ``als_factor`` reports
    ``max_i max(l_i / l^_i, l^_i / l_i)``; otherwise it is ``None``.
    """
    _check_lam(lam)
    K_bar = as_symmetric(K_bar)
    n = K_bar.shape[0]
    m0 = int(m0)
    if not 1 <= m0 <= n:
        raise InvalidDimension(f"m0 must be in [1, {n}], got {m0}")
    S = np.sort(np.random.default_rng(seed).choice(n, size=m0, replace=False))
    approx = _ridge_nystrom_scores(np.diag(K_bar), K_bar[:, S], K_bar[np.ix_(S, S)], lam, m0, n)
    factor = None
    if verify and n <= ALS_VERIFY_MAX_N:
        factor = _als_factor(_exact_scores(K_bar, lam), approx)
    return LeverageScores(float(lam), approx, factor)


def leverage_scores_approx_features(X, lam, m0, seed=0, verify=True):
    """Same estimate as :func:`leverage_scores_approx` for a linear kernel on ``X``."""
    _check_lam(lam)
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    m0 = int(m0)
    if not 1 <= m0 <= n:
        raise InvalidDimension(f"m0 must be in [1, {n}], got {m0}")
    S = np.sort(np.random.default_rng(seed).choice(n, size=m0, replace=False))
    C = X @ X[S].T / n
    diag = np.einsum("ij,ij->i", X, X) / n
    approx = _ridge_nystrom_scores(diag, C, C[S], lam, m0, n)
    factor = None
    if verify:
        factor = _als_factor(leverage_scores_features(X, lam).scores, approx)
    return LeverageScores(float(lam), approx, factor)


def nystrom_uniform(n, m, seed=0):
    """Plain Nyström: m distinct indices drawn uniformly, unit weights."""
    n, m = int(n), int(m)
    if not 1 <= m <= n:
        raise InvalidDimension(f"need 1 <= m <= n, got m={m}, n={n}")
    idx = np.random.default_rng(seed).choice(n, size=m, replace=False)
    return row_selection(idx, np.ones(m), n, seed)


def nystrom_als(scores, m, seed=0):
    """Leverage-score Nyström: m i.i.d. draws with ``q_i = l_i / sum_j l_j``.

    Row j selects index ``i_j`` with weight ``1 / sqrt(m q_{i_j})`` so that
    ``E[G^T G] = I``.
    """
    s = scores.scores if isinstance(scores, LeverageScores) else np.asarray(scores, float)
    m = int(m)
    if m < 1:
        raise InvalidDimension("m must be positive")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise DegenerateScores("scores must be finite and nonnegative")
    total = s.sum()
    if total <= 0:
        raise DegenerateScores("all leverage scores are zero")
    q = s / total
    idx = np.random.default_rng(seed).choice(s.shape[0], size=m, replace=True, p=q)
    return row_selection(idx, 1.0 / np.sqrt(m * q[idx]), s.shape[0], seed)
