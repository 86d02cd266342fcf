"""Spectral filter functions and their qualification constants.

A filter ``g_lam(u)`` regularizes ``1/u`` on the spectrum of an operator.
Two families are provided:

* ``iterated_ridge`` of order ``tau``: ``sum_{i=1}^{tau} lam^{i-1} (lam+u)^{-i}``,
  with residual ``1 - g(u) u = (lam / (lam + u))^tau``. ``tau = 1`` is ridge.
* ``spectral_cutoff``: ``1/u`` for ``u >= lam`` and 0 below (PCA regression).
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGrid, InvalidRegularization

# grid of qualification exponents alpha, as fractions of tau
ALPHA_FRACTIONS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class FilterSpec:
    family: str
    tau: float
    declared_E: float = None
    declared_F: float = None

    def __post_init__(self):
        if self.family == "iterated_ridge":
            if int(self.tau) != self.tau or self.tau < 1:
                raise ValueError("iterated_ridge needs an integer tau >= 1")
            object.__setattr__(self, "tau", int(self.tau))
            E, F = float(self.tau), 1.0
        elif self.family == "spectral_cutoff":
            if not self.tau > 0:
                raise ValueError("spectral_cutoff needs tau > 0")
            E, F = 2.0, 2.0 ** self.tau
        else:
            raise ValueError(f"unknown filter family {self.family!r}")
        if self.declared_E is None:
            object.__setattr__(self, "declared_E", E)
        if self.declared_F is None:
            object.__setattr__(self, "declared_F", F)

    @classmethod
    def iterated_ridge(cls, tau=1, **kw):
        return cls("iterated_ridge", tau, **kw)

    @classmethod
    def spectral_cutoff(cls, tau=1.0, **kw):
        return cls("spectral_cutoff", tau, **kw)

    @property
    def label(self):
        return self.family


def _check(sigma, lam):
    if not lam > 0:
        raise InvalidRegularization(f"lambda must be positive, got {lam}")
    u = np.asarray(sigma, dtype=float)
    if np.any(u < 0):
        raise ValueError("filter arguments must be nonnegative")
    return u


def apply_filter(f, sigma, lam):
    """Evaluate ``g_lam`` elementwise on ``sigma``.

    The iterated-ridge filter is evaluated through its geometric series
    ``sum_{i<tau} q^i / (lam + u)``, ``q = lam / (lam + u)``, which is finite at
    ``u = 0`` (value ``tau / lam``) and free of the cancellation in
    ``(1 - q^tau) / u``.
    """
    u = _check(sigma, lam)
    if f.family == "iterated_ridge":
        q = lam / (lam + u)
        acc = np.zeros_like(u)
        term = np.ones_like(u)
        for _ in range(f.tau):
            acc = acc + term
            term = term * q
        return acc / (lam + u)
    return np.where(u >= lam, 1.0 / np.maximum(u, lam), 0.0)


def residual(f, sigma, lam):
    """``1 - g_lam(u) u`` elementwise."""
    u = _check(sigma, lam)
    if f.family == "iterated_ridge":
        return (lam / (lam + u)) ** f.tau
    return np.where(u >= lam, 0.0, 1.0)


@dataclass(frozen=True)
class QualificationResult:
    E_hat: float
    F_hat: float
    passed: bool


def qualification_check(f, kappa_sq, lambda_grid, u_grid_size):
    """Grid check of the two filter inequalities.

    ``E_hat`` is the max of ``|g(u) (u + lam)|`` and ``F_hat`` the max of
    ``|r(u)| ((u + lam) / lam)^alpha`` over ``alpha`` in
    ``{0, tau/4, tau/2, 3tau/4, tau}``. The u grid is geometric on
    ``(0, kappa_sq]`` and also contains every lambda that falls inside it,
    where the cut-off filter attains its sup. Passing means both maxima stay
    below the declared constants up to a ``1e-9`` relative slack.
    """
    lams = np.asarray(lambda_grid, dtype=float).reshape(-1)
    if lams.size == 0 or u_grid_size < 1:
        raise InvalidGrid("lambda grid and u grid must be nonempty")
    if np.any(lams <= 0) or np.any(lams > 1):
        raise InvalidGrid("lambda grid must lie in (0, 1]")
    lo = min(lams.min(), kappa_sq) * 1e-3
    u = np.geomspace(lo, kappa_sq, int(u_grid_size))
    u = np.unique(np.concatenate([u, lams[lams <= kappa_sq]]))
    E_hat = 0.0
    F_hat = 0.0
    alphas = [frac * f.tau for frac in ALPHA_FRACTIONS]
    for lam in lams:
        g = apply_filter(f, u, lam)
        r = np.abs(residual(f, u, lam))
        E_hat = max(E_hat, float(np.max(np.abs(g * (u + lam)))))
        ratio = (u + lam) / lam
        for a in alphas:
            F_hat = max(F_hat, float(np.max(r * ratio**a)))
    ok = E_hat <= f.declared_E * (1 + 1e-9) and F_hat <= f.declared_F * (1 + 1e-9)
    return QualificationResult(E_hat, F_hat, bool(ok))
