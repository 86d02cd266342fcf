"""Kernel functions and Gram matrices.

Gram matrices are returned unnormalized. The empirical operators used in the
estimator (``T_x`` and ``S_x S_x^*``) correspond to ``gram / n``; callers
divide explicitly.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DomainError, InvalidInput

FAMILIES = ("linear", "gaussian", "sobolev_spline")


@dataclass(frozen=True)
class KernelSpec:
    """A positive-definite kernel together with its bound ``kappa_sq``.

    ``gaussian`` uses ``exp(-|x - x'|^2 / (2 bandwidth^2))`` (bound 1);
    ``sobolev_spline`` is ``min(x, x') (1 - max(x, x'))`` on [0, 1]
    (bound 1/4); ``linear`` is the dot product, and its ``kappa_sq`` is a
    declared bound on ``|x|^2`` that inputs are checked against
    (``inf`` disables the check).
    """

    family: str
    bandwidth: float = None
    kappa_sq: float = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "gaussian":
            if self.bandwidth is None or not self.bandwidth > 0:
                raise ValueError("gaussian kernel needs a positive bandwidth")
            default = 1.0
        elif self.family == "sobolev_spline":
            default = 0.25
        else:
            default = math.inf
        if self.kappa_sq is None:
            object.__setattr__(self, "kappa_sq", default)
        if not self.kappa_sq > 0:
            raise ValueError("kappa_sq must be positive")
        if self.family != "linear" and self.kappa_sq < default:
            raise ValueError(f"kappa_sq for {self.family} must be >= {default}")

    @classmethod
    def linear(cls, kappa_sq=math.inf):
        return cls("linear", kappa_sq=kappa_sq)

    @classmethod
    def gaussian(cls, bandwidth):
        return cls("gaussian", bandwidth=bandwidth)

    @classmethod
    def sobolev(cls):
        return cls("sobolev_spline")


@dataclass(frozen=True)
class DataSet:
    """Sample ``{(x_i, y_i)}``: ``points`` is (n, d), ``labels`` is (n,)."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = as_points(self.points)
        y = np.asarray(self.labels, dtype=float).reshape(-1)
        if X.shape[0] < 1:
            raise InvalidInput("dataset must contain at least one point")
        if y.shape[0] != X.shape[0]:
            raise InvalidInput(f"{X.shape[0]} points but {y.shape[0]} labels")
        if not np.all(np.isfinite(y)):
            raise InvalidInput("labels contain non-finite values")
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


def as_points(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(-1, 1)
    elif X.ndim != 2:
        raise InvalidInput(f"points must be 1-D or 2-D, got {X.ndim}-D")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("points contain non-finite values")
    return X


def _check_domain(spec, X):
    if spec.family == "sobolev_spline":
        if X.shape[1] != 1:
            raise DomainError("sobolev_spline kernel takes scalar inputs")
        if np.any(X < 0.0) or np.any(X > 1.0):
            raise DomainError("sobolev_spline inputs must lie in [0, 1]")
    elif spec.family == "linear" and math.isfinite(spec.kappa_sq):
        sq = np.einsum("ij,ij->i", X, X)
        if np.any(sq > spec.kappa_sq * (1 + 1e-12)):
            raise DomainError(f"input norm exceeds declared kappa_sq={spec.kappa_sq}")


def _block(spec, A, B):
    if spec.family == "linear":
        return A @ B.T
    if spec.family == "gaussian":
        return np.exp(-cdist(A, B, "sqeuclidean") / (2.0 * spec.bandwidth**2))
    a = A[:, 0][:, None]
    b = B[:, 0][None, :]
    return np.minimum(a, b) * (1.0 - np.maximum(a, b))


def eval_kernel(spec, x, x2):
    """Kernel value for a single pair of points."""
    X = as_points(np.asarray(x, dtype=float).reshape(1, -1))
    X2 = as_points(np.asarray(x2, dtype=float).reshape(1, -1))
    if X.shape[1] != X2.shape[1]:
        raise InvalidInput("points have different dimensions")
    _check_domain(spec, X)
    _check_domain(spec, X2)
    return float(_block(spec, X, X2)[0, 0])


def gram(spec, data):
    """Unnormalized Gram matrix ``K[i, j] = K(x_i, x_j)``, bit-exactly symmetric."""
    X = data.points if isinstance(data, DataSet) else as_points(data)
    _check_domain(spec, X)
    K = _block(spec, X, X)
    upper = np.triu(K)
    return upper + np.triu(K, 1).T


def cross_gram(spec, train, test_points):
    """Kernel rows ``C[t, i] = K(test_t, x_i)`` of shape (n_test, n_train)."""
    X = train.points if isinstance(train, DataSet) else as_points(train)
    T = as_points(test_points)
    if T.shape[1] != X.shape[1]:
        raise InvalidInput("test points have the wrong dimension")
    _check_domain(spec, X)
    _check_domain(spec, T)
    return _block(spec, T, X)
