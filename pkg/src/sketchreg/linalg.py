"""Dense symmetric / PSD linear algebra used by the rest of the package.

Everything here works on small-to-moderate dense matrices (a few thousand
rows at most) and relies on LAPACK's symmetric eigensolver.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidMatrix, NotPSD, NumericalFailure

DEFAULT_TOL = 1e-10
# relative asymmetry accepted before a matrix is rejected as non-symmetric
SYM_RTOL = 1e-10
# eigenvalues above -PSD_FLOOR * lambda_max count as nonnegative
PSD_FLOOR = 1e-10


@dataclass(frozen=True)
class EigenDecomp:
    """Eigenpairs of a symmetric matrix, eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def as_symmetric(A, name="matrix"):
    """Validate ``A`` as a finite square symmetric array; return its symmetrized copy."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidMatrix(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    scale = np.max(np.abs(A)) if A.size else 0.0
    if A.size and np.max(np.abs(A - A.T)) > SYM_RTOL * max(scale, 1.0):
        raise InvalidMatrix(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def sym_eig(A):
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues come back in descending order. Each eigenvector is sign
    normalized so that its largest-magnitude entry is positive, which makes
    the output a deterministic function of the input bytes.
    """
    A = as_symmetric(A)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition did not converge: {exc}") from exc
    # stable descending order keeps tied eigenvalues in LAPACK's order
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    if V.size:
        pivot = np.argmax(np.abs(V), axis=0)
        signs = np.sign(V[pivot, np.arange(V.shape[1])])
        signs[signs == 0] = 1.0
        V *= signs
    return EigenDecomp(w, V)


def sym_eigvals(A):
    """Eigenvalues only, descending."""
    A = as_symmetric(A)
    try:
        w = np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue computation did not converge: {exc}") from exc
    return w[::-1].copy()


def spectral_norm(A):
    """Operator norm of a symmetric matrix, i.e. max |eigenvalue|."""
    w = sym_eigvals(A)
    if w.size == 0:
        return 0.0
    return float(max(abs(w[0]), abs(w[-1])))


def whitening_transform(M, tol=DEFAULT_TOL):
    """Return ``(W, rank)`` with ``W.T @ M @ W = I_rank``.

    The columns of ``W`` span the eigenspaces of ``M`` whose eigenvalues exceed
    ``tol * lambda_max``; everything at or below the cutoff is treated as an
    exact zero. Raises :class:`NotPSD` when an eigenvalue is more negative
    than ``max(tol, PSD_FLOOR) * lambda_max``.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    eig = sym_eig(M)
    w, V = eig.eigenvalues, eig.eigenvectors
    k = w.shape[0]
    lam_max = w[0] if k else 0.0
    if lam_max <= 0.0:
        if k and w[-1] < -PSD_FLOOR * max(abs(w[-1]), 1.0):
            raise NotPSD("matrix has negative spectrum")
        return np.zeros((k, 0)), 0
    if w[-1] < -max(tol, PSD_FLOOR) * lam_max:
        raise NotPSD(f"eigenvalue {w[-1]:.3e} below -tol*lambda_max")
    keep = w > tol * lam_max
    rank = int(np.count_nonzero(keep))
    W = V[:, keep] / np.sqrt(w[keep])
    return W, rank


def psd_power(A, p):
    """Fractional power of a PSD matrix; tiny negative eigenvalues are clipped.

    ``p = 0`` yields the identity, including on the null space.
    """
    eig = sym_eig(A)
    w = np.clip(eig.eigenvalues, 0.0, None)
    V = eig.eigenvectors
    return (V * np.power(w, p)) @ V.T


def pinv_psd(A, tol=DEFAULT_TOL):
    """Moore-Penrose pseudo-inverse of a PSD matrix with a relative cutoff."""
    W, _ = whitening_transform(A, tol)
    return W @ W.T


def orthonormal_basis(Z, tol=DEFAULT_TOL):
    """Orthonormal basis of the column span of ``Z``.

    Singular values at or below ``sqrt(tol) * s_max`` are dropped, which
    matches the eigenvalue cutoff ``tol`` applied to ``Z.T @ Z``.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.size == 0:
        return np.zeros((Z.shape[0], 0))
    U, s, _ = np.linalg.svd(Z, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((Z.shape[0], 0))
    return U[:, s > np.sqrt(tol) * s[0]]
