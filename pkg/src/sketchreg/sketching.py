"""Randomized sketch operators ``G`` of shape (m, n).

Dense kinds (``gaussian``, ``rademacher``) store the matrix. ``ros_hadamard``
keeps only its sign vector and selected rows and is applied through a fast
Walsh-Hadamard transform. ``row_selection`` (used for Nyström subsampling)
stores indices and weights. All randomness comes from the integer ``seed``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidLength, ShapeMismatch

KINDS = ("gaussian", "rademacher", "ros_hadamard", "row_selection", "identity")


def next_pow2(n):
    return 1 << max(0, int(n - 1).bit_length())


def fwht(v):
    """Unnormalized Walsh-Hadamard transform along the first axis.

    ``fwht(fwht(v)) == len(v) * v``. Integer inputs stay integer, so the
    transform is exact for them.
    """
    a = np.array(v, copy=True)
    n = a.shape[0] if a.ndim else 0
    if n < 1 or n & (n - 1):
        raise InvalidLength(f"length {n} is not a power of two")
    flat = a.reshape(n, -1)
    h = 1
    while h < n:
        b = flat.reshape(n // (2 * h), 2, h, -1)
        top = b[:, 0].copy()
        b[:, 0] += b[:, 1]
        b[:, 1] = top - b[:, 1]
        h *= 2
    return a


@dataclass(frozen=True, eq=False)
class SketchOperator:
    kind: str
    m: int
    n: int
    seed: int = None
    matrix: np.ndarray = field(default=None, repr=False)
    signs: np.ndarray = field(default=None, repr=False)
    rows: np.ndarray = field(default=None, repr=False)
    indices: np.ndarray = field(default=None, repr=False)
    weights: np.ndarray = field(default=None, repr=False)

    @property
    def shape(self):
        return (self.m, self.n)

    @property
    def n_pad(self):
        return next_pow2(self.n)

    def apply(self, A):
        """Return ``G @ A`` for ``A`` of shape (n,) or (n, k)."""
        A = np.asarray(A, dtype=float)
        vec = A.ndim == 1
        if vec:
            A = A[:, None]
        if A.ndim != 2 or A.shape[0] != self.n:
            raise ShapeMismatch(f"sketch expects {self.n} rows, got {A.shape}")
        if self.kind == "identity":
            out = A.copy()
        elif self.kind == "row_selection":
            out = self.weights[:, None] * A[self.indices]
        elif self.kind == "ros_hadamard":
            P = np.zeros((self.n_pad, A.shape[1]))
            P[: self.n] = A
            P *= self.signs[:, None]
            out = fwht(P)[self.rows] / np.sqrt(self.m)
        else:
            out = self.matrix @ A
        return out[:, 0] if vec else out

    def apply_transpose(self, B):
        """Return ``G.T @ B`` for ``B`` of shape (m,) or (m, k)."""
        B = np.asarray(B, dtype=float)
        vec = B.ndim == 1
        if vec:
            B = B[:, None]
        if B.ndim != 2 or B.shape[0] != self.m:
            raise ShapeMismatch(f"transpose expects {self.m} rows, got {B.shape}")
        if self.kind == "identity":
            out = B.copy()
        elif self.kind == "row_selection":
            out = np.zeros((self.n, B.shape[1]))
            np.add.at(out, self.indices, self.weights[:, None] * B)
        elif self.kind == "ros_hadamard":
            P = np.zeros((self.n_pad, B.shape[1]))
            P[self.rows] = B / np.sqrt(self.m)
            out = (fwht(P) * self.signs[:, None])[: self.n]
        else:
            out = self.matrix.T @ B
        return out[:, 0] if vec else out

    def materialize(self):
        """Dense (m, n) matrix of the operator."""
        if self.matrix is not None:
            return self.matrix.copy()
        return self.apply(np.eye(self.n))


def _rng(seed):
    return np.random.default_rng(seed)


def make_sketch(kind, m, n, seed=0):
    """Build a sketch operator; identical arguments give identical operators.

    gaussian entries are N(0, 1/m); rademacher entries are +-1/sqrt(m);
    ros_hadamard is ``sqrt(n_pad/m) * R (H / sqrt(n_pad)) D`` restricted to the
    first n columns, with ``D`` random signs, ``H`` the Hadamard matrix of the
    zero-padded length ``n_pad`` and ``R`` a uniform choice of m distinct rows.
    """
    m, n = int(m), int(n)
    if m < 1 or n < 1:
        raise ShapeMismatch("sketch dimensions must be positive")
    if kind == "identity":
        if m != n:
            raise ShapeMismatch(f"identity sketch needs m == n, got {m} != {n}")
        return SketchOperator("identity", m, n, seed)
    rng = _rng(seed)
    if kind == "gaussian":
        G = rng.standard_normal((m, n)) / np.sqrt(m)
        return SketchOperator(kind, m, n, seed, matrix=G)
    if kind == "rademacher":
        G = (2.0 * rng.integers(0, 2, size=(m, n)) - 1.0) / np.sqrt(m)
        return SketchOperator(kind, m, n, seed, matrix=G)
    if kind == "ros_hadamard":
        n_pad = next_pow2(n)
        if m > n_pad:
            raise ShapeMismatch(f"ros_hadamard needs m <= {n_pad}, got {m}")
        signs = 2.0 * rng.integers(0, 2, size=n_pad) - 1.0
        rows = np.sort(rng.choice(n_pad, size=m, replace=False))
        return SketchOperator(kind, m, n, seed, signs=signs, rows=rows)
    if kind == "row_selection":
        if m > n:
            raise ShapeMismatch("uniform row selection needs m <= n")
        idx = np.sort(rng.choice(n, size=m, replace=False))
        return row_selection(idx, np.ones(m), n, seed)
    raise ValueError(f"unknown sketch kind {kind!r}")


def row_selection(indices, weights, n, seed=None):
    """Row-selection operator: row j of ``G`` is ``weights[j] * e_{indices[j]}``."""
    idx = np.asarray(indices, dtype=np.int64).reshape(-1)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if idx.shape != w.shape or idx.size == 0:
        raise ShapeMismatch("indices and weights must be nonempty and equally long")
    if np.any(idx < 0) or np.any(idx >= n):
        raise ShapeMismatch("row index out of range")
    return SketchOperator("row_selection", idx.size, int(n), seed, indices=idx, weights=w)


def apply_sketch(G, A):
    return G.apply(A)


@dataclass(frozen=True)
class DistortionReport:
    max_relative_distortion: float


def distortion_probe(G, vectors):
    """Max of ``| |Ga|^2 - |a|^2 | / |a|^2`` over the rows of ``vectors``."""
    V = np.asarray(vectors, dtype=float)
    if V.ndim == 1:
        V = V[None, :]
    if V.shape[0] == 0:
        raise InvalidInput("need at least one vector")
    if V.shape[1] != G.n:
        raise ShapeMismatch(f"vectors must have length {G.n}")
    sq = np.einsum("ij,ij->i", V, V)
    if np.any(sq == 0):
        raise InvalidInput("zero vector in probe set")
    S = G.apply(V.T)
    sk = np.einsum("ij,ij->j", S, S)
    return DistortionReport(float(np.max(np.abs(sk - sq) / sq)))
