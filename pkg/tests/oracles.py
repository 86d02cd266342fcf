"""Independent reference computations used only by the tests."""
import numpy as np


def qr_iteration_eigvals(A, tol=1e-14, max_iter=10000):
    """Eigenvalues of a symmetric matrix by Wilkinson-shifted QR with deflation."""
    A = np.array(A, dtype=float)
    out = []
    while A.shape[0] > 1:
        k = A.shape[0]
        for _ in range(max_iter):
            if np.max(np.abs(A[-1, :-1])) <= tol * np.abs(A).max():
                break
            a, b, c = A[-2, -2], A[-2, -1], A[-1, -1]
            delta = (a - c) / 2.0
            sgn = 1.0 if delta >= 0 else -1.0
            mu = c - sgn * b * b / (abs(delta) + np.hypot(delta, b))
            Q, R = np.linalg.qr(A - mu * np.eye(k))
            A = R @ Q + mu * np.eye(k)
            A = 0.5 * (A + A.T)
        else:
            raise RuntimeError("QR iteration did not converge")
        out.append(A[-1, -1])
        A = A[:-1, :-1]
    out.append(A[0, 0])
    return np.sort(out)[::-1]


def power_iteration_norm(A, iters=200000, tol=1e-16):
    """max |eigenvalue| by power iteration on A^2."""
    A2 = A @ A
    v = np.ones(A.shape[0]) / np.sqrt(A.shape[0])
    prev = 0.0
    for _ in range(iters):
        w = A2 @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
        cur = v @ A2 @ v
        if abs(cur - prev) <= tol * abs(cur):
            break
        prev = cur
    return float(np.sqrt(v @ A2 @ v))


def gauss_jordan_inverse(A):
    """Matrix inverse by Gauss-Jordan elimination with partial pivoting."""
    n = A.shape[0]
    M = np.hstack([np.array(A, dtype=float), np.eye(n)])
    for col in range(n):
        piv = col + np.argmax(np.abs(M[col:, col]))
        M[[col, piv]] = M[[piv, col]]
        M[col] /= M[col, col]
        for row in range(n):
            if row != col:
                M[row] -= M[row, col] * M[col]
    return M[:, n:]


def naive_hadamard(k):
    """Sylvester Hadamard matrix of order 2^k built by explicit Kronecker products."""
    H = np.array([[1]], dtype=np.int64)
    for _ in range(k):
        H = np.block([[H, H], [H, -H]])
    return H


def feature_space_estimator(X, y, Gmat, lam, g):
    """Direct evaluation of w = P g(P T_x P) P S_x^* y_bar in R^d.

    P is built from an SVD of X^T G^T; g is a callable on eigenvalues.
    """
    n, d = X.shape
    Z = X.T @ Gmat.T / np.sqrt(n)
    U, s, _ = np.linalg.svd(Z, full_matrices=False)
    U = U[:, s > 1e-7 * s[0]] if s.size and s[0] > 0 else np.zeros((d, 0))
    P = U @ U.T
    T = X.T @ X / n
    PTP = P @ T @ P
    w_eig, V = np.linalg.eigh(0.5 * (PTP + PTP.T))
    w_eig = np.clip(w_eig, 0, None)
    gP = (V * g(w_eig)) @ V.T
    b = X.T @ y / n
    return P @ gP @ P @ b
