"""Small dense-linear-algebra helpers used by the guessing and analysis modules."""

from __future__ import annotations

import numpy as np


def phase_fixed_qr(z: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of ``z`` (batched or single matrix).

    QR alone is not measure-preserving: the decomposition is only unique once
    the diagonal of R is made real and positive, so the Q factor is rescaled
    accordingly.  For complex-Gaussian input the result is Haar-distributed.
    """
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phase = d / np.abs(d)
    return q * phase[..., None, :]


def haar_isometries(count: int, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` Haar-random complex isometries of shape (rows, cols)."""
    z = rng.standard_normal((count, rows, cols)) + 1j * rng.standard_normal((count, rows, cols))
    return phase_fixed_qr(z / np.sqrt(2.0))


def complete_isometry_to_unitary(w: np.ndarray) -> np.ndarray:
    """Extend an n x k matrix with orthonormal columns to an n x n unitary."""
    n, k = w.shape
    if k > n:
        raise ValueError("isometry cannot have more columns than rows")
    if k == n:
        return w.copy()
    u, _, _ = np.linalg.svd(w, full_matrices=True)
    return np.hstack([w, u[:, k:]])


def unitarity_defect(m: np.ndarray) -> float:
    """Max-norm of V†V - I."""
    m = np.asarray(m)
    n = m.shape[-1]
    return float(np.max(np.abs(m.conj().swapaxes(-2, -1) @ m - np.eye(n))))


def expm_skew_hermitian(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a skew-Hermitian matrix via the Hermitian eigenbasis."""
    h = -1j * a
    w, u = np.linalg.eigh(h)
    return (u * np.exp(1j * w)) @ u.conj().T


def skew_hermitian_basis(n: int) -> list[np.ndarray]:
    """Real basis of the traceless skew-Hermitian n x n matrices (n^2 - 1 elements)."""
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j], m[j, i] = 1.0, -1.0
            basis.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1j
            basis.append(m)
    for i in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[i, i], m[i + 1, i + 1] = 1j, -1j
        basis.append(m)
    return basis
