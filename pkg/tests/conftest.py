"""Shared brute-force oracles used across test modules.

These deliberately recompute quantities through explicit density matrices,
Kronecker products and full traces, independently of the package's reduced
evaluation paths.
"""

import numpy as np

from qkdguess import BellSpectrum, Direction, alice_ket, bell_state


def projector(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def bell_density(spec: BellSpectrum) -> np.ndarray:
    """rho_AB built as an explicit sum of Bell projectors."""
    rho = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        rho += spec.lambdas[k] * projector(bell_state(k))
    return rho


def purification_vector(spec: BellSpectrum, v: np.ndarray) -> np.ndarray:
    """sum_k sqrt(lambda_k) |phi_k> (conj(V)|k>), as a flat vector."""
    n = v.shape[0]
    psi = np.zeros(4 * n, dtype=complex)
    vc = v.conj()
    for k in range(4):
        psi += np.sqrt(max(spec.lambdas[k], 0.0)) * np.kron(bell_state(k), vc[:, k])
    return psi


def brute_force_pe(spec: BellSpectrum, directions, v: np.ndarray) -> float:
    """Guessing probability as a full trace over the purification density matrix."""
    n = v.shape[0]
    psi = purification_vector(spec, v)
    rho = np.outer(psi, psi.conj())
    total = 0.0
    for j, direction in enumerate(directions):
        for sign, outcome in ((1, 2 * j), (-1, 2 * j + 1)):
            eve = np.zeros((n, n), dtype=complex)
            eve[outcome, outcome] = 1.0
            op = np.kron(np.kron(projector(alice_ket(direction, sign)), np.eye(2)), eve)
            total += float(np.real(np.trace(op @ rho)))
    return total


def brute_force_conditional_eigs(spec: BellSpectrum, v: np.ndarray,
                                 direction: Direction, sign: int = 1) -> np.ndarray:
    """Eigenvalues of the eavesdropper state conditional on Alice's outcome,
    from an explicit projection and partial trace."""
    n = v.shape[0]
    psi = purification_vector(spec, v)
    rho = np.outer(psi, psi.conj())
    op = np.kron(np.kron(projector(alice_ket(direction, sign)), np.eye(2)), np.eye(n))
    sub = op @ rho
    blocks = sub.reshape(4, n, 4, n)
    rho_e = np.einsum("ajak->jk", blocks)
    prob = float(np.real(np.trace(rho_e)))
    return np.sort(np.linalg.eigvalsh(rho_e / prob))[::-1]


def random_direction(rng: np.random.Generator, avoid_poles: bool = False) -> Direction:
    lo = 0.3 if avoid_poles else 0.0
    theta = float(rng.uniform(lo, np.pi - lo))
    phi = float(rng.uniform(0.0, 2.0 * np.pi))
    return Direction(theta, min(phi, 2.0 * np.pi - 1e-12))
