"""Qubit and Bell-state algebra for entanglement-based QKD protocols.

Alice measures along a Bloch direction n = (theta, phi); Bob uses the
mirrored direction n' = (theta, -phi).  The shared two-qubit state is
Bell diagonal, so every correlation probability is a function of the four
eigenvalues and the measurement direction alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import DomainError

if TYPE_CHECKING:  # pragma: no cover
    from .protocol import ProtocolConfig

#: Tolerance for spectrum validity ([0,1] bounds and unit sum).
SPECTRUM_TOL = 1e-9

#: Tolerance for unitarity checks on measurement/eavesdropper bases.
UNITARY_TOL = 1e-9


@dataclass(frozen=True)
class BellSpectrum:
    """Eigenvalues (lambda_0, ..., lambda_3) of a Bell-diagonal two-qubit state.

    Inputs that violate the probability-simplex constraints beyond
    ``SPECTRUM_TOL`` are rejected rather than renormalized, so that errors in
    upstream constraint solvers surface immediately.
    """

    lambdas: tuple[float, float, float, float]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.lambdas)
        if len(vals) != 4:
            raise DomainError("a Bell spectrum has exactly four eigenvalues")
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite spectrum entries: {vals}")
        if any(v < -SPECTRUM_TOL or v > 1.0 + SPECTRUM_TOL for v in vals):
            raise DomainError(f"spectrum entries outside [0, 1]: {vals}")
        if abs(sum(vals) - 1.0) > SPECTRUM_TOL:
            raise DomainError(f"spectrum does not sum to 1: sum={sum(vals)!r}")
        object.__setattr__(self, "lambdas", vals)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "BellSpectrum":
        return cls(tuple(values))  # type: ignore[arg-type]

    def as_array(self) -> np.ndarray:
        """Eigenvalues clipped into [0, 1] (tolerated boundary fuzz removed)."""
        return np.clip(np.array(self.lambdas, dtype=float), 0.0, 1.0)

    def __getitem__(self, k: int) -> float:
        return self.lambdas[k]


@dataclass(frozen=True)
class Direction:
    """Measurement direction on the Bloch sphere, theta in [0, pi], phi in [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise DomainError(f"non-finite direction angles: {self}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise DomainError(f"phi must lie in [0, 2*pi), got {self.phi}")


def _ket(theta: float, phi: float, sign: int) -> np.ndarray:
    # |+n> = cos(t/2)|0> + sin(t/2) e^{i phi} |1>;  |-n> is the orthogonal partner
    # with the |0>-coefficient kept real and nonnegative.
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    e = complex(math.cos(phi), math.sin(phi))
    if sign == 1:
        return np.array([c, s * e], dtype=complex)
    if sign == -1:
        return np.array([s, -c * e], dtype=complex)
    raise DomainError(f"sign must be +1 or -1, got {sign}")


def alice_ket(direction: Direction, sign: int) -> np.ndarray:
    """Alice's projective-measurement eigenstate |sign * n> along `direction`."""
    return _ket(direction.theta, direction.phi, sign)


def bob_ket(direction: Direction, sign: int) -> np.ndarray:
    """Bob's eigenstate along the mirrored direction (theta, -phi)."""
    return _ket(direction.theta, -direction.phi, sign)


_BELL = np.array(
    [
        [1, 0, 0, 1],   # (|00> + |11>)/sqrt(2)
        [1, 0, 0, -1],  # (|00> - |11>)/sqrt(2)
        [0, 1, 1, 0],   # (|01> + |10>)/sqrt(2)
        [0, 1, -1, 0],  # (|01> - |10>)/sqrt(2)
    ],
    dtype=complex,
).T / math.sqrt(2.0)
_BELL.setflags(write=False)


def bell_state(k: int) -> np.ndarray:
    """The k-th Bell vector (k = 0..3) in the computational basis |00>,|01>,|10>,|11>."""
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= 3:
        raise IndexError(f"Bell index must be 0..3, got {k!r}")
    return _BELL[:, k].copy()


def bell_basis() -> np.ndarray:
    """4x4 matrix whose columns are the four Bell vectors in fixed order."""
    return _BELL.copy()


def density_matrix(spec: BellSpectrum) -> np.ndarray:
    """Bell-diagonal density matrix sum_k lambda_k |phi_k><phi_k|."""
    return (_BELL * spec.as_array()) @ _BELL.conj().T


def delta(spec: BellSpectrum, direction: Direction) -> float:
    """Correlated fraction for one basis:

    Delta = L0 + L1 cos^2(theta) + L2 sin^2(theta) cos^2(phi)
               + L3 sin^2(theta) sin^2(phi)
    """
    l0, l1, l2, l3 = spec.lambdas
    ct2 = math.cos(direction.theta) ** 2
    st2 = 1.0 - ct2
    cp2 = math.cos(direction.phi) ** 2
    return l0 + l1 * ct2 + l2 * st2 * cp2 + l3 * st2 * (1.0 - cp2)


def correlation(spec: BellSpectrum, direction: Direction, weight: float,
                a: int, b: int) -> float:
    """Joint outcome probability P_{a n, b n'} rescaled by the basis weight.

    Equal outcomes occur with probability (weight/2) * Delta, opposite ones
    with (weight/2) * (1 - Delta); the probability is symmetric under a
    global sign flip of both outcomes.
    """
    if not 0.0 <= weight <= 1.0:
        raise DomainError(f"basis weight must lie in [0, 1], got {weight}")
    if a not in (1, -1) or b not in (1, -1):
        raise DomainError(f"outcomes must be +1 or -1, got a={a}, b={b}")
    d = delta(spec, direction)
    return 0.5 * weight * (d if a == b else 1.0 - d)


def error_rate(spec: BellSpectrum, direction: Direction) -> float:
    """Probability of anticorrelated outcomes in this basis: eps = 1 - Delta."""
    return 1.0 - delta(spec, direction)


def bob_guess_probability(spec: BellSpectrum, config: "ProtocolConfig") -> float:
    """Bob's probability of matching Alice: P_B = 1 - sum_i p_i * eps_i."""
    probs = config.basis_probs
    if abs(sum(probs) - 1.0) > SPECTRUM_TOL:
        raise DomainError(f"basis probabilities must sum to 1, got {probs}")
    return 1.0 - sum(p * error_rate(spec, d) for p, d in zip(probs, config.directions))
