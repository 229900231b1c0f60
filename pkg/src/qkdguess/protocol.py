"""Protocol constraint systems: mapping observed error rates to Bell spectra.

Three generic protocol classes are supported.  A four-state protocol (t = 2
bases) leaves one spectrum eigenvalue free; a six-state protocol (t = 3)
fixes the spectrum completely; a 2t-state protocol (t > 3) fixes it from the
first three rates and forces the remaining rates to be linear combinations
of them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DomainError, InfeasibleRates, SingularDirection, SingularDirections
from .states import SPECTRUM_TOL, BellSpectrum, Direction, error_rate

#: Directions with |sin(theta)| below this are rejected by the four-state solver.
SIN_THETA_MIN = 1e-6

#: Magnitude threshold under which the 2t-state denominators count as singular.
DENOMINATOR_MIN = 1e-9


class ProtocolClass(str, Enum):
    FOUR_STATE = "FourState"
    SIX_STATE = "SixState"
    TWO_T_STATE = "TwoTState"


@dataclass(frozen=True)
class ProtocolConfig:
    """Measurement bases, basis-choice probabilities and protocol class.

    Direction 0 is pinned to the z axis (theta = phi = 0): the first error
    rate is always the z-basis rate.
    """

    t: int
    directions: tuple[Direction, ...]
    basis_probs: tuple[float, ...]
    protocol_class: ProtocolClass

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        object.__setattr__(self, "basis_probs", tuple(float(p) for p in self.basis_probs))
        if self.t < 2:
            raise DomainError(f"need at least two bases, got t={self.t}")
        if len(self.directions) != self.t or len(self.basis_probs) != self.t:
            raise DomainError("directions and basis_probs must both have length t")
        d0 = self.directions[0]
        if abs(d0.theta) > 1e-12 or abs(d0.phi) > 1e-12:
            raise DomainError(f"direction 0 must be the z axis (0, 0), got {d0}")
        expected = {ProtocolClass.FOUR_STATE: 2, ProtocolClass.SIX_STATE: 3}
        if self.protocol_class in expected and self.t != expected[self.protocol_class]:
            raise DomainError(
                f"{self.protocol_class.value} requires t={expected[self.protocol_class]},"
                f" got t={self.t}"
            )
        if self.protocol_class is ProtocolClass.TWO_T_STATE and self.t <= 3:
            raise DomainError(f"TwoTState requires t > 3, got t={self.t}")
        if any(p < 0.0 or p > 1.0 for p in self.basis_probs):
            raise DomainError(f"basis probabilities outside [0, 1]: {self.basis_probs}")
        if abs(sum(self.basis_probs) - 1.0) > SPECTRUM_TOL:
            raise DomainError(
                f"basis probabilities must sum to 1, got {sum(self.basis_probs)!r}"
            )

    def to_json_dict(self) -> dict:
        return {
            "t": self.t,
            "directions": [{"theta": d.theta, "phi": d.phi} for d in self.directions],
            "basis_probs": list(self.basis_probs),
            "class": self.protocol_class.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "ProtocolConfig":
        try:
            directions = tuple(
                Direction(float(d["theta"]), float(d["phi"])) for d in data["directions"]
            )
            return cls(
                t=int(data["t"]),
                directions=directions,
                basis_probs=tuple(float(p) for p in data["basis_probs"]),
                protocol_class=ProtocolClass(data["class"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed protocol config: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ProtocolConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid protocol JSON: {exc}") from exc
        return cls.from_json_dict(data)


@dataclass(frozen=True)
class SpectrumFamily:
    """Bell spectra compatible with a set of error rates.

    Every eigenvalue is affine in the free parameter lambda_3:
    lambda_k(x) = intercepts[k] + slopes[k] * x, and `free_range` is the
    closed interval of x keeping all four eigenvalues inside [0, 1] (up to
    the spectrum tolerance).  A fully determined spectrum is the degenerate
    case free_range = {x0}.
    """

    intercepts: tuple[float, float, float, float]
    slopes: tuple[float, float, float, float]
    free_range: tuple[float, float]

    def at(self, lambda3: float) -> BellSpectrum:
        lo, hi = self.free_range
        if not lo - SPECTRUM_TOL <= lambda3 <= hi + SPECTRUM_TOL:
            raise DomainError(f"lambda3={lambda3} outside free range [{lo}, {hi}]")
        return BellSpectrum(
            tuple(i + s * lambda3 for i, s in zip(self.intercepts, self.slopes))
        )

    @property
    def is_fixed(self) -> bool:
        lo, hi = self.free_range
        return hi - lo <= 1e-12

    @property
    def fixed_spectrum(self) -> BellSpectrum:
        if not self.is_fixed:
            raise DomainError("spectrum family still has a free parameter")
        lo, hi = self.free_range
        return self.at((lo + hi) / 2.0)


def _affine_free_range(intercepts: Sequence[float], slopes: Sequence[float]) -> tuple[float, float]:
    """Maximal x interval with intercepts[k] + slopes[k]*x in [0,1] for all k.

    Boundary spectra (an eigenvalue exactly 0 or 1) are part of the interval.
    When the exact intersection is empty by no more than the spectrum
    tolerance, it collapses to a single point instead of failing, so rates
    sitting numerically on the feasibility boundary are still admitted.
    """
    lo, hi = -math.inf, math.inf
    for a, s in zip(intercepts, slopes):
        if s == 0.0:
            if a < -SPECTRUM_TOL or a > 1.0 + SPECTRUM_TOL:
                raise InfeasibleRates(f"fixed eigenvalue {a!r} outside [0, 1]")
            continue
        x1, x2 = -a / s, (1.0 - a) / s
        if x1 > x2:
            x1, x2 = x2, x1
        lo, hi = max(lo, x1), min(hi, x2)
    if lo > hi:
        if lo - hi <= 2.0 * SPECTRUM_TOL:
            mid = (lo + hi) / 2.0
            return mid, mid
        raise InfeasibleRates("no free-parameter value keeps all eigenvalues in [0, 1]")
    return lo, hi


def solve_protocol1(config: ProtocolConfig, eps0: float, eps1: float) -> SpectrumFamily:
    """Spectrum family of a four-state protocol from its two error rates.

    With eps0 the z-basis rate and eps1 the rate along (theta1, phi1):

        lambda_0 = 1 - (cos^2(phi1) - cot^2(theta1)) eps0
                   - eps1 / sin^2(theta1) + lambda_3 cos(2 phi1)
        lambda_1 = 1 - eps0 - lambda_0
        lambda_2 = eps0 - lambda_3

    leaving lambda_3 free on the interval where all eigenvalues stay in [0, 1].
    """
    if config.protocol_class is not ProtocolClass.FOUR_STATE:
        raise DomainError(f"expected a FourState config, got {config.protocol_class.value}")
    for name, e in (("eps0", eps0), ("eps1", eps1)):
        if not 0.0 <= e <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {e}")
    theta1, phi1 = config.directions[1].theta, config.directions[1].phi
    st = math.sin(theta1)
    if abs(st) < SIN_THETA_MIN:
        raise SingularDirection(
            f"four-state solver undefined for sin(theta1)={st:.3e} (direction on the z axis)"
        )
    cot2 = (math.cos(theta1) / st) ** 2
    c2phi = math.cos(2.0 * phi1)
    a0 = 1.0 - (math.cos(phi1) ** 2 - cot2) * eps0 - eps1 / st**2
    intercepts = (a0, 1.0 - eps0 - a0, eps0, 0.0)
    slopes = (c2phi, -c2phi, -1.0, 1.0)
    free_range = _affine_free_range(intercepts, slopes)
    return SpectrumFamily(intercepts, slopes, free_range)


def _solve_three_rates(directions: Sequence[Direction],
                       eps: Sequence[float]) -> BellSpectrum:
    """Unique spectrum with the prescribed error rates along three directions."""
    rows = []
    for d in directions[:3]:
        ct2 = math.cos(d.theta) ** 2
        st2 = 1.0 - ct2
        cp2 = math.cos(d.phi) ** 2
        rows.append([1.0 - ct2, 1.0 - st2 * cp2, 1.0 - st2 * (1.0 - cp2)])
    a = np.array(rows)
    b = np.array([float(e) for e in eps[:3]])
    det = float(np.linalg.det(a))
    if abs(det) < DENOMINATOR_MIN:
        raise SingularDirections(
            f"error rates do not determine the spectrum (system determinant {det:.3e})"
        )
    l123 = np.linalg.solve(a, b)
    lams = (1.0 - float(l123.sum()), float(l123[0]), float(l123[1]), float(l123[2]))
    if any(v < -SPECTRUM_TOL or v > 1.0 + SPECTRUM_TOL for v in lams):
        raise InfeasibleRates(f"rates {tuple(eps[:3])} require eigenvalues {lams}")
    spec = BellSpectrum(lams)
    residual = max(abs(error_rate(spec, d) - e) for d, e in zip(directions[:3], b))
    if residual > 1e-9:
        raise SingularDirections(
            f"rate reconstruction is ill-conditioned (round-trip residual {residual:.3e})"
        )
    return spec


def solve_protocol2(config: ProtocolConfig, eps: Sequence[float]) -> BellSpectrum:
    """Unique spectrum of a six-state protocol from its three error rates.

    For the standard six-state directions this reduces to
    lambda_1 = (eps1 + eps2 - eps0)/2, lambda_2 = (eps0 + eps2 - eps1)/2,
    lambda_3 = (eps0 + eps1 - eps2)/2 and lambda_0 = 1 - (eps0+eps1+eps2)/2.
    """
    if config.protocol_class is not ProtocolClass.SIX_STATE:
        raise DomainError(f"expected a SixState config, got {config.protocol_class.value}")
    if len(eps) != 3:
        raise DomainError(f"six-state protocol needs exactly three rates, got {len(eps)}")
    return _solve_three_rates(config.directions, eps)


def derived_error_rate_protocol3(config: ProtocolConfig, eps012: Sequence[float],
                                 k: int) -> float:
    """Error rate along direction k (k >= 3) implied by the first three rates.

    eps_k = (1 + d1 - d2) eps0 - d1 eps1 + d2 eps2, where d1 and d2 carry the
    direction geometry through sin^2(theta) and sin(phi +/- phi') factors.
    """
    if config.protocol_class is not ProtocolClass.TWO_T_STATE:
        raise DomainError(f"expected a TwoTState config, got {config.protocol_class.value}")
    if len(eps012) != 3:
        raise DomainError(f"need exactly the first three rates, got {len(eps012)}")
    if not 3 <= k < config.t:
        raise IndexError(f"derived-rate index must satisfy 3 <= k < t={config.t}, got {k}")
    th1, ph1 = config.directions[1].theta, config.directions[1].phi
    th2, ph2 = config.directions[2].theta, config.directions[2].phi
    thk, phk = config.directions[k].theta, config.directions[k].phi
    phi_factor = math.sin(ph1 - ph2) * math.sin(ph1 + ph2)
    den1 = math.sin(th1) ** 2 * phi_factor
    den2 = math.sin(th2) ** 2 * phi_factor
    if abs(den1) < DENOMINATOR_MIN or abs(den2) < DENOMINATOR_MIN:
        raise SingularDirection(
            f"derived-rate denominators vanish for directions 1, 2: ({den1:.3e}, {den2:.3e})"
        )
    sk2 = math.sin(thk) ** 2
    d1 = sk2 * math.sin(ph2 - phk) * math.sin(ph2 + phk) / den1
    d2 = sk2 * math.sin(ph1 - phk) * math.sin(ph1 + phk) / den2
    e0, e1, e2 = (float(e) for e in eps012)
    return (1.0 + d1 - d2) * e0 - d1 * e1 + d2 * e2


def standard_bb84() -> ProtocolConfig:
    """BB84: z and x bases with equal probabilities."""
    return ProtocolConfig(
        t=2,
        directions=(Direction(0.0, 0.0), Direction(math.pi / 2.0, 0.0)),
        basis_probs=(0.5, 0.5),
        protocol_class=ProtocolClass.FOUR_STATE,
    )


def standard_sixstate() -> ProtocolConfig:
    """Six-state: z, x and y bases with equal probabilities."""
    return ProtocolConfig(
        t=3,
        directions=(
            Direction(0.0, 0.0),
            Direction(math.pi / 2.0, 0.0),
            Direction(math.pi / 2.0, math.pi / 2.0),
        ),
        basis_probs=(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        protocol_class=ProtocolClass.SIX_STATE,
    )


def four_state_xy(phi1: float) -> ProtocolConfig:
    """Four-state protocol measuring along z and along phi1 in the xy plane."""
    return ProtocolConfig(
        t=2,
        directions=(Direction(0.0, 0.0), Direction(math.pi / 2.0, float(phi1))),
        basis_probs=(0.5, 0.5),
        protocol_class=ProtocolClass.FOUR_STATE,
    )


def _dirs_close(a: Direction, b: Direction, tol: float = 1e-12) -> bool:
    return abs(a.theta - b.theta) <= tol and abs(a.phi - b.phi) <= tol


def is_standard_bb84(config: ProtocolConfig) -> bool:
    ref = standard_bb84()
    return (
        config.protocol_class is ProtocolClass.FOUR_STATE
        and all(_dirs_close(c, r) for c, r in zip(config.directions, ref.directions))
        and all(abs(p - 0.5) <= 1e-12 for p in config.basis_probs)
    )


def is_standard_sixstate(config: ProtocolConfig) -> bool:
    ref = standard_sixstate()
    return (
        config.protocol_class is ProtocolClass.SIX_STATE
        and all(_dirs_close(c, r) for c, r in zip(config.directions, ref.directions))
        and all(abs(p - 1.0 / 3.0) <= 1e-12 for p in config.basis_probs)
    )


def resolve_rates(config: ProtocolConfig, eps: Sequence[float]) -> SpectrumFamily:
    """Spectrum family compatible with one error rate per basis.

    Four-state configs keep lambda_3 free; six-state and 2t-state configs
    produce a fully fixed family.  For t > 3 the rates beyond the first
    three must already match their derived values.
    """
    eps = tuple(float(e) for e in eps)
    if len(eps) != config.t:
        raise DomainError(f"need one error rate per basis (t={config.t}), got {len(eps)}")
    if any(not 0.0 <= e <= 1.0 for e in eps):
        raise DomainError(f"error rates outside [0, 1]: {eps}")
    if config.protocol_class is ProtocolClass.FOUR_STATE:
        return solve_protocol1(config, eps[0], eps[1])
    if config.protocol_class is ProtocolClass.SIX_STATE:
        spec = solve_protocol2(config, eps)
    else:
        spec = _solve_three_rates(config.directions, eps)
        for k in range(3, config.t):
            implied = error_rate(spec, config.directions[k])
            if abs(eps[k] - implied) > 1e-8:
                raise InfeasibleRates(
                    f"rate {k} is {eps[k]!r} but the first three rates imply {implied!r}"
                )
    l0, l1, l2, l3 = spec.lambdas
    return SpectrumFamily((l0, l1, l2, 0.0), (0.0, 0.0, 0.0, 1.0), (l3, l3))
