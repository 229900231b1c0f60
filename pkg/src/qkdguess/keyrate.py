"""Entropic security criterion: mutual information, Holevo bound and key rate.

The secure key rate under collective attacks is

    R = max(I_AB - max_spectrum chi_AE, 0)

in bits per sifted bit, where I_AB here denotes the Alice-Bob mutual
information with the basis-choice information already deducted, and the
Holevo quantity chi_AE is maximized over whatever spectrum freedom the
observed error rates leave (only four-state protocols have any).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._search import golden_section_max
from .errors import DomainError
from .protocol import ProtocolClass, ProtocolConfig, SpectrumFamily, resolve_rates
from .states import BellSpectrum, Direction

#: Grid density for the 1-D Holevo maximization over the free eigenvalue.
CHI_GRID_POINTS = 65

#: Interval tolerance for the golden-section refinement of that maximization.
CHI_GOLDEN_TOL = 1e-10


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0."""
    if not -1e-12 <= x <= 1.0 + 1e-12:
        raise DomainError(f"binary entropy argument must lie in [0, 1], got {x}")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def shannon_entropy(probs: Iterable[float]) -> float:
    """Base-2 Shannon entropy of a probability vector; tiny negatives are clamped."""
    total = 0.0
    for p in probs:
        if p < -1e-12:
            raise DomainError(f"negative probability {p}")
        if p > 1e-300:
            total -= p * math.log2(p)
    return float(total)


@dataclass(frozen=True)
class EntropyReport:
    """Key-rate breakdown for one protocol instance.

    `i_ab` includes the basis-choice information H(p_i); `i_ab_basis_deducted`
    is the part usable for key generation.  `optimizing_lambda3` is the free
    eigenvalue maximizing the Holevo quantity (four-state protocols only).
    """

    i_ab: float
    i_ab_basis_deducted: float
    chi_ae: float
    rate: float
    optimizing_lambda3: float | None

    def to_dict(self) -> dict:
        return {
            "i_ab": self.i_ab,
            "i_ab_basis_deducted": self.i_ab_basis_deducted,
            "chi_ae": self.chi_ae,
            "rate": self.rate,
            "optimizing_lambda3": self.optimizing_lambda3,
        }


def mutual_information(config: ProtocolConfig, eps: Sequence[float]) -> tuple[float, float]:
    """Alice-Bob mutual information, with and without the basis information.

    Returns (I_AB, I_AB - H(p_i)) where I_AB = 1 - sum_i p_i h(eps_i) + H(p_i).
    """
    eps = tuple(float(e) for e in eps)
    if len(eps) != config.t:
        raise DomainError(f"need one error rate per basis (t={config.t}), got {len(eps)}")
    deducted = 1.0 - sum(p * binary_entropy(e) for p, e in zip(config.basis_probs, eps))
    return deducted + shannon_entropy(config.basis_probs), deducted


def conditional_eigenvalues(spec: BellSpectrum, direction: Direction) -> tuple[float, float]:
    """Eigenvalues of the eavesdropper's state conditional on Alice's outcome.

    The conditional states are rank two with eigenvalues
    (1 +/- sqrt(xi + eta)) / 2,
    xi  = (mu+ - nu+)^2 cos^2(theta),
    eta = (mu-^2 + nu-^2 + 2 mu- nu- cos(2 phi)) sin^2(theta),
    where mu+- = L0 +- L1 and nu+- = L2 +- L3.  Both Alice outcomes give the
    same spectrum, and it does not depend on the eavesdropper's basis.
    """
    l0, l1, l2, l3 = spec.lambdas
    mu_p, mu_m = l0 + l1, l0 - l1
    nu_p, nu_m = l2 + l3, l2 - l3
    ct2 = math.cos(direction.theta) ** 2
    st2 = 1.0 - ct2
    xi = (mu_p - nu_p) ** 2 * ct2
    eta = (mu_m**2 + nu_m**2 + 2.0 * mu_m * nu_m * math.cos(2.0 * direction.phi)) * st2
    root = math.sqrt(min(max(xi + eta, 0.0), 1.0))
    return (1.0 + root) / 2.0, (1.0 - root) / 2.0


def holevo(spec: BellSpectrum, config: ProtocolConfig) -> float:
    """Holevo quantity chi_AE = H(lambda) - sum_i p_i h(lambda_i^+).

    Both Alice outcomes in a basis are equally likely and give conditional
    states with the same binary spectrum, so the conditional-entropy term
    collapses to one binary entropy per basis.
    """
    h_state = shannon_entropy(spec.as_array())
    leak = 0.0
    for p, direction in zip(config.basis_probs, config.directions):
        lam_plus, _ = conditional_eigenvalues(spec, direction)
        leak += p * binary_entropy(lam_plus)
    return h_state - leak


def _maximize_holevo(family: SpectrumFamily, config: ProtocolConfig) -> tuple[float, float]:
    """Maximize chi over the free eigenvalue; returns (chi_max, lambda3)."""
    lo, hi = family.free_range
    if family.is_fixed:
        x = (lo + hi) / 2.0
        return holevo(family.at(x), config), x

    def chi_at(x: float) -> float:
        return holevo(family.at(x), config)

    xs = [lo + (hi - lo) * i / (CHI_GRID_POINTS - 1) for i in range(CHI_GRID_POINTS)]
    vals = [chi_at(x) for x in xs]
    i_best = max(range(len(xs)), key=vals.__getitem__)
    a, b = xs[max(i_best - 1, 0)], xs[min(i_best + 1, len(xs) - 1)]
    x_ref, v_ref = golden_section_max(chi_at, a, b, tol=CHI_GOLDEN_TOL)
    if vals[i_best] >= v_ref:
        return vals[i_best], xs[i_best]
    return v_ref, x_ref


def secure_key_rate(config: ProtocolConfig, eps: Sequence[float]) -> EntropyReport:
    """Secure key rate R = max(I_AB - max chi_AE, 0) for the observed rates.

    For four-state protocols the Holevo quantity is maximized over the free
    eigenvalue; for t >= 3 the spectrum is already fixed by the rates.  For
    the standard configurations this reduces to R = 1 - 2 h(eps) (BB84) and
    R = 1 - h(3 eps/2) - (3 eps/2) log2 3 (six-state).
    """
    family = resolve_rates(config, eps)
    chi_max, lam3 = _maximize_holevo(family, config)
    i_ab, i_deducted = mutual_information(config, eps)
    diff = i_deducted - chi_max
    if -1e-12 <= diff < 0.0:
        diff = 0.0
    lam3_report = lam3 if config.protocol_class is ProtocolClass.FOUR_STATE else None
    return EntropyReport(
        i_ab=i_ab,
        i_ab_basis_deducted=i_deducted,
        chi_ae=chi_max,
        rate=max(diff, 0.0),
        optimizing_lambda3=lam3_report,
    )


def signed_rate(config: ProtocolConfig, eps: Sequence[float]) -> float:
    """I_AB (basis deducted) minus the maximized Holevo quantity, without clamping.

    Unlike the rate itself this changes sign at the entropic critical error
    rate, which makes it the right objective for root bracketing.
    """
    report = secure_key_rate(config, eps)
    return report.i_ab_basis_deducted - report.chi_ae
