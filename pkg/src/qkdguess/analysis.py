"""Critical-error-rate solvers, angle-scan tables and Monte Carlo scatter data.

Two security indicators change sign as the symmetric error rate grows: the
guessing-probability criterion (Bob's hit rate exceeds the eavesdropper's
maximum guessing probability) and the entropic criterion (positive key
rate).  This module locates both crossings by bisection, tabulates them over
a family of four-state protocols in the xy plane, and generates seeded
random (P_B, P_E) samples that are certified to stay under the analytic
maximum curves.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._linalg import phase_fixed_qr
from ._search import bisect_sign_change
from .errors import DomainError, NoCrossing
from .guessing import (
    EveBasis,
    OptimizerOptions,
    closed_form_pe_bb84,
    closed_form_pe_sixstate,
    guessing_probability,
    maximize_guessing,
)
from .keyrate import signed_rate
from .protocol import (
    ProtocolConfig,
    four_state_xy,
    is_standard_bb84,
    is_standard_sixstate,
)
from .states import BellSpectrum, bob_guess_probability

#: Step of the coarse bracketing walk / warm-start cache for numeric crossings.
COARSE_EPS_STEP = 0.005

#: Bisection interval widths for the two crossings.
GUESSING_XTOL = 2e-7
ENTROPY_XTOL = 1e-9


def haar_unitary(n: int, rng: np.random.Generator) -> EveBasis:
    """Haar-distributed special unitary of dimension n.

    Drawn as the phase-fixed QR factor of a complex Gaussian matrix (plain QR
    is not Haar), with the determinant phase removed afterwards.
    """
    if n < 1:
        raise DomainError(f"dimension must be positive, got {n}")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q = phase_fixed_qr(z)
    q = q * np.linalg.det(q) ** (-1.0 / n)
    return EveBasis(q)


def random_spectrum(rng: np.random.Generator) -> BellSpectrum:
    """Spectrum drawn uniformly on the probability 3-simplex (normalized exponentials)."""
    e = rng.exponential(1.0, size=4)
    return BellSpectrum(tuple(e / e.sum()))


@dataclass(frozen=True, eq=False)
class ScatterPoint:
    """One random (P_B, P_E) sample with its generating state and basis hash."""

    p_b: float
    p_e: float
    spectrum: BellSpectrum
    unitary_hash: str

    def __post_init__(self):
        for name, v in (("p_b", self.p_b), ("p_e", self.p_e)):
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")


def symmetric_pe_star_curve(config: ProtocolConfig, eps: float) -> float:
    """Analytic maximum guessing probability at mean error rate eps (standard configs)."""
    if eps >= 0.5:
        return 1.0
    if is_standard_bb84(config):
        return closed_form_pe_bb84(eps)
    if is_standard_sixstate(config):
        return closed_form_pe_sixstate(eps)
    raise DomainError("no analytic curve for non-standard configurations")


def scatter(config: ProtocolConfig, n_samples: int,
            rng: np.random.Generator | int) -> list[ScatterPoint]:
    """Random (P_B, P_E) samples from uniform spectra and Haar bases.

    Each sample owns an independent child stream of the given generator, so
    the output is reproducible and independent of evaluation order.
    """
    if not (is_standard_bb84(config) or is_standard_sixstate(config)):
        raise DomainError("scatter requires the standard BB84 or six-state configuration")
    if n_samples < 0:
        raise DomainError(f"sample count must be nonnegative, got {n_samples}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    points = []
    for child in rng.spawn(n_samples):
        spec = random_spectrum(child)
        basis = haar_unitary(2 * config.t, child)
        digest = hashlib.sha256(np.ascontiguousarray(basis.matrix).tobytes()).hexdigest()
        points.append(
            ScatterPoint(
                p_b=bob_guess_probability(spec, config),
                p_e=guessing_probability(spec, config, basis),
                spectrum=spec,
                unitary_hash=digest[:16],
            )
        )
    return points


def format_scatter_csv(points: Sequence[ScatterPoint]) -> str:
    """CSV payload `p_b,p_e` with 12 significant digits and LF line endings."""
    lines = ["p_b,p_e"]
    lines.extend(f"{p.p_b:.12g},{p.p_e:.12g}" for p in points)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CriticalReport:
    """Critical error rates under both criteria for one protocol.

    `eps_cr` solves P_B = P_E*, `eps_tilde_cr` solves R = 0, and
    `delta_eps` is their difference.  `phi1` records the scanned angle when
    the report belongs to a table row.
    """

    eps_cr: float
    eps_tilde_cr: float
    delta_eps: float
    pe_star_at_crossing: float
    phi1: float | None = None

    def __post_init__(self):
        for name, v in (("eps_cr", self.eps_cr), ("eps_tilde_cr", self.eps_tilde_cr)):
            if not 0.0 < v < 0.5:
                raise DomainError(f"{name} must lie in (0, 1/2), got {v}")
        if self.delta_eps != self.eps_cr - self.eps_tilde_cr:
            raise DomainError("delta_eps must equal eps_cr - eps_tilde_cr")

    @classmethod
    def build(cls, eps_cr: float, eps_tilde_cr: float, pe_star_at_crossing: float,
              phi1: float | None = None) -> "CriticalReport":
        return cls(
            eps_cr=eps_cr,
            eps_tilde_cr=eps_tilde_cr,
            delta_eps=eps_cr - eps_tilde_cr,
            pe_star_at_crossing=pe_star_at_crossing,
            phi1=phi1,
        )

    def to_dict(self) -> dict:
        out = {
            "eps_cr": self.eps_cr,
            "eps_tilde_cr": self.eps_tilde_cr,
            "delta_eps": self.delta_eps,
            "pe_star_at_crossing": self.pe_star_at_crossing,
        }
        if self.phi1 is not None:
            out["phi1"] = self.phi1
        return out


class _SymmetricPEStar:
    """Numeric P_E*(eps) evaluator with a coarse-grid warm-start cache.

    Successive evaluations (as in bisection) reuse the best isometries found
    at the nearest cached error rates, since the optimum moves smoothly with
    the rate.  Cache keys snap to COARSE_EPS_STEP.
    """

    def __init__(self, config: ProtocolConfig, seed: int, starts: int):
        self.config = config
        self.starts = starts
        self._seeds = np.random.SeedSequence(seed)
        self._cache: dict[int, np.ndarray] = {}

    def _warm(self, key: int) -> list[np.ndarray]:
        if not self._cache:
            return []
        nearest = sorted(self._cache, key=lambda k: abs(k - key))[:2]
        return [self._cache[k] for k in nearest]

    def __call__(self, eps: float) -> float:
        key = round(eps / COARSE_EPS_STEP)
        opts = OptimizerOptions(
            starts=self.starts,
            seed=self._seeds.spawn(1)[0],
            warm_isometries=tuple(self._warm(key)),
            polish=False,
        )
        result = maximize_guessing(self.config, [eps] * self.config.t, opts)
        self._cache[key] = result.best_v.matrix.conj()[:, :4]
        return result.p_e_star


def _symmetric_pe_star_fn(config: ProtocolConfig, seed: int, starts: int):
    if is_standard_bb84(config):
        return closed_form_pe_bb84
    if is_standard_sixstate(config):
        return closed_form_pe_sixstate
    return _SymmetricPEStar(config, seed, starts)


def critical_eps_guessing(config: ProtocolConfig, *, seed: int = 0,
                          starts: int = 32) -> float:
    """Symmetric error rate at which P_B = P_E* (guessing criterion).

    Solves 1 - eps = P_E*(eps) by bisection; closed forms are used for the
    standard configurations, the numerical maximizer otherwise.
    """
    pe_star = _symmetric_pe_star_fn(config, seed, starts)

    def gap(e: float) -> float:
        return 1.0 - e - pe_star(e)

    lo, hi = 1e-6, 0.5 - 1e-6
    if isinstance(pe_star, _SymmetricPEStar):
        lo, hi = _coarse_bracket(gap, lo, hi, step=10 * COARSE_EPS_STEP)
    return bisect_sign_change(gap, lo, hi, xtol=GUESSING_XTOL)


def _coarse_bracket(gap, lo: float, hi: float, step: float) -> tuple[float, float]:
    """Walk [lo, hi] in coarse steps until the gap changes sign."""
    g_prev = gap(lo)
    if g_prev <= 0.0:
        raise NoCrossing(f"criterion already violated at eps={lo}")
    x_prev = lo
    x = step
    while x < hi:
        g = gap(x)
        if g <= 0.0:
            return x_prev, x
        x_prev, g_prev = x, g
        x += step
    if gap(hi) <= 0.0:
        return x_prev, hi
    raise NoCrossing(f"no crossing below eps={hi}")


def critical_eps_entropy(config: ProtocolConfig) -> float:
    """Symmetric error rate at which the secure key rate reaches zero."""

    def gap(e: float) -> float:
        return signed_rate(config, [e] * config.t)

    return bisect_sign_change(gap, 1e-9, 0.5 - 1e-9, xtol=ENTROPY_XTOL)


def critical_report(config: ProtocolConfig, *, seed: int = 0, starts: int = 32,
                    phi1: float | None = None) -> CriticalReport:
    """Both critical rates plus the guessing probability at the crossing."""
    eps_cr = critical_eps_guessing(config, seed=seed, starts=starts)
    eps_tilde = critical_eps_entropy(config)
    pe_star = _symmetric_pe_star_fn(config, seed, starts)
    return CriticalReport.build(
        eps_cr=eps_cr,
        eps_tilde_cr=eps_tilde,
        pe_star_at_crossing=pe_star(eps_cr),
        phi1=phi1,
    )


def _scan_column(args: tuple[float, int, int]) -> CriticalReport:
    phi1, seed, starts = args
    return critical_report(four_state_xy(phi1), seed=seed, starts=starts, phi1=phi1)


def critical_rate_scan(phi1_values: Sequence[float], *, seed: int = 0,
                       starts: int = 32, threads: int = 1) -> list[CriticalReport]:
    """Critical-rate table over four-state protocols measuring along z and
    an angle phi1 in the xy plane, one report per angle.

    Columns are independent work items; each derives its own random stream
    from the master seed, so results do not depend on scheduling.
    """
    jobs = [
        (float(phi1), int(np.random.SeedSequence([seed, i]).generate_state(1)[0]), starts)
        for i, phi1 in enumerate(phi1_values)
    ]
    if threads == 1 or len(jobs) <= 1:
        return [_scan_column(job) for job in jobs]
    workers = threads if threads > 0 else None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_scan_column, jobs))


def format_table_csv(reports: Sequence[CriticalReport]) -> str:
    """CSV payload with percentages to two decimals, matching the report format."""
    lines = ["phi1,eps_cr_pct,eps_tilde_cr_pct,delta_eps_pct,pe_star"]
    for r in reports:
        phi1 = 0.0 if r.phi1 is None else r.phi1
        lines.append(
            f"{phi1:.12g},{100 * r.eps_cr:.2f},{100 * r.eps_tilde_cr:.2f},"
            f"{100 * r.delta_eps:.2f},{r.pe_star_at_crossing:.4f}"
        )
    return "\n".join(lines) + "\n"
