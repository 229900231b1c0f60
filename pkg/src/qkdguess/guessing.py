"""Eavesdropper guessing probability over purifications of Bell-diagonal states.

The eavesdropper holds the purifying system of the Alice-Bob state and
measures in a rotated orthonormal basis fixed by a 2t x 2t unitary V.  Her
probability of guessing Alice's basis-and-bit outcome is a quadratic form in
the first four columns of V (the Schmidt rank of a two-qubit state is at most
four), which this module evaluates exactly and maximizes numerically over V
and over any spectrum freedom left by the observed error rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import optimize as _sciopt

from ._linalg import (
    complete_isometry_to_unitary,
    expm_skew_hermitian,
    haar_isometries,
    phase_fixed_qr,
    skew_hermitian_basis,
    unitarity_defect,
)
from ._search import golden_section_max
from .errors import DimensionMismatch, DomainError
from .protocol import (
    ProtocolClass,
    ProtocolConfig,
    is_standard_bb84,
    is_standard_sixstate,
    resolve_rates,
)
from .states import UNITARY_TOL, BellSpectrum, alice_ket, bell_basis

#: Two restart optima further apart than this flag the result as unconverged.
CONVERGENCE_SPREAD = 1e-4

_ASCENT_TOL = 1e-13
_ASCENT_MAX_ITER = 5000


@dataclass(frozen=True, eq=False)
class EveBasis:
    """Unitary defining the eavesdropper's measurement basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatch(f"basis matrix must be square, got shape {m.shape}")
        defect = unitarity_defect(m)
        if defect > UNITARY_TOL:
            raise DomainError(f"matrix is not unitary (defect {defect:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def basis_vector(self, k: int) -> np.ndarray:
        """The k-th rotated basis vector, i.e. column k of conj(V)."""
        return self.matrix[:, k].conj()


@dataclass(frozen=True, eq=False)
class Purification:
    """Tripartite pure state holding Alice-Bob (dim 4) and the eavesdropper (dim 2t).

    Amplitudes are stored in the computational product basis, Alice-Bob index
    major: amplitudes[i * 2t + j] multiplies |i>_AB |j>_E.
    """

    amplitudes: np.ndarray
    t: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if self.t < 2 or amps.shape != (8 * self.t,):
            raise DimensionMismatch(
                f"expected a flat vector of length 8*t, got shape {amps.shape} with t={self.t}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"purification is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def _matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(4, 2 * self.t)

    def reduced_ab(self) -> np.ndarray:
        """Alice-Bob state after tracing out the eavesdropper."""
        psi = self._matrix()
        return psi @ psi.conj().T

    def reduced_eve(self) -> np.ndarray:
        """Eavesdropper state after tracing out Alice and Bob."""
        psi = self._matrix()
        return psi.T @ psi.conj()


def build_purification(spec: BellSpectrum, v: EveBasis) -> Purification:
    """Purification sum_k sqrt(lambda_k) |phi_k>_AB (conj(V) |k>)_E.

    Only the first four columns of V enter the state; the remaining rotated
    basis vectors are orthogonal to its support.
    """
    n = v.n
    if n < 4 or n % 2:
        raise DimensionMismatch(f"eavesdropper dimension must be even and >= 4, got {n}")
    roots = np.sqrt(spec.as_array())
    bell = bell_basis()
    vc = v.matrix.conj()
    psi = np.einsum("k,ik,jk->ij", roots, bell, vc[:, :4]).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return Purification(amplitudes=psi, t=n // 2)


@lru_cache(maxsize=128)
def _measurement_forms(config: ProtocolConfig) -> np.ndarray:
    """Bell-basis quadratic forms of Alice's projectors, shape (2t, 4, 4).

    Entry 2j is <phi_k| (|+n_j><+n_j| x I) |phi_l>, entry 2j+1 the same with
    the opposite sign; these pair with eavesdropper outcomes 2j and 2j+1.
    """
    bell = bell_basis()
    forms = []
    for direction in config.directions:
        for sign in (1, -1):
            ket = alice_ket(direction, sign)
            op = np.kron(np.outer(ket, ket.conj()), np.eye(2))
            forms.append(bell.conj().T @ op @ bell)
    out = np.stack(forms)
    out.setflags(write=False)
    return out


def _scaled_forms(spec: BellSpectrum, m_forms: np.ndarray) -> np.ndarray:
    roots = np.sqrt(spec.as_array())
    return roots[None, :, None] * m_forms * roots[None, None, :]


def _pe_of_isometries(n_forms: np.ndarray, ws: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("...ei,eij,...ej->...", ws.conj(), n_forms, ws))


def guessing_probability(spec: BellSpectrum, config: ProtocolConfig, v: EveBasis) -> float:
    """Probability that the eavesdropper's outcome names Alice's basis and bit.

    P_E = sum_j <psi| (|+n_j><+n_j| x I x |2j><2j|
                       + |-n_j><-n_j| x I x |2j+1><2j+1|) |psi>

    evaluated on the purification fixed by `spec` and `v`.  The basis-choice
    probabilities do not enter: the eavesdropper's projectors over j are
    orthogonal, so her outcome identifies basis and bit jointly.
    """
    if v.n != 2 * config.t:
        raise DimensionMismatch(
            f"basis dimension {v.n} does not match protocol dimension {2 * config.t}"
        )
    w = v.matrix.conj()[:, :4]
    return float(_pe_of_isometries(_scaled_forms(spec, _measurement_forms(config)), w))


def closed_form_pe_bb84(eps: float) -> float:
    """Maximum guessing probability for standard BB84 at symmetric error rate eps.

    Equals 1/2 + sqrt(2 eps (1 - 2 eps)) for eps <= 1/4 and 1 beyond.
    """
    if not -1e-12 <= eps <= 0.5 + 1e-12:
        raise DomainError(f"eps must lie in [0, 1/2], got {eps}")
    eps = min(max(eps, 0.0), 0.5)
    if eps >= 0.25:
        return 1.0
    return 0.5 + math.sqrt(2.0 * eps * (1.0 - 2.0 * eps))


def closed_form_pe_sixstate(eps: float) -> float:
    """Maximum guessing probability for the standard six-state protocol.

    Equals 1/2 + sqrt(3 eps (2 - 3 eps) / 4) for eps <= 1/3 and 1 beyond.
    """
    if not -1e-12 <= eps <= 0.5 + 1e-12:
        raise DomainError(f"eps must lie in [0, 1/2], got {eps}")
    eps = min(max(eps, 0.0), 0.5)
    if eps >= 1.0 / 3.0:
        return 1.0
    return 0.5 + math.sqrt(3.0 * eps * (2.0 - 3.0 * eps)) / 2.0


def analytic_optimal_v_bb84() -> EveBasis:
    """Known optimal measurement basis for standard BB84.

    Against the optimal spectrum family it achieves
    1/2 + sqrt(L0/2) (sqrt(L1) + sqrt(L2)); the rotated basis vectors pair the
    z outcomes with an even/odd split of the first two computational states
    and the x outcomes with the last two.
    """
    s = 1.0 / math.sqrt(2.0)
    rotated = np.array(
        [
            [0.5, s, 0.0, 0.5],
            [-0.5, s, 0.0, -0.5],
            [0.5, 0.0, s, -0.5],
            [-0.5, 0.0, s, 0.5],
        ],
        dtype=complex,
    )  # columns are the rotated basis vectors conj(V)|k>
    return EveBasis(rotated.conj())


def analytic_optimal_v_sixstate() -> EveBasis:
    """Known optimal measurement basis for the standard six-state protocol.

    Achieves 1/2 + sqrt(L0/3) (sqrt(L1) + sqrt(L2) + sqrt(L3)).  The last two
    rotated vectors only complete the unitary; they are orthogonal to the
    purification's support.
    """
    s2 = 1.0 / math.sqrt(2.0)
    s6 = 1.0 / math.sqrt(6.0)
    s3 = 1.0 / math.sqrt(3.0)
    rotated = np.array(
        [
            [s6, s2, 0.0, 0.0, 0.5, -0.5 * s3],
            [-s6, s2, 0.0, 0.0, -0.5, 0.5 * s3],
            [s6, 0.0, s2, 0.0, -0.5, -0.5 * s3],
            [s6, 0.0, -s2, 0.0, -0.5, -0.5 * s3],
            [1j * s6, 0.0, 0.0, s2, 0.0, 1j * s3],
            [s6, 0.0, 0.0, 1j * s2, 0.0, s3],
        ],
        dtype=complex,
    )
    return EveBasis(rotated.conj())


@dataclass
class OptimizerOptions:
    """Settings for the guessing-probability maximizer.

    `starts` local searches run per spectrum evaluation (one seeded from the
    known analytic basis when the protocol is standard BB84/six-state, the
    rest Haar-random).  Four-state protocols additionally scan the free
    eigenvalue on a `lambda3_grid`-point grid with golden-section refinement.
    `f_tol`/`x_tol`/`max_evals` bound the final simplex polish in the
    exponential parametrization of the unitary group.
    """

    starts: int = 32
    seed: int | np.random.SeedSequence = 0
    f_tol: float = 1e-8
    x_tol: float = 1e-8
    max_evals: int = 20000
    lambda3_grid: int = 33
    polish: bool = True
    warm_isometries: tuple[np.ndarray, ...] = field(default_factory=tuple)


@dataclass(frozen=True, eq=False)
class GuessResult:
    """Outcome of a guessing-probability maximization.

    `converged` is False when the two best restarts disagree by more than
    CONVERGENCE_SPREAD; `starts_used` counts every local search across the
    spectrum scan.
    """

    p_e_star: float
    best_v: EveBasis
    best_lambda3: float | None
    starts_used: int
    converged: bool


def _ascend_isometries(n_forms: np.ndarray, ws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Monotone fixed-point ascent of the guessing quadratic form.

    Each step replaces every isometry with the polar factor of its gradient;
    because the objective is convex in the isometry this never decreases it,
    and fixed points are stationary on the isometry manifold.
    """
    f = _pe_of_isometries(n_forms, ws)
    for _ in range(_ASCENT_MAX_ITER):
        grad = np.einsum("eij,sej->sei", n_forms, ws)
        u, _, vh = np.linalg.svd(grad, full_matrices=False)
        ws = u @ vh
        f_new = _pe_of_isometries(n_forms, ws)
        if np.max(f_new - f) < _ASCENT_TOL:
            return ws, f_new
        f = f_new
    return ws, f


def _optimize_spectrum(spec, m_forms, rng, starts, warm):
    """Multi-start ascent for one spectrum; returns (best, W, sorted values, used)."""
    n_forms = _scaled_forms(spec, m_forms)
    rows = m_forms.shape[0]
    seeds = [np.asarray(w, dtype=complex) for w in warm]
    n_fresh = max(starts - len(seeds), 1)
    ws = haar_isometries(n_fresh, rows, 4, rng)
    if seeds:
        ws = np.concatenate([np.stack(seeds), ws], axis=0)
    ws, f = _ascend_isometries(n_forms, ws)
    order = np.argsort(f)[::-1]
    best = int(order[0])
    return float(f[best]), ws[best], f[order], len(ws)


def _analytic_seed(config: ProtocolConfig) -> np.ndarray | None:
    if is_standard_bb84(config):
        return analytic_optimal_v_bb84().matrix.conj()[:, :4]
    if is_standard_sixstate(config):
        return analytic_optimal_v_sixstate().matrix.conj()[:, :4]
    return None


def _polish_simplex(spec, config, w_best, opts) -> tuple[float, np.ndarray]:
    """Nelder-Mead refinement over the full unitary group.

    The unitary is parametrized as V0 exp(A(x)) with A(x) a traceless
    skew-Hermitian combination of (2t)^2 - 1 basis matrices, so the search
    space is exactly the special unitary group around the incumbent.
    """
    m_forms = _measurement_forms(config)
    n_forms = _scaled_forms(spec, m_forms)
    v0 = complete_isometry_to_unitary(np.asarray(w_best).conj())
    basis = np.stack(skew_hermitian_basis(v0.shape[0]))

    def negative_pe(x: np.ndarray) -> float:
        v = v0 @ expm_skew_hermitian(np.tensordot(x, basis, axes=1))
        return -float(_pe_of_isometries(n_forms, v.conj()[:, :4]))

    budget = int(min(opts.max_evals, 4000))
    res = _sciopt.minimize(
        negative_pe,
        np.zeros(len(basis)),
        method="Nelder-Mead",
        options={"fatol": opts.f_tol, "xatol": opts.x_tol,
                 "maxfev": budget, "maxiter": budget},
    )
    v = v0 @ expm_skew_hermitian(np.tensordot(res.x, basis, axes=1))
    return -float(res.fun), phase_fixed_qr(v.conj()[:, :4])


def maximize_guessing(config: ProtocolConfig, eps: Sequence[float],
                      opts: OptimizerOptions | None = None) -> GuessResult:
    """Maximum guessing probability over the eavesdropper basis and free spectrum.

    For four-state protocols the free eigenvalue is scanned on a grid and
    refined by golden section, with the basis optimization warm-started
    between neighboring spectra.  The reported value is monotone
    nondecreasing in `opts.starts`.
    """
    opts = opts or OptimizerOptions()
    if opts.starts < 1:
        raise DomainError(f"need at least one start, got {opts.starts}")
    family = resolve_rates(config, eps)
    m_forms = _measurement_forms(config)
    rng = np.random.default_rng(opts.seed)
    base_seeds = []
    for w in opts.warm_isometries:
        w = np.asarray(w, dtype=complex)
        if w.shape != (2 * config.t, 4):
            raise DimensionMismatch(
                f"warm isometries must have shape ({2 * config.t}, 4), got {w.shape}"
            )
        base_seeds.append(phase_fixed_qr(w))
    analytic = _analytic_seed(config)
    if analytic is not None:
        base_seeds = [analytic, *base_seeds]

    used = 0
    lo, hi = family.free_range
    if family.is_fixed:
        best_lam3 = (lo + hi) / 2.0
        best_val, best_w, values, n = _optimize_spectrum(
            family.at(best_lam3), m_forms, rng, opts.starts, base_seeds
        )
        used += n
    else:
        scan_starts = max(4, opts.starts // 4)
        grid = np.linspace(lo, hi, max(opts.lambda3_grid, 3))
        chain: list[np.ndarray] = []
        scan_vals, scan_ws = [], []
        for x in grid:
            val, w, _, n = _optimize_spectrum(
                family.at(x), m_forms, rng, scan_starts, base_seeds + chain
            )
            chain = [w]
            used += n
            scan_vals.append(val)
            scan_ws.append(w)
        i_best = int(np.argmax(scan_vals))
        best_val, best_w, best_lam3 = scan_vals[i_best], scan_ws[i_best], float(grid[i_best])

        refine_starts = max(2, opts.starts // 8)
        state = {"w": best_w, "used": 0}

        def pe_at(x: float) -> float:
            nonlocal best_val, best_w, best_lam3
            val, w, _, n = _optimize_spectrum(
                family.at(x), m_forms, rng, refine_starts, base_seeds + [state["w"]]
            )
            state["w"] = w
            state["used"] += n
            if val > best_val:
                best_val, best_w, best_lam3 = val, w, float(x)
            return val

        a = float(grid[max(i_best - 1, 0)])
        b = float(grid[min(i_best + 1, len(grid) - 1)])
        golden_section_max(pe_at, a, b, tol=max(1e-7, (hi - lo) * 1e-6), max_iter=60)
        used += state["used"]

        best_val, best_w, values, n = _optimize_spectrum(
            family.at(best_lam3), m_forms, rng, opts.starts, base_seeds + [best_w]
        )
        used += n

    converged = len(values) < 2 or float(values[0] - values[1]) <= CONVERGENCE_SPREAD

    if opts.polish:
        polished_val, polished_w = _polish_simplex(
            family.at(best_lam3), config, best_w, opts
        )
        if polished_val > best_val:
            best_val, best_w = polished_val, polished_w

    v_full = complete_isometry_to_unitary(np.asarray(best_w)).conj()
    lam3_report = best_lam3 if config.protocol_class is ProtocolClass.FOUR_STATE else None
    return GuessResult(
        p_e_star=best_val,
        best_v=EveBasis(v_full),
        best_lambda3=lam3_report,
        starts_used=used,
        converged=converged,
    )
