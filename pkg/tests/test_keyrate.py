import math

import numpy as np
import pytest
from conftest import brute_force_conditional_eigs, random_direction

from qkdguess import (
    BellSpectrum,
    Direction,
    DomainError,
    InfeasibleRates,
    binary_entropy,
    conditional_eigenvalues,
    four_state_xy,
    haar_unitary,
    holevo,
    mutual_information,
    secure_key_rate,
    shannon_entropy,
    signed_rate,
    solve_protocol1,
    standard_bb84,
    standard_sixstate,
)

LOG2_3 = math.log2(3.0)


def _random_spectrum(rng):
    return BellSpectrum(tuple(rng.dirichlet(np.ones(4))))


def _bb84_reduction(eps):
    return max(1.0 - 2.0 * binary_entropy(eps), 0.0)


def _sixstate_reduction(eps):
    return max(1.0 - binary_entropy(1.5 * eps) - 1.5 * eps * LOG2_3, 0.0)


# --- entropies ---------------------------------------------------------------

def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.499915958164528, abs=1e-12)
    assert binary_entropy(0.3) == binary_entropy(0.7)


def test_binary_entropy_domain():
    with pytest.raises(DomainError):
        binary_entropy(-0.1)
    with pytest.raises(DomainError):
        binary_entropy(1.1)
    # tiny numerical fuzz is clamped rather than rejected
    assert binary_entropy(-1e-13) == 0.0
    assert binary_entropy(1 + 1e-13) == 0.0


def test_shannon_entropy():
    assert shannon_entropy([0.25] * 4) == pytest.approx(2.0, abs=1e-12)
    assert shannon_entropy([1.0, 0.0, 0.0]) == 0.0
    assert shannon_entropy([1 / 3] * 3) == pytest.approx(LOG2_3, abs=1e-12)


def test_mutual_information():
    bb84 = standard_bb84()
    i_ab, i_ded = mutual_information(bb84, (0.0, 0.0))
    assert i_ded == pytest.approx(1.0, abs=1e-12)
    assert i_ab == pytest.approx(2.0, abs=1e-12)  # 1 + H(1/2, 1/2)
    _, i_ded = mutual_information(bb84, (0.1, 0.1))
    assert i_ded == pytest.approx(0.5310044064107188, abs=1e-12)
    six = standard_sixstate()
    for eps in (0.0, 0.05, 0.2):
        i_ab, i_ded = mutual_information(six, (eps,) * 3)
        assert i_ab - i_ded == pytest.approx(LOG2_3, abs=1e-12)


# --- conditional states -------------------------------------------------------

def test_conditional_eigenvalues_examples():
    spec = BellSpectrum((0.8, 0.1, 0.1, 0.0))
    lam_p, lam_m = conditional_eigenvalues(spec, Direction(0.0, 0.0))
    assert lam_p == pytest.approx(0.9, abs=1e-12)
    assert lam_m == pytest.approx(0.1, abs=1e-12)
    pure = BellSpectrum((1.0, 0.0, 0.0, 0.0))
    assert conditional_eigenvalues(pure, Direction(1.0, 1.0)) == (
        pytest.approx(1.0, abs=1e-12), pytest.approx(0.0, abs=1e-12)
    )
    six = BellSpectrum((0.5, 1 / 6, 1 / 6, 1 / 6))
    lam_p, _ = conditional_eigenvalues(six, Direction(math.pi / 2, 0.0))
    assert lam_p == pytest.approx(2 / 3, abs=1e-12)


def test_conditional_eigenvalues_sum_and_range():
    rng = np.random.default_rng(101)
    for _ in range(1000):
        spec = _random_spectrum(rng)
        d = random_direction(rng)
        lam_p, lam_m = conditional_eigenvalues(spec, d)
        assert lam_p + lam_m == pytest.approx(1.0, abs=1e-12)
        assert 0.5 - 1e-12 <= lam_p <= 1.0 + 1e-12
        assert -1e-12 <= lam_m <= 0.5 + 1e-12


def test_conditional_eigenvalues_match_partial_trace():
    rng = np.random.default_rng(103)
    for _ in range(300):
        spec = _random_spectrum(rng)
        d = random_direction(rng)
        v = haar_unitary(6, rng)
        lam_p, lam_m = conditional_eigenvalues(spec, d)
        eigs = brute_force_conditional_eigs(spec, v.matrix, d, sign=1)
        assert eigs[0] == pytest.approx(lam_p, abs=1e-9)
        assert eigs[1] == pytest.approx(lam_m, abs=1e-9)
        assert np.all(np.abs(eigs[2:]) < 1e-9)
        # same spectrum for the opposite Alice outcome
        eigs_minus = brute_force_conditional_eigs(spec, v.matrix, d, sign=-1)
        assert eigs_minus[0] == pytest.approx(lam_p, abs=1e-9)


def test_conditional_eigenvalues_independent_of_basis():
    rng = np.random.default_rng(107)
    spec = _random_spectrum(rng)
    d = random_direction(rng)
    eigs = [
        brute_force_conditional_eigs(spec, haar_unitary(6, rng).matrix, d)[:2]
        for _ in range(5)
    ]
    for other in eigs[1:]:
        assert np.allclose(other, eigs[0], atol=1e-10)


# --- Holevo quantity ----------------------------------------------------------

def test_holevo_pure_state_is_zero():
    pure = BellSpectrum((1.0, 0.0, 0.0, 0.0))
    assert holevo(pure, standard_bb84()) == pytest.approx(0.0, abs=1e-12)
    assert holevo(pure, standard_sixstate()) == pytest.approx(0.0, abs=1e-12)


def test_holevo_bounds():
    rng = np.random.default_rng(109)
    for _ in range(300):
        spec = _random_spectrum(rng)
        for config in (standard_bb84(), standard_sixstate()):
            chi = holevo(spec, config)
            assert -1e-10 <= chi <= shannon_entropy(spec.as_array()) + 1e-10


def test_holevo_near_entropic_threshold():
    # at eps ~ 11% the maximized Holevo quantity eats the whole key rate
    report = secure_key_rate(standard_bb84(), (0.11, 0.11))
    assert abs(report.i_ab_basis_deducted - report.chi_ae) < 1e-3
    report = secure_key_rate(standard_sixstate(), (0.126, 0.126, 0.126))
    assert report.rate < 2e-3


# --- secure key rate ----------------------------------------------------------

def test_rate_matches_bb84_reduction_on_grid():
    config = standard_bb84()
    for eps in np.arange(0.0, 0.2001, 0.01):
        report = secure_key_rate(config, (float(eps),) * 2)
        assert report.rate == pytest.approx(_bb84_reduction(float(eps)), abs=1e-6)


def test_rate_matches_sixstate_reduction_on_grid():
    config = standard_sixstate()
    for eps in np.arange(0.0, 0.2001, 0.01):
        report = secure_key_rate(config, (float(eps),) * 3)
        assert report.rate == pytest.approx(_sixstate_reduction(float(eps)), abs=1e-6)


def test_rate_quoted_values():
    report = secure_key_rate(standard_bb84(), (0.1, 0.1))
    assert report.rate == pytest.approx(0.062, abs=1e-3)
    eps = (5 - 2 * math.sqrt(3)) / 13
    report = secure_key_rate(standard_sixstate(), (eps,) * 3)
    assert report.rate == pytest.approx(0.045, abs=1e-3)


def test_rate_perfect_channel():
    assert secure_key_rate(standard_bb84(), (0.0, 0.0)).rate == pytest.approx(1.0, abs=1e-9)
    assert secure_key_rate(standard_sixstate(), (0.0,) * 3).rate == pytest.approx(
        1.0, abs=1e-9
    )


def test_rate_monotone_in_error():
    for config, t in ((standard_bb84(), 2), (standard_sixstate(), 3)):
        rates = [
            secure_key_rate(config, (float(e),) * t).rate
            for e in np.arange(0.0, 0.2001, 0.01)
        ]
        assert all(a >= b - 1e-9 for a, b in zip(rates, rates[1:]))


def test_rate_report_invariants():
    rng = np.random.default_rng(113)
    for _ in range(50):
        eps = float(rng.uniform(0, 0.3))
        report = secure_key_rate(standard_bb84(), (eps, eps))
        assert report.rate >= 0.0
        assert report.rate <= report.i_ab_basis_deducted + 1e-12
        assert report.i_ab == pytest.approx(report.i_ab_basis_deducted + 1.0, abs=1e-12)
        assert report.optimizing_lambda3 is not None
    report = secure_key_rate(standard_sixstate(), (0.05,) * 3)
    assert report.optimizing_lambda3 is None


def test_chi_maximization_dominates_probes():
    # the maximized Holevo value beats both interval endpoints and eps0/2
    config = standard_bb84()
    for eps in (0.05, 0.1, 0.15):
        fam = solve_protocol1(config, eps, eps)
        lo, hi = fam.free_range
        report = secure_key_rate(config, (eps, eps))
        probes = [lo, hi, eps / 2]
        for x in probes:
            assert report.chi_ae >= holevo(fam.at(x), config) - 1e-12
        # the optimizer's lambda3 reproduces the reported chi
        assert holevo(fam.at(report.optimizing_lambda3), config) == pytest.approx(
            report.chi_ae, abs=1e-12
        )


def test_bb84_chi_maximizer_is_eps_squared():
    # the maximizing free eigenvalue for symmetric BB84 rates sits at eps^2
    for eps in (0.05, 0.1, 0.15):
        report = secure_key_rate(standard_bb84(), (eps, eps))
        assert report.optimizing_lambda3 == pytest.approx(eps * eps, abs=1e-6)


def test_signed_rate_crosses_zero():
    config = standard_bb84()
    assert signed_rate(config, (0.10, 0.10)) > 0
    assert signed_rate(config, (0.12, 0.12)) < 0


def test_rate_nonstandard_four_state():
    # reduction formulas do not apply off-axis, but the report stays sane
    report = secure_key_rate(four_state_xy(math.pi / 8), (0.05, 0.05))
    assert 0.0 < report.rate < 1.0
    assert report.chi_ae > 0.0


def test_rate_infeasible():
    with pytest.raises(InfeasibleRates):
        secure_key_rate(standard_sixstate(), (0.9, 0.05, 0.05))
