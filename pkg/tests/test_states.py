import math

import numpy as np
import pytest
from conftest import bell_density, projector, random_direction

from qkdguess import (
    BellSpectrum,
    Direction,
    DomainError,
    alice_ket,
    bell_basis,
    bell_state,
    bob_guess_probability,
    bob_ket,
    correlation,
    delta,
    density_matrix,
    error_rate,
    standard_bb84,
    standard_sixstate,
)

S2 = 1.0 / math.sqrt(2.0)


def test_alice_ket_examples():
    assert np.allclose(alice_ket(Direction(0.0, 0.0), 1), [1, 0], atol=1e-15)
    assert np.allclose(alice_ket(Direction(math.pi / 2, 0.0), 1), [S2, S2], atol=1e-15)
    # direct evaluation of |-n> at theta=pi/2, phi=pi/2
    assert np.allclose(
        alice_ket(Direction(math.pi / 2, math.pi / 2), -1), [S2, -1j * S2], atol=1e-15
    )


def test_bob_ket_examples():
    assert np.allclose(bob_ket(Direction(0.0, 0.0), 1), [1, 0], atol=1e-15)
    # |theta, -phi> at theta=pi/2, phi=pi/2
    assert np.allclose(
        bob_ket(Direction(math.pi / 2, math.pi / 2), 1), [S2, -1j * S2], atol=1e-15
    )
    assert np.allclose(bob_ket(Direction(math.pi / 2, 0.0), -1), [S2, -S2], atol=1e-15)


def test_kets_are_orthonormal_pairs():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        d = random_direction(rng)
        for ket in (alice_ket, bob_ket):
            plus, minus = ket(d, 1), ket(d, -1)
            assert abs(np.linalg.norm(plus) - 1) < 1e-12
            assert abs(np.linalg.norm(minus) - 1) < 1e-12
            assert abs(np.vdot(plus, minus)) < 1e-12


def test_ket_invalid_sign():
    with pytest.raises(DomainError):
        alice_ket(Direction(0.1, 0.2), 0)


def test_bell_states():
    assert np.allclose(bell_state(0), np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert np.allclose(bell_state(2), np.array([0, 1, 1, 0]) / math.sqrt(2))
    assert np.allclose(bell_state(3), np.array([0, 1, -1, 0]) / math.sqrt(2))
    for k in range(4):
        assert abs(np.linalg.norm(bell_state(k)) - 1) < 1e-15
    with pytest.raises(IndexError):
        bell_state(4)
    with pytest.raises(IndexError):
        bell_state(-1)


def test_bell_basis_is_unitary():
    b = bell_basis()
    assert np.allclose(b.conj().T @ b, np.eye(4), atol=1e-15)


def test_spectrum_validation():
    BellSpectrum((1.0, 0.0, 0.0, 0.0))
    BellSpectrum((0.25, 0.25, 0.25, 0.25))
    # boundary fuzz within tolerance is admitted
    BellSpectrum((1.0 + 5e-10, -5e-10, 0.0, 0.0))
    with pytest.raises(DomainError):
        BellSpectrum((0.5, 0.5, 0.5, -0.5))
    with pytest.raises(DomainError):
        BellSpectrum((0.3, 0.3, 0.3, 0.3))
    with pytest.raises(DomainError):
        BellSpectrum((float("nan"), 0.5, 0.25, 0.25))


def test_direction_validation():
    with pytest.raises(DomainError):
        Direction(-0.1, 0.0)
    with pytest.raises(DomainError):
        Direction(0.1, -0.1)
    with pytest.raises(DomainError):
        Direction(0.1, 2 * math.pi)
    with pytest.raises(DomainError):
        Direction(float("inf"), 0.0)


def test_delta_examples():
    ideal = BellSpectrum((1.0, 0.0, 0.0, 0.0))
    for d in (Direction(0, 0), Direction(1.0, 2.0), Direction(math.pi, 0.5)):
        assert delta(ideal, d) == pytest.approx(1.0, abs=1e-15)
    six = BellSpectrum((0.5, 1 / 6, 1 / 6, 1 / 6))
    assert delta(six, Direction(0.0, 0.0)) == pytest.approx(2 / 3, abs=1e-15)
    spec = BellSpectrum((0.7, 0.1, 0.1, 0.1))
    assert delta(spec, Direction(math.pi / 2, math.pi / 4)) == pytest.approx(0.8, abs=1e-15)


def _explicit_equal_outcome_trace(spec, direction):
    """P_{+n,+n'} + P_{-n,-n'} from projector traces, unscaled by the weight."""
    rho = bell_density(spec)
    total = 0.0
    for sign in (1, -1):
        op = np.kron(
            projector(alice_ket(direction, sign)), projector(bob_ket(direction, sign))
        )
        total += float(np.real(np.trace(op @ rho)))
    return total


def test_delta_matches_explicit_trace():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        spec = BellSpectrum(tuple(rng.dirichlet(np.ones(4))))
        d = random_direction(rng)
        assert abs(delta(spec, d) - _explicit_equal_outcome_trace(spec, d)) < 1e-10


def test_correlation_examples():
    ideal = BellSpectrum((1.0, 0.0, 0.0, 0.0))
    z = Direction(0.0, 0.0)
    assert correlation(ideal, z, 0.5, 1, 1) == pytest.approx(0.25, abs=1e-15)
    assert correlation(ideal, z, 0.5, 1, -1) == pytest.approx(0.0, abs=1e-15)
    spec = BellSpectrum((0.7, 0.1, 0.1, 0.1))
    x = Direction(math.pi / 2, 0.0)
    assert correlation(spec, x, 0.5, 1, -1) == pytest.approx(0.05, abs=1e-15)


def test_correlation_argument_validation():
    spec = BellSpectrum((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        correlation(spec, Direction(0, 0), 1.5, 1, 1)
    with pytest.raises(DomainError):
        correlation(spec, Direction(0, 0), 0.5, 2, 1)


def test_correlation_symmetry_and_normalization():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        spec = BellSpectrum(tuple(rng.dirichlet(np.ones(4))))
        d = random_direction(rng)
        w = float(rng.uniform(0, 1))
        assert abs(correlation(spec, d, w, 1, 1) - correlation(spec, d, w, -1, -1)) < 1e-12
        assert abs(correlation(spec, d, w, 1, -1) - correlation(spec, d, w, -1, 1)) < 1e-12
        four = sum(correlation(spec, d, w, a, b) for a in (1, -1) for b in (1, -1))
        assert abs(four - w) < 1e-12


def test_correlation_equals_weighted_projector_trace():
    rng = np.random.default_rng(29)
    for _ in range(200):
        spec = BellSpectrum(tuple(rng.dirichlet(np.ones(4))))
        d = random_direction(rng)
        w = float(rng.uniform(0, 1))
        rho = bell_density(spec)
        for a in (1, -1):
            for b in (1, -1):
                op = np.kron(projector(alice_ket(d, a)), projector(bob_ket(d, b)))
                expected = w * float(np.real(np.trace(op @ rho)))
                assert abs(correlation(spec, d, w, a, b) - expected) < 1e-12


def test_error_rate_examples():
    ideal = BellSpectrum((1.0, 0.0, 0.0, 0.0))
    assert error_rate(ideal, Direction(1.2, 3.4)) == pytest.approx(0.0, abs=1e-15)
    six = BellSpectrum((0.5, 1 / 6, 1 / 6, 1 / 6))
    assert error_rate(six, Direction(0.0, 0.0)) == pytest.approx(1 / 3, abs=1e-15)
    kappa = 0.6
    bb84_optimal = BellSpectrum(((1 + kappa) / 2, (1 - kappa) / 4, (1 - kappa) / 4, 0.0))
    assert error_rate(bb84_optimal, Direction(0.0, 0.0)) == pytest.approx(0.1, abs=1e-15)


def test_error_rate_at_z_is_lambda2_plus_lambda3():
    rng = np.random.default_rng(31)
    for _ in range(100):
        lams = rng.dirichlet(np.ones(4))
        spec = BellSpectrum(tuple(lams))
        assert error_rate(spec, Direction(0.0, 0.0)) == pytest.approx(
            lams[2] + lams[3], abs=1e-12
        )


def test_bob_guess_probability():
    ideal = BellSpectrum((1.0, 0.0, 0.0, 0.0))
    assert bob_guess_probability(ideal, standard_bb84()) == pytest.approx(1.0, abs=1e-15)
    spec = BellSpectrum((0.8, 0.1, 0.1, 0.0))
    assert bob_guess_probability(spec, standard_bb84()) == pytest.approx(0.9, abs=1e-12)
    eps = (5 - 2 * math.sqrt(3)) / 13
    six_spec = BellSpectrum((1 - 1.5 * eps, eps / 2, eps / 2, eps / 2))
    assert bob_guess_probability(six_spec, standard_sixstate()) == pytest.approx(
        1 - eps, abs=1e-12
    )
    assert bob_guess_probability(six_spec, standard_sixstate()) == pytest.approx(
        0.8819, abs=5e-5
    )


def test_density_matrix_is_bell_diagonal():
    rng = np.random.default_rng(37)
    spec = BellSpectrum(tuple(rng.dirichlet(np.ones(4))))
    rho = density_matrix(spec)
    assert np.allclose(rho, bell_density(spec), atol=1e-14)
    b = bell_basis()
    diag = b.conj().T @ rho @ b
    assert np.allclose(diag, np.diag(spec.as_array()), atol=1e-14)
