"""Tests for resonant control and the rotated-frame quadrature."""

import math

import numpy as np
import pytest

from zeno_ctl.control import (
    ControlHamiltonian,
    check_resonance,
    controlled_propagator,
    controlled_rates,
    controlled_survival,
    finite_difference_derivatives,
    first_order_coefficient_controlled,
    frame_superops,
    gauss_legendre_unit,
    hamiltonian_first_order,
    min_frequency_controlled,
    minimal_resonant_omega,
    survival_derivatives,
    zeno_limit_rate_controlled,
)
from zeno_ctl.errors import ConditionInapplicableError, DimensionError, ResonanceError
from zeno_ctl.liouville import (
    NoiseChannel,
    SystemModel,
    expm_superop,
    hamiltonian_superop,
    random_model,
    random_state,
)
from zeno_ctl.qubit import SIGMA_X, SIGMA_Y, SIGMA_Z, random_bloch
from zeno_ctl.zeno import zeno_limit_rate_free

PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)
ONE = np.array([0, 1], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def dephasing(mu=1.0):
    return SystemModel(h0=np.zeros((2, 2)), channels=(NoiseChannel(mu, SIGMA_Z),))


def amplitude_damping(mu=1.0):
    return SystemModel(h0=np.zeros((2, 2)), channels=(NoiseChannel(mu, LOWER),))


def test_from_direction_normalizes():
    ctrl = ControlHamiltonian.from_direction([0, 0, 2.0])
    assert np.allclose(ctrl.hc, SIGMA_Z)
    assert ctrl.omega == pytest.approx(math.pi)
    assert ControlHamiltonian.from_direction([1, 0, 0], multiple=3).omega == pytest.approx(3 * math.pi)
    with pytest.raises(ValueError):
        ControlHamiltonian.from_direction([0, 0, 0])


def test_strength_is_omega_over_tau():
    assert ControlHamiltonian(SIGMA_X, math.pi).strength(0.01) == pytest.approx(100 * math.pi)
    with pytest.raises(ValueError):
        ControlHamiltonian(SIGMA_X, math.pi).strength(0.0)


def test_check_resonance():
    assert check_resonance(ControlHamiltonian(SIGMA_X, math.pi))
    assert check_resonance(ControlHamiltonian(SIGMA_X, 2 * math.pi))
    report = check_resonance(ControlHamiltonian(SIGMA_X, math.pi / 2))
    assert not report
    assert report.violations
    assert "not resonant" in report.describe()


def test_minimal_resonant_omega():
    assert minimal_resonant_omega(SIGMA_Y) == pytest.approx(math.pi)
    assert minimal_resonant_omega(np.diag([0.0, 1.0, 2.0])) == pytest.approx(2 * math.pi)
    assert minimal_resonant_omega(np.diag([0.0, 0.5, 1.5])) == pytest.approx(4 * math.pi)
    ctrl = ControlHamiltonian.from_multiple(np.diag([0.0, 1.0, 2.0]), 2)
    assert ctrl.omega == pytest.approx(4 * math.pi)
    assert check_resonance(ctrl)


def test_minimal_resonant_omega_rejects_irrational_and_flat():
    with pytest.raises(ResonanceError):
        minimal_resonant_omega(np.diag([0.0, 1.0, math.sqrt(2)]))
    with pytest.raises(ResonanceError):
        minimal_resonant_omega(np.eye(3))


def test_gauss_legendre_unit():
    nodes, weights = gauss_legendre_unit(16)
    assert weights.sum() == pytest.approx(1.0)
    assert np.all((nodes > 0) & (nodes < 1))
    assert np.sum(weights * nodes ** 5) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_frame_superops_match_expm():
    ctrl = ControlHamiltonian(SIGMA_X + 0.5 * SIGMA_Z, math.pi)
    etas = [0.0, 0.3, 1.0]
    frames = frame_superops(ctrl, etas)
    lc = hamiltonian_superop(ctrl.hc)
    for eta, frame in zip(etas, frames):
        assert np.allclose(frame, expm_superop(ctrl.omega * eta * lc), atol=1e-12)


def test_controlled_propagator_tends_to_identity():
    ctrl = ControlHamiltonian.from_direction([1, 1, 0])
    prop = controlled_propagator(dephasing(), ctrl, 1e-12)
    assert np.allclose(prop, np.eye(4), atol=1e-10)


def test_controlled_propagator_without_noise_is_control_rotation():
    ctrl = ControlHamiltonian(SIGMA_X, 0.7)
    prop = controlled_propagator(SystemModel.noiseless(np.zeros((2, 2))), ctrl, 0.1)
    assert np.allclose(prop, expm_superop(0.7 * hamiltonian_superop(SIGMA_X)))


def test_non_resonant_survival_stays_below_one():
    ctrl = ControlHamiltonian(SIGMA_X, math.pi / 2)
    p = controlled_survival(SystemModel.noiseless(np.zeros((2, 2))), ctrl, ONE, 1e-6)
    # |<1| e^{-i pi/2 sigma_x} |1>|^2 = cos^2(pi/2) = 0
    assert p == pytest.approx(0.0, abs=1e-10)
    ctrl = ControlHamiltonian(SIGMA_X, math.pi / 4)
    assert controlled_survival(SystemModel.noiseless(np.zeros((2, 2))), ctrl, ONE, 1e-6) == pytest.approx(0.5)


def test_controlled_rate_dephasing_equator():
    ctrl = ControlHamiltonian.from_direction([0, 1, 0])
    assert zeno_limit_rate_controlled(dephasing(), ctrl, PLUS) == pytest.approx(0.5, abs=1e-12)


def test_controlled_rate_amplitude_damping_excited():
    for phi in (0.0, 1.1, 4.0):
        ctrl = ControlHamiltonian.from_direction([math.cos(phi), math.sin(phi), 0])
        assert zeno_limit_rate_controlled(amplitude_damping(), ctrl, ONE) == pytest.approx(0.375, abs=1e-12)


def test_controlled_rate_along_state_equals_free_rate():
    rng = np.random.default_rng(21)
    for _ in range(10):
        model = random_model(rng, 2)
        r = random_bloch(rng)
        alpha, beta = r.angles()
        psi0 = np.array([math.cos(alpha / 2), np.exp(1j * beta) * math.sin(alpha / 2)])
        ctrl = ControlHamiltonian.from_direction(r.as_array())
        assert zeno_limit_rate_controlled(model, ctrl, psi0) == pytest.approx(
            zeno_limit_rate_free(model, psi0), abs=1e-10)


def test_controlled_rate_requires_resonance():
    with pytest.raises(ResonanceError):
        zeno_limit_rate_controlled(dephasing(), ControlHamiltonian(SIGMA_X, 1.0), PLUS)


def test_dimension_mismatch():
    ctrl = ControlHamiltonian(np.diag([0.0, 1.0, 2.0]), 2 * math.pi)
    with pytest.raises(DimensionError):
        zeno_limit_rate_controlled(dephasing(), ctrl, PLUS)


def test_hamiltonian_first_order_vanishes():
    rng = np.random.default_rng(22)
    for dim in (2, 3):
        for _ in range(10):
            model = random_model(rng, dim)
            hc = np.diag(rng.integers(-2, 3, size=dim).astype(float))
            if np.ptp(np.diag(hc)) == 0:
                continue
            ctrl = ControlHamiltonian.from_multiple(hc)
            assert abs(hamiltonian_first_order(model, ctrl, random_state(rng, dim))) < 1e-12


def test_survival_derivatives_match_finite_differences():
    rng = np.random.default_rng(23)
    for _ in range(4):
        model = random_model(rng, 2, scale=0.5)
        ctrl = ControlHamiltonian.from_direction(random_bloch(rng).as_array())
        psi0 = random_state(rng, 2)
        first, second = survival_derivatives(model, ctrl, psi0)
        fd_first, fd_second = finite_difference_derivatives(model, ctrl, psi0)
        assert first == pytest.approx(fd_first, abs=1e-7)
        assert second == pytest.approx(fd_second, abs=1e-5)
        assert first == pytest.approx(-zeno_limit_rate_controlled(model, ctrl, psi0), abs=1e-10)


def test_first_order_coefficient_controlled_matches_finite_tau_slope():
    model, psi0 = dephasing(), PLUS
    ctrl = ControlHamiltonian.from_direction([0, 1, 0])
    taus = [4e-3, 2e-3, 1e-3]
    rates = controlled_rates(model, ctrl, psi0, taus)
    slope = (rates[1] - rates[2]) / (taus[1] - taus[2])
    assert slope == pytest.approx(first_order_coefficient_controlled(model, ctrl, psi0), abs=2e-2)
    assert rates[2] == pytest.approx(0.5, abs=5e-3)


def test_weak_control_scaling_recovers_free_rate():
    ctrl = ControlHamiltonian.from_direction([0, 1, 0])
    weak = controlled_rates(dephasing(), ctrl, PLUS, [1e-4], strength_exponent=1)[0]
    assert weak == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("seed", [3, 11, 42])
def test_controlled_rate_is_stable_in_quadrature_order(seed):
    rng = np.random.default_rng(seed)
    model = random_model(rng, 2)
    psi0 = random_state(rng, 2)
    ctrl = ControlHamiltonian.from_direction(random_bloch(rng).as_array())
    low = zeno_limit_rate_controlled(model, ctrl, psi0, quadrature_order=64)
    high = zeno_limit_rate_controlled(model, ctrl, psi0, quadrature_order=128)
    assert abs(low - high) <= 1e-12


def test_min_frequency_controlled():
    ctrl = ControlHamiltonian.from_direction([0, 1, 0])
    base = min_frequency_controlled(dephasing(1.0), ctrl, PLUS)
    assert base >= 0
    assert min_frequency_controlled(dephasing(2.0), ctrl, PLUS) == pytest.approx(2 * base, rel=1e-8)
    with pytest.raises(ConditionInapplicableError):
        min_frequency_controlled(SystemModel.noiseless(SIGMA_Z), ctrl, PLUS)
