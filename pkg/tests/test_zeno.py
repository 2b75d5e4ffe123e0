"""Tests for uncontrolled repeated measurements."""

import math

import numpy as np
import pytest

from zeno_ctl.errors import ConditionInapplicableError, ProbabilityDomainError
from zeno_ctl.liouville import NoiseChannel, SystemModel, random_model, random_state
from zeno_ctl.qubit import SIGMA_X, SIGMA_Z
from zeno_ctl.zeno import (
    DecayEstimate,
    ZenoProtocol,
    decay_estimate,
    effective_rate,
    finite_tau_rates,
    first_order_coefficient_free,
    fit_rate_slope,
    liouville_moments,
    min_frequency_free,
    quadratic_decay_check,
    repeated_survival,
    survival_probability,
    zeno_limit_rate_free,
)

PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)
ZERO = np.array([1, 0], dtype=complex)
ONE = np.array([0, 1], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def dephasing(mu=1.0, h0=None):
    h0 = np.zeros((2, 2)) if h0 is None else h0
    return SystemModel(h0=h0, channels=(NoiseChannel(mu, SIGMA_Z),))


def test_survival_probability_dephasing_closed_form():
    assert survival_probability(dephasing(), PLUS, 0.1) == pytest.approx((1 + math.exp(-0.2)) / 2, abs=1e-12)
    assert survival_probability(dephasing(), PLUS, 0.0) == 1.0


def test_survival_probability_of_eigenstate_is_one():
    model = SystemModel.noiseless(SIGMA_Z)
    for tau in (0.01, 1.0, 7.5):
        assert survival_probability(model, ZERO, tau) == pytest.approx(1.0, abs=1e-12)


def test_effective_rate_values():
    assert effective_rate(1.0, 0.3) == 0.0
    assert effective_rate(math.exp(-0.1), 1.0) == pytest.approx(0.1)
    assert effective_rate(0.909365, 0.1) == pytest.approx(0.950, abs=1e-3)


def test_effective_rate_domain():
    with pytest.raises(ProbabilityDomainError):
        effective_rate(0.0, 0.1)
    with pytest.raises(ProbabilityDomainError):
        effective_rate(1.2, 0.1)
    with pytest.raises(ValueError):
        effective_rate(0.5, 0.0)


def test_repeated_survival():
    assert repeated_survival(1.0, 0.01, 5.0) == 1.0
    assert repeated_survival(0.99, 0.01, 1.0) == pytest.approx(0.99 ** 100)
    p, tau, t = 0.97, 0.02, 1.3
    assert repeated_survival(p, tau, t) == pytest.approx(math.exp(-effective_rate(p, tau) * t), abs=1e-12)


@pytest.mark.parametrize("p", [0.5, 0.9, 0.999, 1 - 1e-9])
def test_repeated_survival_decreases_with_each_measurement(p):
    tau = 0.01
    values = [repeated_survival(p, tau, k * tau) for k in range(1, 51)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))
    assert values[0] == pytest.approx(p, rel=1e-14)


def test_decay_estimate_after_underflow():
    est = DecayEstimate.from_probability(0.0, 1000.0, 5000.0)
    assert est.p_tau == 0.0
    assert est.gamma_eff is None
    assert est.survival_total == 0.0
    assert DecayEstimate.from_probability(0.0, 1000.0, 0.0).survival_total == 1.0


def test_decay_estimate_is_consistent():
    est = decay_estimate(dephasing(), PLUS, 0.01, 1.0)
    assert isinstance(est, DecayEstimate)
    assert est.survival_total == pytest.approx(repeated_survival(est.p_tau, 0.01, 1.0), rel=1e-12)
    assert est.gamma_eff == pytest.approx(1.0, abs=0.01)


def test_protocol_validation():
    assert ZenoProtocol(tau=0.01, total_time=1.0, psi0=PLUS).cycles == pytest.approx(100)
    with pytest.raises(ValueError):
        ZenoProtocol(tau=0.0, total_time=1.0, psi0=PLUS)
    with pytest.raises(ValueError):
        ZenoProtocol(tau=0.1, total_time=-1.0, psi0=PLUS)


def test_quadratic_decay_check():
    assert quadratic_decay_check(SIGMA_Z, ZERO, 0.3) == 1.0
    assert quadratic_decay_check(SIGMA_Z, PLUS, 0.1) == pytest.approx(1 - 0.01)


def test_quadratic_decay_remainder_is_fourth_order():
    model = SystemModel.noiseless(SIGMA_Z)
    errors = [abs(survival_probability(model, PLUS, tau) - quadratic_decay_check(SIGMA_Z, PLUS, tau))
              for tau in (0.04, 0.02)]
    assert errors[0] / errors[1] == pytest.approx(16, rel=0.05)


def test_zeno_limit_rate_free_presets():
    assert zeno_limit_rate_free(SystemModel.noiseless(SIGMA_X), PLUS) == 0.0
    assert zeno_limit_rate_free(dephasing(0.7), PLUS) == pytest.approx(0.7)
    ad = SystemModel(h0=np.zeros((2, 2)), channels=(NoiseChannel(1.3, LOWER),))
    assert zeno_limit_rate_free(ad, ONE) == pytest.approx(1.3)
    assert zeno_limit_rate_free(ad, ZERO) == 0.0


def test_zeno_limit_rate_free_is_non_negative():
    rng = np.random.default_rng(11)
    for dim in (2, 3, 4):
        for _ in range(20):
            assert zeno_limit_rate_free(random_model(rng, dim), random_state(rng, dim)) >= 0


def test_liouville_moments_dephasing():
    first, second = liouville_moments(dephasing(), PLUS)
    assert first == pytest.approx(-1.0)
    assert second == pytest.approx(2.0)
    assert first_order_coefficient_free(dephasing(), PLUS) == pytest.approx(-0.5)


def test_first_order_coefficient_noiseless_matches_variance():
    # gamma_eff(tau) ~ tau <Delta^2 H> when there is no noise
    assert first_order_coefficient_free(SystemModel.noiseless(SIGMA_Z), PLUS) == pytest.approx(1.0)
    assert first_order_coefficient_free(dephasing(), ZERO) == pytest.approx(0.0, abs=1e-15)


def test_first_order_coefficient_matches_finite_tau_slope():
    rng = np.random.default_rng(12)
    for _ in range(5):
        model = random_model(rng, 2, scale=0.5)
        psi0 = random_state(rng, 2)
        taus = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
        intercept, slope = fit_rate_slope(taus, finite_tau_rates(model, psi0, taus))
        assert intercept == pytest.approx(zeno_limit_rate_free(model, psi0), abs=1e-4)
        assert slope == pytest.approx(first_order_coefficient_free(model, psi0), rel=0.02, abs=1e-2)


def test_min_frequency_free():
    assert min_frequency_free(dephasing(), PLUS) == pytest.approx(0.5)
    # doubling mu doubles the variance term and the denominator
    assert min_frequency_free(dephasing(2.0), PLUS) == pytest.approx(1.0)
    with pytest.raises(ConditionInapplicableError):
        min_frequency_free(SystemModel.noiseless(SIGMA_X), PLUS)


def test_fit_rate_slope_exact_line():
    intercept, slope = fit_rate_slope([0.1, 0.2, 0.3], [1.5, 2.0, 2.5])
    assert intercept == pytest.approx(1.0)
    assert slope == pytest.approx(5.0)
    with pytest.raises(ValueError):
        fit_rate_slope([0.1], [1.0])
