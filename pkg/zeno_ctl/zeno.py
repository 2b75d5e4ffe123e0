"""
Repeated projective measurements without control: single-interval survival
probability, effective decay rate and the Zeno-limit expansion.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConditionInapplicableError, NumericalError, ProbabilityDomainError
from .liouville import (
    SystemModel,
    expectation,
    noise_superop,
    projector,
    propagate,
    pure_state,
    require_hermitian,
    total_liouvillian,
)

log = logging.getLogger(__name__)

IMAG_TOL = 1e-10
PROB_TOL = 1e-10
RATE_CLAMP = 1e-12
DENOMINATOR_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class ZenoProtocol:
    """Measure every tau, for a total time total_time, starting from psi0."""
    tau: float
    total_time: float
    psi0: np.ndarray

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError(f"measurement interval must be positive, got {self.tau}")
        if self.total_time < 0:
            raise ValueError(f"total time must be non-negative, got {self.total_time}")
        object.__setattr__(self, "psi0", pure_state(self.psi0))

    @property
    def cycles(self) -> float:
        return self.total_time / self.tau


@dataclass(frozen=True)
class DecayEstimate:
    p_tau: float
    gamma_eff: Optional[float]
    survival_total: float

    @classmethod
    def from_probability(cls, p_tau: float, tau: float, t: float) -> "DecayEstimate":
        """Effective rate and total survival; gamma_eff is None once p(tau) has underflowed to 0."""
        if p_tau == 0:
            log.warning("p(tau) underflowed to 0 at tau=%g; gamma_eff is undefined", tau)
            return cls(p_tau=0.0, gamma_eff=None, survival_total=repeated_survival(0.0, tau, t))
        gamma = effective_rate(p_tau, tau)
        return cls(p_tau=p_tau, gamma_eff=gamma, survival_total=math.exp(-gamma * t))


def real_probability(value: complex, context: str = "survival probability") -> float:
    """Check a computed overlap is real and inside [0, 1] (up to 1e-10), then clamp."""
    value = complex(value)
    if abs(value.imag) > IMAG_TOL:
        raise NumericalError(f"{context} has imaginary part {value.imag:.3e}")
    p = value.real
    if p < -PROB_TOL or p > 1 + PROB_TOL:
        raise NumericalError(f"{context} {p!r} is outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def survival_probability(model: SystemModel, psi0, tau: float) -> float:
    """p(tau) = <psi0| rho(tau) |psi0>."""
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    psi = pure_state(psi0)
    if tau == 0:
        return 1.0
    rho = propagate(model, projector(psi), tau)
    return real_probability(np.vdot(psi, rho @ psi))


def effective_rate(p_tau: float, tau: float) -> float:
    """gamma_eff(tau) = -ln p(tau) / tau."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if p_tau == 0:
        raise ProbabilityDomainError("survival probability 0 gives an infinite decay rate")
    if not 0 < p_tau <= 1:
        raise ProbabilityDomainError(f"survival probability {p_tau!r} is outside (0, 1]")
    rate = -math.log(p_tau) / tau
    if -RATE_CLAMP <= rate < 0:
        rate = 0.0
    return rate + 0.0


def repeated_survival(p_tau: float, tau: float, t: float) -> float:
    """P(t) = p(tau)^(t / tau), with a real exponent."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return float(p_tau) ** (t / tau)


def decay_estimate(model: SystemModel, psi0, tau: float, t: float) -> DecayEstimate:
    return DecayEstimate.from_probability(survival_probability(model, psi0, tau), tau, t)


def quadratic_decay_check(h, psi0, tau: float) -> float:
    """1 - tau^2 <Delta^2 H>, the short-time survival of a noiseless system."""
    h = require_hermitian(h, "Hamiltonian")
    psi = pure_state(psi0)
    mean = np.vdot(psi, h @ psi).real
    second = np.vdot(psi, h @ (h @ psi)).real
    return 1.0 - tau ** 2 * (second - mean ** 2)


def zeno_limit_rate_free(model: SystemModel, psi0) -> float:
    """gamma = sum_k mu_k (<V_k^dagger V_k> - |<V_k>|^2), non-negative by Cauchy-Schwarz."""
    psi = pure_state(psi0)
    total = 0.0
    for ch in model.channels:
        v = ch.jump
        vpsi = v @ psi
        total += ch.rate * (np.vdot(vpsi, vpsi).real - abs(np.vdot(psi, vpsi)) ** 2)
    if -RATE_CLAMP <= total < 0:
        total = 0.0
    return float(total)


def liouville_moments(model: SystemModel, psi0) -> tuple[float, float]:
    """(<L>, <L^2>) of L_tot on rho0 = |psi0><psi0|."""
    rho0 = projector(psi0)
    ltot = total_liouvillian(model)
    first = expectation(ltot, rho0)
    second = expectation(ltot @ ltot, rho0)
    return first.real, second.real


def first_order_coefficient_free(model: SystemModel, psi0) -> float:
    """Slope of gamma_eff(tau) at tau = 0: -1/2 <Delta^2 (L_H0 + L_mu)>."""
    first, second = liouville_moments(model, psi0)
    return -0.5 * (second - first ** 2)


def min_frequency_free(model: SystemModel, psi0) -> float:
    """|<Delta^2 L> / (2 <L_mu>)|; 1/tau must be much larger for the Zeno limit to hold."""
    first, second = liouville_moments(model, psi0)
    noise_mean = expectation(noise_superop(model), projector(psi0)).real
    if abs(noise_mean) <= DENOMINATOR_FLOOR:
        raise ConditionInapplicableError("<L_mu> vanishes for this state; the frequency condition does not apply")
    return abs((second - first ** 2) / (2.0 * noise_mean))


def fit_rate_slope(taus: Sequence[float], rates: Sequence[float]) -> tuple[float, float]:
    """Least-squares line through (tau, gamma_eff(tau)); returns (intercept, slope)."""
    taus = np.asarray(taus, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if taus.size < 2 or taus.size != rates.size:
        raise ValueError("need at least two (tau, rate) pairs of equal length")
    slope, intercept = np.polyfit(taus, rates, 1)
    return float(intercept), float(slope)


def finite_tau_rates(model: SystemModel, psi0, taus: Sequence[float]) -> list[float]:
    return [effective_rate(survival_probability(model, psi0, tau), tau) for tau in taus]
