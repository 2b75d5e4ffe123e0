"""
Strong coherent control g = omega / tau between measurements: resonance
validation, controlled propagation and the controlled Zeno-limit quantities,
which are integrals over the rotated-frame generator on eta in [0, 1].

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np
from scipy.linalg import eigh, eigvalsh

from .errors import ConditionInapplicableError, DimensionError, NumericalError, ResonanceError
from .liouville import (
    OUTPUT_TOL,
    Operator,
    Superoperator,
    SystemModel,
    apply_superop,
    check_output_state,
    expm_superop,
    hamiltonian_superop,
    is_trace_preserving,
    noise_superop,
    projector,
    pure_state,
    require_hermitian,
    total_liouvillian,
    vectorize,
)
from .qubit import pauli_dot
from .zeno import DENOMINATOR_FLOOR, IMAG_TOL, effective_rate, real_probability

log = logging.getLogger(__name__)

RESONANCE_TOL = 1e-9
GAP_TOL = 1e-12
MAX_GAP_DENOMINATOR = 64
DEFAULT_ORDER = 64
NESTED_ORDER = 32


@dataclass(frozen=True, eq=False)
class ControlHamiltonian:
    """Control field g H_c with g = omega / tau."""
    hc: Operator
    omega: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "hc", require_hermitian(self.hc, "control Hamiltonian"))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def dim(self) -> int:
        return self.hc.shape[0]

    @property
    def energies(self) -> np.ndarray:
        return eigvalsh(self.hc)

    def strength(self, tau: float) -> float:
        if not tau > 0:
            raise ValueError(f"tau must be positive, got {tau}")
        return self.omega / tau

    @classmethod
    def from_direction(cls, n, multiple: int = 1) -> "ControlHamiltonian":
        """Qubit control n . sigma with omega = multiple * pi."""
        n = np.asarray(n, dtype=float).ravel()
        norm = float(np.linalg.norm(n))
        if n.size != 3 or norm == 0:
            raise ValueError("control direction needs a nonzero 3-vector")
        return cls(hc=pauli_dot(n / norm), omega=multiple * math.pi)

    @classmethod
    def from_multiple(cls, hc, multiple: int = 1) -> "ControlHamiltonian":
        return cls(hc=hc, omega=multiple * minimal_resonant_omega(hc))


@dataclass
class ResonanceReport:
    resonant: bool
    rational_gaps: bool
    # (i, j, gap, distance of omega*gap/2pi from the nearest integer)
    violations: list[tuple[int, int, float, float]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.resonant

    def describe(self) -> str:
        if self.resonant:
            return "resonant"
        pairs = ", ".join(f"({i},{j}) gap={gap:.6g} off by {off:.3e}" for i, j, gap, off in self.violations)
        ratio = "rational" if self.rational_gaps else "irrational"
        return f"not resonant ({ratio} gap ratios): {pairs}"


def _positive_gaps(energies: np.ndarray) -> list[float]:
    return [
        float(energies[j] - energies[i])
        for i in range(energies.size)
        for j in range(i + 1, energies.size)
        if energies[j] - energies[i] > GAP_TOL
    ]


def _as_fraction(x: float) -> Fraction | None:
    frac = Fraction(x).limit_denominator(MAX_GAP_DENOMINATOR)
    if abs(x - float(frac)) > RESONANCE_TOL * max(1.0, abs(x)):
        return None
    return frac


def _gap_fractions(gaps: list[float]) -> list[Fraction] | None:
    """Each gap as a rational multiple of the smallest one, or None if some ratio is irrational."""
    smallest = min(gaps)
    fractions = [_as_fraction(gap / smallest) for gap in gaps]
    return None if any(f is None for f in fractions) else fractions


def check_resonance(ctrl: ControlHamiltonian, tol: float = RESONANCE_TOL) -> ResonanceReport:
    """omega (E_i - E_j) must be an integer multiple of 2 pi for every pair."""
    energies = ctrl.energies
    violations = []
    for i in range(energies.size):
        for j in range(i + 1, energies.size):
            gap = float(energies[i] - energies[j])
            cycles = ctrl.omega * gap / (2 * math.pi)
            off = abs(cycles - round(cycles))
            if off > tol:
                violations.append((i, j, gap, off))
    gaps = _positive_gaps(energies)
    rational = not gaps or _gap_fractions(gaps) is not None
    report = ResonanceReport(resonant=not violations, rational_gaps=rational, violations=violations)
    log.debug("check_resonance: omega=%g %s", ctrl.omega, report.describe())
    return report


def minimal_resonant_omega(hc) -> float:
    """Smallest omega > 0 with omega (E_i - E_j) in 2 pi Z for all pairs (pi for n . sigma)."""
    energies = eigvalsh(require_hermitian(hc, "control Hamiltonian"))
    gaps = _positive_gaps(energies)
    if not gaps:
        raise ResonanceError("control Hamiltonian is proportional to the identity; it has no gaps")
    fractions = _gap_fractions(gaps)
    if fractions is None:
        raise ResonanceError("control gaps have irrational ratios; no resonant omega exists")
    common = reduce(math.lcm, (f.denominator for f in fractions))
    multiples = [f.numerator * (common // f.denominator) for f in fractions]
    unit = min(gaps) / common
    return 2 * math.pi / (unit * reduce(math.gcd, multiples))


def require_resonance(ctrl: ControlHamiltonian) -> None:
    report = check_resonance(ctrl)
    if not report:
        raise ResonanceError(f"control omega={ctrl.omega:g} is {report.describe()}")


def _check_dims(model: SystemModel, ctrl: ControlHamiltonian) -> None:
    if ctrl.dim != model.dim:
        raise DimensionError(f"control dimension {ctrl.dim} != model dimension {model.dim}")


# -- finite-tau propagation -----------------------------------------------

def controlled_generator(model: SystemModel, ctrl: ControlHamiltonian, tau: float,
                         strength_exponent: int = -1) -> Superoperator:
    """tau * (g L_c + L_0) with g = omega * tau**k; k = -1 gives omega L_c + tau L_0."""
    _check_dims(model, ctrl)
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    lc = hamiltonian_superop(ctrl.hc)
    if strength_exponent == -1:
        weight = ctrl.omega
    elif tau == 0:
        weight = 0.0 if strength_exponent > -1 else math.inf
    else:
        weight = ctrl.omega * tau ** (strength_exponent + 1)
    if not math.isfinite(weight):
        raise ValueError(f"strength exponent {strength_exponent} diverges at tau = 0")
    return weight * lc + tau * total_liouvillian(model)


def controlled_propagator(model: SystemModel, ctrl: ControlHamiltonian, tau: float,
                          strength_exponent: int = -1) -> Superoperator:
    """exp(omega L_c + tau (L_mu + L_H0)) for the default strength exponent."""
    prop = expm_superop(controlled_generator(model, ctrl, tau, strength_exponent))
    if not is_trace_preserving(prop - np.eye(prop.shape[0]), tol=OUTPUT_TOL):
        raise NumericalError("controlled propagator is not trace preserving")
    return prop


def controlled_evolve(model: SystemModel, ctrl: ControlHamiltonian, rho0, tau: float,
                      strength_exponent: int = -1):
    rho = apply_superop(controlled_propagator(model, ctrl, tau, strength_exponent), rho0)
    return check_output_state(rho, "controlled propagation")


def controlled_survival(model: SystemModel, ctrl: ControlHamiltonian, psi0, tau: float,
                        strength_exponent: int = -1) -> float:
    """p_c(tau) = <psi0| exp(L_tot tau)[rho0] |psi0> with the control switched on."""
    psi = pure_state(psi0)
    rho = controlled_evolve(model, ctrl, projector(psi), tau, strength_exponent)
    return real_probability(np.vdot(psi, rho @ psi), "controlled survival probability")


def controlled_rates(model: SystemModel, ctrl: ControlHamiltonian, psi0, taus,
                     strength_exponent: int = -1) -> list[float]:
    return [
        effective_rate(controlled_survival(model, ctrl, psi0, tau, strength_exponent), tau)
        for tau in taus
    ]


# -- rotated-frame quadrature ---------------------------------------------

@lru_cache(maxsize=None)
def gauss_legendre_unit(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    if order < 1:
        raise ValueError(f"quadrature order must be positive, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = 0.5 * (x + 1.0), 0.5 * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def frame_superops(ctrl: ControlHamiltonian, etas) -> np.ndarray:
    """exp(omega eta L_c) for every eta, stacked as (K, d^2, d^2)."""
    energies, vecs = eigh(ctrl.hc)
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    phases = np.exp(-1j * ctrl.omega * np.multiply.outer(etas, energies))
    a = np.einsum("ij,kj,lj->kil", vecs, phases, vecs.conj())
    d = ctrl.dim
    return (a.conj()[:, :, None, :, None] * a[:, None, :, None, :]).reshape(etas.size, d * d, d * d)


def _rotated_action(superop: Superoperator, frames: np.ndarray, v0: np.ndarray) -> np.ndarray:
    """Rows R(eta)^dagger S R(eta) v0 for every frame R(eta)."""
    moved = np.einsum("kab,b->ka", frames, v0)
    acted = np.einsum("ab,kb->ka", superop, moved)
    return np.einsum("kba,kb->ka", frames.conj(), acted)


def _real(value: complex, context: str) -> float:
    if abs(value.imag) > IMAG_TOL:
        raise NumericalError(f"{context} has imaginary part {value.imag:.3e}")
    return float(value.real)


def frame_average(superop: Superoperator, ctrl: ControlHamiltonian, psi0,
                  order: int = DEFAULT_ORDER) -> float:
    """int_0^1 <<rho0| exp(-omega eta L_c) S exp(omega eta L_c) |rho0>> d eta."""
    v0 = vectorize(projector(psi0))
    nodes, weights = gauss_legendre_unit(order)
    rows = _rotated_action(superop, frame_superops(ctrl, nodes), v0)
    return _real(np.sum(weights * (rows @ v0.conj())), "rotated-frame average")


def zeno_limit_rate_controlled(model: SystemModel, ctrl: ControlHamiltonian, psi0,
                               quadrature_order: int = DEFAULT_ORDER) -> float:
    """gamma = -int_0^1 <psi0| L_mu rotated to eta [rho0] |psi0> d eta."""
    _check_dims(model, ctrl)
    require_resonance(ctrl)
    rate = -frame_average(noise_superop(model), ctrl, psi0, quadrature_order)
    log.debug("zeno_limit_rate_controlled: order=%d rate=%.15g", quadrature_order, rate)
    return rate


def hamiltonian_first_order(model: SystemModel, ctrl: ControlHamiltonian, psi0,
                            quadrature_order: int = DEFAULT_ORDER) -> float:
    """H0 share of the first tau-derivative of p_c at tau = 0; vanishes identically."""
    _check_dims(model, ctrl)
    return frame_average(hamiltonian_superop(model.h0), ctrl, psi0, quadrature_order)


def survival_derivatives(model: SystemModel, ctrl: ControlHamiltonian, psi0,
                         order: int = NESTED_ORDER) -> tuple[float, float]:
    """First and second tau-derivatives of p_c at tau = 0 under a resonant control.

    The second derivative is 2 int_0^1 ds int_0^s du <<rho0| L(s) L(u) |rho0>>
    with both generators in the rotated frame, done as nested Gauss-Legendre.
    """
    _check_dims(model, ctrl)
    require_resonance(ctrl)
    ltot = total_liouvillian(model)
    v0 = vectorize(projector(psi0))
    nodes, weights = gauss_legendre_unit(order)

    outer = frame_superops(ctrl, nodes)
    right_outer = _rotated_action(ltot, outer, v0)
    first = _real(np.sum(weights * (right_outer @ v0.conj())), "first derivative")
    left_outer = _rotated_action(ltot.conj().T, outer, v0)

    inner_etas = np.multiply.outer(nodes, nodes).ravel()
    right_inner = _rotated_action(ltot, frame_superops(ctrl, inner_etas), v0)
    right_inner = right_inner.reshape(order, order, -1)
    # weight s_i w_j for u = s_i x_j
    inner = np.einsum("j,ija->ia", weights, right_inner) * nodes[:, None]
    second = _real(2.0 * np.sum(weights * np.einsum("ia,ia->i", left_outer.conj(), inner)),
                   "second derivative")
    return first, second


def first_order_coefficient_controlled(model: SystemModel, ctrl: ControlHamiltonian, psi0,
                                       order: int = NESTED_ORDER) -> float:
    """Slope of gamma_eff^(c)(tau) at tau = 0."""
    first, second = survival_derivatives(model, ctrl, psi0, order)
    return -0.5 * (second - first ** 2)


def min_frequency_controlled(model: SystemModel, ctrl: ControlHamiltonian, psi0,
                             order: int = NESTED_ORDER) -> float:
    """|(p'' - p'^2) / (2 p')| at tau = 0; 1/tau must be much larger for the Zeno limit to hold."""
    first, second = survival_derivatives(model, ctrl, psi0, order)
    if abs(first) <= DENOMINATOR_FLOOR:
        raise ConditionInapplicableError(
            "first derivative of the controlled survival vanishes; the frequency condition does not apply"
        )
    return abs((second - first ** 2) / (2.0 * first))


def finite_difference_derivatives(model: SystemModel, ctrl: ControlHamiltonian, psi0,
                                  step: float = 1e-3) -> tuple[float, float]:
    """Richardson-extrapolated central differences of p_c around tau = 0.

    Uses the analytic continuation of the propagator to negative tau, so the
    intermediate operators are not required to be states.
    """
    _check_dims(model, ctrl)
    v0 = vectorize(projector(psi0))
    lc = hamiltonian_superop(ctrl.hc)
    ltot = total_liouvillian(model)

    def p(tau: float) -> float:
        return float(np.vdot(v0, expm_superop(ctrl.omega * lc + tau * ltot) @ v0).real)

    def central(h: float) -> tuple[float, float]:
        plus, minus, mid = p(h), p(-h), p(0.0)
        return (plus - minus) / (2 * h), (plus - 2 * mid + minus) / h ** 2

    d1_h, d2_h = central(step)
    d1_half, d2_half = central(step / 2)
    return (4 * d1_half - d1_h) / 3, (4 * d2_half - d2_h) / 3
