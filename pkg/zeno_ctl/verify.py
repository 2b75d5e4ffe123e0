"""
Oracle suite behind `zeno-ctl verify`: every closed form is cross-checked
against an independent numeric route (grid search, quadrature, propagation).

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .control import (
    ControlHamiltonian,
    controlled_rates,
    first_order_coefficient_controlled,
    hamiltonian_first_order,
    zeno_limit_rate_controlled,
)
from .errors import ConfigError
from .fidelity import fidelity_curve, preset_field
from .liouville import (
    NoiseChannel,
    SystemModel,
    dissipator_superop,
    hamiltonian_superop,
    projector,
    random_model,
    random_state,
    rotate_channel,
    rotate_frame,
    rotate_operator,
)
from .optimize import (
    DEPHASING_BRANCH_ANGLE,
    grid_oracle,
    optimal_amplitude_damping,
    optimal_dephasing_rate,
    printed_dephasing_third_branch,
    variational_residual,
)
from .qubit import (
    SIGMA_Z,
    BlochVector,
    ControlDirection,
    ad_rate_controlled,
    dephasing_rate_controlled,
    preset_amplitude_damping,
    preset_dephasing,
    qubit_model,
    random_bloch,
    random_gamma,
    rate_controlled_bloch,
    rate_controlled_terms,
    rate_free_bloch,
    state_from_angles,
    state_from_bloch,
)
from .trajectory import endpoint_distance, interval_path
from .zeno import finite_tau_rates, first_order_coefficient_free, fit_rate_slope, zeno_limit_rate_free

log = logging.getLogger(__name__)

SEED = 20260101
CONVERGENCE_TAUS = (1e-2, 5e-3, 2.5e-3)


class CheckFailed(AssertionError):
    pass


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


CHECKS: dict[str, Callable[[], str]] = {}


def check(name: str):
    """Register a check; it returns a detail string or raises CheckFailed."""
    def register(func: Callable[[], str]) -> Callable[[], str]:
        CHECKS[name] = func
        return func
    return register


def expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@check("ad-universal-ratio")
def check_ad_universal_ratio() -> str:
    g = preset_amplitude_damping(1.0)
    worst_numeric = worst_analytic = 0.0
    for alpha in (0.1, 0.5, math.pi / 2, 2.5, math.pi - 0.01):
        numeric = grid_oracle(g, BlochVector.from_angles(alpha, 0.0))
        analytic = optimal_amplitude_damping(alpha, 0.0, 1.0)
        worst_numeric = max(worst_numeric, abs(numeric.kappa - 0.375))
        worst_analytic = max(worst_analytic, abs(analytic.kappa - 0.375))
    expect(worst_numeric <= 1e-6, f"grid kappa off by {worst_numeric:.3e}")
    expect(worst_analytic <= 1e-12, f"analytic kappa off by {worst_analytic:.3e}")
    return f"max |kappa - 3/8|: grid {worst_numeric:.1e}, analytic {worst_analytic:.1e}"


@check("dephasing-optimum-curve")
def check_dephasing_optimum_curve() -> str:
    g = preset_dephasing(1.0)
    alphas = np.linspace(0.0, math.pi, 512)
    analytic = optimal_dephasing_rate(alphas, 1.0)
    worst = 0.0
    kappas = []
    for alpha, expected in zip(alphas, analytic):
        result = grid_oracle(g, BlochVector.from_angles(alpha, 0.0))
        worst = max(worst, abs(result.gamma_opt - expected))
        if result.gamma_free > 1e-12:
            kappas.append(expected / result.gamma_free)
    expect(worst <= 1e-8, f"analytic vs grid off by {worst:.3e}")
    lo, hi = min(kappas), max(kappas)
    expect(lo >= 0.5 - 1e-12 and hi <= 9 / 16 + 1e-12, f"kappa range [{lo}, {hi}]")
    branch = float(optimal_dephasing_rate(DEPHASING_BRANCH_ANGLE, 1.0)) / (8 / 9)
    expect(abs(branch - 9 / 16) <= 1e-9, f"kappa at the branch angle is {branch}")
    return f"max deviation {worst:.1e}, kappa in [{lo:.6f}, {hi:.6f}]"


@check("printed-branch-correction")
def check_printed_branch_correction() -> str:
    printed = float(printed_dephasing_third_branch(math.pi, 1.0))
    expect(abs(printed - 2.0) <= 1e-12, f"printed branch gives {printed} at the south pole")
    numeric = grid_oracle(preset_dephasing(1.0), BlochVector.from_angles(math.pi, 0.0)).gamma_opt
    expect(abs(numeric) <= 1e-8, f"grid optimum at the south pole is {numeric}")
    corrected = float(optimal_dephasing_rate(math.pi, 1.0))
    expect(abs(corrected) <= 1e-12, f"corrected branch gives {corrected}")
    c = 1.0 / 3.0
    jumps = (
        abs((5 - 2 * c - 3 * c * c) / 8 - 0.5),
        abs((5 + 3 * c) * (1 - c) / 8 - 0.5),
    )
    expect(max(jumps) < 1e-12, f"branch jumps {jumps}")
    return f"printed 2.0 vs grid {numeric:.1e}; jumps {max(jumps):.1e}"


@check("bridge-identities")
def check_bridge_identities() -> str:
    rng = np.random.default_rng(SEED)
    free_err = ctrl_err = 0.0
    for _ in range(1000):
        g = random_gamma(rng)
        r0 = random_bloch(rng)
        nc = ControlDirection.from_vector(rng.normal(size=3))
        model = qubit_model(g)
        psi = state_from_bloch(r0)
        free_err = max(free_err, abs(rate_free_bloch(g, r0) - zeno_limit_rate_free(model, psi)))
        ctrl = ControlHamiltonian(nc.hamiltonian(), math.pi)
        ctrl_err = max(ctrl_err, abs(rate_controlled_bloch(g, r0, nc)
                                     - zeno_limit_rate_controlled(model, ctrl, psi)))
    expect(free_err <= 1e-11, f"free bridge off by {free_err:.3e}")
    expect(ctrl_err <= 1e-9, f"controlled bridge off by {ctrl_err:.3e}")

    n = 10_000
    alpha, theta = rng.uniform(0, math.pi, n), rng.uniform(0, math.pi, n)
    beta, phi = rng.uniform(0, 2 * math.pi, n), rng.uniform(0, 2 * math.pi, n)
    r = np.stack([np.sin(alpha) * np.cos(beta), np.sin(alpha) * np.sin(beta), np.cos(alpha)], axis=-1)
    nv = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
    preset_err = 0.0
    for preset, closed in ((preset_dephasing(1.0), dephasing_rate_controlled),
                           (preset_amplitude_damping(1.0), ad_rate_controlled)):
        general = rate_controlled_terms(preset.real_part, preset.trace, preset.nu, r, nv)
        preset_err = max(preset_err, float(np.max(np.abs(closed(alpha, beta, theta, phi, 1.0) - general))))
    expect(preset_err <= 1e-10, f"preset closed forms off by {preset_err:.3e}")
    return f"free {free_err:.1e}, controlled {ctrl_err:.1e}, presets {preset_err:.1e}"


@check("zeno-limit-convergence")
def check_zeno_limit_convergence() -> str:
    model = qubit_model(preset_dephasing(1.0))
    plus = state_from_angles(math.pi / 2, 0.0)
    intercept, slope = fit_rate_slope(CONVERGENCE_TAUS, finite_tau_rates(model, plus, CONVERGENCE_TAUS))
    coefficient = first_order_coefficient_free(model, plus)
    expect(abs(intercept - 1.0) <= 5e-3, f"free intercept {intercept}")
    expect(abs(slope - coefficient) <= 0.02 * abs(coefficient), f"slope {slope} vs {coefficient}")

    ctrl = ControlHamiltonian.from_direction([0.0, 1.0, 0.0])
    c_intercept, c_slope = fit_rate_slope(CONVERGENCE_TAUS, controlled_rates(model, ctrl, plus, CONVERGENCE_TAUS))
    c_limit = zeno_limit_rate_controlled(model, ctrl, plus)
    expect(abs(c_limit - 0.5) <= 1e-12, f"controlled Zeno limit {c_limit}")
    c_coefficient = first_order_coefficient_controlled(model, ctrl, plus)
    expect(abs(c_intercept - c_limit) <= 2.5e-3, f"controlled intercept {c_intercept} vs {c_limit}")
    expect(abs(c_slope - c_coefficient) <= 2e-2, f"controlled slope {c_slope} vs {c_coefficient}")
    return (f"free {intercept:.6f} slope {slope:.4f} ({coefficient:.4f}); "
            f"controlled {c_intercept:.6f} slope {c_slope:.4f} ({c_coefficient:.4f})")


@check("frame-identity")
def check_frame_identity() -> str:
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(100):
        model = random_model(rng, 2, n_channels=1)
        hc = random_model(rng, 2, n_channels=0).h0
        omega = math.pi * int(rng.integers(1, 4))
        eta = float(rng.uniform(0.0, 1.0))
        lhs = rotate_frame(hamiltonian_superop(model.h0), hc, omega, eta)
        rhs = hamiltonian_superop(rotate_operator(model.h0, hc, omega, eta))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        ch = model.channels[0]
        lhs = rotate_frame(dissipator_superop(ch), hc, omega, eta)
        rhs = dissipator_superop(rotate_channel(ch, hc, omega, eta))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    expect(worst < 1e-12, f"frame identity off by {worst:.3e}")
    return f"max entry deviation {worst:.1e}"


@check("variational-residual")
def check_variational_residual() -> str:
    g = preset_amplitude_damping(1.0)
    at_optimum = max(
        variational_residual(g, BlochVector.from_angles(alpha, beta), ControlDirection(alpha / 2, beta))
        for alpha in np.linspace(0.1, math.pi - 0.1, 12) for beta in (0.0, 1.0, 2.5)
    )
    expect(at_optimum < 1e-8, f"residual at optimum {at_optimum:.3e}")
    rng = np.random.default_rng(SEED + 2)
    large = sum(
        variational_residual(g, random_bloch(rng), ControlDirection.from_vector(rng.normal(size=3))) > 1e-3
        for _ in range(1000)
    )
    expect(large >= 950, f"only {large}/1000 random directions have residual > 1e-3")
    return f"optimum {at_optimum:.1e}; {large}/1000 random above 1e-3"


@check("hamiltonian-nullity")
def check_hamiltonian_nullity() -> str:
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for k in range(100):
        if k % 2 == 0:
            model = random_model(rng, 2, n_channels=1)
            ctrl = ControlHamiltonian.from_direction(rng.normal(size=3), int(rng.integers(1, 3)))
        else:
            model = random_model(rng, 3, n_channels=1)
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
            hc = q @ np.diag([0.0, 1.0, 3.0]) @ q.conj().T
            ctrl = ControlHamiltonian(0.5 * (hc + hc.conj().T), 2 * math.pi)
        worst = max(worst, abs(hamiltonian_first_order(model, ctrl, random_state(rng, model.dim))))
    expect(worst < 1e-12, f"Hamiltonian first-order share {worst:.3e}")
    return f"max |H0 share| {worst:.1e}"


@check("fidelity-dominance")
def check_fidelity_dominance() -> str:
    times = np.linspace(0.0, 5.0, 50)
    margin = math.inf
    drift = 0.0
    for preset in ("dephasing", "amplitude_damping"):
        free = preset_field(preset, 1.0, "free")
        best = preset_field(preset, 1.0, "controlled-optimal")
        f_free = fidelity_curve(free, times)
        f_opt = fidelity_curve(best, times)
        for (_, a), (_, b) in zip(f_free[1:], f_opt[1:]):
            margin = min(margin, b - a)
        for field in (free, best):
            coarse = np.array([f for _, f in fidelity_curve(field, times)])
            fine = np.array([f for _, f in fidelity_curve(field, times, 128, 256)])
            drift = max(drift, float(np.max(np.abs(coarse - fine))))
    expect(margin > 0, f"controlled fidelity not above free (margin {margin:.3e})")
    expect(drift < 1e-10, f"node doubling changes F by {drift:.3e}")
    return f"min margin {margin:.3e}, doubling drift {drift:.1e}"


def _endpoint_gap(model: SystemModel, ctrl: ControlHamiltonian, alpha: float, tau: float) -> tuple[float, float]:
    rho0 = projector(state_from_angles(alpha, 0.0))
    r0 = BlochVector.from_angles(alpha, 0.0)
    controlled = endpoint_distance(interval_path(model, ctrl, tau, 16, rho0), r0)
    free = endpoint_distance(interval_path(model, None, tau, 16, rho0, segment="free"), r0)
    return controlled, free


@check("trajectory-endpoints")
def check_trajectory_endpoints() -> str:
    details = []
    ad = qubit_model(preset_amplitude_damping(1.0), SIGMA_Z)
    controlled, free = _endpoint_gap(ad, ControlHamiltonian.from_direction([1.0, 0.0, 0.0]), math.pi, 0.25)
    expect(controlled < free, f"amplitude damping: controlled {controlled} >= free {free}")
    details.append(f"ad {controlled:.4f}<{free:.4f}")
    dephasing = SystemModel(h0=SIGMA_Z, channels=(NoiseChannel(1.0, SIGMA_Z),))
    for alpha in (math.pi / 6, math.pi / 2, 5 * math.pi / 6):
        if alpha < DEPHASING_BRANCH_ANGLE:
            n = ControlDirection(alpha / 2, 0.0)
        elif alpha <= math.pi - DEPHASING_BRANCH_ANGLE:
            n = ControlDirection(math.pi / 2, math.pi / 2)
        else:
            n = ControlDirection((math.pi + alpha) / 2, 0.0)
        ctrl = ControlHamiltonian.from_direction(n.vector)
        controlled, free = _endpoint_gap(dephasing, ctrl, alpha, 0.01)
        expect(controlled < free, f"dephasing alpha={alpha:.4f}: controlled {controlled} >= free {free}")
        details.append(f"{controlled:.4f}<{free:.4f}")
    return ", ".join(details)


def run_checks(names: Optional[Iterable[str]] = None) -> list[CheckResult]:
    selected = list(CHECKS) if names is None else list(names)
    unknown = [n for n in selected if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown check(s) {unknown}; available: {sorted(CHECKS)}")
    results = []
    for name in selected:
        func = CHECKS[name]
        start = time.perf_counter()
        try:
            detail = func()
            passed = True
        except CheckFailed as e:
            detail, passed = str(e), False
        except Exception as e:
            log.debug("check %s raised", name, exc_info=True)
            detail, passed = f"{type(e).__name__}: {e}", False
        seconds = time.perf_counter() - start
        log.debug("%s: %s in %.2fs", name, "pass" if passed else "FAIL", seconds)
        results.append(CheckResult(name, passed, detail, seconds))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max((len(r.name) for r in results), default=4)
    lines = [f"{'check':<{width}}  result  seconds  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:7.2f}  {r.detail}")
    return "\n".join(lines)
