"""
Optimal control directions for a qubit: analytic optima for the dephasing
and amplitude-damping presets, a grid + Nelder-Mead oracle for arbitrary
Gamma, and first/second-order optimality checks.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .errors import StateError
from .qubit import (
    BlochVector,
    ControlDirection,
    GammaMatrix,
    ad_rate_free,
    dephasing_rate_free,
    preset_amplitude_damping,
    preset_dephasing,
    rate_controlled_terms,
    rate_free_bloch,
)

log = logging.getLogger(__name__)

# Boundary of the dephasing branches: cos(alpha0) = 1/3.
DEPHASING_BRANCH_ANGLE = math.acos(1.0 / 3.0)
KAPPA_FLOOR = 1e-15
TIE_TOL = 1e-12
GRID_THETA = 64
GRID_PHI = 128
REFINE_SEEDS = 4

RESIDUAL_STEP = 1e-5
HESSIAN_STEP = 1e-3
DEGENERACY_TOL = 1e-7


@dataclass(frozen=True)
class OptimizationResult:
    theta_opt: float
    phi_opt: float
    gamma_opt: float
    gamma_free: float
    kappa: Optional[float]
    hessian_ok: bool
    method: str
    degenerate: bool = False

    @property
    def direction(self) -> ControlDirection:
        return ControlDirection(self.theta_opt, self.phi_opt)


def kappa_ratio(gamma_opt: float, gamma_free: float) -> Optional[float]:
    """gamma_opt / gamma_free, undefined when the free rate vanishes."""
    if gamma_free <= KAPPA_FLOOR:
        return None
    return gamma_opt / gamma_free


def dephasing_branch_angle() -> float:
    return DEPHASING_BRANCH_ANGLE


def canonical_angles(n) -> tuple[float, float]:
    """(theta, phi) of a unit vector with theta in [0, pi], phi in [0, 2 pi); phi = 0 at the poles."""
    x, y, z = (float(c) for c in n)
    theta = math.acos(max(-1.0, min(1.0, z)))
    if math.sin(theta) < 1e-12:
        return theta, 0.0
    return theta, math.atan2(y, x) % (2 * math.pi)


def _unit(theta: float, phi: float) -> np.ndarray:
    s = math.sin(theta)
    return np.array([s * math.cos(phi), s * math.sin(phi), math.cos(theta)])


def _pure_vector(r0: BlochVector) -> np.ndarray:
    if not r0.is_pure():
        raise StateError(f"optimal directions assume a pure initial state; |r0| = {r0.norm!r}")
    return r0.as_array()


def direction_objective(g: GammaMatrix, r0: BlochVector) -> Callable[[float, float], float]:
    """Scalar controlled rate as a function of (theta_c, phi_c), with Gamma and r0 folded in."""
    r = _pure_vector(r0)
    gs = g.real_part
    gr = gs @ r
    # n x r = M n
    m = np.array([[0.0, r[2], -r[1]], [-r[2], 0.0, r[0]], [r[1], -r[0], 0.0]])
    q = m.T @ gs @ m
    const = g.trace - 0.5 * float(r @ gr)
    nu = g.nu
    (g00, g01, g02), (_, g11, g12), (_, _, g22) = gs.tolist()
    (q00, q01, q02), (_, q11, q12), (_, _, q22) = q.tolist()
    r0x, r0y, r0z = r.tolist()
    grx, gry, grz = gr.tolist()
    nux, nuy, nuz = nu.tolist()

    def rate(theta: float, phi: float) -> float:
        s = math.sin(theta)
        x, y, z = s * math.cos(phi), s * math.sin(phi), math.cos(theta)
        nr = x * r0x + y * r0y + z * r0z
        ngn = g00 * x * x + g11 * y * y + g22 * z * z + 2 * (g01 * x * y + g02 * x * z + g12 * y * z)
        nqn = q00 * x * x + q11 * y * y + q22 * z * z + 2 * (q01 * x * y + q02 * x * z + q12 * y * z)
        return (
            -1.5 * nr * nr * ngn
            + nr * (x * grx + y * gry + z * grz)
            - 0.5 * nqn
            + const
            + nr * (x * nux + y * nuy + z * nuz)
        )

    return rate


# -- analytic optima -------------------------------------------------------

def optimal_dephasing_rate(alpha, mu: float):
    """Minimum controlled rate for sigma_z dephasing, vectorized over alpha."""
    alpha = np.asarray(alpha, dtype=float)
    c = np.cos(alpha)
    low = mu / 8 * (1 - c) * (5 + 3 * c)
    high = mu / 8 * (5 - 3 * c) * (1 + c)
    middle = np.full_like(c, 0.5 * mu)
    return np.where(
        alpha < DEPHASING_BRANCH_ANGLE,
        low,
        np.where(alpha > math.pi - DEPHASING_BRANCH_ANGLE, high, middle),
    )


def optimal_dephasing_direction(alpha: float, beta: float) -> tuple[float, float]:
    if alpha < DEPHASING_BRANCH_ANGLE:
        return alpha / 2, beta % (2 * math.pi)
    if alpha <= math.pi - DEPHASING_BRANCH_ANGLE:
        return math.pi / 2, (beta + math.pi / 2) % (2 * math.pi)
    return (math.pi + alpha) / 2, beta % (2 * math.pi)


def printed_dephasing_third_branch(alpha, mu: float):
    """Uncorrected large-alpha branch: 2 mu at the south pole, where the true optimum is 0."""
    c = np.cos(alpha)
    return -(mu / 4) * c ** 2 * (-5 + 3 * c)


def _analytic_result(g: GammaMatrix, alpha: float, beta: float, theta: float, phi: float,
                     gamma_opt: float, gamma_free: float) -> OptimizationResult:
    report = stationarity_check(g, BlochVector.from_angles(alpha, beta), ControlDirection(theta, phi))
    return OptimizationResult(
        theta_opt=theta,
        phi_opt=phi,
        gamma_opt=gamma_opt,
        gamma_free=gamma_free,
        kappa=kappa_ratio(gamma_opt, gamma_free),
        hessian_ok=report.hessian_ok,
        method="analytic",
        degenerate=report.degenerate,
    )


def optimal_dephasing(alpha: float, beta: float, mu: float) -> OptimizationResult:
    theta, phi = optimal_dephasing_direction(alpha, beta)
    return _analytic_result(
        preset_dephasing(mu), alpha, beta, theta, phi,
        float(optimal_dephasing_rate(alpha, mu)), float(dephasing_rate_free(alpha, mu)),
    )


def optimal_amplitude_damping(alpha: float, beta: float, mu: float) -> OptimizationResult:
    gamma_free = float(ad_rate_free(alpha, mu))
    return _analytic_result(
        preset_amplitude_damping(mu), alpha, beta, alpha / 2, beta % (2 * math.pi),
        0.375 * gamma_free, gamma_free,
    )


OPTIMA = {
    "dephasing": optimal_dephasing,
    "amplitude_damping": optimal_amplitude_damping,
}


# -- numeric oracle --------------------------------------------------------

def _local_minima(rates: np.ndarray) -> np.ndarray:
    """Flat indices of grid points no larger than their 8 neighbours (periodic in phi)."""
    padded = np.pad(rates, ((1, 1), (0, 0)), constant_values=np.inf)
    is_min = np.ones(rates.shape, dtype=bool)
    for dt in (-1, 0, 1):
        shifted = padded[1 + dt: padded.shape[0] - 1 + dt]
        for dp in (-1, 0, 1):
            if dt == 0 and dp == 0:
                continue
            is_min &= rates <= np.roll(shifted, -dp, axis=1)
    return np.flatnonzero(is_min)


def _direction_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    grid = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1)
    return thetas, phis, grid


def rate_landscape(g: GammaMatrix, r0: BlochVector, n_theta: int = GRID_THETA,
                   n_phi: int = GRID_PHI) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Controlled rate over control directions.

    Returns (thetas, phis, rates) with theta in [0, pi] (endpoints included),
    phi in [0, 2 pi) and rates[i, j] the rate at (thetas[i], phis[j]).
    """
    if n_theta < 1 or n_phi < 1:
        raise ValueError(f"landscape grid must be non-empty, got {n_theta} x {n_phi}")
    thetas, phis, grid = _direction_grid(n_theta, n_phi)
    rates = rate_controlled_terms(g.real_part, g.trace, g.nu, r0.as_array(), grid)
    return thetas, phis, rates


def grid_oracle(g: GammaMatrix, r0: BlochVector, n_theta: int = GRID_THETA,
                n_phi: int = GRID_PHI) -> OptimizationResult:
    """Global minimum of the controlled rate over directions: grid scan, then simplex refinement."""
    gamma_free = rate_free_bloch(g, r0)
    r = r0.as_array()
    thetas, phis, grid = _direction_grid(n_theta, n_phi)
    rates = rate_controlled_terms(g.real_part, g.trace, g.nu, r, grid)

    objective = direction_objective(g, r0)
    best_index = int(np.argmin(rates))
    minima = _local_minima(rates)
    seeds = [best_index] + [int(i) for i in minima[np.argsort(rates.ravel()[minima], kind="stable")]]
    seeds = list(dict.fromkeys(seeds))[:REFINE_SEEDS + 1]

    d_theta = thetas[1] - thetas[0] if n_theta > 1 else 0.1
    d_phi = phis[1] - phis[0] if n_phi > 1 else 0.1
    candidates = [
        (float(rates.flat[best_index]), grid.reshape(-1, 3)[best_index]),
        (gamma_free, r),
    ]
    for index in seeds:
        i, j = divmod(index, n_phi)
        start = np.array([thetas[i], phis[j]])
        simplex = np.array([start, start + [d_theta, 0.0], start + [0.0, d_phi]])
        res = minimize(
            lambda x: objective(x[0], x[1]),
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000, "initial_simplex": simplex},
        )
        if not res.success:
            log.debug("grid_oracle: simplex from %s stopped early: %s", start, res.message)
        candidates.append((float(res.fun), _unit(*res.x)))

    best_rate = min(rate for rate, _ in candidates)
    tied = [n for rate, n in candidates if rate <= best_rate + TIE_TOL]
    theta, phi = min(canonical_angles(n) for n in tied)
    chosen = _unit(theta, phi)
    degenerate = any(abs(float(chosen @ n)) < 1 - 1e-6 for n in tied)

    report = stationarity_check(g, r0, ControlDirection(theta, phi))
    log.debug("grid_oracle: gamma_opt=%.15g from %d candidates", best_rate, len(candidates))
    return OptimizationResult(
        theta_opt=theta,
        phi_opt=phi,
        gamma_opt=best_rate,
        gamma_free=gamma_free,
        kappa=kappa_ratio(best_rate, gamma_free),
        hessian_ok=report.hessian_ok,
        method="numeric",
        degenerate=degenerate or report.degenerate,
    )


# -- optimality conditions -------------------------------------------------

@dataclass(frozen=True)
class StationarityReport:
    residual_theta: float
    residual_phi: float
    hessian_ok: bool
    degenerate: bool
    hessian: tuple[float, float, float]

    def __iter__(self):
        return iter((self.residual_theta, self.residual_phi, self.hessian_ok))


def _richardson(estimate: Callable[[float], float], step: float) -> float:
    return (4 * estimate(step / 2) - estimate(step)) / 3


def stationarity_check(g: GammaMatrix, r0: BlochVector, nc: ControlDirection) -> StationarityReport:
    """Finite-difference gradient and Hessian of the controlled rate in (theta_c, phi_c)."""
    f = direction_objective(g, r0)
    t0, p0 = nc.theta, nc.phi

    def d_theta(h):
        return (f(t0 + h, p0) - f(t0 - h, p0)) / (2 * h)

    def d_phi(h):
        return (f(t0, p0 + h) - f(t0, p0 - h)) / (2 * h)

    def d_tt(h):
        return (f(t0 + h, p0) - 2 * f(t0, p0) + f(t0 - h, p0)) / h ** 2

    def d_pp(h):
        return (f(t0, p0 + h) - 2 * f(t0, p0) + f(t0, p0 - h)) / h ** 2

    def d_tp(h):
        return (f(t0 + h, p0 + h) - f(t0 + h, p0 - h) - f(t0 - h, p0 + h) + f(t0 - h, p0 - h)) / (4 * h * h)

    res_theta = abs(_richardson(d_theta, RESIDUAL_STEP))
    res_phi = abs(_richardson(d_phi, RESIDUAL_STEP))
    a = _richardson(d_tt, HESSIAN_STEP)
    b = _richardson(d_tp, HESSIAN_STEP)
    c = _richardson(d_pp, HESSIAN_STEP)
    det = a * c - b * b
    degenerate = abs(det) <= DEGENERACY_TOL * max(1.0, a * a, c * c)
    hessian_ok = (not degenerate) and a > 0 and det > 0
    if degenerate:
        log.debug("stationarity_check: degenerate Hessian at theta=%g phi=%g", t0, p0)
    return StationarityReport(res_theta, res_phi, hessian_ok, degenerate, (a, b, c))


def _cross_matrix(r: np.ndarray) -> np.ndarray:
    """R with R x = r x x."""
    return np.array([[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]])


def variational_residual(g: GammaMatrix, r0: BlochVector, nc: ControlDirection) -> float:
    """min over Lambda of |M(Lambda)|_F for the projector form of the optimality equation.

    Only symmetric variations of P_n are admissible, so M is taken with the real
    symmetric part of Gamma and a symmetrized r nu^T.
    """
    r = _pure_vector(r0)
    n = nc.vector
    gs = g.real_part
    nu = g.nu
    pn = np.outer(n, n)
    pr = np.outer(r, r)
    rx = _cross_matrix(r)
    k = (
        -1.5 * gs @ pn @ pr
        - 1.5 * pr @ pn @ gs
        + 0.5 * gs @ pr
        + 0.5 * pr @ gs
        - 0.5 * rx.T @ gs @ rx
        + np.outer(r, nu)
    )
    k = 0.5 * (k + k.T)
    eye = np.eye(3)
    # vec(P L) + vec(L P) - vec(L) with column stacking
    system = np.kron(eye, pn) + np.kron(pn.T, eye) - np.eye(9)
    rhs = -k.reshape(-1, order="F")
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return float(np.linalg.norm(system @ solution - rhs))
