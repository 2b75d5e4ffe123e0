"""
Bloch-path sampling inside one measurement interval and full finite-tau
repeated-measurement runs.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .control import ControlHamiltonian, check_resonance, controlled_generator
from .errors import StateError
from .liouville import (
    SystemModel,
    check_output_state,
    devectorize,
    expm_superop,
    projector,
    pure_state,
    total_liouvillian,
    validate_density_matrix,
    vectorize,
)
from .qubit import BlochVector, bloch_from_density
from .zeno import real_probability

log = logging.getLogger(__name__)

SEGMENTS = ("actual", "continued", "free")
CYCLE_SLACK = 1e-9


@dataclass(frozen=True)
class PathSample:
    step: int
    time: float
    bloch: Optional[BlochVector]
    cumulative_survival: float
    segment: str = "actual"


def _pure_projector(rho0) -> tuple[np.ndarray, np.ndarray]:
    """Validated rho0 and the state vector it projects onto."""
    rho0 = validate_density_matrix(rho0)
    purity = float(np.trace(rho0 @ rho0).real)
    if abs(purity - 1.0) > 1e-10:
        raise StateError(f"measurement needs a pure initial state; Tr rho0^2 = {purity:.12g}")
    _, vectors = np.linalg.eigh(rho0)
    return rho0, vectors[:, -1]


def _interval_generator(model: SystemModel, ctrl: Optional[ControlHamiltonian], tau: float) -> np.ndarray:
    if ctrl is None:
        return tau * total_liouvillian(model)
    return controlled_generator(model, ctrl, tau)


def _sample(step: int, time: float, rho: np.ndarray, survival: float, segment: str) -> PathSample:
    rho = check_output_state(rho, "path sampling")
    bloch = bloch_from_density(rho) if rho.shape[0] == 2 else None
    return PathSample(step, time, bloch, survival, segment)


def _walk(step_prop: np.ndarray, rho: np.ndarray, n_steps: int, t0: float, dt: float,
          segment: str, survival_at_end=None, held_survival: float = 1.0,
          include_start: bool = True) -> tuple[list[PathSample], np.ndarray]:
    samples = []
    vec = vectorize(rho)
    if include_start:
        samples.append(_sample(0, t0, rho, held_survival, segment))
    for k in range(1, n_steps + 1):
        vec = step_prop @ vec
        current = devectorize(vec)
        survival = held_survival
        if k == n_steps and survival_at_end is not None:
            survival = survival_at_end(current)
        samples.append(_sample(k, t0 + k * dt, current, survival, segment))
    return samples, devectorize(vec)


def interval_path(model: SystemModel, ctrl: Optional[ControlHamiltonian], tau: float,
                  n_steps: int, rho0, segment: str = "actual") -> list[PathSample]:
    """rho(s) at s = k tau / n_steps, k = 0..n_steps, between two measurements.

    The control strength stays omega / tau for the whole interval, so the
    exponent at s is (s / tau)(omega L_c + tau L_0).
    """
    if n_steps < 2:
        raise ValueError(f"n_steps must be at least 2, got {n_steps}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    rho0, psi = _pure_projector(rho0)
    step_prop = expm_superop(_interval_generator(model, ctrl, tau) / n_steps)
    if segment not in SEGMENTS:
        raise ValueError(f"unknown segment {segment!r}")

    def survival(rho):
        return real_probability(np.vdot(psi, rho @ psi))

    samples, _ = _walk(step_prop, rho0, n_steps, 0.0, tau / n_steps, segment, survival_at_end=survival)
    return samples


def continued_path(model: SystemModel, ctrl: Optional[ControlHamiltonian], tau: float,
                   n_steps: int, rho0) -> list[PathSample]:
    """Second interval with the same generator and no measurement at tau."""
    if n_steps < 2:
        raise ValueError(f"n_steps must be at least 2, got {n_steps}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    rho0, psi = _pure_projector(rho0)
    step_prop = expm_superop(_interval_generator(model, ctrl, tau) / n_steps)
    vec = np.linalg.matrix_power(step_prop, n_steps) @ vectorize(rho0)
    rho_tau = check_output_state(devectorize(vec), "path sampling")
    p_tau = real_probability(np.vdot(psi, rho_tau @ psi))
    samples, _ = _walk(step_prop, rho_tau, n_steps, tau, tau / n_steps, "continued",
                       held_survival=p_tau, include_start=False)
    return [
        PathSample(n_steps + s.step, s.time, s.bloch, s.cumulative_survival, s.segment)
        for s in samples
    ]


def protocol_run(model: SystemModel, ctrl: Optional[ControlHamiltonian], tau: float, t: float,
                 psi0) -> list[PathSample]:
    """Evolve for tau, measure, keep the survival branch (reset to rho0), repeat until t."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if t < tau:
        raise ValueError(f"total time {t} is shorter than one interval {tau}")
    psi = pure_state(psi0)
    rho0 = projector(psi)
    if ctrl is not None:
        report = check_resonance(ctrl)
        if not report:
            log.warning("Control is not resonant; survival at tau -> 0 stays below 1 (%s)", report.describe())
    prop = expm_superop(_interval_generator(model, ctrl, tau))
    cycles = math.floor(t / tau + CYCLE_SLACK)
    cumulative = 1.0
    samples = []
    for k in range(1, cycles + 1):
        rho = devectorize(prop @ vectorize(rho0))
        rho = check_output_state(rho, "protocol cycle")
        cumulative *= real_probability(np.vdot(psi, rho @ psi))
        bloch = bloch_from_density(rho) if rho.shape[0] == 2 else None
        samples.append(PathSample(k, k * tau, bloch, cumulative, "actual"))
    log.debug("protocol_run: %d cycles, final survival %.15g", cycles, cumulative)
    return samples


def endpoint_distance(path: list[PathSample], r0: BlochVector) -> float:
    """|r(end) - r0| for the last sample of the path."""
    if not path or path[-1].bloch is None:
        raise ValueError("path has no Bloch samples")
    return float(np.linalg.norm(path[-1].bloch.as_array() - r0.as_array()))
