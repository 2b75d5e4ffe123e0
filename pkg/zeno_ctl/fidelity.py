"""
Ensemble-average fidelity F(t) = (1/4pi) int e^{-gamma(alpha, beta) t} dOmega
over uniformly distributed pure initial states of a qubit.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericalError
from .optimize import DEPHASING_BRANCH_ANGLE, optimal_dephasing_rate
from .qubit import (
    ControlDirection,
    GammaMatrix,
    ad_rate_free,
    dephasing_rate_free,
    rate_controlled_terms,
)

log = logging.getLogger(__name__)

PROVENANCES = ("free", "controlled-optimal", "controlled-fixed")
NEGATIVE_RATE_TOL = 1e-12
DEFAULT_ALPHA_NODES = 64
DEFAULT_BETA_NODES = 128


@dataclass(frozen=True)
class RateField:
    """Decay rate as a function of the Bloch angles of the initial state.

    breakpoints are alpha values where the field has kinks; the alpha rule is
    applied piecewise between them.
    """
    rate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    provenance: str
    breakpoints: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}; expected one of {PROVENANCES}")

    def __call__(self, alpha, beta) -> np.ndarray:
        alpha, beta = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float))
        values = np.broadcast_to(np.asarray(self.rate(alpha, beta), dtype=float), alpha.shape)
        smallest = float(np.min(values, initial=0.0))
        if smallest < -NEGATIVE_RATE_TOL:
            raise NumericalError(f"{self.provenance} rate field is negative ({smallest:.3e})")
        return values


@lru_cache(maxsize=64)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def sphere_nodes(n_alpha: int, n_beta: int, breakpoints: Sequence[float] = ()):
    """Nodes (alpha, beta) and weights for int sin(alpha) d alpha d beta over the sphere.

    Gauss-Legendre in u = cos(alpha) on each segment between breakpoints,
    trapezoid (exact for trigonometric polynomials) in beta.
    """
    if n_alpha < 1 or n_beta < 1:
        raise ValueError("node counts must be positive")
    cuts = sorted({0.0, math.pi, *(b for b in breakpoints if 0 < b < math.pi)})
    x, w = _legendre(n_alpha)
    alphas, alpha_weights = [], []
    for lo, hi in zip(cuts, cuts[1:]):
        u_lo, u_hi = math.cos(hi), math.cos(lo)
        half = 0.5 * (u_hi - u_lo)
        u = 0.5 * (u_hi + u_lo) + half * x
        alphas.append(np.arccos(np.clip(u, -1.0, 1.0)))
        alpha_weights.append(half * w)
    alpha = np.concatenate(alphas)
    alpha_w = np.concatenate(alpha_weights)
    beta = 2 * math.pi * np.arange(n_beta) / n_beta
    beta_w = np.full(n_beta, 2 * math.pi / n_beta)
    aa, bb = np.meshgrid(alpha, beta, indexing="ij")
    return aa, bb, np.outer(alpha_w, beta_w)


def _fidelities(field: RateField, times: np.ndarray, n_alpha: int, n_beta: int) -> np.ndarray:
    aa, bb, weights = sphere_nodes(n_alpha, n_beta, field.breakpoints)
    rates = field(aa, bb).ravel()
    w = weights.ravel() / (4 * math.pi)
    values = np.exp(-np.multiply.outer(times, rates)) @ w
    return np.clip(values, 0.0, 1.0)


def ensemble_fidelity(field: RateField, t: float, n_alpha: int = DEFAULT_ALPHA_NODES,
                      n_beta: int = DEFAULT_BETA_NODES) -> float:
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0:
        return 1.0
    return float(_fidelities(field, np.array([float(t)]), n_alpha, n_beta)[0])


def fidelity_curve(field: RateField, t_grid: Sequence[float], n_alpha: int = DEFAULT_ALPHA_NODES,
                   n_beta: int = DEFAULT_BETA_NODES) -> list[tuple[float, float]]:
    times = np.asarray(t_grid, dtype=float)
    if times.size and (np.any(np.diff(times) < 0) or times[0] < 0):
        raise ValueError("t_grid must be sorted and non-negative")
    values = _fidelities(field, times, n_alpha, n_beta)
    values[times == 0] = 1.0
    log.debug("fidelity_curve: %s field, %d times", field.provenance, times.size)
    return [(float(t), float(f)) for t, f in zip(times, values)]


def preset_field(preset: str, mu: float, provenance: str = "free") -> RateField:
    """Free or optimally controlled rate field of a preset noise."""
    if provenance == "controlled-fixed":
        raise ValueError("a fixed-control field needs a direction; use fixed_control_field")
    if preset == "dephasing":
        if provenance == "free":
            return RateField(lambda a, b: dephasing_rate_free(a, mu), provenance)
        return RateField(
            lambda a, b: optimal_dephasing_rate(a, mu),
            provenance,
            breakpoints=(DEPHASING_BRANCH_ANGLE, math.pi - DEPHASING_BRANCH_ANGLE),
        )
    if preset == "amplitude_damping":
        scale = 1.0 if provenance == "free" else 0.375
        return RateField(lambda a, b: scale * ad_rate_free(a, mu), provenance)
    raise ConfigError(f"unknown preset {preset!r}")


def _bloch_grid(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    s = np.sin(alpha)
    return np.stack([s * np.cos(beta), s * np.sin(beta), np.cos(alpha)], axis=-1)


def gamma_field(g: GammaMatrix) -> RateField:
    """Free field of an arbitrary Gamma (the controlled rate with n = r0)."""
    gs, trace, nu = g.real_part, g.trace, g.nu

    def rate(alpha, beta):
        r = _bloch_grid(alpha, beta)
        return rate_controlled_terms(gs, trace, nu, r, r)

    return RateField(rate, "free")


def fixed_control_field(g: GammaMatrix, nc: ControlDirection) -> RateField:
    """Every initial state under the same resonant control direction."""
    gs, trace, nu, n = g.real_part, g.trace, g.nu, nc.vector
    return RateField(
        lambda a, b: rate_controlled_terms(gs, trace, nu, _bloch_grid(a, b), n),
        "controlled-fixed",
    )
