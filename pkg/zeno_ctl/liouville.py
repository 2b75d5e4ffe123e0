"""
Liouville-space engine: vectorization, superoperator assembly,
matrix-exponential propagation and frame rotations.

Vectorization is column stacking everywhere: vec(A X B) = (B^T kron A) vec(X).
Hamiltonians are in angular-frequency units with hbar = 1.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.linalg import eigh, expm

from .errors import (
    DimensionError,
    HermiticityError,
    MarkovianityError,
    NumericalError,
    StateError,
)

log = logging.getLogger(__name__)

MAX_DIM = 8
INPUT_TOL = 1e-12
HERMITIAN_REJECT_TOL = 1e-10
OUTPUT_TOL = 1e-9
TRACE_PRESERVING_TOL = 1e-10
# Largest 1-norm handled by the degree-13 Padé approximant without scaling.
PADE13_THETA = 5.371920351148152

Operator = np.ndarray
Superoperator = np.ndarray
DensityMatrix = np.ndarray


def as_operator(op, name: str = "operator") -> Operator:
    """Return op as a finite square complex matrix of dimension 1..MAX_DIM."""
    a = np.asarray(op, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {a.shape}")
    if not 1 <= a.shape[0] <= MAX_DIM:
        raise DimensionError(f"{name} has dimension {a.shape[0]}; supported range is 1..{MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise NumericalError(f"{name} has non-finite entries")
    return a


def hermiticity_defect(op: Operator) -> float:
    """max |A - A^dagger| entrywise."""
    a = np.asarray(op)
    return float(np.max(np.abs(a - a.conj().T), initial=0.0))


def is_hermitian(op: Operator, tol: float = INPUT_TOL) -> bool:
    return hermiticity_defect(op) <= tol


def require_hermitian(op, name: str, tol: float = HERMITIAN_REJECT_TOL) -> Operator:
    a = as_operator(op, name)
    if not is_hermitian(a, tol):
        raise HermiticityError(f"{name} is not Hermitian (max |A - A^dagger| = {hermiticity_defect(a):.3e})")
    return a


def check_markovian(rates: Iterable[float]) -> None:
    """Raise MarkovianityError unless every rate is non-negative."""
    for k, rate in enumerate(rates):
        if not rate >= 0:
            raise MarkovianityError(f"noise rate #{k} is {rate}; Markovian rates must be non-negative")


def markovian_rates_ok(model: "SystemModel") -> bool:
    return all(ch.rate >= 0 for ch in model.channels)


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    """One dissipative channel: rate * D[jump]."""
    rate: float
    jump: Operator

    def __post_init__(self) -> None:
        check_markovian([self.rate])
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "jump", as_operator(self.jump, "jump operator"))

    @property
    def dim(self) -> int:
        return self.jump.shape[0]


@dataclass(frozen=True, eq=False)
class SystemModel:
    """Free Hamiltonian h0 plus a list of Markovian noise channels."""
    h0: Operator
    channels: tuple[NoiseChannel, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        h0 = require_hermitian(self.h0, "h0", tol=INPUT_TOL)
        channels = tuple(self.channels)
        for ch in channels:
            if ch.dim != h0.shape[0]:
                raise DimensionError(
                    f"jump operator dimension {ch.dim} does not match h0 dimension {h0.shape[0]}"
                )
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "channels", channels)

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @classmethod
    def noiseless(cls, h0) -> "SystemModel":
        return cls(h0=h0, channels=())


# -- vectorization ---------------------------------------------------------

def vectorize(rho: Operator) -> np.ndarray:
    """Column-stack a d x d matrix into a length d^2 vector."""
    a = np.asarray(rho, dtype=complex)
    return a.reshape(-1, order="F")


def devectorize(vec: np.ndarray) -> Operator:
    """Inverse of vectorize."""
    v = np.asarray(vec, dtype=complex).ravel()
    d = math.isqrt(v.size)
    if d * d != v.size:
        raise DimensionError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape((d, d), order="F")


def apply_superop(superop: Superoperator, rho: Operator) -> Operator:
    return devectorize(superop @ vectorize(rho))


def expectation(superop: Superoperator, rho0: Operator) -> complex:
    """<<rho0| S |rho0>>, i.e. Tr(rho0 S[rho0]) for Hermitian rho0."""
    v = vectorize(rho0)
    return complex(np.vdot(v, superop @ v))


# -- states ----------------------------------------------------------------

def pure_state(psi) -> np.ndarray:
    """Validate a unit state vector (norm 1 within 1e-12)."""
    v = np.asarray(psi, dtype=complex).ravel()
    if not 1 <= v.size <= MAX_DIM:
        raise DimensionError(f"state vector has length {v.size}; supported range is 1..{MAX_DIM}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > INPUT_TOL:
        raise StateError(f"state vector must have unit norm, got {norm!r}")
    return v


def projector(psi) -> Operator:
    v = pure_state(psi)
    return np.outer(v, v.conj())


def density_matrix_violations(rho: Operator, tol: float = OUTPUT_TOL,
                              psd_tol: float | None = None) -> list[str]:
    """Human-readable list of density-matrix invariants that rho breaks."""
    psd_tol = tol if psd_tol is None else psd_tol
    a = np.asarray(rho, dtype=complex)
    problems = []
    defect = hermiticity_defect(a)
    if defect > tol:
        problems.append(f"not Hermitian (defect {defect:.3e})")
    trace = complex(np.trace(a))
    if abs(trace - 1.0) > tol:
        problems.append(f"trace {trace:.12g} != 1")
    smallest = float(np.min(np.linalg.eigvalsh(0.5 * (a + a.conj().T))))
    if smallest < -psd_tol:
        problems.append(f"negative eigenvalue {smallest:.3e}")
    return problems


def validate_density_matrix(rho, tol: float = INPUT_TOL) -> DensityMatrix:
    a = as_operator(rho, "density matrix")
    problems = density_matrix_violations(a, tol, psd_tol=1e-10)
    if problems:
        raise StateError("invalid density matrix: " + "; ".join(problems))
    return a


# -- superoperators --------------------------------------------------------

def hamiltonian_superop(h) -> Superoperator:
    """Matrix of L_H[.] = -i[H, .]."""
    h = require_hermitian(h, "Hamiltonian")
    eye = np.eye(h.shape[0], dtype=complex)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(ch: NoiseChannel) -> Superoperator:
    """Matrix of rate * (V . V^dagger - 1/2 {V^dagger V, .})."""
    check_markovian([ch.rate])
    v = ch.jump
    eye = np.eye(v.shape[0], dtype=complex)
    vdv = v.conj().T @ v
    return ch.rate * (np.kron(v.conj(), v) - 0.5 * np.kron(eye, vdv) - 0.5 * np.kron(vdv.T, eye))


def noise_superop(model: SystemModel) -> Superoperator:
    """L_mu: sum of all dissipators of the model."""
    out = np.zeros((model.dim ** 2, model.dim ** 2), dtype=complex)
    for ch in model.channels:
        out += dissipator_superop(ch)
    return out


def total_liouvillian(model: SystemModel) -> Superoperator:
    """L_tot = L_H0 + L_mu."""
    for ch in model.channels:
        if ch.dim != model.dim:
            raise DimensionError(f"channel dimension {ch.dim} != model dimension {model.dim}")
    return hamiltonian_superop(model.h0) + noise_superop(model)


def is_trace_preserving(superop: Superoperator, tol: float = TRACE_PRESERVING_TOL) -> bool:
    """<<I| L = 0 row condition."""
    d = math.isqrt(superop.shape[0])
    row = vectorize(np.eye(d)).conj() @ superop
    return float(np.max(np.abs(row), initial=0.0)) <= tol


# -- propagation -----------------------------------------------------------

def scaling_depth(norm1: float) -> int:
    """Number of squarings scaling-and-squaring needs for a given 1-norm."""
    if not math.isfinite(norm1):
        return -1
    if norm1 <= PADE13_THETA:
        return 0
    return math.ceil(math.log2(norm1 / PADE13_THETA))


def expm_superop(generator: np.ndarray) -> np.ndarray:
    """scipy's scaling-and-squaring Padé exponential with a convergence check."""
    result = expm(generator)
    if not np.all(np.isfinite(result)):
        norm1 = float(np.linalg.norm(generator, 1))
        raise NumericalError(
            f"matrix exponential did not converge (1-norm {norm1:.3e}, "
            f"scaling depth {scaling_depth(norm1)})"
        )
    return result


def check_output_state(rho: Operator, context: str) -> Operator:
    problems = density_matrix_violations(rho, OUTPUT_TOL)
    if problems:
        raise NumericalError(f"{context} produced an invalid density matrix: " + "; ".join(problems))
    return rho


def propagate(model: SystemModel, rho0, t: float) -> Operator:
    """rho(t) = exp(L_tot t)[rho0]."""
    if t < 0:
        raise ValueError(f"propagation time must be non-negative, got {t}")
    rho0 = validate_density_matrix(rho0)
    if rho0.shape[0] != model.dim:
        raise DimensionError(f"state dimension {rho0.shape[0]} != model dimension {model.dim}")
    if t == 0:
        return rho0.copy()
    generator = total_liouvillian(model) * t
    log.debug("propagate: d=%d t=%g |L t|_1=%.3e", model.dim, t, np.linalg.norm(generator, 1))
    rho = apply_superop(expm_superop(generator), rho0)
    return check_output_state(rho, "propagate")


# -- frame rotations -------------------------------------------------------

def rotate_frame(target: Superoperator, hc, omega: float, eta: float) -> Superoperator:
    """exp(-omega L_c eta) . target . exp(omega L_c eta) with L_c = -i[hc, .]."""
    lc = hamiltonian_superop(hc)
    if eta == 0 or omega == 0:
        return np.array(target, dtype=complex, copy=True)
    forward = expm_superop(omega * eta * lc)
    backward = expm_superop(-omega * eta * lc)
    return backward @ target @ forward


def rotate_operator(op, hc, omega: float, eta: float) -> Operator:
    """exp(i omega eta hc) . op . exp(-i omega eta hc), via the spectral decomposition of hc."""
    hc = require_hermitian(hc, "control Hamiltonian")
    energies, vecs = eigh(hc)
    u = (vecs * np.exp(1j * omega * eta * energies)) @ vecs.conj().T
    return u @ np.asarray(op, dtype=complex) @ u.conj().T


def rotate_channel(ch: NoiseChannel, hc, omega: float, eta: float) -> NoiseChannel:
    """Channel whose dissipator is the rotated-frame dissipator of ch."""
    return NoiseChannel(rate=ch.rate, jump=rotate_operator(ch.jump, hc, omega, eta))


def rotate_model(model: SystemModel, hc, omega: float, eta: float) -> SystemModel:
    return SystemModel(
        h0=rotate_operator(model.h0, hc, omega, eta),
        channels=tuple(rotate_channel(ch, hc, omega, eta) for ch in model.channels),
    )


def random_model(rng: np.random.Generator, dim: int, n_channels: int = 2,
                 scale: float = 1.0) -> SystemModel:
    """Random Hermitian h0 and Gaussian jump operators, for tests and checks."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h0 = 0.5 * scale * (a + a.conj().T) / math.sqrt(dim)
    channels = []
    for _ in range(n_channels):
        v = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2 * dim)
        channels.append(NoiseChannel(rate=scale * rng.uniform(0.1, 1.0), jump=v))
    return SystemModel(h0=h0, channels=tuple(channels))


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)

