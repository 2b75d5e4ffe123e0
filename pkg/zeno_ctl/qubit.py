"""
Two-level specialization: Bloch vectors, the 3x3 noise-coefficient matrix
Gamma, its nu vector, and the closed-form Zeno-limit decay rates with and
without a resonant control field n.sigma.

Conventions: Pauli order (x, y, z); sigma_z|0> = +|0>; a pure state with
Bloch angles (alpha, beta) is cos(alpha/2)|0> + e^{i beta} sin(alpha/2)|1>.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, HermiticityError, MarkovianityError, StateError
from .liouville import (
    INPUT_TOL,
    NoiseChannel,
    Operator,
    Superoperator,
    SystemModel,
    hermiticity_defect,
    pure_state,
)

log = logging.getLogger(__name__)

PSD_TOL = 1e-10
BLOCH_NORM_TOL = 1e-12

NuVector = np.ndarray

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)
IDENTITY = np.eye(2, dtype=complex)


def pauli_dot(vector) -> Operator:
    """v . sigma for a 3-component (possibly complex) vector."""
    v = np.asarray(vector, dtype=complex).ravel()
    if v.size != 3:
        raise DimensionError(f"expected a 3-vector, got {v.size} components")
    return v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise StateError(f"Bloch component {name} is not finite")
            object.__setattr__(self, name, value)
        if self.norm > 1 + BLOCH_NORM_TOL:
            raise StateError(f"Bloch vector norm {self.norm!r} exceeds 1")

    @classmethod
    def from_angles(cls, alpha: float, beta: float) -> "BlochVector":
        s = math.sin(alpha)
        return cls(s * math.cos(beta), s * math.sin(beta), math.cos(alpha))

    @classmethod
    def from_array(cls, r) -> "BlochVector":
        x, y, z = np.asarray(r, dtype=float).ravel()
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)

    def is_pure(self, tol: float = BLOCH_NORM_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def angles(self) -> tuple[float, float]:
        """(alpha, beta) with alpha in [0, pi], beta in [0, 2 pi); beta is 0 at the poles."""
        alpha = math.acos(max(-1.0, min(1.0, self.z / self.norm))) if self.norm > 0 else 0.0
        if math.hypot(self.x, self.y) < 1e-12:
            return alpha, 0.0
        return alpha, math.atan2(self.y, self.x) % (2 * math.pi)


@dataclass(frozen=True, eq=False)
class GammaMatrix:
    """Hermitian positive-semidefinite coefficients mu_ij of sigma_i rho sigma_j."""
    entries: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.entries, dtype=complex)
        if g.shape != (3, 3):
            raise DimensionError(f"Gamma must be 3x3, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise MarkovianityError("Gamma has non-finite entries")
        defect = hermiticity_defect(g)
        if defect > INPUT_TOL:
            raise HermiticityError(f"Gamma is not Hermitian (max |G - G^dagger| = {defect:.3e})")
        g = 0.5 * (g + g.conj().T)
        smallest = float(np.min(np.linalg.eigvalsh(g)))
        if smallest < -PSD_TOL:
            raise MarkovianityError(
                f"Gamma has negative eigenvalue {smallest:.3e}; the noise is not Markovian"
            )
        object.__setattr__(self, "entries", g)

    @property
    def nu(self) -> NuVector:
        return nu_from_gamma(self)

    @property
    def real_part(self) -> np.ndarray:
        """Real symmetric part; the antisymmetric imaginary part drops out of r^T Gamma r."""
        return self.entries.real.copy()

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def scaled(self, factor: float) -> "GammaMatrix":
        return GammaMatrix(self.entries * factor)


@dataclass(frozen=True)
class ControlDirection:
    theta: float
    phi: float

    @property
    def vector(self) -> np.ndarray:
        s = math.sin(self.theta)
        return np.array([s * math.cos(self.phi), s * math.sin(self.phi), math.cos(self.theta)])

    @classmethod
    def from_vector(cls, n) -> "ControlDirection":
        n = np.asarray(n, dtype=float).ravel()
        norm = float(np.linalg.norm(n))
        if n.size != 3 or norm == 0:
            raise ValueError("control direction needs a nonzero 3-vector")
        alpha, beta = BlochVector.from_array(n / norm).angles()
        return cls(alpha, beta)

    def hamiltonian(self) -> Operator:
        """H_c = n . sigma, eigenvalues +1 and -1."""
        return pauli_dot(self.vector)


def nu_from_gamma(g: GammaMatrix) -> NuVector:
    """nu = 2 (Im mu_23, Im mu_31, Im mu_12)."""
    e = g.entries
    return 2.0 * np.array([e[1, 2].imag, e[2, 0].imag, e[0, 1].imag])


def _check_mu(mu: float) -> float:
    if not mu >= 0:
        raise MarkovianityError(f"noise strength must be non-negative, got {mu}")
    return float(mu)


def preset_dephasing(mu: float) -> GammaMatrix:
    return GammaMatrix(np.diag([0.0, 0.0, _check_mu(mu)]).astype(complex))


def preset_amplitude_damping(mu: float) -> GammaMatrix:
    mu = _check_mu(mu)
    return GammaMatrix(0.25 * mu * np.array([[1, -1j, 0], [1j, 1, 0], [0, 0, 0]], dtype=complex))


PRESETS = {
    "dephasing": preset_dephasing,
    "amplitude_damping": preset_amplitude_damping,
}


def gamma_to_channels(g: GammaMatrix, tol: float = 1e-14) -> list[NoiseChannel]:
    """Eigen-decompose Gamma into channels rate * D[V], V normalized to unit spectral norm."""
    values, vectors = np.linalg.eigh(g.entries)
    if values.size and values[0] < -PSD_TOL:
        raise MarkovianityError(f"Gamma has negative eigenvalue {values[0]:.3e}")
    channels = []
    for lam, u in zip(values, vectors.T):
        if lam <= tol:
            continue
        v = pauli_dot(u)
        scale = float(np.linalg.norm(v, 2))
        channels.append(NoiseChannel(rate=float(lam) * scale ** 2, jump=v / scale))
    return channels


def gamma_from_channels(channels) -> GammaMatrix:
    """Inverse bridge: mu_ij = sum_k rate_k c_i conj(c_j) with V_k = c_0 I + c . sigma.

    Identity components of V_k amount to a Hamiltonian shift and are dropped.
    """
    g = np.zeros((3, 3), dtype=complex)
    for ch in channels:
        if ch.dim != 2:
            raise DimensionError(f"qubit channels expected, got dimension {ch.dim}")
        c0 = np.trace(ch.jump) / 2
        if abs(c0) > INPUT_TOL:
            log.warning("Dropping identity component %.3e of a jump operator", abs(c0))
        c = np.array([np.trace(s @ ch.jump) / 2 for s in PAULI])
        g += ch.rate * np.outer(c, c.conj())
    return GammaMatrix(g)


def dissipator_from_gamma(g: GammaMatrix) -> Superoperator:
    """Direct assembly of sum_ij mu_ij (sigma_i . sigma_j - 1/2 {sigma_j sigma_i, .})."""
    eye = IDENTITY
    out = np.zeros((4, 4), dtype=complex)
    for i, si in enumerate(PAULI):
        for j, sj in enumerate(PAULI):
            mu = g.entries[i, j]
            if mu == 0:
                continue
            sjsi = sj @ si
            out += mu * (np.kron(sj.T, si) - 0.5 * np.kron(eye, sjsi) - 0.5 * np.kron(sjsi.T, eye))
    return out


def qubit_model(g: GammaMatrix, h0=None) -> SystemModel:
    h0 = np.zeros((2, 2), dtype=complex) if h0 is None else h0
    return SystemModel(h0=h0, channels=tuple(gamma_to_channels(g)))


# -- states ----------------------------------------------------------------

def state_from_angles(alpha: float, beta: float) -> np.ndarray:
    return np.array([math.cos(alpha / 2), np.exp(1j * beta) * math.sin(alpha / 2)], dtype=complex)


def state_from_bloch(r: BlochVector) -> np.ndarray:
    if not r.is_pure():
        raise StateError(f"Bloch vector of norm {r.norm!r} is not a pure state")
    return state_from_angles(*r.angles())


def bloch_from_density(rho) -> BlochVector:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DimensionError(f"Bloch vectors need a 2x2 density matrix, got {rho.shape}")
    r = [float(np.trace(rho @ s).real) for s in PAULI]
    norm = math.sqrt(sum(x * x for x in r))
    # roundoff from propagation can push a pure state a hair past the sphere
    if 1 < norm <= 1 + 1e-9:
        r = [x / norm for x in r]
    return BlochVector(*r)


def bloch_from_state(psi) -> BlochVector:
    v = pure_state(psi)
    if v.size != 2:
        raise DimensionError(f"Bloch vectors need a qubit state, got length {v.size}")
    return bloch_from_density(np.outer(v, v.conj()))


# -- closed-form rates -----------------------------------------------------

def _require_pure(r0: BlochVector) -> np.ndarray:
    if not r0.is_pure():
        raise StateError(
            f"closed-form rates assume a pure initial state; |r0| = {r0.norm!r}"
        )
    return r0.as_array()


def rate_free_bloch(g: GammaMatrix, r0: BlochVector) -> float:
    """gamma = -r0^T Gamma r0 + Tr Gamma + nu . r0."""
    r = _require_pure(r0)
    return float(-r @ g.real_part @ r + g.trace + g.nu @ r)


def rate_controlled_terms(gs: np.ndarray, trace: float, nu: np.ndarray,
                          r: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Controlled Zeno-limit rate for broadcastable stacks of unit r and n (shape (..., 3))."""
    def quad(a, b):
        return np.einsum("...i,ij,...j->...", a, gs, b)

    nr = np.sum(n * r, axis=-1)
    cross = np.cross(n, r)
    return (
        -1.5 * nr ** 2 * quad(n, n)
        + nr * quad(n, r)
        - 0.5 * quad(r, r)
        - 0.5 * quad(cross, cross)
        + trace
        + nr * (n @ nu)
    )


def rate_controlled_bloch(g: GammaMatrix, r0: BlochVector, nc: ControlDirection) -> float:
    """Zeno-limit rate under a resonant control along nc (omega a multiple of pi)."""
    r = _require_pure(r0)
    return float(rate_controlled_terms(g.real_part, g.trace, g.nu, r, nc.vector))


def dephasing_rate_free(alpha, mu: float):
    return 0.5 * mu * (1 - np.cos(2 * np.asarray(alpha)))


def ad_rate_free(alpha, mu: float):
    return mu * np.sin(np.asarray(alpha) / 2) ** 4


def dephasing_rate_controlled(alpha, beta, theta_c, phi_c, mu: float):
    """Trigonometric closed form for sigma_z dephasing under control (theta_c, phi_c)."""
    delta = beta - phi_c
    c2t = np.cos(2 * theta_c)
    sa2 = np.sin(alpha) ** 2
    st2 = np.sin(theta_c) ** 2
    return mu / 64 * (
        39
        - 2 * np.cos(2 * alpha) * (1 + 3 * c2t) ** 2
        - 3 * np.cos(4 * theta_c)
        - 8 * np.cos(2 * delta) * sa2 * st2
        - 4 * c2t * (1 + 6 * np.cos(2 * delta) * sa2 * st2)
        - 4 * np.cos(delta) * np.sin(2 * alpha) * (2 * np.sin(2 * theta_c) + 3 * np.sin(4 * theta_c))
    )


def ad_rate_controlled(alpha, beta, theta_c, phi_c, mu: float):
    """Trigonometric closed form for amplitude damping under control (theta_c, phi_c)."""
    delta = beta - phi_c
    c2t = np.cos(2 * theta_c)
    c4t = np.cos(4 * theta_c)
    return mu / 512 * (
        178
        + 12 * np.cos(2 * (alpha - theta_c))
        + np.cos(2 * (alpha - delta))
        + np.cos(2 * (alpha + delta))
        - 256 * np.cos(alpha) * np.cos(theta_c) ** 2
        + 8 * c2t
        + 6 * c4t
        + 2 * np.cos(2 * alpha) * (11 + 6 * c2t + 9 * c4t)
        + 2 * np.cos(2 * delta) * (-1 + 2 * (4 * c2t - 3 * c4t) * np.sin(alpha) ** 2)
        + 4 * (
            -32 * np.cos(delta) * np.sin(alpha)
            + (4 * np.cos(delta) * (1 + 3 * c2t) - 3) * np.sin(2 * alpha)
        ) * np.sin(2 * theta_c)
    )


def random_gamma(rng: np.random.Generator, scale: float = 1.0) -> GammaMatrix:
    """Random PSD Gamma = A A^dagger with complex Gaussian A."""
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return GammaMatrix(scale * (a @ a.conj().T) / 6)


def random_bloch(rng: np.random.Generator) -> BlochVector:
    v = rng.normal(size=3)
    return BlochVector.from_array(v / np.linalg.norm(v))
