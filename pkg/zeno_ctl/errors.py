"""
Exception hierarchy and CLI exit codes.

Validation errors subclass ValueError so callers that only care about
"bad input" can catch that; the CLI maps the specific classes onto the
stable exit codes in ExitCode.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    VERIFY_FAILED = 1
    SCHEMA = 2
    MARKOVIANITY = 3
    RESONANCE = 4
    RUNTIME = 5


class ZenoError(Exception):
    """Base class for every error raised by zeno_ctl."""


class ConfigError(ZenoError, ValueError):
    """Run config does not match the schema."""


class MarkovianityError(ZenoError, ValueError):
    """Negative noise rate or a Γ matrix that is not positive semidefinite."""


class ResonanceError(ZenoError, ValueError):
    """Control Hamiltonian violates ω(E_i − E_j) ∈ 2πℤ."""


class DimensionError(ZenoError, ValueError):
    """Operators of inconsistent dimension, or dimension above the cap."""


class HermiticityError(ZenoError, ValueError):
    """An operator that must be Hermitian is not."""


class StateError(ZenoError, ValueError):
    """Invalid state vector, density matrix or Bloch vector."""


class ProbabilityDomainError(ZenoError, ValueError):
    """Probability outside the domain of the requested formula."""


class ConditionInapplicableError(ZenoError, ValueError):
    """A frequency condition whose denominator vanishes for this model."""


class NumericalError(ZenoError, ArithmeticError):
    """Numerical result failed a consistency check."""
