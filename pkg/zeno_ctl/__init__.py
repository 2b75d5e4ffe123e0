"""
zeno-ctl: quantum Zeno effect decay rates under Markovian noise, with and
without strong resonant Hamiltonian control.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

__version__ = "0.1.0"
__author__ = "Benjoe Vidal"
__license__ = "MIT"

from .control import ControlHamiltonian, zeno_limit_rate_controlled
from .errors import ExitCode, ZenoError
from .liouville import NoiseChannel, SystemModel
from .optimize import OptimizationResult, grid_oracle, rate_landscape
from .qubit import BlochVector, ControlDirection, GammaMatrix
from .zeno import effective_rate, survival_probability, zeno_limit_rate_free

__all__ = [
    "BlochVector",
    "ControlDirection",
    "ControlHamiltonian",
    "ExitCode",
    "GammaMatrix",
    "NoiseChannel",
    "OptimizationResult",
    "SystemModel",
    "ZenoError",
    "effective_rate",
    "grid_oracle",
    "rate_landscape",
    "survival_probability",
    "zeno_limit_rate_controlled",
    "zeno_limit_rate_free",
]
