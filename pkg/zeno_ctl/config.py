"""
Load and validate a run config (JSON or YAML).

Complex numbers are written as [re, im] pairs (a bare real number is also
accepted); matrices are row-major lists of rows.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from .errors import ConfigError, StateError
from .liouville import MAX_DIM, NoiseChannel, SystemModel, pure_state
from .qubit import (
    PRESETS,
    BlochVector,
    GammaMatrix,
    bloch_from_state,
    gamma_from_channels,
    qubit_model,
    state_from_angles,
)

# Optional YAML support
try:
    import yaml
    _HAS_YAML = True
except ImportError:
    _HAS_YAML = False

THREADS_ENV = "ZENO_CTL_THREADS"
DEFAULT_TAU = 0.01
DEFAULT_T = 1.0


@dataclass
class ChannelSpec:
    """One noise channel: rate * D[v]."""
    rate: float
    v: np.ndarray


@dataclass
class ControlSpec:
    """Resonant control: a qubit direction, the optimal direction, or a general hc."""
    omega_multiple: int = 1
    theta: Optional[float] = None
    phi: Optional[float] = None
    optimal: bool = False
    hc: Optional[np.ndarray] = None


@dataclass
class PresetSpec:
    name: str
    mu: float


@dataclass
class TimeGrid:
    start: float
    stop: float
    num: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass
class RunConfig:
    """Everything a zeno-ctl command needs."""
    dimension: int = 2
    h0: Optional[np.ndarray] = None
    channels: Optional[list[ChannelSpec]] = None
    gamma: Optional[np.ndarray] = None
    preset: Optional[PresetSpec] = None
    psi0: Optional[np.ndarray] = None
    control: Optional[ControlSpec] = None
    tau: float = DEFAULT_TAU
    t: float = DEFAULT_T
    t_grid: Optional[TimeGrid] = None

    def validate(self) -> "RunConfig":
        """Re-check every model invariant; raises the specific error of the first failure."""
        sources = [s for s in (self.channels, self.gamma, self.preset) if s is not None]
        if len(sources) != 1:
            raise ConfigError("exactly one of 'channels', 'gamma' or 'preset' must be given")
        if not 1 <= self.dimension <= MAX_DIM:
            raise ConfigError(f"dimension must be in 1..{MAX_DIM}, got {self.dimension}")
        if (self.gamma is not None or self.preset is not None) and self.dimension != 2:
            raise ConfigError("'gamma' and 'preset' describe qubit noise; dimension must be 2")
        if self.control is not None and self.dimension != 2:
            if self.control.hc is None:
                raise ConfigError("control by direction needs a qubit; give 'hc' for dimension > 2")
        self.system_model()
        if self.psi0 is not None and self.psi0.size != self.dimension:
            raise ConfigError(f"psi0 has {self.psi0.size} components, dimension is {self.dimension}")
        return self

    @property
    def is_qubit(self) -> bool:
        return self.dimension == 2

    def gamma_matrix(self) -> Optional[GammaMatrix]:
        """Gamma of qubit noise (preset, explicit, or recovered from channels)."""
        if not self.is_qubit:
            return None
        if self.preset is not None:
            return PRESETS[self.preset.name](self.preset.mu)
        if self.gamma is not None:
            return GammaMatrix(self.gamma)
        return gamma_from_channels(self._noise_channels())

    def _noise_channels(self) -> list[NoiseChannel]:
        return [NoiseChannel(rate=ch.rate, jump=ch.v) for ch in self.channels or []]

    def system_model(self) -> SystemModel:
        h0 = self.h0 if self.h0 is not None else np.zeros((self.dimension, self.dimension), dtype=complex)
        if self.channels is not None:
            return SystemModel(h0=h0, channels=tuple(self._noise_channels()))
        return qubit_model(self.gamma_matrix(), h0)

    def initial_state(self) -> np.ndarray:
        if self.psi0 is None:
            raise ConfigError("this command needs 'psi0'")
        return self.psi0

    def bloch(self) -> BlochVector:
        if not self.is_qubit:
            raise ConfigError("Bloch vectors are defined for qubits only")
        return bloch_from_state(self.initial_state())


def _parse_complex(raw: Any, where: str) -> complex:
    if isinstance(raw, bool):
        raise ConfigError(f"{where}: expected a number or [re, im], got {raw!r}")
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, (list, tuple)) and len(raw) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw
    ):
        return complex(raw[0], raw[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {raw!r}")


def _parse_vector(raw: Any, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where}: expected a non-empty list")
    return np.array([_parse_complex(x, f"{where}[{i}]") for i, x in enumerate(raw)], dtype=complex)


def _parse_matrix(raw: Any, where: str, dim: Optional[int] = None) -> np.ndarray:
    if not isinstance(raw, list) or not raw or not all(isinstance(row, list) for row in raw):
        raise ConfigError(f"{where}: expected a list of rows")
    rows = [_parse_vector(row, f"{where}[{i}]") for i, row in enumerate(raw)]
    n = len(rows)
    if any(row.size != n for row in rows):
        raise ConfigError(f"{where}: matrix must be square")
    if dim is not None and n != dim:
        raise ConfigError(f"{where}: expected a {dim}x{dim} matrix, got {n}x{n}")
    return np.array(rows)


def _parse_float(raw: Any, where: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {raw!r}")
    return float(raw)


def _parse_int(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"{where}: expected an integer, got {raw!r}")
    return raw


def _parse_channel(raw: Any, index: int, dim: int) -> ChannelSpec:
    where = f"channels[{index}]"
    if not isinstance(raw, dict) or "rate" not in raw or "v" not in raw:
        raise ConfigError(f"{where}: each channel needs 'rate' and 'v'")
    return ChannelSpec(rate=_parse_float(raw["rate"], f"{where}.rate"),
                       v=_parse_matrix(raw["v"], f"{where}.v", dim))


def _parse_control(raw: Any, dim: int) -> ControlSpec:
    if not isinstance(raw, dict):
        raise ConfigError("control: expected an object")
    multiple = _parse_int(raw.get("omega_multiple", 1), "control.omega_multiple")
    if multiple == 0:
        raise ConfigError("control.omega_multiple must be nonzero")
    if raw.get("optimal"):
        return ControlSpec(omega_multiple=multiple, optimal=True)
    if "hc" in raw:
        return ControlSpec(omega_multiple=multiple, hc=_parse_matrix(raw["hc"], "control.hc", dim))
    if "theta" in raw and "phi" in raw:
        return ControlSpec(
            omega_multiple=multiple,
            theta=_parse_float(raw["theta"], "control.theta"),
            phi=_parse_float(raw["phi"], "control.phi"),
        )
    raise ConfigError("control must define one of: theta+phi, optimal, or hc")


def _parse_preset(raw: Any) -> PresetSpec:
    if not isinstance(raw, dict) or "name" not in raw:
        raise ConfigError("preset: expected {'name': ..., 'mu': ...}")
    name = raw["name"]
    if name not in PRESETS:
        raise ConfigError(f"preset.name must be one of {sorted(PRESETS)}, got {name!r}")
    return PresetSpec(name=name, mu=_parse_float(raw.get("mu", 1.0), "preset.mu"))


def _parse_psi0(raw: Any, dim: int) -> np.ndarray:
    if isinstance(raw, dict):
        if dim != 2:
            raise ConfigError("psi0 as Bloch angles needs dimension 2")
        alpha = _parse_float(raw.get("alpha"), "psi0.alpha")
        beta = _parse_float(raw.get("beta", 0.0), "psi0.beta")
        return state_from_angles(alpha, beta)
    vector = _parse_vector(raw, "psi0")
    try:
        return pure_state(vector)
    except StateError as e:
        raise ConfigError(f"psi0: {e}") from e


def _parse_time_grid(raw: Any) -> TimeGrid:
    if not isinstance(raw, dict):
        raise ConfigError("t_grid: expected {'start', 'stop', 'num'}")
    grid = TimeGrid(
        start=_parse_float(raw.get("start", 0.0), "t_grid.start"),
        stop=_parse_float(raw.get("stop"), "t_grid.stop"),
        num=_parse_int(raw.get("num", 50), "t_grid.num"),
    )
    if grid.num < 1 or grid.start < 0 or grid.stop < grid.start:
        raise ConfigError("t_grid needs num >= 1 and 0 <= start <= stop")
    return grid


def _infer_dimension(data: Mapping[str, Any]) -> int:
    if "dimension" in data:
        return _parse_int(data["dimension"], "dimension")
    if isinstance(data.get("h0"), list):
        return len(data["h0"])
    if isinstance(data.get("psi0"), list):
        return len(data["psi0"])
    return 2


def parse_config(data: Any) -> RunConfig:
    """Build a RunConfig from already-decoded JSON/YAML data (schema checks only)."""
    if not isinstance(data, dict):
        raise ConfigError("Config root must be a JSON object.")
    dim = _infer_dimension(data)
    if not 1 <= dim <= MAX_DIM:
        raise ConfigError(f"dimension must be in 1..{MAX_DIM}, got {dim}")

    channels = None
    if "channels" in data:
        if not isinstance(data["channels"], list):
            raise ConfigError("channels: expected a list")
        channels = [_parse_channel(c, i, dim) for i, c in enumerate(data["channels"])]

    cfg = RunConfig(
        dimension=dim,
        h0=_parse_matrix(data["h0"], "h0", dim) if "h0" in data else None,
        channels=channels,
        gamma=_parse_matrix(data["gamma"], "gamma", 3) if "gamma" in data else None,
        preset=_parse_preset(data["preset"]) if "preset" in data else None,
        psi0=_parse_psi0(data["psi0"], dim) if "psi0" in data else None,
        control=_parse_control(data["control"], dim) if data.get("control") is not None else None,
        tau=_parse_float(data.get("tau", DEFAULT_TAU), "tau"),
        t=_parse_float(data.get("t", DEFAULT_T), "t"),
        t_grid=_parse_time_grid(data["t_grid"]) if "t_grid" in data else None,
    )
    if not cfg.tau > 0:
        raise ConfigError(f"tau must be positive, got {cfg.tau}")
    if cfg.t < 0:
        raise ConfigError(f"t must be non-negative, got {cfg.t}")
    return cfg


def load_config(path: str | Path) -> RunConfig:
    """
    Load config from a JSON or YAML file.
    Returns a validated RunConfig. Raises on parse or validation errors.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    text = path.read_text(encoding="utf-8")
    suffix = path.suffix.lower()

    if suffix in (".json",):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
    elif suffix in (".yaml", ".yml"):
        if not _HAS_YAML:
            raise ConfigError("YAML config requires PyYAML. Install with: pip install PyYAML")
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML ({e})") from e
    else:
        raise ConfigError(f"Unsupported config format: {suffix}. Use .json or .yaml")

    return parse_config(data).validate()


def threads_from_env(env: Optional[Mapping[str, str]] = None) -> int:
    """Worker count from ZENO_CTL_THREADS, defaulting to the number of logical cores."""
    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value
