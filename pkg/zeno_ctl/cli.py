"""
Command-line interface for zeno-ctl.
Loads a run config, dispatches to the simulation modules, and writes CSV/JSON.

Copyright (c) 2026 Benjoe Vidal
Licensed under the MIT License.
"""

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from .config import RunConfig, load_config, threads_from_env
from .control import (
    ControlHamiltonian,
    controlled_survival,
    min_frequency_controlled,
    zeno_limit_rate_controlled,
)
from .errors import (
    ConditionInapplicableError,
    ConfigError,
    ExitCode,
    MarkovianityError,
    ResonanceError,
    ZenoError,
)
from .fidelity import fidelity_curve, preset_field
from .liouville import projector
from .optimize import OPTIMA, OptimizationResult, grid_oracle, kappa_ratio, rate_landscape
from .output import write_csv, write_json
from .qubit import ControlDirection
from .trajectory import continued_path, interval_path
from .verify import format_table, run_checks
from .zeno import DecayEstimate, min_frequency_free, survival_probability, zeno_limit_rate_free

log = logging.getLogger(__name__)

COMMANDS = ("rate", "sweep-alpha", "landscape", "fidelity", "trajectory", "verify")
SWEEP_COLUMNS = ("alpha", "gamma_free", "gamma_opt", "kappa", "theta_opt", "phi_opt")
LANDSCAPE_COLUMNS = ("theta", "phi", "gamma_controlled")
FIDELITY_COLUMNS = ("t", "F_free", "F_opt")
TRAJECTORY_COLUMNS = ("segment", "step", "time", "rx", "ry", "rz", "cumulative_survival")
DEFAULT_POINTS = 64
DEFAULT_STEPS = 32


def setup_logging(verbose: bool) -> None:
    """Configure logging level and format. Logs go to stderr; data goes to stdout."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        stream=sys.stderr,
    )


def _optimal_direction(cfg: RunConfig) -> OptimizationResult:
    r0 = cfg.bloch()
    if cfg.preset is not None:
        alpha, beta = r0.angles()
        return OPTIMA[cfg.preset.name](alpha, beta, cfg.preset.mu)
    return grid_oracle(cfg.gamma_matrix(), r0)


def resolve_control(cfg: RunConfig) -> Optional[ControlHamiltonian]:
    """The resonant control described by cfg.control, or None."""
    spec = cfg.control
    if spec is None:
        return None
    if spec.hc is not None:
        return ControlHamiltonian.from_multiple(spec.hc, spec.omega_multiple)
    if spec.optimal:
        result = _optimal_direction(cfg)
        log.debug("Optimal direction: theta=%.12g phi=%.12g (%s)", result.theta_opt, result.phi_opt, result.method)
        return ControlHamiltonian.from_direction(result.direction.vector, spec.omega_multiple)
    direction = ControlDirection(spec.theta, spec.phi)
    return ControlHamiltonian.from_direction(direction.vector, spec.omega_multiple)


def _or_none(func, *args) -> Optional[float]:
    try:
        return func(*args)
    except ConditionInapplicableError as e:
        log.debug("%s", e)
        return None


def cmd_rate(cfg: RunConfig) -> dict:
    """Zeno-limit rates, kappa and the minimal measurement frequency of cfg."""
    model = cfg.system_model()
    psi0 = cfg.initial_state()
    ctrl = resolve_control(cfg)

    gamma_free = zeno_limit_rate_free(model, psi0)
    report: dict = {"gamma_free": gamma_free}
    if ctrl is None:
        report["min_frequency"] = _or_none(min_frequency_free, model, psi0)
        p_tau = survival_probability(model, psi0, cfg.tau)
    else:
        gamma_controlled = zeno_limit_rate_controlled(model, ctrl, psi0)
        report["gamma_controlled"] = gamma_controlled
        report["kappa"] = kappa_ratio(gamma_controlled, gamma_free)
        report["min_frequency"] = _or_none(min_frequency_controlled, model, ctrl, psi0)
        p_tau = controlled_survival(model, ctrl, psi0, cfg.tau)
    estimate = DecayEstimate.from_probability(p_tau, cfg.tau, cfg.t)
    report["finite_tau"] = {
        "tau": cfg.tau,
        "t": cfg.t,
        "p_tau": estimate.p_tau,
        "gamma_eff": estimate.gamma_eff,
        "survival_total": estimate.survival_total,
    }

    log.info("--- Summary ---")
    log.info("gamma_free: %.15g", gamma_free)
    if ctrl is not None:
        log.info("gamma_controlled: %.15g", report["gamma_controlled"])
        log.info("kappa: %s", report["kappa"])
    log.info("min_frequency: %s", report["min_frequency"])
    return report


def _preset(cfg: RunConfig):
    if cfg.preset is None:
        raise ConfigError("this command needs a 'preset'")
    return cfg.preset


def _sweep_row(name: str, mu: float, beta: float, alpha: float) -> tuple:
    result = OPTIMA[name](alpha, beta, mu)
    return (alpha, result.gamma_free, result.gamma_opt, result.kappa, result.theta_opt, result.phi_opt)


def cmd_sweep_alpha(cfg: RunConfig, n_points: int, workers: int = 1) -> list[tuple]:
    """Analytic optimum over alpha in [0, pi]; rows in grid order."""
    preset = _preset(cfg)
    if n_points < 1:
        raise ConfigError(f"--points must be positive, got {n_points}")
    beta = cfg.bloch().angles()[1] if cfg.psi0 is not None else 0.0
    alphas = np.linspace(0.0, math.pi, n_points) if n_points > 1 else np.array([0.0])

    def row(alpha: float) -> tuple:
        return _sweep_row(preset.name, preset.mu, beta, float(alpha))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, alphas))

    kappas = [r[3] for r in rows if r[3] is not None]
    log.info("--- Summary ---")
    log.info("Preset: %s (mu=%g), %d alpha point(s), %d worker(s)", preset.name, preset.mu, len(rows), workers)
    if kappas:
        log.info("kappa range: [%.15g, %.15g]", min(kappas), max(kappas))
    return rows


def cmd_landscape(cfg: RunConfig, n_points: int) -> list[tuple]:
    """Controlled rate over (theta_c, phi_c): n_points thetas in [0, pi], 2 n_points phis in [0, 2 pi)."""
    if n_points < 2:
        raise ConfigError(f"--points must be at least 2 for landscape, got {n_points}")
    r0 = cfg.bloch()
    g = cfg.gamma_matrix()
    thetas, phis, rates = rate_landscape(g, r0, n_points, 2 * n_points)
    rows = [
        (float(theta), float(phi), float(rates[i, j]))
        for i, theta in enumerate(thetas)
        for j, phi in enumerate(phis)
    ]

    i, j = np.unravel_index(int(np.argmin(rates)), rates.shape)
    log.info("--- Summary ---")
    log.info("Grid: %d x %d directions", len(thetas), len(phis))
    log.info("Grid minimum: %.15g at theta=%.6g phi=%.6g", rates[i, j], thetas[i], phis[j])
    return rows


def cmd_fidelity(cfg: RunConfig, n_points: int) -> list[tuple]:
    """F(t) for free and optimally controlled evolution on a time grid."""
    preset = _preset(cfg)
    if cfg.t_grid is not None:
        times = cfg.t_grid.values()
    else:
        if n_points < 1:
            raise ConfigError(f"--points must be positive, got {n_points}")
        times = np.linspace(0.0, cfg.t, n_points)
    free = fidelity_curve(preset_field(preset.name, preset.mu, "free"), times)
    opt = fidelity_curve(preset_field(preset.name, preset.mu, "controlled-optimal"), times)
    rows = [(t, f, g) for (t, f), (_, g) in zip(free, opt)]

    log.info("--- Summary ---")
    log.info("Preset: %s (mu=%g), %d time point(s)", preset.name, preset.mu, len(rows))
    if rows:
        log.info("At t=%.6g: F_free=%.6f F_opt=%.6f", rows[-1][0], rows[-1][1], rows[-1][2])
    return rows


def _path_rows(samples) -> list[tuple]:
    rows = []
    for s in samples:
        r = (s.bloch.x, s.bloch.y, s.bloch.z) if s.bloch is not None else (None, None, None)
        rows.append((s.segment, s.step, s.time, *r, s.cumulative_survival))
    return rows


def cmd_trajectory(cfg: RunConfig, n_steps: int) -> list[tuple]:
    """One interval with the configured control, its continuation, and the free path."""
    model = cfg.system_model()
    rho0 = projector(cfg.initial_state())
    ctrl = resolve_control(cfg)
    actual = interval_path(model, ctrl, cfg.tau, n_steps, rho0, segment="actual")
    continued = continued_path(model, ctrl, cfg.tau, n_steps, rho0)
    free = interval_path(model, None, cfg.tau, n_steps, rho0, segment="free")
    rows = _path_rows(actual) + _path_rows(continued) + _path_rows(free)

    log.info("--- Summary ---")
    log.info("tau: %g, steps per interval: %d, control: %s", cfg.tau, n_steps, "off" if ctrl is None else "on")
    log.info("p(tau) actual: %.15g, free: %.15g", actual[-1].cumulative_survival, free[-1].cumulative_survival)
    return rows


def cmd_verify(names: Optional[list[str]] = None) -> int:
    """Run the oracle suite, print the table, return the exit code."""
    results = run_checks(names)
    print(format_table(results))
    failed = [r for r in results if not r.passed]
    log.info("--- Summary ---")
    log.info("Checks: %d, passed: %d, failed: %d", len(results), len(results) - len(failed), len(failed))
    for r in failed:
        log.warning("  %s: %s", r.name, r.detail)
    return int(ExitCode.VERIFY_FAILED if failed else ExitCode.OK)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "verify":
        return cmd_verify(args.check or None)
    if args.config is None:
        raise ConfigError(f"'{args.command}' needs --config")
    cfg = load_config(args.config)
    out: Optional[Path] = Path(args.out) if args.out else None
    if args.command == "rate":
        write_json(cmd_rate(cfg), out)
    elif args.command == "sweep-alpha":
        rows = cmd_sweep_alpha(cfg, args.points, threads_from_env())
        write_csv(rows, SWEEP_COLUMNS, out)
    elif args.command == "landscape":
        write_csv(cmd_landscape(cfg, args.points), LANDSCAPE_COLUMNS, out)
    elif args.command == "fidelity":
        write_csv(cmd_fidelity(cfg, args.points), FIDELITY_COLUMNS, out)
    elif args.command == "trajectory":
        write_csv(cmd_trajectory(cfg, args.steps), TRAJECTORY_COLUMNS, out)
    if out is not None:
        log.info("Wrote %s", out)
    return int(ExitCode.OK)


def main(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, run one command. Return exit code."""
    parser = argparse.ArgumentParser(
        prog="zeno-ctl",
        description="Quantum Zeno effect rates, optimal control directions and figure data.",
        epilog="Exit codes: 0 ok, 1 verify check failed, 2 config error, 3 Markovianity violated, 4 control not resonant, 5 runtime error.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS, help="What to compute.")
    parser.add_argument(
        "--config", "-c",
        default=None,
        help="Path to run config (JSON or YAML). Required for every command except verify.",
    )
    parser.add_argument(
        "--out", "-o",
        default=None,
        metavar="PATH",
        help="Write the JSON report / CSV here instead of stdout.",
    )
    parser.add_argument(
        "--points", "-n",
        type=int,
        default=DEFAULT_POINTS,
        help="Grid points for sweep-alpha, landscape (theta; phi gets twice as many) and fidelity (fidelity prefers t_grid from the config).",
    )
    parser.add_argument(
        "--steps",
        type=int,
        default=DEFAULT_STEPS,
        help="Samples per measurement interval for trajectory.",
    )
    parser.add_argument(
        "--check",
        action="append",
        default=None,
        metavar="NAME",
        help="Run only this verify check (repeatable).",
    )
    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Verbose logging.",
    )

    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    try:
        return _dispatch(args)
    except MarkovianityError as e:
        logging.error("Markovianity violated: %s", e)
        return int(ExitCode.MARKOVIANITY)
    except ResonanceError as e:
        logging.error("Resonance condition violated: %s", e)
        return int(ExitCode.RESONANCE)
    except FileNotFoundError as e:
        logging.error("%s", e)
        return int(ExitCode.SCHEMA)
    except ValueError as e:
        logging.error("Invalid config: %s", e)
        return int(ExitCode.SCHEMA)
    except ZenoError as e:
        logging.error("%s", e)
        return int(ExitCode.RUNTIME)
    except Exception:
        logging.exception("Unexpected error")
        return int(ExitCode.RUNTIME)
