"""chemofv: 1D finite-volume solver for pressure-driven cell migration with
chemotaxis.

The model couples a density/momentum pair (isentropic-gas dynamics with
friction and a chemotactic drive) to a diffusing chemoattractant on a no-flux
interval.  The production scheme combines a stationary-state-preserving
interface reconstruction with positivity-preserving approximate Riemann
solvers and a Crank-Nicolson update of the chemoattractant, and reproduces
the closed-form stationary bump solutions available for quadratic pressure.
"""

from .config import ConfigError, RunConfig, apply_overrides, config_to_text, parse_config
from .driver import (RunResult, advance, cfl_dt, count_bumps, error_norms,
                     interface_location, residues, restrict, run)
from .model import (Grid, PhysicalParams, StateField, constant_state, pressure,
                    psi, psi_inv, sound_speed, velocity)
from .output import (ComparisonReport, OutputError, compare_fields,
                     compare_to_profile, read_final_snapshot, read_summary,
                     write_outputs)
from .parabolic import (TridiagonalSystem, crank_nicolson_system,
                        parabolic_step, solve_tridiagonal)
from .presets import PRESETS, ExperimentPreset, get_preset, initial_data, sweep_configs
from .riemann import ConsState, FluxResult, get_solver, hll_flux, roe_flux, suliciu_flux
from .scheme import (StepRejectedError, StepStats, centered_fv_step,
                     finite_difference_step, hyperbolic_step, max_speed,
                     reconstruct, source_pair)
from .steady import (BumpProfile, NoBumpSolutionError, UnsupportedExponentError,
                     centered_bump, compute_tau, lateral_bump, project_equilibrium,
                     sample_profile, shifted_lateral_bump)

__version__ = "0.1.0"

__all__ = [
    "BumpProfile", "ComparisonReport", "ConfigError", "ConsState",
    "ExperimentPreset", "FluxResult", "Grid", "NoBumpSolutionError",
    "OutputError", "PRESETS", "PhysicalParams", "RunConfig", "RunResult",
    "StateField", "StepRejectedError", "StepStats", "TridiagonalSystem",
    "UnsupportedExponentError", "advance", "apply_overrides",
    "centered_bump", "centered_fv_step", "cfl_dt", "compare_fields",
    "compare_to_profile", "compute_tau", "config_to_text", "constant_state",
    "count_bumps", "crank_nicolson_system", "error_norms",
    "finite_difference_step", "get_preset", "get_solver", "hll_flux",
    "hyperbolic_step", "initial_data", "interface_location", "lateral_bump",
    "max_speed", "parabolic_step", "parse_config", "pressure",
    "project_equilibrium", "psi", "psi_inv", "read_final_snapshot",
    "read_summary", "reconstruct", "residues", "restrict", "roe_flux", "run",
    "sample_profile", "shifted_lateral_bump", "solve_tridiagonal",
    "sound_speed", "source_pair", "suliciu_flux", "sweep_configs", "velocity",
    "write_outputs",
]
