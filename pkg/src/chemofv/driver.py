"""Coupled time integration and run-level diagnostics.

One coupled step is a Lie splitting: the hyperbolic (rho, q) update at the
CFL time step dt = cfl_factor * dx / sigma_max (capped by dt_max), followed by
one Crank-Nicolson update of phi driven by the post-step density.  The order
and the density seen by the phi equation are both configurable
(``scheme.coupling``, ``scheme.phi_source``); the defaults match the scheme
whose equilibria the well-balanced reconstruction preserves.

Runs stop at ``t_final``, earlier if the density residue max|drho|/dt stays
below ``residue_tol`` for ``steady_window`` consecutive output rows (steady
state), or immediately on a rejected step / non-finite state (numerical
failure, recorded in ``stop_reason``).
"""

import math
import time
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .model import Grid, StateField
from .parabolic import parabolic_step
from .riemann import get_solver
from .scheme import (StepRejectedError, StepStats, centered_fv_step,
                     finite_difference_step, hyperbolic_step, max_speed,
                     prepare_hyperbolic)
from .steady import centered_bump, lateral_bump

BUMP_REL_FLOOR = 0.25
BUMP_MIN_CELLS = 3
INTERFACE_REL_THRESHOLD = 1e-6


def cfl_dt(field, config, solver_fn=None):
    """Time step from the current signal-speed bound, capped by dt_max."""
    if solver_fn is None:
        solver_fn = get_solver(config.solver)
    params = config.params
    if config.scheme == "well_balanced":
        lam = max_speed(field, solver_fn, params, reconstructed=True,
                        friction_dx_factor=config.friction_dx_factor)
    elif config.scheme == "centered_fv":
        lam = max_speed(field, solver_fn, params, reconstructed=False)
    else:
        lam = max_speed(field, None, params)
    if lam <= 0.0:
        return config.dt_max
    return min(config.cfl_factor * field.grid.dx / lam, config.dt_max)


def advance(field, dt, config, solver_fn, stats, prepared=None):
    """One coupled step of size dt; raises StepRejectedError on lost positivity.

    ``prepared`` forwards a (faces, flux) pair from ``prepare_hyperbolic`` on
    ``field`` itself; it is only sound when the hyperbolic update runs first.
    """
    params = config.params
    dx = field.grid.dx
    if prepared is not None and config.coupling != "hyperbolic_first":
        raise ValueError("prepared fluxes require hyperbolic_first coupling")

    def hyper(f):
        if config.scheme == "well_balanced":
            on_neg = "keep" if config.solver == "roe" else "raise"
            return hyperbolic_step(f, dt, solver_fn, params,
                                   friction_dx_factor=config.friction_dx_factor,
                                   on_negative=on_neg, stats=stats,
                                   prepared=prepared)
        if config.scheme == "centered_fv":
            return centered_fv_step(f, dt, solver_fn, params, stats=stats)
        return finite_difference_step(f, dt, params, stats=stats)

    if config.coupling == "hyperbolic_first":
        mid = hyper(field)
        if config.phi_source == "average":
            rho_src = 0.5 * (field.rho + mid.rho)
        else:
            rho_src = mid.rho
        phi = parabolic_step(mid.phi, np.maximum(rho_src, 0.0), dt, dx, params)
        return StateField(field.grid, mid.rho, mid.q, phi)

    # parabolic first: phi sees the pre-step density
    phi = parabolic_step(field.phi, np.maximum(field.rho, 0.0), dt, dx, params)
    return hyper(StateField(field.grid, field.rho, field.q, phi))


def residues(old, new, dt):
    """Per-step stationarity measures max|drho|/dt and max|dq|/dt."""
    res_rho = float(np.max(np.abs(new.rho - old.rho))) / dt
    res_q = float(np.max(np.abs(new.q - old.q))) / dt
    return res_rho, res_q


def count_bumps(rho, rel_floor=BUMP_REL_FLOOR, min_cells=BUMP_MIN_CELLS):
    """Number of separated density mounds: maximal runs of at least
    min_cells cells with rho > rel_floor * max(rho).  The floor is
    deliberately coarse so that faint halos shed during coarsening, and
    saddles that have not yet drained to vacuum, neither bridge two mounds
    into one nor get counted as mounds of their own.  An all-vacuum field
    has zero bumps."""
    rho = np.asarray(rho, dtype=float)
    peak = float(rho.max(initial=0.0))
    if peak <= 0.0:
        return 0
    above = rho > rel_floor * peak
    padded = np.concatenate(([False], above, [False])).astype(int)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return int(np.count_nonzero(ends - starts >= min_cells))


def interface_location(rho, grid, rel_threshold=INTERFACE_REL_THRESHOLD):
    """Right edge of the leftmost region of nonvanishing density, by linear
    interpolation between the cell centres straddling the threshold
    crossing.  The threshold is tiny (it marks the support edge, unlike the
    coarse mound floor used by count_bumps).  Returns L if the support
    reaches the right wall and nan if the field is all vacuum."""
    rho = np.asarray(rho, dtype=float)
    peak = float(rho.max(initial=0.0))
    if peak <= 0.0:
        return math.nan
    thr = rel_threshold * peak
    above = rho > thr
    idx = np.flatnonzero(above)
    if idx.size == 0:
        return math.nan
    first = idx[0]
    after = np.flatnonzero(~above[first:])
    if after.size == 0:
        return grid.length
    j = first + after[0] - 1   # last above-threshold cell of the leftmost bump
    x = grid.centers
    frac = (rho[j] - thr) / (rho[j] - rho[j + 1])
    return float(x[j] + frac * grid.dx)


class ErrorNorms:
    __slots__ = ("l1", "l2", "linf")

    def __init__(self, l1, l2, linf):
        self.l1, self.l2, self.linf = l1, l2, linf


def error_norms(values, reference, dx):
    """Discrete L1/L2/Linf norms of values - reference on a uniform grid."""
    diff = np.abs(np.asarray(values, dtype=float) - np.asarray(reference, dtype=float))
    return ErrorNorms(l1=float(diff.sum() * dx),
                      l2=float(math.sqrt((diff ** 2).sum() * dx)),
                      linf=float(diff.max(initial=0.0)))


def restrict(values, factor):
    """Cell-average restriction from a grid refined by an integer factor."""
    values = np.asarray(values, dtype=float)
    if factor < 1 or values.size % factor:
        raise ValueError(
            f"cannot restrict {values.size} fine cells by a factor of {factor}")
    return values.reshape(-1, factor).mean(axis=1)


@dataclass
class Diagnostics:
    """Output-cadence time series; errors are nan when no reference is set."""

    t: list = dataclass_field(default_factory=list)
    mass: list = dataclass_field(default_factory=list)
    res_rho: list = dataclass_field(default_factory=list)
    res_q: list = dataclass_field(default_factory=list)
    min_rho: list = dataclass_field(default_factory=list)
    l2_err: list = dataclass_field(default_factory=list)
    linf_err: list = dataclass_field(default_factory=list)
    bumps: list = dataclass_field(default_factory=list)
    neg_events: list = dataclass_field(default_factory=list)

    COLUMNS = ("t", "mass", "res_rho", "res_q", "min_rho", "l2_err",
               "linf_err", "bumps", "neg_events")

    def record(self, t, field, res_rho, res_q, stats, reference_rho):
        self.t.append(t)
        self.mass.append(field.mass())
        self.res_rho.append(res_rho)
        self.res_q.append(res_q)
        self.min_rho.append(float(field.rho.min()))
        if reference_rho is None:
            self.l2_err.append(math.nan)
            self.linf_err.append(math.nan)
        else:
            err = error_norms(field.rho, reference_rho, field.grid.dx)
            self.l2_err.append(err.l2)
            self.linf_err.append(err.linf)
        self.bumps.append(count_bumps(field.rho))
        self.neg_events.append(stats.neg_events)

    def __len__(self):
        return len(self.t)

    def as_arrays(self):
        return {name: np.asarray(getattr(self, name)) for name in self.COLUMNS}


@dataclass
class RunResult:
    config: object
    grid: Grid
    final: StateField
    diagnostics: Diagnostics
    stop_reason: str         # time_reached | steady_state | step_rejected | numerical_failure
    failure_detail: str
    wall_time: float
    n_steps: int
    snapshot_times: list
    snapshots: list
    stats: StepStats
    reference_rho: object    # ndarray or None

    @property
    def final_time(self):
        return self.snapshot_times[-1] if self.snapshot_times else 0.0

    @property
    def failed(self):
        return self.stop_reason in ("step_rejected", "numerical_failure")


def reference_density(config, grid, mass):
    """Analytic stationary density sampled at cell centres, or None."""
    if config.reference == "none":
        return None
    builder = lateral_bump if config.reference == "lateral" else centered_bump
    profile = builder(config.params, mass)
    return profile.rho(grid.centers)


def run(config, initial=None):
    """Integrate a configured run to completion and collect diagnostics.

    ``initial`` overrides the configured initial data with an explicit
    StateField on the matching grid (used by tests and convergence studies).
    """
    from .presets import initial_data   # deferred: presets builds on driver-side types

    params = config.params
    grid = Grid(config.n_cells, params.L)
    if initial is None:
        field = initial_data(config, grid)
    else:
        if initial.grid.n_cells != grid.n_cells or initial.grid.length != grid.length:
            raise ValueError("initial field grid does not match the configuration")
        field = initial.copy()

    solver_fn = get_solver(config.solver)
    stats = StepStats()
    ref_rho = reference_density(config, grid, field.mass())

    diag = Diagnostics()
    snapshots = [field.copy()]
    snapshot_times = [0.0]
    t = 0.0
    n_steps = 0
    streak = 0
    stop = "time_reached"
    detail = ""
    eps_t = 1e-12 * max(1.0, config.t_final)
    next_out = config.output_interval

    # the production path evaluates the fluxes once per step, reusing them
    # for both the CFL bound and the update; other schemes keep the two-pass
    # flow (their CFL bound is not evaluated on the states they advance)
    fused = (config.scheme == "well_balanced"
             and config.coupling == "hyperbolic_first")

    start = time.perf_counter()
    while t < config.t_final - eps_t:
        prepared = None
        if fused:
            prepared = prepare_hyperbolic(field, solver_fn, params,
                                          config.friction_dx_factor)
            lam = prepared[1].max_sigma()
            if lam <= 0.0:
                dt = config.dt_max
            else:
                dt = min(config.cfl_factor * grid.dx / lam, config.dt_max)
            dt = min(dt, config.t_final - t)
        else:
            dt = min(cfl_dt(field, config, solver_fn), config.t_final - t)
        try:
            new_field = advance(field, dt, config, solver_fn, stats,
                                prepared=prepared)
        except StepRejectedError as exc:
            stop = "step_rejected"
            detail = str(exc)
            break
        except (ValueError, FloatingPointError) as exc:
            # non-finite state or a singular phi solve mid-run
            stop = "numerical_failure"
            detail = str(exc)
            break
        res_rho, res_q = residues(field, new_field, dt)
        field = new_field
        t += dt
        n_steps += 1
        if t >= next_out - eps_t or t >= config.t_final - eps_t:
            diag.record(t, field, res_rho, res_q, stats, ref_rho)
            snapshots.append(field.copy())
            snapshot_times.append(t)
            while next_out <= t + eps_t:
                next_out += config.output_interval
            if res_rho < config.residue_tol:
                streak += 1
                if streak >= config.steady_window:
                    stop = "steady_state"
                    break
            else:
                streak = 0
    wall = time.perf_counter() - start

    if stop in ("step_rejected", "numerical_failure") and (
            not snapshot_times or snapshot_times[-1] < t - eps_t):
        # keep the last state that was still finite
        diag.record(t, field, math.inf, math.inf, stats, ref_rho)
        snapshots.append(field.copy())
        snapshot_times.append(t)

    return RunResult(config=config, grid=grid, final=field, diagnostics=diag,
                     stop_reason=stop, failure_detail=detail, wall_time=wall,
                     n_steps=n_steps, snapshot_times=snapshot_times,
                     snapshots=snapshots, stats=stats, reference_rho=ref_rho)
