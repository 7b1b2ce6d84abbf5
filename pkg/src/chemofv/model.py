"""Model data: physical parameters, uniform grid, cell-centred state.

The model is a 1D pressure-driven cell-migration system on [0, L] with
no-flux walls: a density rho, a momentum q = rho*u, and a chemoattractant
concentration phi,

    rho_t + (rho u)_x           = 0
    (rho u)_t + (rho u^2 + P)_x = -alpha rho u + chi rho phi_x
    phi_t                       = D phi_xx + a rho - b phi

with pressure law P(rho) = epsilon rho^gamma, gamma > 1.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# densities below this are treated as vacuum (velocity forced to zero)
VACUUM_THRESHOLD = 1e-13

# densities below this count as genuinely negative (not rounding residue)
NEGATIVE_DENSITY_TOL = -1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Constant coefficients of the model; all validated on construction."""

    epsilon: float = 1.0   # pressure scale, > 0
    gamma: float = 2.0     # pressure exponent, > 1
    alpha: float = 1.0     # linear friction, >= 0
    chi: float = 50.0      # chemotactic sensitivity, >= 0
    D: float = 1.0         # chemoattractant diffusivity, > 0
    a: float = 1.0         # chemoattractant production rate, >= 0
    b: float = 1.0         # chemoattractant decay rate, > 0
    L: float = 1.0         # domain length, > 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.chi < 0:
            raise ValueError(f"chi must be >= 0, got {self.chi}")
        if not self.D > 0:
            raise ValueError(f"D must be > 0, got {self.D}")
        if self.a < 0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"b must be > 0, got {self.b}")
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")


def pressure(rho, params):
    """P(rho) = epsilon rho^gamma. Negative densities are a domain error."""
    rho = np.asarray(rho, dtype=float)
    if rho.min(initial=0.0) < 0:
        raise ValueError("pressure: density must be non-negative")
    if params.gamma == 2.0:   # quadratic fast path: avoids the pow call
        return params.epsilon * rho * rho
    return params.epsilon * rho ** params.gamma


def sound_speed(rho, params):
    """a(rho) = sqrt(P'(rho)) = sqrt(epsilon gamma) rho^((gamma-1)/2)."""
    rho = np.asarray(rho, dtype=float)
    if rho.min(initial=0.0) < 0:
        raise ValueError("sound_speed: density must be non-negative")
    g = params.gamma
    if g == 2.0:
        return np.sqrt((2.0 * params.epsilon) * rho)
    return np.sqrt(params.epsilon * g) * rho ** (0.5 * (g - 1.0))


def psi(rho, params):
    """Enthalpy Psi(rho) = epsilon gamma/(gamma-1) rho^(gamma-1)."""
    rho = np.asarray(rho, dtype=float)
    if rho.min(initial=0.0) < 0:
        raise ValueError("psi: density must be non-negative")
    g = params.gamma
    if g == 2.0:   # linear in rho; identical to the general formula
        return (2.0 * params.epsilon) * rho
    return params.epsilon * g / (g - 1.0) * rho ** (g - 1.0)


def psi_inv(y, params):
    """Inverse enthalpy: rho = ((gamma-1) y / (epsilon gamma))^(1/(gamma-1)).

    Defined for y >= 0; psi_inv(0) == 0 exactly.
    """
    y = np.asarray(y, dtype=float)
    if y.min(initial=0.0) < 0:
        raise ValueError("psi_inv: argument must be non-negative")
    g = params.gamma
    if g == 2.0:
        return y / (2.0 * params.epsilon)
    return ((g - 1.0) * y / (params.epsilon * g)) ** (1.0 / (g - 1.0))


def velocity(rho, q):
    """u = q/rho with the vacuum cutoff: u = 0 wherever rho < VACUUM_THRESHOLD."""
    rho = np.asarray(rho, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.zeros(np.broadcast(rho, q).shape)
    np.divide(q, rho, out=out, where=rho >= VACUUM_THRESHOLD)
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred grid on [0, length] with n_cells cells."""

    n_cells: int
    length: float

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be >= 1, got {self.n_cells}")
        if not self.length > 0:
            raise ValueError(f"length must be > 0, got {self.length}")

    @property
    def dx(self):
        return self.length / self.n_cells

    @cached_property
    def centers(self):
        return (np.arange(self.n_cells) + 0.5) * self.dx

    @cached_property
    def edges(self):
        return np.arange(self.n_cells + 1) * self.dx


@dataclass
class StateField:
    """Cell averages of (rho, q, phi) on a grid.

    The well-balanced scheme maintains rho >= 0 and q == 0 on vacuum cells;
    the diagnostic baselines (Roe in particular) may violate rho >= 0, which
    is surfaced through the driver's negative-density counter rather than
    rejected here.
    """

    grid: Grid
    rho: np.ndarray
    q: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        n = self.grid.n_cells
        self.rho = np.ascontiguousarray(self.rho, dtype=float)
        self.q = np.ascontiguousarray(self.q, dtype=float)
        self.phi = np.ascontiguousarray(self.phi, dtype=float)
        for name in ("rho", "q", "phi"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},), got {arr.shape}")
            # a non-finite sum means a non-finite entry; a finite sum of
            # doubles can only come from finite entries (no overflow at
            # physically meaningful magnitudes), so the cheap check suffices
            if not math.isfinite(float(arr.sum())) \
                    and not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")

    def velocity(self):
        return velocity(self.rho, self.q)

    def mass(self):
        """Total discrete mass sum(rho_i) * dx."""
        return float(self.rho.sum() * self.grid.dx)

    def copy(self):
        return StateField(self.grid, self.rho.copy(), self.q.copy(), self.phi.copy())


def constant_state(grid, rho0, phi0=0.0, q0=0.0):
    """StateField with spatially constant values."""
    n = grid.n_cells
    return StateField(grid, np.full(n, float(rho0)), np.full(n, float(q0)),
                      np.full(n, float(phi0)))
