"""Crank-Nicolson update for the chemoattractant equation.

phi_t = D phi_xx + a rho - b phi with zero-flux walls (mirror ghosts).
The production source is the frozen density handed in by the driver:

    (I - dt/2 A) phi^{new} = (I + dt/2 A) phi^{old} + dt a rho

with A = D Lap_h - b I and Lap_h the mirrored-ghost three-point Laplacian.
The left-hand matrix is strictly diagonally dominant (margin 1 + b dt/2),
so the Thomas solve below is well posed for every dt > 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded


@dataclass
class TridiagonalSystem:
    """Rows lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].

    All four arrays have length n; lower[0] and upper[n-1] are ignored.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        for name in ("lower", "diag", "upper", "rhs"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},), got {arr.shape}")
            setattr(self, name, arr)


def solve_tridiagonal(system):
    """Direct banded solve; raises LinAlgError on a singular matrix."""
    n = len(system.diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = system.upper[:-1]
    ab[1, :] = system.diag
    ab[2, :-1] = system.lower[1:]
    return solve_banded((1, 1), ab, system.rhs)


def crank_nicolson_system(phi, rho, dt, dx, params):
    """Assemble the Crank-Nicolson tridiagonal system for one phi update."""
    phi = np.asarray(phi, dtype=float)
    rho = np.asarray(rho, dtype=float)
    n = len(phi)
    lam = params.D * dt / dx ** 2
    half_b = 0.5 * params.b * dt

    diag = np.full(n, 1.0 + lam + half_b)
    lower = np.full(n, -0.5 * lam)
    upper = np.full(n, -0.5 * lam)
    # mirror ghosts: the wall rows see a single neighbour
    diag[0] = 1.0 + 0.5 * lam + half_b
    diag[-1] = 1.0 + 0.5 * lam + half_b
    lower[0] = 0.0
    upper[-1] = 0.0

    rhs = np.empty(n)
    rhs[1:-1] = (1.0 - lam - half_b) * phi[1:-1] \
        + 0.5 * lam * (phi[:-2] + phi[2:])
    if n >= 2:
        rhs[0] = (1.0 - 0.5 * lam - half_b) * phi[0] + 0.5 * lam * phi[1]
        rhs[-1] = (1.0 - 0.5 * lam - half_b) * phi[-1] + 0.5 * lam * phi[-2]
    else:
        rhs[0] = (1.0 - half_b) * phi[0]
        diag[0] = 1.0 + half_b
    rhs += dt * params.a * rho
    return TridiagonalSystem(lower, diag, upper, rhs)


def parabolic_step(phi, rho, dt, dx, params):
    """One Crank-Nicolson step of phi with the density frozen at ``rho``."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    system = crank_nicolson_system(phi, rho, dt, dx, params)
    return solve_tridiagonal(system)


def laplacian_neumann(phi, dx):
    """Three-point Laplacian with mirrored ghosts (discrete zero-flux walls)."""
    phi = np.asarray(phi, dtype=float)
    phi_e = np.concatenate(([phi[0]], phi, [phi[-1]]))
    return (phi_e[:-2] - 2.0 * phi + phi_e[2:]) / dx ** 2
