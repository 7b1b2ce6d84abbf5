"""Closed-form stationary bump profiles (quadratic pressure law only).

With gamma = 2 the stationary problem reduces, on the support of rho, to a
linear Helmholtz equation for phi with

    tau = (a chi / (2 epsilon) - b) / D  > 0

and rho = chi phi/(2 epsilon) + K; off the support phi satisfies the decay
equation D phi'' = b phi.  Matching phi, phi' and phi'' at the free boundary
gives one transcendental interface equation per geometry, solved here by
bracketed bisection, and the constant K is fixed by the prescribed mass.

Two geometries are provided:

* lateral bump: support [0, xbar] against the left wall, with
  sqrt(b/(tau D)) tan(sqrt(tau) xbar) = tanh(sqrt(b/D)(xbar - L)),
  xbar in (pi/(2 sqrt(tau)), pi/sqrt(tau)), requiring L > pi/sqrt(tau);
* centered bump: support [xbar, L - xbar] symmetric about L/2, with
  tanh(sqrt(b/D) xbar) = sqrt(b/(tau D)) tan(sqrt(tau)(xbar - L/2)),
  xbar in (L/2 - pi/sqrt(tau), L/2 - pi/(2 sqrt(tau))), requiring
  L > 2 pi/sqrt(tau).

The same formula family with a shifted interface point (no longer a root of
the interface equation) is used to build zero-net-mass perturbations of the
lateral bump; such profiles report ``equilibrium=False``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import Grid, PhysicalParams, StateField, psi_inv

BISECTION_ITERATIONS = 200
ROOT_RESIDUAL_TOL = 1e-12
BRACKET_MARGIN_REL = 1e-9   # times pi/sqrt(tau), keeps tan() off its poles


class NoBumpSolutionError(ValueError):
    """No stationary bump exists for these parameters (tau <= 0 or L too short)."""


class UnsupportedExponentError(ValueError):
    """Closed-form profiles require gamma == 2."""


def _require_gamma2(params):
    if abs(params.gamma - 2.0) > 1e-12:
        raise UnsupportedExponentError(
            f"closed-form bump profiles require gamma == 2, got {params.gamma}")


def compute_tau(params):
    """tau = (a chi/(2 epsilon) - b)/D; gamma must equal 2."""
    _require_gamma2(params)
    return (params.a * params.chi / (2.0 * params.epsilon) - params.b) / params.D


def bisect(f, lo, hi, iterations=BISECTION_ITERATIONS):
    """Plain bracketed bisection; requires a sign change on [lo, hi]."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0) == (fhi < 0):
        raise NoBumpSolutionError("interface equation has no sign change in bracket")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BumpProfile:
    """Analytic stationary profile: rho(x), phi(x) and their derivatives.

    ``xbar``/``ybar`` bound the support (ybar == xbar for the lateral bump,
    where the support is [0, xbar]).  ``equilibrium`` is False for shifted-
    interface perturbation profiles, which reuse the same formulas but do not
    satisfy the interface equation (phi' then has a kink at xbar).
    """

    kind: str                 # "lateral" | "centered"
    params: PhysicalParams
    mass: float
    tau: float
    xbar: float
    ybar: float
    K: float
    equilibrium: bool = True

    # -- piecewise ingredients ------------------------------------------------
    def _coeffs(self):
        p = self.params
        st = math.sqrt(self.tau)
        sb = math.sqrt(p.b / p.D)
        off = -p.a * self.K / (self.tau * p.D)
        amp_out = -2.0 * p.epsilon * self.K / p.chi
        if self.kind == "lateral":
            c1 = 2.0 * p.epsilon * p.b * self.K / (self.tau * p.chi * p.D) \
                / math.cos(st * self.xbar)
            return st, sb, c1, off, amp_out
        c1 = 2.0 * p.epsilon * p.b * self.K / (self.tau * p.chi * p.D) \
            / math.cos(st * (self.xbar - p.L / 2.0))
        return st, sb, c1, off, amp_out

    def support(self):
        if self.kind == "lateral":
            return 0.0, self.xbar
        return self.xbar, self.ybar

    def phi_bump(self, x):
        """The oscillatory piece, valid on the support."""
        x = np.asarray(x, dtype=float)
        st, _, c1, off, _ = self._coeffs()
        shift = 0.0 if self.kind == "lateral" else self.params.L / 2.0
        return c1 * np.cos(st * (x - shift)) + off

    def phi_vacuum(self, x, side="right"):
        """The decaying piece, valid off the support (side: left|right)."""
        x = np.asarray(x, dtype=float)
        p = self.params
        _, sb, _, _, amp = self._coeffs()
        if self.kind == "lateral":
            return amp * np.cosh(sb * (x - p.L)) / math.cosh(sb * (self.xbar - p.L))
        if side == "left":
            return amp * np.cosh(sb * x) / math.cosh(sb * self.xbar)
        return amp * np.cosh(sb * (x - p.L)) / math.cosh(sb * self.xbar)

    def _regions(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support()
        inside = (x >= lo) & (x <= hi)
        left = x < lo
        return x, inside, left

    def phi(self, x):
        x, inside, left = self._regions(x)
        out = np.where(left, self.phi_vacuum(x, "left"), self.phi_vacuum(x, "right"))
        return np.where(inside, self.phi_bump(x), out)

    def rho(self, x):
        """chi phi/(2 epsilon) + K on the support, 0 elsewhere (clipped at 0)."""
        x, inside, _ = self._regions(x)
        p = self.params
        val = p.chi * self.phi_bump(x) / (2.0 * p.epsilon) + self.K
        return np.where(inside, np.maximum(val, 0.0), 0.0)

    def phi_x(self, x):
        x, inside, left = self._regions(x)
        p = self.params
        st, sb, c1, _, amp = self._coeffs()
        shift = 0.0 if self.kind == "lateral" else p.L / 2.0
        d_bump = -c1 * st * np.sin(st * (x - shift))
        if self.kind == "lateral":
            d_out = amp * sb * np.sinh(sb * (x - p.L)) / math.cosh(sb * (self.xbar - p.L))
            d_left = d_out
        else:
            d_left = amp * sb * np.sinh(sb * x) / math.cosh(sb * self.xbar)
            d_out = amp * sb * np.sinh(sb * (x - p.L)) / math.cosh(sb * self.xbar)
        outv = np.where(left, d_left, d_out)
        return np.where(inside, d_bump, outv)

    def phi_xx(self, x):
        x, inside, left = self._regions(x)
        p = self.params
        st, sb, c1, _, amp = self._coeffs()
        shift = 0.0 if self.kind == "lateral" else p.L / 2.0
        d2_bump = -c1 * self.tau * np.cos(st * (x - shift))
        if self.kind == "lateral":
            d2_out = amp * (p.b / p.D) * np.cosh(sb * (x - p.L)) \
                / math.cosh(sb * (self.xbar - p.L))
            d2_left = d2_out
        else:
            d2_left = amp * (p.b / p.D) * np.cosh(sb * x) / math.cosh(sb * self.xbar)
            d2_out = amp * (p.b / p.D) * np.cosh(sb * (x - p.L)) / math.cosh(sb * self.xbar)
        outv = np.where(left, d2_left, d2_out)
        return np.where(inside, d2_bump, outv)

    def rho_integral(self, x0, x1):
        """Exact integral of rho over [x0, x1] (antiderivative of the cosine)."""
        lo, hi = self.support()
        u = min(max(x0, lo), hi)
        v = min(max(x1, lo), hi)
        if v <= u:
            return 0.0
        p = self.params
        st, _, c1, off, _ = self._coeffs()
        shift = 0.0 if self.kind == "lateral" else p.L / 2.0
        amp = p.chi * c1 / (2.0 * p.epsilon)
        const = p.chi * off / (2.0 * p.epsilon) + self.K
        return amp / st * (math.sin(st * (v - shift)) - math.sin(st * (u - shift))) \
            + const * (v - u)


def _lateral_profile(params, mass, xbar, equilibrium):
    tau = compute_tau(params)
    st = math.sqrt(tau)
    K = (params.D / params.b) * mass * tau ** 1.5 \
        / (math.tan(st * xbar) - st * xbar)
    return BumpProfile(kind="lateral", params=params, mass=mass, tau=tau,
                       xbar=xbar, ybar=xbar, K=K, equilibrium=equilibrium)


def lateral_bump(params, mass):
    """Stationary bump against the left wall with total mass ``mass``."""
    _require_gamma2(params)
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    tau = compute_tau(params)
    if tau <= 0:
        raise NoBumpSolutionError(
            f"tau = {tau:.6g} <= 0: chemotaxis too weak for a bump")
    st = math.sqrt(tau)
    sb = math.sqrt(params.b / params.D)
    if params.L <= math.pi / st:
        raise NoBumpSolutionError(
            f"domain too short for a lateral bump: L = {params.L:.6g} "
            f"<= pi/sqrt(tau) = {math.pi / st:.6g}")

    def f(x):
        return math.sqrt(params.b / (tau * params.D)) * math.tan(st * x) \
            - math.tanh(sb * (x - params.L))

    margin = BRACKET_MARGIN_REL * math.pi / st
    xbar = bisect(f, math.pi / (2.0 * st) + margin, math.pi / st - margin)
    if abs(f(xbar)) > ROOT_RESIDUAL_TOL:
        raise NoBumpSolutionError(
            f"interface equation residual {abs(f(xbar)):.3e} > {ROOT_RESIDUAL_TOL}")
    return _lateral_profile(params, mass, xbar, equilibrium=True)


def centered_bump(params, mass):
    """Stationary bump symmetric about L/2 with total mass ``mass``."""
    _require_gamma2(params)
    if mass <= 0:
        raise ValueError(f"mass must be positive, got {mass}")
    tau = compute_tau(params)
    if tau <= 0:
        raise NoBumpSolutionError(
            f"tau = {tau:.6g} <= 0: chemotaxis too weak for a bump")
    st = math.sqrt(tau)
    sb = math.sqrt(params.b / params.D)
    L = params.L
    if L <= 2.0 * math.pi / st:
        raise NoBumpSolutionError(
            f"domain too short for a centered bump: L = {L:.6g} "
            f"<= 2 pi/sqrt(tau) = {2.0 * math.pi / st:.6g}")

    def g(x):
        return math.tanh(sb * x) \
            - math.sqrt(params.b / (tau * params.D)) * math.tan(st * (x - L / 2.0))

    margin = BRACKET_MARGIN_REL * math.pi / st
    xbar = bisect(g, L / 2.0 - math.pi / st + margin,
                  L / 2.0 - math.pi / (2.0 * st) - margin)
    if abs(g(xbar)) > ROOT_RESIDUAL_TOL:
        raise NoBumpSolutionError(
            f"interface equation residual {abs(g(xbar)):.3e} > {ROOT_RESIDUAL_TOL}")
    K = mass * tau / ((2.0 * xbar - L) * (params.b / params.D)
                      - 2.0 * sb * math.tanh(sb * xbar))
    return BumpProfile(kind="centered", params=params, mass=mass, tau=tau,
                       xbar=xbar, ybar=L - xbar, K=K, equilibrium=True)


def shifted_lateral_bump(params, mass, delta):
    """Lateral-bump formulas with the interface moved to xbar + delta.

    K is recomputed from the same mass integral, so the perturbation carries
    zero net mass.  The result is not an equilibrium (phi' kinks at the
    shifted interface).  Raises if the shift leaves the admissible interval
    or makes the density dip negative.
    """
    base = lateral_bump(params, mass)
    xstar = base.xbar + delta
    st = math.sqrt(base.tau)
    margin = BRACKET_MARGIN_REL * math.pi / st
    if not (math.pi / (2.0 * st) + margin < xstar < min(math.pi / st, params.L) - margin):
        raise ValueError(
            f"interface shift delta = {delta} leaves the admissible interval")
    prof = _lateral_profile(params, mass, xstar, equilibrium=False)
    xs = np.linspace(0.0, xstar, 1001)
    p = params
    vals = p.chi * prof.phi_bump(xs) / (2.0 * p.epsilon) + prof.K
    if vals.min() < -1e-12 * max(1.0, abs(prof.K)):
        raise ValueError(
            f"interface shift delta = {delta} makes the density negative")
    return prof


GAUSS3_NODES = np.array([-math.sqrt(3.0 / 5.0), 0.0, math.sqrt(3.0 / 5.0)])
GAUSS3_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


def sample_profile(profile, grid, mode="center"):
    """StateField from an analytic profile: point values or 3-point Gauss means."""
    x = grid.centers
    if mode == "center":
        rho = profile.rho(x)
        phi = profile.phi(x)
    elif mode == "gauss3":
        rho = np.zeros_like(x)
        phi = np.zeros_like(x)
        for node, w in zip(GAUSS3_NODES, GAUSS3_WEIGHTS):
            xs = x + 0.5 * grid.dx * node
            rho += w * profile.rho(xs)
            phi += w * profile.phi(xs)
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    return StateField(grid, rho, np.zeros_like(x), phi)


def project_equilibrium(profile, grid):
    """Discrete steady state: phi at cell centres, rho rebuilt through the
    enthalpy balance Psi(rho_i) = [chi phi_i + 2 epsilon K]_+ (gamma = 2).

    The resulting field satisfies the discrete steady-state relation the
    well-balanced scheme preserves exactly, including across the vacuum
    boundary (the positive part switches the bump off where chi phi + 2 eps K
    drops below zero).
    """
    p = profile.params
    phi = profile.phi(grid.centers)
    bracket = np.maximum(p.chi * phi + 2.0 * p.epsilon * profile.K, 0.0)
    rho = psi_inv(bracket, p)
    return StateField(grid, rho, np.zeros_like(rho), phi)
