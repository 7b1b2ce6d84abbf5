"""Approximate Riemann solvers for the homogeneous pressure system.

The flux pair is F(U) = (rho u, rho u^2 + P(rho)) with U = (rho, q).
Three interchangeable solvers are provided:

* ``suliciu_flux`` -- relaxation solver with speed corrections sized for
  positivity (the production default),
* ``hll_flux``     -- two-wave HLL with Davis speed estimates,
* ``roe_flux``     -- linearized solver with Harten entropy fix; kept as a
  diagnostic baseline because it loses positivity near vacuum: the
  intermediate density of its linearized fan can go negative at strong
  divergent jumps (counted per face in ``neg_stars``), and a genuinely
  vacuum input falls back to HLL (counted in ``roe_fallbacks``).

All solvers accept scalar or array-valued states (faces are vectorized) and
return the numerical flux together with ``sigma``, a bound on the signal
speeds used by the CFL condition.  ``sigma`` is always >= |u_L|, |u_R| for
non-vacuum inputs, and at a one-sided vacuum it covers the front speed
|u| + 2 a(rho)/(gamma-1) of the expansion into vacuum.
"""

from dataclasses import dataclass

import numpy as np

from .model import (NEGATIVE_DENSITY_TOL, VACUUM_THRESHOLD, pressure,
                    sound_speed, velocity)


@dataclass
class ConsState:
    """Conservative state (rho, q = rho*u); fields may be scalars or arrays."""

    rho: np.ndarray
    q: np.ndarray

    def velocity(self):
        return velocity(self.rho, self.q)


@dataclass
class FluxResult:
    """Numerical flux at an interface plus a signal-speed bound for CFL."""

    f_rho: np.ndarray
    f_q: np.ndarray
    sigma: np.ndarray
    roe_fallbacks: int = 0   # faces where Roe handed off to HLL (vacuum input)
    neg_stars: int = 0       # faces whose linearized intermediate density < 0

    def max_sigma(self):
        return float(np.max(self.sigma)) if np.size(self.sigma) else 0.0


def _unpack(left, right):
    rl = np.asarray(left.rho, dtype=float)
    ql = np.asarray(left.q, dtype=float)
    rr = np.asarray(right.rho, dtype=float)
    qr = np.asarray(right.q, dtype=float)
    if min(rl.min(initial=0.0), rr.min(initial=0.0)) < 0:
        raise ValueError("riemann solver: input densities must be non-negative")
    return np.broadcast_arrays(rl, ql, rr, qr)


def _physical_flux(rho, q, u, p):
    return q, q * u + p


def _vacuum_front(u, a, gamma):
    """Speed bound for an expansion into vacuum.

    The front itself travels at |u| + 2a/(gamma-1); for gamma > 3 that is
    slower than the inward characteristic |u| + a, so take the max of both.
    """
    return np.abs(u) + np.maximum(2.0 / (gamma - 1.0), 1.0) * a


def _apply_common_masks(rl, ql, rr, qr, ul, ur, al, ar, pl, pr, gamma,
                        f_rho, f_q, sigma):
    """Equal-state consistency, one-sided-vacuum sigma, both-vacuum zero."""
    vac_l = rl < VACUUM_THRESHOLD
    vac_r = rr < VACUUM_THRESHOLD

    eq = (rl == rr) & (ql == qr)
    if np.any(eq):
        f_rho = np.where(eq, ql, f_rho)
        f_q = np.where(eq, ql * ul + pl, f_q)
        sigma = np.where(eq, np.abs(ul) + al, sigma)

    only_r = vac_r & ~vac_l
    if np.any(only_r):
        sigma = np.where(only_r, np.maximum(sigma, _vacuum_front(ul, al, gamma)),
                         sigma)
    only_l = vac_l & ~vac_r
    if np.any(only_l):
        sigma = np.where(only_l, np.maximum(sigma, _vacuum_front(ur, ar, gamma)),
                         sigma)

    both = vac_l & vac_r
    if np.any(both):
        f_rho = np.where(both, 0.0, f_rho)
        f_q = np.where(both, 0.0, f_q)
        sigma = np.where(both, 0.0, sigma)
    return f_rho, f_q, sigma


def suliciu_flux(left, right, params):
    """Relaxation flux with two speeds c_L, c_R per unit mass.

    The speeds start from the sound-speed lower bounds c/rho >= a(rho) and
    are enlarged by positive-part corrections with factor (gamma+1)/2,
    iterated once: the side facing the higher pressure corrects first against
    the other side's uncorrected rho*a, the other side then corrects against
    that enlarged speed.  Ordering by the pressure jump keeps the flux
    mirror-symmetric while the corrections keep the intermediate densities of
    the relaxation fan non-negative.
    """
    rl, ql, rr, qr = _unpack(left, right)
    g = params.gamma
    ul = velocity(rl, ql)
    ur = velocity(rr, qr)
    pl = pressure(rl, params)
    pr = pressure(rr, params)
    al = sound_speed(rl, params)
    ar = sound_speed(rr, params)

    k = 0.5 * (g + 1.0)
    du = ul - ur
    dp = pr - pl

    def corr(jump, c_opp):
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = np.where(c_opp > 0, jump / np.where(c_opp > 0, c_opp, 1.0),
                           -np.inf)
        return k * np.maximum(arg + du, 0.0)

    cl0 = rl * al
    cr0 = rr * ar
    cl_hi = rl * (al + corr(dp, cr0))       # pr >= pl: c_L corrects first
    cr_hi = rr * (ar + corr(-dp, cl_hi))
    cr_lo = rr * (ar + corr(-dp, cl0))      # pr <  pl: c_R corrects first
    cl_lo = rl * (al + corr(dp, cr_lo))
    right_higher = dp >= 0.0
    cl = np.where(right_higher, cl_hi, cl_lo)
    cr = np.where(right_higher, cr_hi, cr_lo)

    denom = cl + cr
    safe = np.where(denom > 0, denom, 1.0)
    u_star = (cl * ul + cr * ur + pl - pr) / safe
    pi_star = (cr * pl + cl * pr - cl * cr * (ur - ul)) / safe
    pi_star = np.maximum(pi_star, 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        inv_l = np.where(rl > 0, 1.0 / np.where(rl > 0, rl, 1.0), np.inf) \
            + (cr * (ur - ul) + pl - pr) / np.where(cl > 0, cl * safe, 1.0)
        inv_r = np.where(rr > 0, 1.0 / np.where(rr > 0, rr, 1.0), np.inf) \
            + (cl * (ur - ul) + pr - pl) / np.where(cr > 0, cr * safe, 1.0)
    # inv <= 0 would mean the speed corrections were too small; treat as vacuum
    rho_l_star = np.where((rl > 0) & (inv_l > 0), 1.0 / np.where(inv_l > 0, inv_l, 1.0), 0.0)
    rho_r_star = np.where((rr > 0) & (inv_r > 0), 1.0 / np.where(inv_r > 0, inv_r, 1.0), 0.0)

    lam_l = ul - np.where(rl > 0, cl / np.where(rl > 0, rl, 1.0), 0.0)
    lam_r = ur + np.where(rr > 0, cr / np.where(rr > 0, rr, 1.0), 0.0)

    # upwind through the three-wave fan: left state / left star / right star /
    # right state as lam_l, u_star, lam_r successively change sign
    rho_fan = np.where(u_star > 0, rho_l_star, rho_r_star)
    in_fan = (u_star > 0) | (lam_r > 0)
    fan_rho = rho_fan * u_star
    fan_q = fan_rho * u_star + pi_star
    f_rho = np.where(lam_l > 0, ql, np.where(in_fan, fan_rho, qr))
    f_q = np.where(lam_l > 0, ql * ul + pl,
                   np.where(in_fan, fan_q, qr * ur + pr))

    sigma = np.maximum.reduce([np.abs(lam_l), np.abs(lam_r), np.abs(ul), np.abs(ur)])
    f_rho, f_q, sigma = _apply_common_masks(rl, ql, rr, qr, ul, ur, al, ar,
                                            pl, pr, g, f_rho, f_q, sigma)
    return FluxResult(f_rho, f_q, sigma)


def hll_flux(left, right, params):
    """HLL flux with Davis speed estimates S_L, S_R.

    S_L = min(u_L - a_L, u_R - a_R), S_R = max(u_L + a_L, u_R + a_R); at a
    one-sided vacuum the empty side's estimate is replaced by the expansion
    front of the non-vacuum state.
    """
    rl, ql, rr, qr = _unpack(left, right)
    g = params.gamma
    ul = velocity(rl, ql)
    ur = velocity(rr, qr)
    pl = pressure(rl, params)
    pr = pressure(rr, params)
    al = sound_speed(rl, params)
    ar = sound_speed(rr, params)

    s_l = np.minimum(ul - al, ur - ar)
    s_r = np.maximum(ul + al, ur + ar)
    vac_l = rl < VACUUM_THRESHOLD
    vac_r = rr < VACUUM_THRESHOLD
    if np.any(vac_r & ~vac_l):
        s_r = np.where(vac_r & ~vac_l, np.maximum(s_r, ul + _vacuum_front(0.0 * ul, al, g)), s_r)
    if np.any(vac_l & ~vac_r):
        s_l = np.where(vac_l & ~vac_r, np.minimum(s_l, ur - _vacuum_front(0.0 * ur, ar, g)), s_l)

    fl_rho, fl_q = _physical_flux(rl, ql, ul, pl)
    fr_rho, fr_q = _physical_flux(rr, qr, ur, pr)
    spread = np.where(s_r > s_l, s_r - s_l, 1.0)
    mid_rho = (s_r * fl_rho - s_l * fr_rho + s_l * s_r * (rr - rl)) / spread
    mid_q = (s_r * fl_q - s_l * fr_q + s_l * s_r * (qr - ql)) / spread

    f_rho = np.where(s_l >= 0, fl_rho, np.where(s_r <= 0, fr_rho, mid_rho))
    f_q = np.where(s_l >= 0, fl_q, np.where(s_r <= 0, fr_q, mid_q))

    sigma = np.maximum(np.abs(s_l), np.abs(s_r))
    f_rho, f_q, sigma = _apply_common_masks(rl, ql, rr, qr, ul, ur, al, ar,
                                            pl, pr, g, f_rho, f_q, sigma)
    return FluxResult(f_rho, f_q, sigma)


def roe_flux(left, right, params):
    """Roe's linearized flux with the Harten entropy fix (delta = 0.05 a_hat).

    The Roe velocity is the sqrt(rho)-weighted average; the linearized sound
    speed a_hat^2 = (P_R - P_L)/(rho_R - rho_L) is the secant slope, which
    makes the linearization jump-consistent: A_hat (U_R - U_L) = F_R - F_L.
    (For gamma = 2 this equals the sound speed at the mean density.)

    The fan between the two waves carries the intermediate density
    rho_L + alpha_1; at a strong divergent jump it can be negative -- the
    linearization has left the physical state space, and nothing in the flux
    stops the update from draining a cell below zero.  Such faces are counted
    in ``neg_stars`` and the flux is used unchanged.  Genuinely vacuum inputs
    (either side below the cutoff) fall back to HLL on those faces, counted
    in ``roe_fallbacks``.
    """
    rl, ql, rr, qr = _unpack(left, right)
    g = params.gamma
    ul = velocity(rl, ql)
    ur = velocity(rr, qr)
    pl = pressure(rl, params)
    pr = pressure(rr, params)
    al = sound_speed(rl, params)
    ar = sound_speed(rr, params)

    vac = (rl < VACUUM_THRESHOLD) | (rr < VACUUM_THRESHOLD)
    n_fallback = int(np.count_nonzero(vac))

    sl = np.sqrt(rl)
    sr = np.sqrt(rr)
    wsum = np.where(sl + sr > 0, sl + sr, 1.0)
    u_hat = (sl * ul + sr * ur) / wsum

    d_rho = rr - rl
    d_q = qr - ql
    # secant slope of P; fall back to the mean-density tangent where the
    # densities (nearly) coincide and the quotient would lose all precision
    a_mean = sound_speed(0.5 * (rl + rr), params)
    tiny = np.abs(d_rho) <= 1e-8 * (rl + rr)
    denom = np.where(tiny, 1.0, d_rho)
    a_hat = np.sqrt(np.where(tiny, a_mean ** 2, np.maximum((pr - pl) / denom, 0.0)))
    a_safe = np.where(a_hat > 0, a_hat, 1.0)

    lam1 = u_hat - a_hat
    lam2 = u_hat + a_hat
    alpha1 = ((u_hat + a_hat) * d_rho - d_q) / (2.0 * a_safe)
    alpha2 = (d_q - (u_hat - a_hat) * d_rho) / (2.0 * a_safe)

    rho_star = rl + alpha1
    neg_stars = int(np.count_nonzero(~vac & (a_hat > 0)
                                     & (rho_star < NEGATIVE_DENSITY_TOL)))

    delta = 0.05 * a_hat
    abs1 = _harten(lam1, delta)
    abs2 = _harten(lam2, delta)

    fl_rho, fl_q = _physical_flux(rl, ql, ul, pl)
    fr_rho, fr_q = _physical_flux(rr, qr, ur, pr)
    f_rho = 0.5 * (fl_rho + fr_rho) - 0.5 * (abs1 * alpha1 + abs2 * alpha2)
    f_q = 0.5 * (fl_q + fr_q) - 0.5 * (abs1 * alpha1 * lam1 + abs2 * alpha2 * lam2)

    sigma = np.maximum.reduce([np.abs(lam1), np.abs(lam2), np.abs(ul), np.abs(ur)])

    if n_fallback:
        hll = hll_flux(left, right, params)
        f_rho = np.where(vac, hll.f_rho, f_rho)
        f_q = np.where(vac, hll.f_q, f_q)
        sigma = np.where(vac, hll.sigma, sigma)

    f_rho, f_q, sigma = _apply_common_masks(rl, ql, rr, qr, ul, ur, al, ar,
                                            pl, pr, g, f_rho, f_q, sigma)
    return FluxResult(f_rho, f_q, sigma, roe_fallbacks=n_fallback,
                      neg_stars=neg_stars)


def _harten(lam, delta):
    """|lam| smoothed below delta: (lam^2/delta + delta)/2."""
    a = np.abs(lam)
    safe = np.where(delta > 0, delta, 1.0)
    return np.where(a < delta, 0.5 * (lam * lam / safe + delta), a)


SOLVERS = {
    "suliciu": suliciu_flux,
    "hll": hll_flux,
    "roe": roe_flux,
}


def get_solver(name):
    try:
        return SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown solver {name!r}; choose from {sorted(SOLVERS)}")
