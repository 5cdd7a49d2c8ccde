"""Verification oracles: exact Euler Riemann solver and a first-order
single-grid local Lax-Friedrichs reference solver.

Both are independent of the overlapping-grid scheme and exist to
cross-check it: the exact solver for Sod-type accuracy, the LLF solver for
shock positions on problems without closed-form solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import BC_CODES, OverlapGrid
from .physics import GasModel, InvalidStateError

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 100


class VacuumError(ValueError):
    """Raised when the initial states would generate vacuum."""


class NewtonConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class RiemannProblem:
    left: np.ndarray  # primitive (rho, u, p)
    right: np.ndarray
    gamma: float = 1.4
    x0: float = 0.0  # diaphragm position

    def __post_init__(self):
        for side, v in (("left", self.left), ("right", self.right)):
            v = np.asarray(v, dtype=np.float64)
            if not (v[0] > 0.0 and v[2] > 0.0):
                raise InvalidStateError(f"invalid {side} state {v}")
            object.__setattr__(self, side, v)


def _wave_function(p, rho_k, p_k, c_k, gamma):
    """Toro's f_K(p) and its derivative: velocity jump across one wave."""
    if p > p_k:  # shock
        A = 2.0 / ((gamma + 1.0) * rho_k)
        B = (gamma - 1.0) / (gamma + 1.0) * p_k
        root = np.sqrt(A / (p + B))
        f = (p - p_k) * root
        df = root * (1.0 - 0.5 * (p - p_k) / (p + B))
    else:  # rarefaction
        f = 2.0 * c_k / (gamma - 1.0) * ((p / p_k) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)
        df = (p / p_k) ** (-(gamma + 1.0) / (2.0 * gamma)) / (rho_k * c_k)
    return f, df


def solve_star_state(rp: RiemannProblem):
    """Pressure and velocity in the star region via safeguarded Newton.

    The initial guess is the two-rarefaction approximation; iterates are
    kept inside a bisection bracket so strong blast states stay safe.
    """
    g = rp.gamma
    rho_l, u_l, p_l = rp.left
    rho_r, u_r, p_r = rp.right
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    du = u_r - u_l
    if 2.0 * c_l / (g - 1.0) + 2.0 * c_r / (g - 1.0) <= du:
        raise VacuumError(f"data generates vacuum: du={du}, c_l={c_l}, c_r={c_r}")

    # two-rarefaction guess
    z = (g - 1.0) / (2.0 * g)
    p = ((c_l + c_r - 0.5 * (g - 1.0) * du) / (c_l / p_l**z + c_r / p_r**z)) ** (1.0 / z)

    lo, hi = 1e-14, 10.0 * max(p_l, p_r)
    p = min(max(p, lo), hi)
    residual = np.inf
    for _ in range(NEWTON_MAX_ITER):
        f_l, df_l = _wave_function(p, rho_l, p_l, c_l, g)
        f_r, df_r = _wave_function(p, rho_r, p_r, c_r, g)
        residual = f_l + f_r + du
        if residual > 0.0:
            hi = min(hi, p)
        else:
            lo = max(lo, p)
        step = residual / (df_l + df_r)
        p_new = p - step
        if not lo < p_new < hi:
            p_new = 0.5 * (lo + hi)  # bisection safeguard
        if abs(p_new - p) <= NEWTON_TOL * p_new:
            p = p_new
            break
        p = p_new
    else:
        raise NewtonConvergenceError(
            f"star pressure did not converge in {NEWTON_MAX_ITER} iterations", residual
        )
    f_l, _ = _wave_function(p, rho_l, p_l, c_l, g)
    f_r, _ = _wave_function(p, rho_r, p_r, c_r, g)
    u = 0.5 * (u_l + u_r) + 0.5 * (f_r - f_l)
    return p, u


def _sample_side(xi, rho_k, u_k, p_k, c_k, p_star, u_star, gamma, left):
    """Self-similar solution on one side of the contact, vectorized in xi."""
    sgn = 1.0 if left else -1.0
    mu = (gamma - 1.0) / (gamma + 1.0)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)
    ratio = p_star / p_k
    if p_star > p_k:  # shock
        rho_star = rho_k * (ratio + mu) / (mu * ratio + 1.0)
        s = u_k - sgn * c_k * np.sqrt(
            (gamma + 1.0) / (2.0 * gamma) * ratio + (gamma - 1.0) / (2.0 * gamma)
        )
        outer = xi < s if left else xi > s
        rho[:] = np.where(outer, rho_k, rho_star)
        u[:] = np.where(outer, u_k, u_star)
        p[:] = np.where(outer, p_k, p_star)
    else:  # rarefaction
        rho_star = rho_k * ratio ** (1.0 / gamma)
        c_star = c_k * ratio ** ((gamma - 1.0) / (2.0 * gamma))
        head = u_k - sgn * c_k
        tail = u_star - sgn * c_star
        if left:
            outer = xi < head
            star = xi > tail
        else:
            outer = xi > head
            star = xi < tail
        fan = ~outer & ~star
        fac = 2.0 / (gamma + 1.0) + sgn * mu / c_k * (u_k - xi)
        rho[:] = np.where(outer, rho_k, np.where(star, rho_star, rho_k * fac ** (2.0 / (gamma - 1.0))))
        u[:] = np.where(outer, u_k, np.where(star, u_star, 2.0 / (gamma + 1.0) * (sgn * c_k + 0.5 * (gamma - 1.0) * u_k + xi)))
        p[:] = np.where(outer, p_k, np.where(star, p_star, p_k * fac ** (2.0 * gamma / (gamma - 1.0))))
    return rho, u, p


def exact_riemann(rp: RiemannProblem, xi):
    """Sample the exact solution at similarity coordinates xi = (x - x0)/t.

    Returns an array of primitive states, shape (len(xi), 3).
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    g = rp.gamma
    rho_l, u_l, p_l = rp.left
    rho_r, u_r, p_r = rp.right
    c_l = np.sqrt(g * p_l / rho_l)
    c_r = np.sqrt(g * p_r / rho_r)
    p_star, u_star = solve_star_state(rp)

    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)
    on_left = xi <= u_star
    for mask, left in ((on_left, True), (~on_left, False)):
        if not np.any(mask):
            continue
        if left:
            r_, u_, p_ = _sample_side(xi[mask], rho_l, u_l, p_l, c_l, p_star, u_star, g, True)
        else:
            r_, u_, p_ = _sample_side(xi[mask], rho_r, u_r, p_r, c_r, p_star, u_star, g, False)
        rho[mask], u[mask], p[mask] = r_, u_, p_
    return np.stack([rho, u, p], axis=-1)


def shock_speed(rp: RiemannProblem):
    """Speed of the right (left) shock if present; None for a rarefaction."""
    g = rp.gamma
    p_star, _ = solve_star_state(rp)
    speeds = {}
    rho_l, u_l, p_l = rp.left
    rho_r, u_r, p_r = rp.right
    if p_star > p_l:
        c_l = np.sqrt(g * p_l / rho_l)
        speeds["left"] = u_l - c_l * np.sqrt(
            (g + 1.0) / (2.0 * g) * p_star / p_l + (g - 1.0) / (2.0 * g)
        )
    if p_star > p_r:
        c_r = np.sqrt(g * p_r / rho_r)
        speeds["right"] = u_r + c_r * np.sqrt(
            (g + 1.0) / (2.0 * g) * p_star / p_r + (g - 1.0) / (2.0 * g)
        )
    return speeds


def llf_reference_solve(problem, n, cfl=0.4, t_end=None):
    """First-order LLF / forward-Euler solve of a benchmark problem.

    ``problem`` is a ProblemSpec; returns the conservative cell averages at
    t_end on a single primary grid of n cells.  Conservative and monotone;
    used as an independent cross-check, not as a production solver.
    """
    grid = OverlapGrid(n, problem.x_min, problem.x_max, problem.bc)
    gas = GasModel(problem.gamma)
    ubar = problem.primary_averages(grid, gas)
    if t_end is None:
        t_end = problem.t_end
    ubar, steps, bad, bad_t = kernels.llf_solve(
        ubar, gas.gamma, grid.dx, t_end, cfl, BC_CODES[grid.bc]
    )
    if bad >= 0:
        raise InvalidStateError(
            f"LLF reference lost positivity at cell {bad}, t={bad_t:.6g}", index=bad
        )
    return ubar
