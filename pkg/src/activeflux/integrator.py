"""CFL-driven time stepping with the three-stage third-order SSP Runge-Kutta
method in Shu-Osher form, applied identically to both fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import BC_CODES, DualSolution, OverlapGrid
from .physics import GasModel, InvalidStateError

_FIELD_NAMES = {1: "primary", 2: "staggered"}


@dataclass(frozen=True)
class StepControl:
    """Step-size policy: Courant number, final time, and a safety cap."""

    t_end: float
    cfl: float = 0.25
    max_steps: int = 5_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")


def compute_dt(sol: DualSolution, grid: OverlapGrid, gas: GasModel, cfl=0.25, t_end=None):
    """dt = cfl dx / max(|u| + c) over both fields, clipped at t_end."""
    ubar, vbar = sol.ubar, sol.vbar
    if gas.floor is not None:
        ubar = ubar.copy()
        ubar[:, 0] = np.maximum(ubar[:, 0], gas.floor)
        e_min = gas.floor / (gas.gamma - 1.0) + 0.5 * ubar[:, 1] * ubar[:, 1] / ubar[:, 0]
        ubar[:, 2] = np.maximum(ubar[:, 2], e_min)  # keeps p >= floor
        vbar = vbar.copy()
        vbar[:, 0] = np.maximum(vbar[:, 0], gas.floor)
        vbar[:, 2] = np.maximum(vbar[:, 2], gas.floor)
    smax, bad_field, bad_idx = kernels.max_wave_speed(ubar, vbar, gas.gamma)
    if bad_field:
        field = _FIELD_NAMES[bad_field]
        raise InvalidStateError(
            f"invalid {field} average at cell {bad_idx} at t={sol.time:.6g}",
            index=bad_idx,
        )
    dt = cfl * grid.dx / smax
    if t_end is not None:
        dt = min(dt, t_end - sol.time)
    return dt


def ssprk3_advance(state, dt, rhs):
    """Generic Shu-Osher SSP-RK3 update of an array (or array tuple).

    ``rhs`` maps a state to its tendency with matching structure.  Exposed
    separately so scalar surrogates can exercise the stage algebra directly.
    """
    if isinstance(state, tuple):
        s1 = tuple(s + dt * ds for s, ds in zip(state, rhs(state)))
        s2 = tuple(
            0.75 * s + 0.25 * (a + dt * da) for s, a, da in zip(state, s1, rhs(s1))
        )
        return tuple(
            (1.0 / 3.0) * s + (2.0 / 3.0) * (b + dt * db)
            for s, b, db in zip(state, s2, rhs(s2))
        )
    s1 = state + dt * rhs(state)
    s2 = 0.75 * state + 0.25 * (s1 + dt * rhs(s1))
    return (1.0 / 3.0) * state + (2.0 / 3.0) * (s2 + dt * rhs(s2))


def ssprk3_step(sol: DualSolution, grid: OverlapGrid, gas: GasModel, theta, dt):
    """Advance the dual solution by one SSP-RK3 step.

    Returns (new_solution, diagnostics) where the diagnostics dict carries
    the stage-weighted boundary fluxes of the conservative field (for
    conservation accounting) and the summed slope-fallback count.  Any
    invalid intermediate state raises with the stage identified.
    """
    floor = gas.floor if gas.floor is not None else -1.0
    u_new, v_new, flux_left, flux_right, fallbacks, bad_stage, bad_idx = kernels.rk3_step(
        sol.ubar, sol.vbar, gas.gamma, theta, grid.dx, dt, BC_CODES[grid.bc], floor
    )
    if bad_stage:
        raise InvalidStateError(
            f"invalid staggered average at cell {bad_idx} entering stage {bad_stage} "
            f"(t={sol.time:.6g})",
            index=bad_idx,
        )
    diag = {
        "flux_left": flux_left,
        "flux_right": flux_right,
        "slope_fallbacks": fallbacks,
    }
    return DualSolution(u_new, v_new, sol.time + dt), diag
