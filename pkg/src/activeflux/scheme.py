"""Spatial discretization of the dual semi-discrete system.

The conservative field advances with unlimited interface fluxes evaluated at
the staggered primitive averages; the primitive field advances with a
path-conservative central-upwind discretization built from minmod-limited
point values at the grid nodes.  Neither tendency reads the conservative
field: the two solutions talk only through the once-per-step coupling in
``postprocess``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import NG, DualSolution, OverlapGrid, pad_staggered
from .kernels import numpy_backend as _nb
from .physics import GasModel, InvalidStateError, cons_flux, prim_to_cons


@dataclass
class PccuPointData:
    """Reconstruction and speed data at the node points x_0 .. x_{N+1}."""

    v_minus: np.ndarray
    v_plus: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    b_psi: np.ndarray


@dataclass
class DualRhs:
    """Tendencies of both fields plus per-call diagnostics."""

    d_ubar: np.ndarray
    d_vbar: np.ndarray
    flux_left: np.ndarray  # conservative flux through the left domain face
    flux_right: np.ndarray
    slope_fallbacks: int = 0


def minmod_slope(w_left, w_center, w_right, theta=1.3, dx=1.0):
    """Generalized minmod slope from three neighboring averages.

    Componentwise minmod of theta*(c-l)/dx, (r-l)/(2 dx), theta*(r-c)/dx;
    theta in [1, 2] trades sharpness against dissipation.
    """
    if not 1.0 <= theta <= 2.0:
        raise ValueError(f"theta must lie in [1, 2], got {theta}")
    w_left, w_center, w_right = (np.asarray(w, dtype=np.float64) for w in (w_left, w_center, w_right))
    return _nb.minmod3(
        theta * (w_center - w_left) / dx,
        (w_right - w_left) / (2.0 * dx),
        theta * (w_right - w_center) / dx,
    )


def reconstruct_point_values(vbar_padded, theta, dx):
    """Left/right limited point values at the node points.

    ``vbar_padded`` is the staggered field with NG ghost rows per side.
    Cells whose reconstruction would lose positivity fall back to a flat
    profile; the count of such cells is returned as a diagnostic.
    Returns (v_minus, v_plus, n_fallback), each point array (N+2, 3).
    """
    vbar_padded = np.asarray(vbar_padded, dtype=np.float64)
    return _nb.reconstruct_core(vbar_padded, theta, dx)


def local_speeds(v_minus, v_plus, gas: GasModel):
    """One-sided speeds from the extreme eigenvalues of both point states,
    clipped so that a_plus >= 0 >= a_minus."""
    vm = np.atleast_2d(np.asarray(v_minus, dtype=np.float64))
    vp = np.atleast_2d(np.asarray(v_plus, dtype=np.float64))
    a_plus, a_minus = _nb.local_speeds_core(vm, vp, gas.gamma)
    if np.asarray(v_minus).ndim == 1:
        return float(a_plus[0]), float(a_minus[0])
    return a_plus, a_minus


def pccu_point_flux(v_minus, v_plus, a_plus, a_minus, gas: GasModel):
    """Central-upwind flux and linear-path jump term at a node point.

    Degenerate points (a+ - a- below 1e-12 of the local speed scale) get the
    plain flux average and a zero path term.
    """
    vm = np.atleast_2d(np.asarray(v_minus, dtype=np.float64))
    vp = np.atleast_2d(np.asarray(v_plus, dtype=np.float64))
    ap = np.atleast_1d(np.asarray(a_plus, dtype=np.float64))
    am = np.atleast_1d(np.asarray(a_minus, dtype=np.float64))
    ftilde, b_psi, _, _ = _nb.pccu_flux_core(vm, vp, ap, am, gas.gamma)
    if np.asarray(v_minus).ndim == 1:
        return ftilde[0], b_psi[0]
    return ftilde, b_psi


def conservative_interface_flux(vbar_entry, gas: GasModel):
    """F(U(vbar)) at a staggered average: no limiting, no upwinding."""
    return cons_flux(prim_to_cons(vbar_entry, gas), gas)


def compute_point_data(vbar, grid: OverlapGrid, gas: GasModel, theta=1.3) -> PccuPointData:
    """Assemble the per-point reconstruction data (inspection helper)."""
    vpad = pad_staggered(np.asarray(vbar, dtype=np.float64), grid.bc)
    vm, vp, _ = reconstruct_point_values(vpad, theta, grid.dx)
    a_plus, a_minus = _nb.local_speeds_core(vm, vp, gas.gamma)
    _, b_psi, _, _ = _nb.pccu_flux_core(vm, vp, a_plus, a_minus, gas.gamma)
    return PccuPointData(vm, vp, a_plus, a_minus, b_psi)


def _validate_staggered(vbar, gas: GasModel, stage=""):
    ok = (vbar[:, 0] > 0.0) & (vbar[:, 2] > 0.0)
    if not ok.all():
        i = int(np.argmin(ok))
        where = f" during {stage}" if stage else ""
        raise InvalidStateError(
            f"invalid staggered average at cell {i}{where}: {vbar[i]}",
            index=i,
            values=vbar[i].copy(),
        )


def compute_rhs(sol: DualSolution, grid: OverlapGrid, gas: GasModel, theta=1.3, stage="") -> DualRhs:
    """Right-hand side of the dual ODE system.

    d ubar_j   = -(F_{j+1/2} - F_{j-1/2}) / dx      with F = F(U(vbar))
    d vbar_i   = PCCU flux differences plus the in-cell and point path terms

    Raises InvalidStateError (tagged with ``stage``) if the staggered field
    is not positive; reconstruction positivity is handled internally by the
    flat-slope fallback and reported via ``slope_fallbacks``.
    """
    vbar = sol.vbar
    if gas.floor is not None:
        vbar = vbar.copy()
        vbar[:, 0] = np.maximum(vbar[:, 0], gas.floor)
        vbar[:, 2] = np.maximum(vbar[:, 2], gas.floor)
    _validate_staggered(vbar, gas, stage)
    vpad = pad_staggered(vbar, grid.bc, NG)
    d_ubar, d_vbar, f_left, f_right, n_fb = kernels.dual_rhs(
        vpad, gas.gamma, theta, grid.dx
    )
    return DualRhs(d_ubar, d_vbar, f_left, f_right, n_fb)
