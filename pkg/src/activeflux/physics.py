"""Ideal-gas Euler physics: state conversions, fluxes, wave speeds.

States are numpy arrays whose last axis has length 3:
  conservative U = (rho, mom, E)   density, momentum density, total energy
  primitive    V = (rho, u, p)     density, velocity, pressure

All functions broadcast over leading axes, so a single state of shape (3,)
and a field of shape (N, 3) go through the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InvalidStateError(ValueError):
    """Raised when a state has non-positive density or pressure."""

    def __init__(self, message, index=None, values=None):
        super().__init__(message)
        self.index = index
        self.values = values


@dataclass(frozen=True)
class GasModel:
    """Ideal gas with ratio of specific heats gamma.

    ``floor``, when set, clamps density and pressure from below instead of
    raising; it exists for robustness experiments and is off by default.
    """

    gamma: float = 1.4
    floor: float | None = None

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.floor is not None and self.floor <= 0.0:
            raise ValueError(f"floor must be positive, got {self.floor}")


def _check_positive(name, arr, states, allow_floor=None):
    bad = ~(arr > 0.0)  # catches NaN as well
    if np.any(bad):
        if allow_floor is not None:
            return np.maximum(arr, allow_floor)
        states = np.asarray(states)
        if states.ndim <= 1:  # single state
            raise InvalidStateError(
                f"non-positive {name}: state {states}", values=states
            )
        where = np.argwhere(bad)[0]
        i = tuple(where.tolist()) if where.size > 1 else int(where[0])
        raise InvalidStateError(
            f"non-positive {name} at index {i}: state {states[i]}",
            index=i,
            values=states[i],
        )
    return arr


def cons_to_prim(U, gas: GasModel):
    """Convert conservative (rho, mom, E) to primitive (rho, u, p)."""
    U = np.asarray(U, dtype=np.float64)
    rho = _check_positive("density", U[..., 0], U, allow_floor=gas.floor)
    u = U[..., 1] / rho
    p = (gas.gamma - 1.0) * (U[..., 2] - 0.5 * U[..., 1] * u)
    p = _check_positive("pressure", p, U, allow_floor=gas.floor)
    return np.stack([rho, u, p], axis=-1)


def prim_to_cons(V, gas: GasModel):
    """Convert primitive (rho, u, p) to conservative (rho, mom, E)."""
    V = np.asarray(V, dtype=np.float64)
    rho = _check_positive("density", V[..., 0], V, allow_floor=gas.floor)
    p = _check_positive("pressure", V[..., 2], V, allow_floor=gas.floor)
    u = V[..., 1]
    mom = rho * u
    E = p / (gas.gamma - 1.0) + 0.5 * rho * u * u
    return np.stack([rho, mom, E], axis=-1)


def cons_flux(U, gas: GasModel):
    """Physical flux F(U) = (rho u, rho u^2 + p, u (E + p))."""
    U = np.asarray(U, dtype=np.float64)
    V = cons_to_prim(U, gas)
    u, p = V[..., 1], V[..., 2]
    return np.stack([U[..., 1], U[..., 1] * u + p, u * (U[..., 2] + p)], axis=-1)


def prim_flux_split(V, gas: GasModel):
    """Split form of the primitive system: V_t + Ftilde(V)_x = B(V) V_x.

    Returns ``(Ftilde, B)`` with Ftilde = (rho u, u^2/2, p u) and B the
    3x3 matrix whose only nonzero entries are B[1, 2] = -1/rho and
    B[2, 1] = -(gamma-1) p (0-based).  The quasilinear matrix
    dFtilde/dV - B has eigenvalues u - c, u, u + c.
    """
    V = np.asarray(V, dtype=np.float64)
    rho = _check_positive("density", V[..., 0], V, allow_floor=gas.floor)
    p = _check_positive("pressure", V[..., 2], V, allow_floor=gas.floor)
    u = V[..., 1]
    ftilde = np.stack([rho * u, 0.5 * u * u, p * u], axis=-1)
    B = np.zeros(V.shape + (3,), dtype=np.float64)
    B[..., 1, 2] = -1.0 / rho
    B[..., 2, 1] = -(gas.gamma - 1.0) * p
    return ftilde, B


def sound_speed(V, gas: GasModel):
    V = np.asarray(V, dtype=np.float64)
    rho = _check_positive("density", V[..., 0], V, allow_floor=gas.floor)
    p = _check_positive("pressure", V[..., 2], V, allow_floor=gas.floor)
    return np.sqrt(gas.gamma * p / rho)


def char_speeds(V, gas: GasModel):
    """Extreme characteristic speeds (u - c, u + c) of the Euler system."""
    V = np.asarray(V, dtype=np.float64)
    c = sound_speed(V, gas)
    u = V[..., 1]
    return u - c, u + c


def quasilinear_matrix(V, gas: GasModel):
    """A(V) = dFtilde/dV - B(V) for a single primitive state."""
    rho, u, p = (float(v) for v in np.asarray(V, dtype=np.float64))
    jac = np.array([[u, rho, 0.0], [0.0, u, 0.0], [0.0, p, u]])
    _, B = prim_flux_split(np.array([rho, u, p]), gas)
    return jac - B
