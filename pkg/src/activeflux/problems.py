"""Benchmark registry and exact initialization of both grids.

Initial data is piecewise in x with constant velocity and pressure per piece
and a density profile given with its antiderivative, so cell averages on
both grids are exact (no quadrature error limits the convergence order).
The staggered end cells straddle the domain boundary; their out-of-domain
halves are filled consistently with the boundary policy (periodic shift,
constant extension, or mirror).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import DualSolution, OverlapGrid
from .physics import GasModel


@dataclass(frozen=True)
class Piece:
    """One segment of initial data: rho(x) with constant u and p."""

    x_lo: float
    x_hi: float
    rho: Callable
    rho_antideriv: Callable
    u: float
    p: float


def const_piece(x_lo, x_hi, rho, u, p):
    r = float(rho)
    return Piece(x_lo, x_hi, lambda x: np.full_like(np.asarray(x, float), r), lambda x: r * np.asarray(x, float), u, p)


def sine_piece(x_lo, x_hi, base, amplitude, wavenumber, u, p):
    b, a, w = float(base), float(amplitude), float(wavenumber)
    return Piece(
        x_lo,
        x_hi,
        lambda x: b + a * np.sin(w * np.asarray(x, float)),
        lambda x: b * np.asarray(x, float) - (a / w) * np.cos(w * np.asarray(x, float)),
        u,
        p,
    )


@dataclass
class _Integrals:
    """Accumulated exact integrals over a segment."""

    rho: float = 0.0
    u_len: float = 0.0
    p_len: float = 0.0
    mom: float = 0.0
    rho_u2: float = 0.0
    length: float = 0.0

    def add(self, pieces, a, b, flip_u=False):
        sgn = -1.0 if flip_u else 1.0
        for pc in pieces:
            lo = max(a, pc.x_lo)
            hi = min(b, pc.x_hi)
            if hi <= lo:
                continue
            m = float(pc.rho_antideriv(hi) - pc.rho_antideriv(lo))
            ln = hi - lo
            u = sgn * pc.u
            self.rho += m
            self.u_len += u * ln
            self.p_len += pc.p * ln
            self.mom += u * m
            self.rho_u2 += pc.u * pc.u * m
            self.length += ln

    def add_const(self, rho, u, p, ln):
        self.rho += rho * ln
        self.u_len += u * ln
        self.p_len += p * ln
        self.mom += u * rho * ln
        self.rho_u2 += u * u * rho * ln
        self.length += ln


@dataclass(frozen=True)
class ProblemSpec:
    """Benchmark definition: domain, initial data, and SI constants."""

    name: str
    x_min: float
    x_max: float
    bc: str
    gamma: float
    t_end: float
    pieces: tuple
    k: float = 1.0  # SI threshold constant
    c_ref: float = 1.0  # SI decay reference constant (plots C dx^2)
    alpha: str = "momentum"
    smooth_window: tuple | None = None  # x-range known shock-free at t_end
    advected_exact: bool = False  # exact solution = initial profile advected at u

    def _cell_integrals(self, a, b) -> _Integrals:
        """Exact integrals over [a, b], extended past the domain per bc."""
        acc = _Integrals()
        length = self.x_max - self.x_min
        if a < self.x_min:
            h = self.x_min - a
            if self.bc == "periodic":
                acc.add(self.pieces, a + length, self.x_min + length)
            elif self.bc == "outflow":
                pc = self.pieces[0]
                acc.add_const(float(pc.rho(self.x_min)), pc.u, pc.p, h)
            else:  # reflective: mirror about x_min with odd velocity
                acc.add(self.pieces, self.x_min, self.x_min + h, flip_u=True)
        if b > self.x_max:
            h = b - self.x_max
            if self.bc == "periodic":
                acc.add(self.pieces, self.x_max - length, b - length)
            elif self.bc == "outflow":
                pc = self.pieces[-1]
                acc.add_const(float(pc.rho(self.x_max)), pc.u, pc.p, h)
            else:
                acc.add(self.pieces, self.x_max - h, self.x_max, flip_u=True)
        acc.add(self.pieces, max(a, self.x_min), min(b, self.x_max))
        return acc

    def primary_averages(self, grid: OverlapGrid, gas: GasModel):
        """Exact conservative cell averages on the primary grid, (N, 3)."""
        dx = grid.dx
        out = np.empty((grid.n_cells, 3))
        faces = grid.x_min + np.arange(grid.n_cells + 1) * dx
        for j in range(grid.n_cells):
            acc = self._cell_integrals(faces[j], faces[j + 1])
            out[j, 0] = acc.rho / dx
            out[j, 1] = acc.mom / dx
            out[j, 2] = (acc.p_len / (gas.gamma - 1.0) + 0.5 * acc.rho_u2) / dx
        return out

    def staggered_averages(self, grid: OverlapGrid, gas: GasModel):
        """Exact primitive cell averages on the staggered grid, (N+1, 3)."""
        dx = grid.dx
        centers = grid.staggered_centers()
        out = np.empty((grid.n_cells + 1, 3))
        for i, xc in enumerate(centers):
            acc = self._cell_integrals(xc - 0.5 * dx, xc + 0.5 * dx)
            out[i, 0] = acc.rho / dx
            out[i, 1] = acc.u_len / dx
            out[i, 2] = acc.p_len / dx
        return out

    def initial_solution(self, grid: OverlapGrid, gas: GasModel) -> DualSolution:
        return DualSolution(
            self.primary_averages(grid, gas), self.staggered_averages(grid, gas), 0.0
        )

    def exact_density_averages(self, grid: OverlapGrid, t):
        """Exact density cell averages at time t for advection-exact problems."""
        if not self.advected_exact:
            raise ValueError(f"problem {self.name!r} has no closed-form solution")
        (pc,) = self.pieces
        shift = pc.u * t
        faces = grid.x_min + np.arange(grid.n_cells + 1) * grid.dx
        anti = pc.rho_antideriv(faces - shift)
        return np.diff(anti) / grid.dx

    def smooth_window_fractions(self):
        """Smooth window as fractions of the domain, for index-free reuse."""
        if self.smooth_window is None:
            return None
        lo, hi = self.smooth_window
        length = self.x_max - self.x_min
        return ((lo - self.x_min) / length, (hi - self.x_min) / length)


def _registry():
    problems = {}

    problems["smooth-wave"] = ProblemSpec(
        name="smooth-wave",
        x_min=0.0,
        x_max=2.0,
        bc="periodic",
        gamma=1.4,
        t_end=2.0,  # one advection period
        pieces=(sine_piece(0.0, 2.0, 1.0, 0.2, np.pi, u=1.0, p=1.0),),
        k=1.0,
        c_ref=0.1,
        smooth_window=(0.0, 2.0),
        advected_exact=True,
    )

    problems["sod"] = ProblemSpec(
        name="sod",
        x_min=0.0,
        x_max=1.0,
        bc="outflow",
        gamma=1.4,
        t_end=0.2,
        pieces=(
            const_piece(0.0, 0.5, 1.0, 0.0, 1.0),
            const_piece(0.5, 1.0, 0.125, 0.0, 0.1),
        ),
        k=1.0,
        c_ref=1.0,
        smooth_window=(0.30, 0.45),  # interior of the rarefaction fan at t=0.2
    )

    problems["shock-entropy"] = ProblemSpec(
        name="shock-entropy",
        x_min=-5.0,
        x_max=5.0,
        bc="outflow",
        gamma=1.4,
        t_end=1.8,
        pieces=(
            const_piece(-5.0, -4.0, 3.857143, 2.629369, 10.33333),
            sine_piece(-4.0, 5.0, 1.0, 0.2, 5.0, u=0.0, p=1.0),
        ),
        k=1.0,
        c_ref=0.01,
        smooth_window=(3.0, 4.5),  # undisturbed entropy field ahead of the shock
    )

    problems["shock-density"] = ProblemSpec(
        name="shock-density",
        x_min=-5.0,
        x_max=5.0,
        bc="outflow",
        gamma=1.4,
        t_end=5.0,
        pieces=(
            const_piece(-5.0, -4.5, 1.515695, 0.523346, 1.805),
            sine_piece(-4.5, 5.0, 1.0, 0.1, 20.0 * np.pi, u=0.0, p=1.0),
        ),
        k=6.0,
        c_ref=0.2,
        smooth_window=(2.0, 4.0),
    )

    problems["blast"] = ProblemSpec(
        name="blast",
        x_min=0.0,
        x_max=1.0,
        bc="reflective",
        gamma=1.4,
        t_end=0.038,
        pieces=(
            const_piece(0.0, 0.1, 1.0, 0.0, 1000.0),
            const_piece(0.1, 0.9, 1.0, 0.0, 0.01),
            const_piece(0.9, 1.0, 1.0, 0.0, 100.0),
        ),
        k=1.2,
        c_ref=200.0,
    )

    return problems


PROBLEMS = _registry()


def registry_lookup(name: str) -> ProblemSpec:
    """Fetch a registered benchmark; unknown names list the valid ones."""
    try:
        return PROBLEMS[name]
    except KeyError:
        valid = ", ".join(sorted(PROBLEMS))
        raise KeyError(f"unknown problem {name!r}; valid names: {valid}") from None
