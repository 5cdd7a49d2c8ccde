"""Overlapping uniform grids, the dual solution container, and ghost cells.

The primary grid has N cells with centers x_min + (j + 1/2) dx, j = 0..N-1.
The staggered grid has N+1 cells centered on the primary faces (grid nodes)
x_min + i dx, i = 0..N; the two end cells straddle the domain boundaries.

Ghost padding uses NG = 2 layers on each side, enough for the widest stencil
in the scheme (limited slopes feeding point values).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NG = 2  # ghost layers on each side

BOUNDARY_TYPES = ("periodic", "outflow", "reflective")
BC_CODES = {"periodic": 0, "outflow": 1, "reflective": 2}  # kernel-side ints

# mirror parity per component: density even, velocity/momentum odd, p/E even
_MIRROR_SIGN = np.array([1.0, -1.0, 1.0])


@dataclass(frozen=True)
class OverlapGrid:
    """Pair of overlapping uniform 1-D grids sharing spacing dx."""

    n_cells: int
    x_min: float
    x_max: float
    bc: str = "outflow"

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be >= 1, got {self.n_cells}")
        if not self.x_max > self.x_min:
            raise ValueError(f"empty domain [{self.x_min}, {self.x_max}]")
        if self.bc not in BOUNDARY_TYPES:
            raise ValueError(f"unknown bc {self.bc!r}; expected one of {BOUNDARY_TYPES}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def centers(self):
        """Primary cell centers, shape (N,)."""
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def staggered_centers(self):
        """Staggered cell centers (= primary faces), shape (N+1,)."""
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


@dataclass
class DualSolution:
    """Co-evolved fields: conservative averages on the primary grid (N rows)
    and primitive averages on the staggered grid (N+1 rows)."""

    ubar: np.ndarray
    vbar: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.ubar = np.ascontiguousarray(self.ubar, dtype=np.float64)
        self.vbar = np.ascontiguousarray(self.vbar, dtype=np.float64)
        if self.ubar.ndim != 2 or self.ubar.shape[1] != 3:
            raise ValueError(f"ubar must have shape (N, 3), got {self.ubar.shape}")
        if self.vbar.shape != (self.ubar.shape[0] + 1, 3):
            raise ValueError(
                f"vbar must have shape (N+1, 3) = {(self.ubar.shape[0] + 1, 3)}, "
                f"got {self.vbar.shape}"
            )

    @property
    def n(self) -> int:
        return self.ubar.shape[0]

    def copy(self) -> "DualSolution":
        return DualSolution(self.ubar.copy(), self.vbar.copy(), self.time)


@dataclass
class GhostPadded:
    """Both fields extended by NG ghost entries per side."""

    ubar: np.ndarray  # (N + 2 NG, 3)
    vbar: np.ndarray  # (N + 1 + 2 NG, 3)
    n_ghost: int = NG


def _mirror(rows):
    return rows * _MIRROR_SIGN


def pad_primary(q, bc, n_ghost=NG):
    """Extend a primary-grid field (N, 3) by ghost rows per boundary policy."""
    g = n_ghost
    if bc == "periodic":
        left, right = q[-g:], q[:g]
    elif bc == "outflow":
        left = np.repeat(q[:1], g, axis=0)
        right = np.repeat(q[-1:], g, axis=0)
    elif bc == "reflective":
        # mirror plane on the primary faces x_min / x_max
        left = _mirror(q[g - 1 :: -1])
        right = _mirror(q[: -g - 1 : -1])
    else:
        raise ValueError(f"unknown bc {bc!r}")
    return np.concatenate([left, q, right], axis=0)


def pad_staggered(v, bc, n_ghost=NG):
    """Extend a staggered-grid field (N+1, 3) by ghost rows per policy.

    Periodic wrap identifies the two end cells (both centered on a domain
    endpoint, one period apart), so the wrap period is N, not N+1.
    """
    g = n_ghost
    n = v.shape[0] - 1
    if bc == "periodic":
        left, right = v[n - g : n], v[1 : g + 1]
    elif bc == "outflow":
        left = np.repeat(v[:1], g, axis=0)
        right = np.repeat(v[-1:], g, axis=0)
    elif bc == "reflective":
        # the end cells sit on the mirror planes; ghosts mirror cells 1..g
        left = _mirror(v[g:0:-1])
        right = _mirror(v[n - 1 : n - g - 1 : -1])
    else:
        raise ValueError(f"unknown bc {bc!r}")
    return np.concatenate([left, v, right], axis=0)


def apply_bc(sol: DualSolution, grid: OverlapGrid) -> GhostPadded:
    """Build ghost-padded copies of both fields."""
    return GhostPadded(
        ubar=pad_primary(sol.ubar, grid.bc),
        vbar=pad_staggered(sol.vbar, grid.bc),
    )


def project_primary_to_staggered(ubar_pad, slopes_pad, dx):
    """Average the piecewise-linear primary reconstruction over staggered cells.

    ``ubar_pad`` and ``slopes_pad`` are padded primary arrays (N + 2 NG, 3).
    Staggered cell i covers the right half of primary cell i-1 and the left
    half of cell i, so the exact average of the two linear pieces is
    (ubar[i-1] + ubar[i]) / 2 + dx/8 (s[i-1] - s[i]).  Returns (N+1, 3).
    """
    n = ubar_pad.shape[0] - 2 * NG
    lo, hi = NG - 1, NG + n  # primary cells -1 .. N, padded indexing
    ul, ur = ubar_pad[lo:hi], ubar_pad[lo + 1 : hi + 1]
    sl, sr = slopes_pad[lo:hi], slopes_pad[lo + 1 : hi + 1]
    return 0.5 * (ul + ur) + (dx / 8.0) * (sl - sr)
