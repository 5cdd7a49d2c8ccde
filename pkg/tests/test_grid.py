import numpy as np
import pytest

from activeflux.grid import (
    DualSolution,
    OverlapGrid,
    apply_bc,
    pad_primary,
    pad_staggered,
    project_primary_to_staggered,
)


def rows(*vals):
    """Distinct dummy state rows labelled by a scalar."""
    return np.array([[v, v + 0.1, v + 0.2] for v in vals])


class TestGrid:
    def test_spacing_and_centers(self):
        g = OverlapGrid(4, 0.0, 1.0, "periodic")
        assert g.dx == 0.25
        assert np.allclose(g.centers(), [0.125, 0.375, 0.625, 0.875])
        assert np.allclose(g.staggered_centers(), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_bad_bc_rejected(self):
        with pytest.raises(ValueError):
            OverlapGrid(4, 0.0, 1.0, "wall")

    def test_dual_solution_shape_check(self):
        with pytest.raises(ValueError):
            DualSolution(np.zeros((4, 3)), np.zeros((4, 3)))


class TestPadding:
    def test_periodic_primary_wrap(self):
        a, b, c = rows(1.0), rows(2.0), rows(3.0)
        q = np.vstack([a, b, c])
        out = pad_primary(q, "periodic")
        assert np.array_equal(out[:2], np.vstack([b, c]))  # left ghosts
        assert np.array_equal(out[-2:], np.vstack([a, b]))  # right ghosts

    def test_outflow_copies_nearest(self):
        q = rows(1.0, 2.0, 3.0)
        out = pad_primary(q, "outflow")
        assert np.array_equal(out[0], q[0]) and np.array_equal(out[1], q[0])
        assert np.array_equal(out[-1], q[-1]) and np.array_equal(out[-2], q[-1])

    def test_reflective_mirrors_velocity_odd(self):
        q = np.array([[1.0, 0.3, 2.0], [1.1, 0.4, 2.1], [1.2, 0.5, 2.2]])
        out = pad_primary(q, "reflective")
        assert np.allclose(out[1], [1.0, -0.3, 2.0])  # mirror of first cell
        assert np.allclose(out[0], [1.1, -0.4, 2.1])
        assert np.allclose(out[-2], [1.2, -0.5, 2.2])

    def test_staggered_periodic_identifies_end_cells(self):
        # 5 entries for n=4; entry 0 and 4 are one period apart
        v = rows(0.0, 1.0, 2.0, 3.0, 4.0)
        out = pad_staggered(v, "periodic")
        assert np.array_equal(out[0], v[2])
        assert np.array_equal(out[1], v[3])
        assert np.array_equal(out[-2], v[1])
        assert np.array_equal(out[-1], v[2])

    def test_staggered_reflective_center_on_wall(self):
        v = np.array([[1.0, 0.5, 2.0], [1.1, 0.6, 2.1], [1.2, 0.7, 2.2], [1.3, 0.8, 2.3], [1.4, 0.9, 2.4]])
        out = pad_staggered(v, "reflective")
        assert np.allclose(out[1], [1.1, -0.6, 2.1])
        assert np.allclose(out[0], [1.2, -0.7, 2.2])
        assert np.allclose(out[-2], [1.3, -0.8, 2.3])

    def test_padding_deterministic(self):
        rng = np.random.default_rng(0)
        sol = DualSolution(rng.random((6, 3)) + 1.0, rng.random((7, 3)) + 1.0)
        grid = OverlapGrid(6, 0.0, 1.0, "reflective")
        p1 = apply_bc(sol, grid)
        p2 = apply_bc(sol, grid)
        assert np.array_equal(p1.ubar, p2.ubar)
        assert np.array_equal(p1.vbar, p2.vbar)

    def test_ghosts_leave_interior_untouched(self):
        rng = np.random.default_rng(1)
        q = rng.random((8, 3))
        for bc in ("periodic", "outflow", "reflective"):
            out = pad_primary(q, bc)
            assert np.array_equal(out[2:-2], q)
            assert out.shape == (12, 3)


class TestProjection:
    def test_constant_preserved(self):
        upad = np.tile([2.0, 3.0, 4.0], (10, 1))
        s = np.zeros_like(upad)
        T = project_primary_to_staggered(upad, s, dx=0.5)
        assert np.allclose(T, [2.0, 3.0, 4.0])

    def test_means_when_slopes_vanish(self):
        upad = np.zeros((8, 3))
        upad[:, 0] = [0, 0, 1, 3, 5, 7, 7, 7]
        T = project_primary_to_staggered(upad, np.zeros_like(upad), dx=1.0)
        # staggered cell 1 spans interior cells 0 and 1 (values 1 and 3)
        assert np.isclose(T[1, 0], 2.0)

    def test_linear_exactness_with_exact_slopes(self):
        # global linear profile: projection must return exact midpoint values
        n, dx = 16, 0.25
        cells = np.arange(-2, n + 2)
        upad = np.empty((n + 4, 3))
        for k, (a, b) in enumerate(((2.0, 0.5), (1.0, -0.25), (3.0, 1.5))):
            upad[:, k] = a + b * (cells + 0.5) * dx
        slopes = np.empty_like(upad)
        slopes[1:-1] = (upad[2:] - upad[:-2]) / (2 * dx)
        slopes[0] = slopes[1]
        slopes[-1] = slopes[-2]
        T = project_primary_to_staggered(upad, slopes, dx)
        for k, (a, b) in enumerate(((2.0, 0.5), (1.0, -0.25), (3.0, 1.5))):
            exact = a + b * np.arange(0, n + 1) * dx
            assert np.allclose(T[:, k], exact, rtol=1e-14, atol=1e-14)
