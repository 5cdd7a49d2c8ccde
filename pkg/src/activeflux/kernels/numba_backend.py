"""Numba-compiled hot kernels, arithmetic-identical to ``numpy_backend``.

Each kernel writes the same floating-point expressions in the same order as
its numpy twin so the two backends agree bitwise; keep the twins in sync
when touching either.  No ``parallel=True`` and no ``fastmath``: results
must not depend on scheduling or reassociation.

Boundary codes: 0 periodic, 1 outflow, 2 reflective (density and
pressure/energy mirror even, the velocity-like component mirrors odd).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

DEGENERACY_REL_TOL = 1e-12


@njit(cache=True, inline="always")
def _mm3(a, b, c):
    if a > 0.0 and b > 0.0 and c > 0.0:
        return min(min(a, b), c)
    if a < 0.0 and b < 0.0 and c < 0.0:
        return max(max(a, b), c)
    return 0.0


@njit(cache=True)
def _pad_staggered2(v, bc_code):
    n = v.shape[0] - 1
    out = np.empty((n + 5, 3))
    out[2 : n + 3] = v
    if bc_code == 0:  # periodic: the two end cells coincide, period is n
        out[0] = v[n - 2]
        out[1] = v[n - 1]
        out[n + 3] = v[1]
        out[n + 4] = v[2]
    elif bc_code == 1:
        out[0] = v[0]
        out[1] = v[0]
        out[n + 3] = v[n]
        out[n + 4] = v[n]
    else:  # reflective: end cells sit on the mirror planes
        for k in range(3):
            sgn = -1.0 if k == 1 else 1.0
            out[0, k] = sgn * v[2, k]
            out[1, k] = sgn * v[1, k]
            out[n + 3, k] = sgn * v[n - 1, k]
            out[n + 4, k] = sgn * v[n - 2, k]
    return out


@njit(cache=True)
def _pad_staggered1(v, bc_code):
    n = v.shape[0] - 1
    out = np.empty((n + 3, 3))
    out[1 : n + 2] = v
    if bc_code == 0:
        out[0] = v[n - 1]
        out[n + 2] = v[1]
    elif bc_code == 1:
        out[0] = v[0]
        out[n + 2] = v[n]
    else:
        for k in range(3):
            sgn = -1.0 if k == 1 else 1.0
            out[0, k] = sgn * v[1, k]
            out[n + 2, k] = sgn * v[n - 1, k]
    return out


@njit(cache=True)
def _pad_primary2(u, bc_code):
    n = u.shape[0]
    out = np.empty((n + 4, 3))
    out[2 : n + 2] = u
    if bc_code == 0:
        out[0] = u[n - 2]
        out[1] = u[n - 1]
        out[n + 2] = u[0]
        out[n + 3] = u[1]
    elif bc_code == 1:
        out[0] = u[0]
        out[1] = u[0]
        out[n + 2] = u[n - 1]
        out[n + 3] = u[n - 1]
    else:  # mirror plane on the primary faces x_min / x_max
        for k in range(3):
            sgn = -1.0 if k == 1 else 1.0
            out[0, k] = sgn * u[1, k]
            out[1, k] = sgn * u[0, k]
            out[n + 2, k] = sgn * u[n - 1, k]
            out[n + 3, k] = sgn * u[n - 2, k]
    return out


@njit(cache=True)
def _first_invalid_staggered(vbar):
    for i in range(vbar.shape[0]):
        if not (vbar[i, 0] > 0.0 and vbar[i, 2] > 0.0):
            return i
    return -1


@njit(cache=True, inline="always")
def _cell_slope(vpad, i, theta, dx, half, out):
    """Limited slope of padded cell i with the positivity fallback.
    Returns 1 if the fallback fired."""
    for k in range(3):
        l = vpad[i - 1, k]
        c = vpad[i, k]
        r = vpad[i + 1, k]
        out[k] = _mm3(theta * (c - l) / dx, (r - l) / (2.0 * dx), theta * (r - c) / dx)
    lo0 = vpad[i, 0] - half * out[0]
    hi0 = vpad[i, 0] + half * out[0]
    lo2 = vpad[i, 2] - half * out[2]
    hi2 = vpad[i, 2] + half * out[2]
    if not (lo0 > 0.0 and hi0 > 0.0 and lo2 > 0.0 and hi2 > 0.0):
        out[0] = 0.0
        out[1] = 0.0
        out[2] = 0.0
        return 1
    return 0


@njit(cache=True)
def dual_rhs(vpad, gamma, theta, dx):
    m = vpad.shape[0]
    n = m - 5
    half = 0.5 * dx
    npts = n + 2

    # degeneracy guard: 1e-12 of the global max wave speed (interior cells)
    scale = 0.0
    for i in range(2, n + 3):
        scale = max(scale, abs(vpad[i, 1]) + math.sqrt(gamma * vpad[i, 2] / vpad[i, 0]))
    tol = DEGENERACY_REL_TOL * scale

    d_ubar = np.empty((n, 3))
    d_vbar = np.empty((n + 1, 3))
    f_left = np.empty(3)
    f_right = np.empty(3)

    # single rolling sweep over the node points: one new cell slope per
    # iteration; the tendencies of cell j-1 finalize once point j is done
    s_left = np.empty(3)  # slope of padded cell j+1 (left of point j)
    s_right = np.empty(3)  # slope of padded cell j+2 (right of point j)
    vm = np.empty(3)
    vp = np.empty(3)
    vp_prev = np.empty(3)
    ft_prev = np.empty(3)
    ft_cur = np.empty(3)
    bp_prev = np.empty(3)
    bp_cur = np.empty(3)
    fc_prev = np.empty(3)
    fc_cur = np.empty(3)
    cp_prev = 0.0
    n_fallback = _cell_slope(vpad, 1, theta, dx, half, s_left)
    for j in range(npts):
        n_fallback += _cell_slope(vpad, j + 2, theta, dx, half, s_right)
        for k in range(3):
            vm[k] = vpad[j + 1, k] + half * s_left[k]
            vp[k] = vpad[j + 2, k] - half * s_right[k]
        rm, um, pm = vm[0], vm[1], vm[2]
        rp, up, pp = vp[0], vp[1], vp[2]
        cm_snd = math.sqrt(gamma * pm / rm)
        cp_snd = math.sqrt(gamma * pp / rp)
        ap = max(max(um + cm_snd, up + cp_snd), 0.0)
        am = min(min(um - cm_snd, up - cp_snd), 0.0)

        fm0, fm1, fm2 = rm * um, 0.5 * um * um, pm * um
        fp0, fp1, fp2 = rp * up, 0.5 * up * up, pp * up
        denom = ap - am
        if denom < tol:
            ft_cur[0] = 0.5 * (fm0 + fp0)
            ft_cur[1] = 0.5 * (fm1 + fp1)
            ft_cur[2] = 0.5 * (fm2 + fp2)
            bp_cur[0] = 0.0
            bp_cur[1] = 0.0
            bp_cur[2] = 0.0
            cp_cur = 0.0
            cm_cur = 0.0
        else:
            ft_cur[0] = (ap * fm0 - am * fp0) / denom + ap * am / denom * (rp - rm)
            ft_cur[1] = (ap * fm1 - am * fp1) / denom + ap * am / denom * (up - um)
            ft_cur[2] = (ap * fm2 - am * fp2) / denom + ap * am / denom * (pp - pm)
            bp_cur[0] = 0.0
            bp_cur[1] = -(pp - pm) / (0.5 * (rm + rp))
            bp_cur[2] = -(gamma - 1.0) * (0.5 * (pm + pp)) * (up - um)
            cp_cur = ap / denom
            cm_cur = am / denom

        if j >= 1:
            i = j - 1  # staggered cell between points j-1 and j
            ri = vpad[i + 2, 0]
            ui = vpad[i + 2, 1]
            pi = vpad[i + 2, 2]
            j1 = vm[1] - vp_prev[1]
            j2 = vm[2] - vp_prev[2]
            bc1 = -j2 / ri
            bc2 = -(gamma - 1.0) * pi * j1
            num0 = ft_cur[0] - ft_prev[0] - cp_prev * bp_prev[0] + cm_cur * bp_cur[0]
            num1 = ft_cur[1] - ft_prev[1] - bc1 - cp_prev * bp_prev[1] + cm_cur * bp_cur[1]
            num2 = ft_cur[2] - ft_prev[2] - bc2 - cp_prev * bp_prev[2] + cm_cur * bp_cur[2]
            d_vbar[i, 0] = -num0 / dx
            d_vbar[i, 1] = -num1 / dx
            d_vbar[i, 2] = -num2 / dx

            E = pi / (gamma - 1.0) + 0.5 * ri * ui * ui
            fc_cur[0] = ri * ui
            fc_cur[1] = ri * ui * ui + pi
            fc_cur[2] = ui * (E + pi)
            if i == 0:
                f_left[:] = fc_cur
            if i == n:
                f_right[:] = fc_cur
            if i >= 1:
                for k in range(3):
                    d_ubar[i - 1, k] = -(fc_cur[k] - fc_prev[k]) / dx
            fc_prev[:] = fc_cur

        ft_prev[:] = ft_cur
        bp_prev[:] = bp_cur
        vp_prev[:] = vp
        cp_prev = cp_cur
        s_left[:] = s_right
    return d_ubar, d_vbar, f_left, f_right, n_fallback


@njit(cache=True)
def _rhs_combine(
    vpad, u_base, v_base, u_stage, v_stage, c0, c1, dt, gamma, theta, dx, f_left, f_right, fw
):
    """One stage of SSP-RK3 with the Shu-Osher combine fused into the RHS
    sweep: writes c0 * base + c1 * (stage + dt * tendency) for both fields
    without materializing the tendency arrays.  Accumulates the boundary
    conservative fluxes with weight ``fw``.  Returns (u_out, v_out,
    n_fallback); the sweep itself mirrors ``dual_rhs``.
    """
    m = vpad.shape[0]
    n = m - 5
    half = 0.5 * dx
    npts = n + 2

    scale = 0.0
    for i in range(2, n + 3):
        scale = max(scale, abs(vpad[i, 1]) + math.sqrt(gamma * vpad[i, 2] / vpad[i, 0]))
    tol = DEGENERACY_REL_TOL * scale

    u_out = np.empty((n, 3))
    v_out = np.empty((n + 1, 3))

    s_left = np.empty(3)
    s_right = np.empty(3)
    vm = np.empty(3)
    vp = np.empty(3)
    vp_prev = np.empty(3)
    ft_prev = np.empty(3)
    ft_cur = np.empty(3)
    bp_prev = np.empty(3)
    bp_cur = np.empty(3)
    fc_prev = np.empty(3)
    fc_cur = np.empty(3)
    cp_prev = 0.0
    n_fallback = _cell_slope(vpad, 1, theta, dx, half, s_left)
    for j in range(npts):
        n_fallback += _cell_slope(vpad, j + 2, theta, dx, half, s_right)
        for k in range(3):
            vm[k] = vpad[j + 1, k] + half * s_left[k]
            vp[k] = vpad[j + 2, k] - half * s_right[k]
        rm, um, pm = vm[0], vm[1], vm[2]
        rp, up, pp = vp[0], vp[1], vp[2]
        cm_snd = math.sqrt(gamma * pm / rm)
        cp_snd = math.sqrt(gamma * pp / rp)
        ap = max(max(um + cm_snd, up + cp_snd), 0.0)
        am = min(min(um - cm_snd, up - cp_snd), 0.0)

        fm0, fm1, fm2 = rm * um, 0.5 * um * um, pm * um
        fp0, fp1, fp2 = rp * up, 0.5 * up * up, pp * up
        denom = ap - am
        if denom < tol:
            ft_cur[0] = 0.5 * (fm0 + fp0)
            ft_cur[1] = 0.5 * (fm1 + fp1)
            ft_cur[2] = 0.5 * (fm2 + fp2)
            bp_cur[0] = 0.0
            bp_cur[1] = 0.0
            bp_cur[2] = 0.0
            cp_cur = 0.0
            cm_cur = 0.0
        else:
            ft_cur[0] = (ap * fm0 - am * fp0) / denom + ap * am / denom * (rp - rm)
            ft_cur[1] = (ap * fm1 - am * fp1) / denom + ap * am / denom * (up - um)
            ft_cur[2] = (ap * fm2 - am * fp2) / denom + ap * am / denom * (pp - pm)
            bp_cur[0] = 0.0
            bp_cur[1] = -(pp - pm) / (0.5 * (rm + rp))
            bp_cur[2] = -(gamma - 1.0) * (0.5 * (pm + pp)) * (up - um)
            cp_cur = ap / denom
            cm_cur = am / denom

        if j >= 1:
            i = j - 1
            ri = vpad[i + 2, 0]
            ui = vpad[i + 2, 1]
            pi = vpad[i + 2, 2]
            j1 = vm[1] - vp_prev[1]
            j2 = vm[2] - vp_prev[2]
            bc1 = -j2 / ri
            bc2 = -(gamma - 1.0) * pi * j1
            num0 = ft_cur[0] - ft_prev[0] - cp_prev * bp_prev[0] + cm_cur * bp_cur[0]
            num1 = ft_cur[1] - ft_prev[1] - bc1 - cp_prev * bp_prev[1] + cm_cur * bp_cur[1]
            num2 = ft_cur[2] - ft_prev[2] - bc2 - cp_prev * bp_prev[2] + cm_cur * bp_cur[2]
            v_out[i, 0] = c0 * v_base[i, 0] + c1 * (v_stage[i, 0] + dt * (-num0 / dx))
            v_out[i, 1] = c0 * v_base[i, 1] + c1 * (v_stage[i, 1] + dt * (-num1 / dx))
            v_out[i, 2] = c0 * v_base[i, 2] + c1 * (v_stage[i, 2] + dt * (-num2 / dx))

            E = pi / (gamma - 1.0) + 0.5 * ri * ui * ui
            fc_cur[0] = ri * ui
            fc_cur[1] = ri * ui * ui + pi
            fc_cur[2] = ui * (E + pi)
            if i == 0:
                for k in range(3):
                    f_left[k] += fw * fc_cur[k]
            if i == n:
                for k in range(3):
                    f_right[k] += fw * fc_cur[k]
            if i >= 1:
                for k in range(3):
                    du = -(fc_cur[k] - fc_prev[k]) / dx
                    u_out[i - 1, k] = c0 * u_base[i - 1, k] + c1 * (
                        u_stage[i - 1, k] + dt * du
                    )
            fc_prev[:] = fc_cur

        ft_prev[:] = ft_cur
        bp_prev[:] = bp_cur
        vp_prev[:] = vp
        cp_prev = cp_cur
        s_left[:] = s_right
    return u_out, v_out, n_fallback


@njit(cache=True)
def rk3_step(ubar, vbar, gamma, theta, dx, dt, bc_code, floor):
    """One fused SSP-RK3 step of the dual system.

    Returns (u_new, v_new, f_left, f_right, n_fallback, bad_stage, bad_idx)
    where f_left/f_right are the stage-weighted conservative boundary fluxes
    (weights 1/6, 1/6, 2/3) and bad_stage 1..3 flags an invalid staggered
    field entering that stage (bad_stage 0: clean).  ``floor`` > 0 clamps
    density and pressure instead of failing.
    """
    n = ubar.shape[0]
    f_left = np.zeros(3)
    f_right = np.zeros(3)
    nfb = 0

    u0 = ubar
    v0 = vbar
    if floor > 0.0:
        v0 = vbar.copy()
        for i in range(n + 1):
            v0[i, 0] = max(v0[i, 0], floor)
            v0[i, 2] = max(v0[i, 2], floor)
    bad = _first_invalid_staggered(v0)
    if bad >= 0:
        return ubar, vbar, f_left, f_right, 0, 1, bad
    u1, v1, nf = _rhs_combine(
        _pad_staggered2(v0, bc_code), u0, v0, u0, v0,
        0.0, 1.0, dt, gamma, theta, dx, f_left, f_right, 1.0 / 6.0,
    )
    nfb += nf

    if floor > 0.0:
        for i in range(n + 1):
            v1[i, 0] = max(v1[i, 0], floor)
            v1[i, 2] = max(v1[i, 2], floor)
    bad = _first_invalid_staggered(v1)
    if bad >= 0:
        return ubar, vbar, f_left, f_right, nfb, 2, bad
    u2, v2, nf = _rhs_combine(
        _pad_staggered2(v1, bc_code), u0, v0, u1, v1,
        0.75, 0.25, dt, gamma, theta, dx, f_left, f_right, 1.0 / 6.0,
    )
    nfb += nf

    if floor > 0.0:
        for i in range(n + 1):
            v2[i, 0] = max(v2[i, 0], floor)
            v2[i, 2] = max(v2[i, 2], floor)
    bad = _first_invalid_staggered(v2)
    if bad >= 0:
        return ubar, vbar, f_left, f_right, nfb, 3, bad
    u_new, v_new, nf = _rhs_combine(
        _pad_staggered2(v2, bc_code), u0, v0, u2, v2,
        1.0 / 3.0, 2.0 / 3.0, dt, gamma, theta, dx, f_left, f_right, 2.0 / 3.0,
    )
    nfb += nf
    return u_new, v_new, f_left, f_right, nfb, 0, -1


@njit(cache=True)
def cons_max_speed(ubar, gamma):
    n = ubar.shape[0]
    for i in range(n):
        if not ubar[i, 0] > 0.0:
            return 0.0, i
    for i in range(n):
        u = ubar[i, 1] / ubar[i, 0]
        p = (gamma - 1.0) * (ubar[i, 2] - 0.5 * ubar[i, 1] * u)
        if not p > 0.0:
            return 0.0, i
    smax = 0.0
    for i in range(n):
        u = ubar[i, 1] / ubar[i, 0]
        p = (gamma - 1.0) * (ubar[i, 2] - 0.5 * ubar[i, 1] * u)
        smax = max(smax, abs(u) + math.sqrt(gamma * p / ubar[i, 0]))
    return smax, -1


@njit(cache=True)
def max_wave_speed(ubar, vbar, gamma):
    s_u, bad = cons_max_speed(ubar, gamma)
    if bad >= 0:
        return 0.0, 1, bad
    m = vbar.shape[0]
    for i in range(m):
        if not (vbar[i, 0] > 0.0 and vbar[i, 2] > 0.0):
            return 0.0, 2, i
    s_v = 0.0
    for i in range(m):
        s_v = max(s_v, abs(vbar[i, 1]) + math.sqrt(gamma * vbar[i, 2] / vbar[i, 0]))
    return max(s_u, s_v), 0, -1


@njit(cache=True)
def si_raw_core(ubar, vbar, gamma, alpha_id):
    n = ubar.shape[0]
    eps = np.empty(n)
    for i in range(n):
        r = 0.5 * (vbar[i, 0] + vbar[i + 1, 0])
        u = 0.5 * (vbar[i, 1] + vbar[i + 1, 1])
        p = 0.5 * (vbar[i, 2] + vbar[i + 1, 2])
        m0 = r
        m1 = r * u
        m2 = p / (gamma - 1.0) + 0.5 * r * u * u
        if alpha_id == 0:
            a_u = ubar[i, 0]
            a_v = m0
        elif alpha_id == 1:
            a_u = ubar[i, 1]
            a_v = m1
        elif alpha_id == 2:
            a_u = ubar[i, 2]
            a_v = m2
        else:
            a_u = (gamma - 1.0) * (ubar[i, 2] - 0.5 * ubar[i, 1] * ubar[i, 1] / ubar[i, 0])
            a_v = (gamma - 1.0) * (m2 - 0.5 * m1 * m1 / m0)
        eps[i] = abs(a_u - a_v)
    return eps


@njit(cache=True)
def staggered_targets(ubar_pad, gamma, theta, dx):
    m = ubar_pad.shape[0]
    n = m - 4
    s = np.zeros((m, 3))
    for i in range(1, m - 1):
        for k in range(3):
            l = ubar_pad[i - 1, k]
            c = ubar_pad[i, k]
            r = ubar_pad[i + 1, k]
            s[i, k] = _mm3(theta * (c - l) / dx, (r - l) / (2.0 * dx), theta * (r - c) / dx)

    t_prim = np.empty((n + 1, 3))
    t_cons = np.empty((n + 1, 3))
    for i in range(n + 1):
        for k in range(3):
            t_cons[i, k] = 0.5 * (ubar_pad[i + 1, k] + ubar_pad[i + 2, k]) + (dx / 8.0) * (
                s[i + 1, k] - s[i + 2, k]
            )
    for i in range(n + 1):
        r = t_cons[i, 0]
        u = t_cons[i, 1] / r
        p = (gamma - 1.0) * (t_cons[i, 2] - 0.5 * t_cons[i, 1] * u)
        if not (r > 0.0 and p > 0.0):
            return t_cons, i
        t_prim[i, 0] = r
        t_prim[i, 1] = u
        t_prim[i, 2] = p
    return t_prim, -1


@njit(cache=True)
def residual_limit_update(t_prim, vbar, rpad, mask):
    n1 = vbar.shape[0]
    v_new = np.empty((n1, 3))
    for i in range(n1):
        if mask[i]:
            for k in range(3):
                v_new[i, k] = t_prim[i, k] + _mm3(rpad[i, k], rpad[i + 1, k], rpad[i + 2, k])
        else:
            for k in range(3):
                v_new[i, k] = vbar[i, k]
    for i in range(n1):
        if not (v_new[i, 0] > 0.0 and v_new[i, 2] > 0.0):
            return v_new, i
    return v_new, -1


@njit(cache=True)
def flux_form_smooth(ubar, vbar, gamma, beta, theta, dx, face_mask):
    n = ubar.shape[0]
    m = vbar.shape[0]
    w = np.empty((m, 3))
    for i in range(m):
        r = vbar[i, 0]
        u = vbar[i, 1]
        p = vbar[i, 2]
        w[i, 0] = r
        w[i, 1] = r * u
        w[i, 2] = p / (gamma - 1.0) + 0.5 * r * u * u
    g = np.zeros((n + 1, 3))
    for i in range(1, n):
        if face_mask[i]:
            for k in range(3):
                slope_ref = _mm3(
                    theta * (w[i, k] - w[i - 1, k]) / dx,
                    (w[i + 1, k] - w[i - 1, k]) / (2.0 * dx),
                    theta * (w[i + 1, k] - w[i, k]) / dx,
                )
                g[i, k] = -(beta / 2.0) * ((ubar[i, k] - ubar[i - 1, k]) - dx * slope_ref)
    u_new = np.empty((n, 3))
    for i in range(n):
        for k in range(3):
            u_new[i, k] = ubar[i, k] - (g[i + 1, k] - g[i, k])
    for i in range(n):
        p = (gamma - 1.0) * (u_new[i, 2] - 0.5 * u_new[i, 1] * u_new[i, 1] / u_new[i, 0])
        if not (u_new[i, 0] > 0.0 and p > 0.0):
            return u_new, i
    return u_new, -1


@njit(cache=True, inline="always")
def _cons_of_prim(v, i, gamma, out):
    r = v[i, 0]
    u = v[i, 1]
    p = v[i, 2]
    out[0] = r
    out[1] = r * u
    out[2] = p / (gamma - 1.0) + 0.5 * r * u * u


@njit(cache=True, inline="always")
def _proj_slope_k(upad, i, k, theta, dx):
    """Plain minmod slope of padded primary cell i, component k."""
    l = upad[i - 1, k]
    c = upad[i, k]
    r = upad[i + 1, k]
    return _mm3(theta * (c - l) / dx, (r - l) / (2.0 * dx), theta * (r - c) / dx)


@njit(cache=True, inline="always")
def _target_at(upad, i, gamma, theta, dx, floor, out):
    """Primitive projection target of staggered cell i, written into ``out``.
    Returns 0 on success, 1 on lost positivity (with floor <= 0)."""
    s0l = _proj_slope_k(upad, i + 1, 0, theta, dx)
    s1l = _proj_slope_k(upad, i + 1, 1, theta, dx)
    s2l = _proj_slope_k(upad, i + 1, 2, theta, dx)
    s0r = _proj_slope_k(upad, i + 2, 0, theta, dx)
    s1r = _proj_slope_k(upad, i + 2, 1, theta, dx)
    s2r = _proj_slope_k(upad, i + 2, 2, theta, dx)
    t0 = 0.5 * (upad[i + 1, 0] + upad[i + 2, 0]) + (dx / 8.0) * (s0l - s0r)
    t1 = 0.5 * (upad[i + 1, 1] + upad[i + 2, 1]) + (dx / 8.0) * (s1l - s1r)
    t2 = 0.5 * (upad[i + 1, 2] + upad[i + 2, 2]) + (dx / 8.0) * (s2l - s2r)
    if floor > 0.0:
        r = max(t0, floor)
        u = t1 / r
        p = max((gamma - 1.0) * (t2 - 0.5 * t1 * u), floor)
    else:
        r = t0
        u = t1 / r
        p = (gamma - 1.0) * (t2 - 0.5 * t1 * u)
        if not (r > 0.0 and p > 0.0):
            return 1
    out[0] = r
    out[1] = u
    out[2] = p
    return 0


@njit(cache=True)
def postprocess_step(ubar, vbar, gamma, theta, dx, beta, bc_code, stag_mask, face_mask, floor):
    """Fused coupling step: staggered targets, residual-limited update of the
    staggered field, then flux-form smoothing of the primary field.

    Returns (u_new, v_new, bad_code, bad_idx); bad_code 1 = projected target,
    2 = coupled staggered average, 3 = smoothed primary average lost
    positivity.  With floor > 0, density and pressure are clamped from below
    everywhere instead of reporting a bad cell.
    """
    n = ubar.shape[0]
    upad = _pad_primary2(ubar, bc_code)
    v_new = np.empty((n + 1, 3))

    # residuals at the two cells feeding the wrap/mirror ghost values
    t_tmp = np.empty(3)
    r_first = np.empty(3)  # r_1
    r_second_last = np.empty(3)  # r_{n-1}
    if _target_at(upad, 1, gamma, theta, dx, floor, t_tmp):
        return ubar, vbar, 1, 1
    for k in range(3):
        r_first[k] = vbar[1, k] - t_tmp[k]
    if _target_at(upad, n - 1, gamma, theta, dx, floor, t_tmp):
        return ubar, vbar, 1, n - 1
    for k in range(3):
        r_second_last[k] = vbar[n - 1, k] - t_tmp[k]

    # rolling couple sweep: cell c finalizes once r_{c+1} is known
    t_prev = np.empty(3)
    t_cur = np.empty(3)
    r_pp = np.empty(3)  # r_{c-1}
    r_p = np.empty(3)  # r_c
    r_c = np.empty(3)  # r_{c+1}
    if _target_at(upad, 0, gamma, theta, dx, floor, t_prev):
        return ubar, vbar, 1, 0
    for k in range(3):
        r_p[k] = vbar[0, k] - t_prev[k]
    # left ghost residual r_{-1} per boundary policy
    if bc_code == 0:
        r_pp[:] = r_second_last
    elif bc_code == 1:
        r_pp[:] = r_p
    else:
        for k in range(3):
            sgn = -1.0 if k == 1 else 1.0
            r_pp[k] = sgn * r_first[k]
    for i in range(1, n + 2):
        if i <= n:
            if _target_at(upad, i, gamma, theta, dx, floor, t_cur):
                return ubar, vbar, 1, i
            for k in range(3):
                r_c[k] = vbar[i, k] - t_cur[k]
        else:  # right ghost residual r_{n+1}
            if bc_code == 0:
                r_c[:] = r_first
            elif bc_code == 1:
                r_c[:] = r_p  # r_p holds r_n here
            else:
                for k in range(3):
                    sgn = -1.0 if k == 1 else 1.0
                    r_c[k] = sgn * r_second_last[k]
        c = i - 1
        if stag_mask[c]:
            for k in range(3):
                v_new[c, k] = t_prev[k] + _mm3(r_pp[k], r_p[k], r_c[k])
        else:
            for k in range(3):
                v_new[c, k] = vbar[c, k]
        if floor > 0.0:
            v_new[c, 0] = max(v_new[c, 0], floor)
            v_new[c, 2] = max(v_new[c, 2], floor)
        elif not (v_new[c, 0] > 0.0 and v_new[c, 2] > 0.0):
            return ubar, vbar, 2, c
        r_pp[:] = r_p
        r_p[:] = r_c
        t_prev[:] = t_cur

    # rolling smooth sweep over the interior faces; w = U(v_new)
    u_new = np.empty((n, 3))
    w_m = np.empty(3)
    w_c = np.empty(3)
    w_p = np.empty(3)
    g_prev = np.empty(3)
    g_cur = np.empty(3)
    for k in range(3):
        g_prev[k] = 0.0  # g_0 = 0: boundary face carries no correction
    _cons_of_prim(v_new, 0, gamma, w_m)
    _cons_of_prim(v_new, 1, gamma, w_c)
    for f in range(1, n + 1):
        if f < n:
            _cons_of_prim(v_new, f + 1, gamma, w_p)
            if face_mask[f]:
                for k in range(3):
                    slope_ref = _mm3(
                        theta * (w_c[k] - w_m[k]) / dx,
                        (w_p[k] - w_m[k]) / (2.0 * dx),
                        theta * (w_p[k] - w_c[k]) / dx,
                    )
                    g_cur[k] = -(beta / 2.0) * ((ubar[f, k] - ubar[f - 1, k]) - dx * slope_ref)
            else:
                for k in range(3):
                    g_cur[k] = 0.0
        else:
            for k in range(3):
                g_cur[k] = 0.0  # g_n = 0
        c = f - 1
        for k in range(3):
            u_new[c, k] = ubar[c, k] - (g_cur[k] - g_prev[k])
        if floor > 0.0:
            u_new[c, 0] = max(u_new[c, 0], floor)
            e_min = floor / (gamma - 1.0) + 0.5 * u_new[c, 1] * u_new[c, 1] / u_new[c, 0]
            u_new[c, 2] = max(u_new[c, 2], e_min)
        else:
            p = (gamma - 1.0) * (u_new[c, 2] - 0.5 * u_new[c, 1] * u_new[c, 1] / u_new[c, 0])
            if not (u_new[c, 0] > 0.0 and p > 0.0):
                return ubar, vbar, 3, c
        g_prev[:] = g_cur
        w_m[:] = w_c
        w_c[:] = w_p
    return u_new, v_new, 0, -1


@njit(cache=True)
def llf_step(upad, gamma, dt_over_dx):
    m = upad.shape[0]
    n = m - 2
    f = np.empty((m, 3))
    s = np.empty(m)
    for i in range(m):
        r = upad[i, 0]
        u = upad[i, 1] / r
        p = (gamma - 1.0) * (upad[i, 2] - 0.5 * upad[i, 1] * u)
        f[i, 0] = upad[i, 1]
        f[i, 1] = upad[i, 1] * u + p
        f[i, 2] = u * (upad[i, 2] + p)
        s[i] = abs(u) + math.sqrt(gamma * p / r)
    fhat = np.empty((n + 1, 3))
    for i in range(n + 1):
        a = max(s[i], s[i + 1])
        for k in range(3):
            fhat[i, k] = 0.5 * (f[i, k] + f[i + 1, k]) - 0.5 * a * (upad[i + 1, k] - upad[i, k])
    u_new = np.empty((n, 3))
    for i in range(n):
        for k in range(3):
            u_new[i, k] = upad[i + 1, k] - dt_over_dx * (fhat[i + 1, k] - fhat[i, k])
    return u_new


@njit(cache=True)
def _pad_primary1(u, bc_code):
    n = u.shape[0]
    out = np.empty((n + 2, 3))
    out[1 : n + 1] = u
    if bc_code == 0:
        out[0] = u[n - 1]
        out[n + 1] = u[0]
    elif bc_code == 1:
        out[0] = u[0]
        out[n + 1] = u[n - 1]
    else:
        for k in range(3):
            sgn = -1.0 if k == 1 else 1.0
            out[0, k] = sgn * u[0, k]
            out[n + 1, k] = sgn * u[n - 1, k]
    return out


@njit(cache=True)
def llf_solve(ubar, gamma, dx, t_end, cfl, bc_code):
    """First-order LLF / forward-Euler integration to t_end.

    Returns (ubar_final, steps, bad_idx, bad_time); bad_idx >= 0 reports
    lost positivity.
    """
    t = 0.0
    steps = 0
    eps = 1e-14 * max(1.0, t_end)
    while t < t_end - eps:
        smax, bad = cons_max_speed(ubar, gamma)
        if bad >= 0:
            return ubar, steps, bad, t
        dt = min(cfl * dx / smax, t_end - t)
        upad = _pad_primary1(ubar, bc_code)
        ubar = llf_step(upad, gamma, dt / dx)
        t += dt
        steps += 1
    return ubar, steps, -1, t
