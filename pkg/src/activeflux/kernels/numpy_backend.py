"""Pure-numpy implementations of the hot kernels.

Every function here has a numba twin in ``numba_backend`` with identical
arithmetic (same expression order), so the two backends agree bitwise.
Validity signaling uses returned indices instead of exceptions; callers
raise with context.  ``bad_field``/``bad_idx`` of (0, -1) means clean.
"""

from __future__ import annotations

import numpy as np

DEGENERACY_REL_TOL = 1e-12  # a+ - a- below this fraction of the speed scale


def minmod3(a, b, c):
    """Componentwise minmod: argument of least magnitude if all share a sign."""
    pos = (a > 0.0) & (b > 0.0) & (c > 0.0)
    neg = (a < 0.0) & (b < 0.0) & (c < 0.0)
    lo = np.minimum(np.minimum(a, b), c)
    hi = np.maximum(np.maximum(a, b), c)
    return np.where(pos, lo, np.where(neg, hi, 0.0))


def minmod_slopes(qpad, theta, dx):
    """Generalized minmod slopes for rows 1..M-2 of a padded array.

    Returns an array shaped like ``qpad`` whose first and last rows are zero
    (no neighbor data there).
    """
    s = np.zeros_like(qpad)
    l, c, r = qpad[:-2], qpad[1:-1], qpad[2:]
    s[1:-1] = minmod3(theta * (c - l) / dx, (r - l) / (2.0 * dx), theta * (r - c) / dx)
    return s


def slopes_with_fallback(vpad, theta, dx):
    """Minmod slopes on a padded primitive field, zeroed per cell whenever a
    reconstructed endpoint would lose positivity.  Returns (slopes, count)."""
    s = minmod_slopes(vpad, theta, dx)
    half = 0.5 * dx
    lo = vpad - half * s
    hi = vpad + half * s
    ok = (lo[:, 0] > 0.0) & (hi[:, 0] > 0.0) & (lo[:, 2] > 0.0) & (hi[:, 2] > 0.0)
    ok[0] = ok[-1] = True  # edge rows carry no slope
    n_fallback = int(np.count_nonzero(~ok))
    if n_fallback:
        s[~ok] = 0.0
    return s, n_fallback


def reconstruct_core(vpad, theta, dx):
    """Left/right point values at the N+2 node points from a padded staggered
    field (N+5, 3).  Returns (v_minus, v_plus, n_fallback)."""
    n = vpad.shape[0] - 5
    s, n_fallback = slopes_with_fallback(vpad, theta, dx)
    half = 0.5 * dx
    vm = vpad[1 : n + 3] + half * s[1 : n + 3]
    vp = vpad[2 : n + 4] - half * s[2 : n + 4]
    return vm, vp, n_fallback


def local_speeds_core(vm, vp, gamma):
    cm = np.sqrt(gamma * vm[:, 2] / vm[:, 0])
    cp = np.sqrt(gamma * vp[:, 2] / vp[:, 0])
    a_plus = np.maximum(np.maximum(vm[:, 1] + cm, vp[:, 1] + cp), 0.0)
    a_minus = np.minimum(np.minimum(vm[:, 1] - cm, vp[:, 1] - cp), 0.0)
    return a_plus, a_minus


def _prim_point_flux(v):
    r, u, p = v[:, 0], v[:, 1], v[:, 2]
    return np.stack([r * u, 0.5 * u * u, p * u], axis=-1)


def pccu_flux_core(vm, vp, a_plus, a_minus, gamma, scale=None):
    """Central-upwind flux and linear-path jump term at each node point.

    ``scale`` is the speed scale for the degeneracy guard; by default it is
    taken from the point speeds themselves.  Returns (ftilde, b_psi,
    coef_plus, coef_minus) where the coefs are a+/(a+ - a-) and
    a-/(a+ - a-), zeroed on the degenerate branch.
    """
    fm = _prim_point_flux(vm)
    fp = _prim_point_flux(vp)
    denom = a_plus - a_minus
    if scale is None:
        scale = max(float(a_plus.max()), float((-a_minus).max())) if a_plus.size else 0.0
    deg = denom < DEGENERACY_REL_TOL * scale
    safe = np.where(deg, 1.0, denom)

    jump = vp - vm
    ftilde = (a_plus[:, None] * fm - a_minus[:, None] * fp) / safe[:, None] + (
        a_plus * a_minus / safe
    )[:, None] * jump
    ftilde = np.where(deg[:, None], 0.5 * (fm + fp), ftilde)

    vmid = 0.5 * (vm + vp)
    b_psi = np.empty_like(vm)
    b_psi[:, 0] = 0.0
    b_psi[:, 1] = -jump[:, 2] / vmid[:, 0]
    b_psi[:, 2] = -(gamma - 1.0) * vmid[:, 2] * jump[:, 1]
    b_psi = np.where(deg[:, None], 0.0, b_psi)

    coef_plus = np.where(deg, 0.0, a_plus / safe)
    coef_minus = np.where(deg, 0.0, a_minus / safe)
    return ftilde, b_psi, coef_plus, coef_minus


def _cons_point_flux(v, gamma):
    r, u, p = v[:, 0], v[:, 1], v[:, 2]
    E = p / (gamma - 1.0) + 0.5 * r * u * u
    return np.stack([r * u, r * u * u + p, u * (E + p)], axis=-1)


def dual_rhs(vpad, gamma, theta, dx):
    """Tendencies of both fields from a padded staggered primitive field.

    Returns (d_ubar (N,3), d_vbar (N+1,3), f_left (3,), f_right (3,),
    n_fallback).  The conservative side uses the unlimited interface fluxes
    F(U(vbar)); the primitive side is the path-conservative central-upwind
    discretization with limited point values.
    """
    n = vpad.shape[0] - 5
    v_int = vpad[2 : n + 3]  # interior staggered field, N+1 rows

    # conservative side: point fluxes at the staggered centers
    fc = _cons_point_flux(v_int, gamma)
    d_ubar = -(fc[1:] - fc[:-1]) / dx

    # degeneracy guard: 1e-12 of the global max wave speed (interior cells)
    scale = float(
        np.max(np.abs(v_int[:, 1]) + np.sqrt(gamma * v_int[:, 2] / v_int[:, 0]))
    )

    # primitive side: PCCU at the N+2 node points
    vm, vp, n_fallback = reconstruct_core(vpad, theta, dx)
    a_plus, a_minus = local_speeds_core(vm, vp, gamma)
    ftilde, b_psi, coef_p, coef_m = pccu_flux_core(vm, vp, a_plus, a_minus, gamma, scale)

    # in-cell path term B(vbar_i) applied to the jump across the cell
    jump_in = vm[1:] - vp[:-1]
    b_cell = np.empty_like(v_int)
    b_cell[:, 0] = 0.0
    b_cell[:, 1] = -jump_in[:, 2] / v_int[:, 0]
    b_cell[:, 2] = -(gamma - 1.0) * v_int[:, 2] * jump_in[:, 1]

    d_vbar = -(
        ftilde[1:]
        - ftilde[:-1]
        - b_cell
        - coef_p[:-1, None] * b_psi[:-1]
        + coef_m[1:, None] * b_psi[1:]
    ) / dx

    return d_ubar, d_vbar, fc[0].copy(), fc[-1].copy(), n_fallback


_MIRROR = np.array([1.0, -1.0, 1.0])


def _pad_staggered2(v, bc_code):
    n = v.shape[0] - 1
    if bc_code == 0:  # periodic: the two end cells coincide, period is n
        left, right = v[n - 2 : n], v[1:3]
    elif bc_code == 1:
        left, right = np.repeat(v[:1], 2, axis=0), np.repeat(v[-1:], 2, axis=0)
    else:  # reflective: end cells sit on the mirror planes
        left, right = v[2:0:-1] * _MIRROR, v[n - 1 : n - 3 : -1] * _MIRROR
    return np.concatenate([left, v, right], axis=0)


def _pad_staggered1(v, bc_code):
    n = v.shape[0] - 1
    if bc_code == 0:
        left, right = v[n - 1 : n], v[1:2]
    elif bc_code == 1:
        left, right = v[:1], v[-1:]
    else:
        left, right = v[1:2] * _MIRROR, v[n - 1 : n] * _MIRROR
    return np.concatenate([left, v, right], axis=0)


def _pad_primary2(u, bc_code):
    n = u.shape[0]
    if bc_code == 0:
        left, right = u[-2:], u[:2]
    elif bc_code == 1:
        left, right = np.repeat(u[:1], 2, axis=0), np.repeat(u[-1:], 2, axis=0)
    else:  # mirror plane on the primary faces
        left, right = u[1::-1] * _MIRROR, u[: n - 3 : -1] * _MIRROR
    return np.concatenate([left, u, right], axis=0)


def _pad_primary1(u, bc_code):
    n = u.shape[0]
    if bc_code == 0:
        left, right = u[-1:], u[:1]
    elif bc_code == 1:
        left, right = u[:1], u[-1:]
    else:
        left, right = u[:1] * _MIRROR, u[n - 1 :] * _MIRROR
    return np.concatenate([left, u, right], axis=0)


def _first_invalid_staggered(vbar):
    ok = (vbar[:, 0] > 0.0) & (vbar[:, 2] > 0.0)
    if ok.all():
        return -1
    return int(np.argmin(ok))


def _floor_staggered(v, floor):
    v = v.copy()
    v[:, 0] = np.maximum(v[:, 0], floor)
    v[:, 2] = np.maximum(v[:, 2], floor)
    return v


def rk3_step(ubar, vbar, gamma, theta, dx, dt, bc_code, floor):
    """One fused SSP-RK3 step of the dual system (see the numba twin)."""
    f_left = np.zeros(3)
    f_right = np.zeros(3)
    nfb = 0

    u0, v0 = ubar, vbar
    if floor > 0.0:
        v0 = _floor_staggered(vbar, floor)
    bad = _first_invalid_staggered(v0)
    if bad >= 0:
        return ubar, vbar, f_left, f_right, 0, 1, bad
    du0, dv0, fl, fr, nf = dual_rhs(_pad_staggered2(v0, bc_code), gamma, theta, dx)
    nfb += nf
    f_left += (1.0 / 6.0) * fl
    f_right += (1.0 / 6.0) * fr
    u1 = u0 + dt * du0
    v1 = v0 + dt * dv0

    if floor > 0.0:
        v1 = _floor_staggered(v1, floor)
    bad = _first_invalid_staggered(v1)
    if bad >= 0:
        return ubar, vbar, f_left, f_right, nfb, 2, bad
    du1, dv1, fl, fr, nf = dual_rhs(_pad_staggered2(v1, bc_code), gamma, theta, dx)
    nfb += nf
    f_left += (1.0 / 6.0) * fl
    f_right += (1.0 / 6.0) * fr
    u2 = 0.75 * u0 + 0.25 * (u1 + dt * du1)
    v2 = 0.75 * v0 + 0.25 * (v1 + dt * dv1)

    if floor > 0.0:
        v2 = _floor_staggered(v2, floor)
    bad = _first_invalid_staggered(v2)
    if bad >= 0:
        return ubar, vbar, f_left, f_right, nfb, 3, bad
    du2, dv2, fl, fr, nf = dual_rhs(_pad_staggered2(v2, bc_code), gamma, theta, dx)
    nfb += nf
    f_left += (2.0 / 3.0) * fl
    f_right += (2.0 / 3.0) * fr
    u_new = (1.0 / 3.0) * u0 + (2.0 / 3.0) * (u2 + dt * du2)
    v_new = (1.0 / 3.0) * v0 + (2.0 / 3.0) * (v2 + dt * dv2)
    return u_new, v_new, f_left, f_right, nfb, 0, -1


def postprocess_step(ubar, vbar, gamma, theta, dx, beta, bc_code, stag_mask, face_mask, floor):
    """Fused coupling step (see the numba twin for the contract).

    With floor > 0, density and pressure are clamped from below everywhere
    instead of reporting a bad cell.
    """
    upad = _pad_primary2(ubar, bc_code)
    if floor > 0.0:
        s = minmod_slopes(upad, theta, dx)
        n = upad.shape[0] - 4
        t_cons = 0.5 * (upad[1 : n + 2] + upad[2 : n + 3]) + (dx / 8.0) * (
            s[1 : n + 2] - s[2 : n + 3]
        )
        r = np.maximum(t_cons[:, 0], floor)
        u = t_cons[:, 1] / r
        p = np.maximum((gamma - 1.0) * (t_cons[:, 2] - 0.5 * t_cons[:, 1] * u), floor)
        t_prim = np.stack([r, u, p], axis=-1)
    else:
        t_prim, bad = staggered_targets(upad, gamma, theta, dx)
        if bad >= 0:
            return ubar, vbar, 1, bad

    residual = vbar - t_prim
    rpad = _pad_staggered1(residual, bc_code)
    v_new, bad = residual_limit_update(t_prim, vbar, rpad, stag_mask)
    if floor > 0.0:
        v_new[:, 0] = np.maximum(v_new[:, 0], floor)
        v_new[:, 2] = np.maximum(v_new[:, 2], floor)
    elif bad >= 0:
        return ubar, vbar, 2, bad

    u_new, bad = flux_form_smooth(ubar, v_new, gamma, beta, theta, dx, face_mask)
    if floor > 0.0:
        u_new[:, 0] = np.maximum(u_new[:, 0], floor)
        e_min = floor / (gamma - 1.0) + 0.5 * u_new[:, 1] * u_new[:, 1] / u_new[:, 0]
        u_new[:, 2] = np.maximum(u_new[:, 2], e_min)
    elif bad >= 0:
        return ubar, vbar, 3, bad
    return u_new, v_new, 0, -1


def llf_solve(ubar, gamma, dx, t_end, cfl, bc_code):
    """First-order LLF / forward-Euler integration to t_end (numba twin)."""
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


def _cons_speeds_check(ubar, gamma):
    r = ubar[:, 0]
    okr = r > 0.0
    if not okr.all():
        return None, int(np.argmin(okr))
    u = ubar[:, 1] / r
    p = (gamma - 1.0) * (ubar[:, 2] - 0.5 * ubar[:, 1] * u)
    okp = p > 0.0
    if not okp.all():
        return None, int(np.argmin(okp))
    return np.abs(u) + np.sqrt(gamma * p / r), -1


def cons_max_speed(ubar, gamma):
    """Max |u| + c over a conservative field.  Returns (smax, bad_idx)."""
    s, bad = _cons_speeds_check(ubar, gamma)
    if bad >= 0:
        return 0.0, bad
    return float(s.max()), -1


def max_wave_speed(ubar, vbar, gamma):
    """Max |u| + c over both fields.  Returns (smax, bad_field, bad_idx)
    with bad_field 1 for the primary field, 2 for the staggered one."""
    s_u, bad = _cons_speeds_check(ubar, gamma)
    if bad >= 0:
        return 0.0, 1, bad
    r, u, p = vbar[:, 0], vbar[:, 1], vbar[:, 2]
    ok = (r > 0.0) & (p > 0.0)
    if not ok.all():
        return 0.0, 2, int(np.argmin(ok))
    s_v = np.abs(u) + np.sqrt(gamma * p / r)
    return max(float(s_u.max()), float(s_v.max())), 0, -1


def si_raw_core(ubar, vbar, gamma, alpha_id):
    """Raw indicator per primary cell: |alpha(ubar_j) - alpha(U(V_j))| with
    V_j the mean of the two flanking staggered averages.  alpha_id selects
    0=density, 1=momentum, 2=energy, 3=pressure."""
    vmid = 0.5 * (vbar[:-1] + vbar[1:])
    r, u, p = vmid[:, 0], vmid[:, 1], vmid[:, 2]
    umid = np.stack([r, r * u, p / (gamma - 1.0) + 0.5 * r * u * u], axis=-1)
    return np.abs(_alpha(ubar, gamma, alpha_id) - _alpha(umid, gamma, alpha_id))


def _alpha(U, gamma, alpha_id):
    if alpha_id == 3:
        return (gamma - 1.0) * (U[:, 2] - 0.5 * U[:, 1] * U[:, 1] / U[:, 0])
    return U[:, alpha_id]


def staggered_targets(ubar_pad, gamma, theta, dx):
    """Conservative projection onto staggered cells, in primitive form.

    Returns (t_prim (N+1, 3), bad_idx); bad_idx >= 0 flags a staggered cell
    whose projected state lost positivity.
    """
    n = ubar_pad.shape[0] - 4
    s = minmod_slopes(ubar_pad, theta, dx)
    ul, ur = ubar_pad[1 : n + 2], ubar_pad[2 : n + 3]
    t_cons = 0.5 * (ul + ur) + (dx / 8.0) * (s[1 : n + 2] - s[2 : n + 3])
    r = t_cons[:, 0]
    with np.errstate(all="ignore"):
        u = t_cons[:, 1] / r
        p = (gamma - 1.0) * (t_cons[:, 2] - 0.5 * t_cons[:, 1] * u)
        ok = (r > 0.0) & (p > 0.0)
    if not ok.all():
        return t_cons, int(np.argmin(ok))
    return np.stack([r, u, p], axis=-1), -1


def residual_limit_update(t_prim, vbar, rpad, mask):
    """Slave the staggered field to the projected target plus the minmod of
    the three neighboring residuals.  ``rpad`` is the residual padded by one
    row per side; ``mask`` selects which staggered cells get updated.
    Returns (vbar_new, bad_idx)."""
    limited = minmod3(rpad[:-2], rpad[1:-1], rpad[2:])
    v_new = np.where(mask[:, None], t_prim + limited, vbar)
    ok = (v_new[:, 0] > 0.0) & (v_new[:, 2] > 0.0)
    if not ok.all():
        return v_new, int(np.argmin(ok))
    return v_new, -1


def flux_form_smooth(ubar, vbar, gamma, beta, theta, dx, face_mask):
    """Flux-form damping of primary-field oscillations against the staggered
    reference.

    Across each interior face the jump ubar[j+1] - ubar[j] is compared with
    dx times the limited slope of U(vbar) at that face; half the defect,
    scaled by beta, leaves through the face.  This is a limited diffusion
    (update symbol 1 + beta (cos xi - 1)), exact on consistent linear data,
    removes the odd-even mode completely at beta = 1/2, and conserves by
    telescoping since the boundary faces carry g = 0.
    Returns (ubar_new, bad_idx).
    """
    n = ubar.shape[0]
    r, u, p = vbar[:, 0], vbar[:, 1], vbar[:, 2]
    w = np.stack([r, r * u, p / (gamma - 1.0) + 0.5 * r * u * u], axis=-1)
    slope_ref = minmod3(
        theta * (w[1:-1] - w[:-2]) / dx,
        (w[2:] - w[:-2]) / (2.0 * dx),
        theta * (w[2:] - w[1:-1]) / dx,
    )
    g = np.zeros((n + 1, 3))
    g[1:-1] = -(beta / 2.0) * ((ubar[1:] - ubar[:-1]) - dx * slope_ref)
    g[~face_mask] = 0.0
    u_new = ubar - (g[1:] - g[:-1])
    r2 = u_new[:, 0]
    with np.errstate(all="ignore"):
        p2 = (gamma - 1.0) * (u_new[:, 2] - 0.5 * u_new[:, 1] * u_new[:, 1] / r2)
        ok = (r2 > 0.0) & (p2 > 0.0)
    if not ok.all():
        return u_new, int(np.argmin(ok))
    return u_new, -1


def llf_step(upad, gamma, dt_over_dx):
    """One forward-Euler step of the first-order local Lax-Friedrichs scheme.

    ``upad`` carries one ghost row per side; returns the updated interior.
    """
    r = upad[:, 0]
    u = upad[:, 1] / r
    p = (gamma - 1.0) * (upad[:, 2] - 0.5 * upad[:, 1] * u)
    c = np.sqrt(gamma * p / r)
    f = np.stack([upad[:, 1], upad[:, 1] * u + p, u * (upad[:, 2] + p)], axis=-1)
    s = np.abs(u) + c
    a = np.maximum(s[:-1], s[1:])
    fhat = 0.5 * (f[:-1] + f[1:]) - 0.5 * a[:, None] * (upad[1:] - upad[:-1])
    return upad[1:-1] - dt_over_dx * (fhat[1:] - fhat[:-1])
