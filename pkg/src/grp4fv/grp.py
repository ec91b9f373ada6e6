"""Generalized Riemann problem (GRP) solvers.

Given one-sided interface traces and slopes, these return the instantaneous
interface state ``u0`` and its time derivative ``du/dt`` at ``x/t = 0``.

Euler states inside the jitted kernels use the primitive tuple
``(rho, u, v, p)``; ``v`` is the transverse velocity (zero in 1-D).  The
genuinely nonlinear solver works in the frame where the contact moves
right (``u* >= 0``); the opposite case is handled by mirroring ``x -> -x``.

For each wave the solver builds one linear relation

    a * (Du/Dt) + b * (Dp/Dt) = d

between the material derivatives at the origin: along rarefactions from the
characteristic relation transported through the fan, along shocks from the
Hugoniot relations differentiated along the shock path.  The two relations
form the 2x2 system; entropy and transverse velocity gradients on the star
side follow from transport through the wave, and density rates from
``dp = c^2 d(rho) + p d(ln K)`` with ``K = p / rho^gamma``.

Tangential (quasi-1-D) effects enter as piecewise constant source terms on
each side of the contact.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .eqsys import ADVECTION, BURGERS, EULER1D, EULER2D, DomainError, nb_eigen_x, nb_is_physical, nb_jac_times
from .riemann import NO_CONVERGENCE, OK, VACUUM, RiemannConvergenceError, VacuumError, nb_sample, nb_scalar_godunov, nb_star_state

ACOUSTIC = 0
NONLINEAR = 1
DEFAULT_THRESHOLD = 1e-6

# status codes of the sweep kernels (beyond riemann.OK/VACUUM/NO_CONVERGENCE)
BAD_STATE = 3


@dataclass(frozen=True)
class ReconSide:
    value: np.ndarray
    slope: np.ndarray


@dataclass(frozen=True)
class GRPInput:
    left: ReconSide
    right: ReconSide
    tangential_flux_grad_l: np.ndarray = None
    tangential_flux_grad_r: np.ndarray = None


@dataclass(frozen=True)
class GRPResult:
    u0: np.ndarray
    dudt: np.ndarray
    solver_used: str


@dataclass(frozen=True)
class GRPLinearSystem:
    """Coefficients of the 2x2 system in (dv/dt, dp/dt) at x = 0."""

    a_l: float
    b_l: float
    d_l: float
    a_r: float
    b_r: float
    d_r: float

    @property
    def determinant(self):
        return self.a_l * self.b_r - self.a_r * self.b_l


# ---------------------------------------------------------------------------
# primitive helpers


@njit(cache=True)
def _prim_source(g, h, rho, u, v, p):
    """Primitive-variable rates (rho, u, v, p) of a conserved source h."""
    hr = h[0]
    hu = (h[1] - u * hr) / rho
    hv = (h[2] - v * hr) / rho
    hp = (g - 1.0) * (h[3] - u * h[1] - v * h[2] + 0.5 * (u * u + v * v) * hr)
    return hr, hu, hv, hp


@njit(cache=True)
def _ck_rates(g, w, dw):
    """Cauchy-Kovalevskaya time derivatives of smooth primitive data."""
    rho, u, v, p = w
    drho, du, dv, dp = dw
    c2 = g * p / rho
    return (
        -(u * drho + rho * du),
        -(u * du + dp / rho),
        -u * dv,
        -(u * dp + rho * c2 * du),
    )


@njit(cache=True)
def _mirror(w):
    return (w[0], -w[1], w[2], w[3])


@njit(cache=True)
def _mirror_slope(dw):
    return (-dw[0], dw[1], -dw[2], -dw[3])


@njit(cache=True)
def _mirror_src(h):
    return (h[0], -h[1], h[2], h[3])


# ---------------------------------------------------------------------------
# the nonlinear Euler GRP


@njit(cache=True)
def _left_wave(g, w, dw, h, ps, us):
    """Coefficients (a, b, d) of the left wave relation plus star data.

    Returns (a, b, d, rho_s, c_s, is_shock, sigma, pre_rates) where
    pre_rates are the pre-shock derivatives along the shock path.
    """
    rho, u, v, p = w
    drho, du, dv, dp = dw
    mu2 = (g - 1.0) / (g + 1.0)
    c = math.sqrt(g * p / rho)
    if ps > p:
        r = ps / p
        rho_s = rho * (r + mu2) / (mu2 * r + 1.0)
        c_s = math.sqrt(g * ps / rho_s)
        sigma = u - c * math.sqrt((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g))
        delta = sigma - us
        hs = _prim_source(g, h, rho_s, us, v, ps)
        h0 = _prim_source(g, h, rho, u, v, p)
        ck = _ck_rates(g, w, dw)
        pre_r = ck[0] + h0[0] + sigma * drho
        pre_u = ck[1] + h0[1] + sigma * du
        pre_v = ck[2] + h0[2] + sigma * dv
        pre_p = ck[3] + h0[3] + sigma * dp
        bb = mu2 * p
        q = math.sqrt(2.0 / ((g + 1.0) * rho) / (ps + bb))
        f = (ps - p) * q
        f_p = q * (1.0 - 0.5 * (ps - p) / (ps + bb))
        f_rho = -0.5 * f / rho
        f_pk = -q * (1.0 + 0.5 * mu2 * (ps - p) / (ps + bb))
        a = 1.0 - f_p * delta * rho_s
        b = f_p - delta / (rho_s * c_s * c_s)
        d = pre_u - f_rho * pre_r - f_pk * pre_p - delta * hs[3] / (rho_s * c_s * c_s) - f_p * delta * rho_s * hs[1]
        return a, b, d, rho_s, c_s, True, sigma, (pre_r, pre_u, pre_v, pre_p)
    theta = (ps / p) ** (0.5 * (g - 1.0) / g)
    rho_s = rho * (ps / p) ** (1.0 / g)
    c_s = c * theta
    hs = _prim_source(g, h, rho_s, us, v, ps)
    dk = dp / p - g * drho / rho
    dpsi = du + dp / (rho * c) + c * dk / (g * (g - 1.0))
    bk = c * c * dk / (g * (g - 1.0))
    t1 = theta ** (0.5 / mu2)
    t2 = theta ** ((1.0 + mu2) / mu2)
    d = -t1 * c * dpsi + bk * ((1.0 + mu2) / (1.0 + 2.0 * mu2) * t1 + mu2 / (1.0 + 2.0 * mu2) * t2)
    d += hs[1] + hs[3] / (rho_s * c_s)
    return 1.0, 1.0 / (rho_s * c_s), d, rho_s, c_s, False, theta, (0.0, 0.0, 0.0, 0.0)


@njit(cache=True)
def _star_gradients(g, w, dw, h, ps, us, rho_s, c_s, is_shock, sig, pre, mat_u, mat_p):
    """Entropy (ln K) and transverse-velocity gradients behind the left wave."""
    rho, u, v, p = w
    hs = _prim_source(g, h, rho_s, us, v, ps)
    if not is_shock:
        theta = sig
        mu2 = (g - 1.0) / (g + 1.0)
        amp = theta ** (1.0 / mu2 - 1.0)
        return (dw[3] / p - g * dw[0] / rho) * amp, dw[2] * amp
    sigma = sig
    delta = sigma - us
    mu2 = (g - 1.0) / (g + 1.0)
    den = mu2 * ps + p
    g_p = rho * p * (1.0 - mu2 * mu2) / (den * den)
    g_rho = rho_s / rho
    g_pk = rho * ps * (mu2 * mu2 - 1.0) / (den * den)
    post_p = mat_p + delta * rho_s * (hs[1] - mat_u)
    post_r = g_p * post_p + g_rho * pre[0] + g_pk * pre[3]
    hk = hs[3] / ps - g * hs[0] / rho_s
    mat_r = (mat_p - ps * hk) / (c_s * c_s)
    rho_x = (post_r - mat_r) / delta
    p_x = rho_s * (hs[1] - mat_u)
    return p_x / ps - g * rho_x / rho_s, (pre[2] - hs[2]) / delta


@njit(cache=True)
def _fan_rates(g, w, dw, h):
    """State and time derivative at x = 0 inside a left (sonic) rarefaction."""
    rho, u, v, p = w
    drho, du, dv, dp = dw
    mu2 = (g - 1.0) / (g + 1.0)
    gg = g * (g - 1.0)
    c = math.sqrt(g * p / rho)
    c0 = mu2 * (u + 2.0 * c / (g - 1.0))
    th = c0 / c
    rho0 = rho * th ** (2.0 / (g - 1.0))
    p0 = p * th ** (2.0 * g / (g - 1.0))
    u0 = c0
    hr, hu, hv, hp = _prim_source(g, h, rho0, u0, v, p0)
    hk = hp / p0 - g * hr / rho0
    h_psi = hu + hp / (rho0 * c0) + c0 * hk / gg
    h_phi = hu - hp / (rho0 * c0) - c0 * hk / gg
    dk = dp / p - g * drho / rho
    dpsi = du + dp / (rho * c) + c * dk / gg
    bk = c * c * dk / gg
    e = -2.0 * c * dpsi + bk * (2.0 + 2.0 * mu2) / (1.0 + 2.0 * mu2)
    tk = th ** (1.0 / mu2)
    psi1 = h_psi + e * th ** (0.5 / mu2) - bk * th * tk / (1.0 + 2.0 * mu2)
    k1 = hk - c * dk * tk
    k1_xi = c * dk * tk / c0
    phi1 = 0.5 * (h_phi + c0 * c0 * k1_xi / gg - (3.0 - g) / (g + 1.0) * psi1)
    v1 = hv - c * dv * tk
    ut = 0.5 * (psi1 + phi1)
    ct = 0.25 * (g - 1.0) * (psi1 - phi1)
    rt = rho0 * (2.0 * ct / c0 - k1) / (g - 1.0)
    pt = p0 * (k1 + g * rt / rho0)
    return (rho0, u0, v, p0), (rt, ut, v1, pt)


@njit(cache=True)
def _grp_contact_right(g, wl, wr, dwl, dwr, hl, hr, ps, us):
    """Nonlinear GRP for u* >= 0 (x = 0 lies left of the contact)."""
    rho, u, v, p = wl
    c = math.sqrt(g * p / rho)
    # where does the ray x/t = 0 fall?
    if ps > p:
        sigma = u - c * math.sqrt((g + 1.0) / (2.0 * g) * ps / p + (g - 1.0) / (2.0 * g))
        region = 0 if sigma >= 0.0 else 2
    else:
        c_s = c * (ps / p) ** (0.5 * (g - 1.0) / g)
        if u - c > 0.0:
            region = 0
        elif us - c_s >= 0.0:
            region = 1
        else:
            region = 2
    # the one-sided sources are already upwind projections, so the source
    # acting at x = 0 is their sum
    htot = (hl[0] + hr[0], hl[1] + hr[1], hl[2] + hr[2], hl[3] + hr[3])
    if region == 0:
        ck = _ck_rates(g, wl, dwl)
        h0 = _prim_source(g, htot, rho, u, v, p)
        return wl, (ck[0] + h0[0], ck[1] + h0[1], ck[2] + h0[2], ck[3] + h0[3]), 0.0
    if region == 1:
        w0, wt = _fan_rates(g, wl, dwl, htot)
        return w0, wt, 0.0
    a_l, b_l, d_l, rho_s, c_s, shock_l, sig_l, pre_l = _left_wave(g, wl, dwl, hl, ps, us)
    a_m, b_m, d_m, _r, _c, _s, _g, _p = _left_wave(g, _mirror(wr), _mirror_slope(dwr), _mirror_src(hr), ps, -us)
    a_r = -a_m
    b_r = b_m
    d_r = d_m
    det = a_l * b_r - a_r * b_l
    mat_u = (d_l * b_r - d_r * b_l) / det
    mat_p = (a_l * d_r - a_r * d_l) / det
    kx, vx = _star_gradients(g, wl, dwl, hl, ps, us, rho_s, c_s, shock_l, sig_l, pre_l, mat_u, mat_p)
    hs = _prim_source(g, htot, rho_s, us, v, ps)
    c2 = c_s * c_s
    u_x = (hs[3] - mat_p) / (rho_s * c2)
    p_x = rho_s * (hs[1] - mat_u)
    ut = mat_u - us * u_x
    pt = mat_p - us * p_x
    kt = hs[3] / ps - g * hs[0] / rho_s - us * kx
    rt = (pt - ps * kt) / c2
    vt = hs[2] - us * vx
    return (rho_s, us, v, ps), (rt, ut, vt, pt), det


@njit(cache=True)
def nb_grp_euler(g, wl, wr, dwl, dwr, hl, hr):
    """Nonlinear GRP for the Euler equations in primitive variables.

    Returns (w0, wt, status, det) with ``w0``/``wt`` the state and time
    derivative at x = 0 and ``det`` the 2x2 determinant (0 when unused).
    """
    ps, us, status, res = nb_star_state(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g)
    if status != OK:
        return wl, (0.0, 0.0, 0.0, 0.0), status, 0.0
    if us >= 0.0:
        w0, wt, det = _grp_contact_right(g, wl, wr, dwl, dwr, hl, hr, ps, us)
        return w0, wt, OK, det
    w0, wt, det = _grp_contact_right(
        g, _mirror(wr), _mirror(wl), _mirror_slope(dwr), _mirror_slope(dwl), _mirror_src(hr), _mirror_src(hl), ps, -us
    )
    return _mirror(w0), (wt[0], -wt[1], wt[2], wt[3]), OK, det


@njit(cache=True)
def nb_linear_system(g, wl, wr, dwl, dwr, hl, hr):
    """Eulerian-form 2x2 coefficients (for inspection; star-region case).

    Returns (aL, bL, dL, aR, bR, dR, flag) with flag=False when x = 0 is not
    inside a star region.
    """
    ps, us, status, res = nb_star_state(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g)
    if status != OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, False
    sgn = 1.0
    if us < 0.0:
        wl, wr = _mirror(wr), _mirror(wl)
        dwl, dwr = _mirror_slope(dwr), _mirror_slope(dwl)
        hl, hr = _mirror_src(hr), _mirror_src(hl)
        us = -us
        sgn = -1.0
    a_l, b_l, d_l, rho_s, c_s, shock_l, sig_l, pre_l = _left_wave(g, wl, dwl, hl, ps, us)
    rho, u, v, p = wl
    c = math.sqrt(g * p / rho)
    if shock_l:
        inside = sig_l < 0.0
    else:
        inside = us - c_s < 0.0
    if not inside:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, False
    a_m, b_m, d_m, _r, _c, _s, _g, _p = _left_wave(g, _mirror(wr), _mirror_slope(dwr), _mirror_src(hr), ps, -us)
    a_r = -a_m
    htot = (hl[0] + hr[0], hl[1] + hr[1], hl[2] + hr[2], hl[3] + hr[3])
    # (u_t, p_t) = T (Du, Dp) - s on the star side holding x = 0
    hs = _prim_source(g, htot, rho_s, us, v, ps)
    c2 = c_s * c_s
    t11, t12 = 1.0, us / (rho_s * c2)
    t21, t22 = us * rho_s, 1.0
    s1 = us * hs[3] / (rho_s * c2)
    s2 = us * rho_s * hs[1]
    dt_ = t11 * t22 - t12 * t21
    i11, i12, i21, i22 = t22 / dt_, -t12 / dt_, -t21 / dt_, t11 / dt_
    out = []
    for a, b, d in ((a_l, b_l, d_l), (a_r, b_m, d_m)):
        ea = a * i11 + b * i21
        eb = a * i12 + b * i22
        out.append((ea, eb, d - (ea * s1 + eb * s2)))
    # back to the physical frame: v -> sgn * v
    la, lb, ld = out[0]
    ra, rb, rd = out[1]
    if sgn < 0.0:
        return -ra, rb, rd, -la, lb, ld, True
    return la, lb, ld, ra, rb, rd, True


# ---------------------------------------------------------------------------
# conserved <-> primitive conversions for the sweep kernels


@njit(cache=True)
def _cons_to_prim4(kind, g, uc):
    if kind == EULER1D:
        rho = uc[0]
        u = uc[1] / rho
        return (rho, u, 0.0, (g - 1.0) * (uc[2] - 0.5 * rho * u * u))
    rho = uc[0]
    u = uc[1] / rho
    v = uc[2] / rho
    return (rho, u, v, (g - 1.0) * (uc[3] - 0.5 * rho * (u * u + v * v)))


@njit(cache=True)
def _slope_to_prim4(kind, g, w, s):
    rho, u, v, p = w
    if kind == EULER1D:
        s0, s1, s2, s3 = s[0], s[1], 0.0, s[2]
    else:
        s0, s1, s2, s3 = s[0], s[1], s[2], s[3]
    return (
        s0,
        (s1 - u * s0) / rho,
        (s2 - v * s0) / rho,
        (g - 1.0) * (s3 - u * s1 - v * s2 + 0.5 * (u * u + v * v) * s0),
    )


@njit(cache=True)
def _store_cons(kind, g, w, wt, u0, ut, j):
    rho, u, v, p = w
    rt, vt_u, vt_v, pt = wt
    u0[0, j] = rho
    u0[1, j] = rho * u
    ut[0, j] = rt
    ut[1, j] = u * rt + rho * vt_u
    ke = 0.5 * (u * u + v * v)
    if kind == EULER1D:
        u0[2, j] = p / (g - 1.0) + rho * ke
        ut[2, j] = ke * rt + rho * (u * vt_u) + pt / (g - 1.0)
    else:
        u0[2, j] = rho * v
        u0[3, j] = p / (g - 1.0) + rho * ke
        ut[2, j] = v * rt + rho * vt_v
        ut[3, j] = ke * rt + rho * (u * vt_u + v * vt_v) + pt / (g - 1.0)


@njit(cache=True)
def _relative_jump(wl, wr, g):
    cbar = 0.5 * (math.sqrt(g * wl[3] / wl[0]) + math.sqrt(g * wr[3] / wr[0]))
    j = abs(wl[0] - wr[0]) / (0.5 * (wl[0] + wr[0]))
    j = max(j, abs(wl[3] - wr[3]) / (0.5 * (wl[3] + wr[3])))
    j = max(j, abs(wl[1] - wr[1]) / cbar)
    return max(j, abs(wl[2] - wr[2]) / cbar)


@njit(cache=True)
def _acoustic_core(kind, g, speed, u0, sl, sr, gl, gr, out, lam, r, l, tmp):
    """out = -(R L+ R^-1 sl + R L- R^-1 sr + R I+ R^-1 gl + R I- R^-1 gr)."""
    m = u0.shape[0]
    if kind == ADVECTION or kind == BURGERS:
        a = speed if kind == ADVECTION else u0[0]
        if a > 0.0:
            out[0] = -(a * sl[0] + gl[0])
        elif a < 0.0:
            out[0] = -(a * sr[0] + gr[0])
        else:
            out[0] = -0.5 * (gl[0] + gr[0])
        return True
    if not nb_eigen_x(kind, g, u0, lam, r, l):
        return False
    for i in range(m):
        cl = 0.0
        cr = 0.0
        tl = 0.0
        tr = 0.0
        for k in range(m):
            cl += l[i, k] * sl[k]
            cr += l[i, k] * sr[k]
            tl += l[i, k] * gl[k]
            tr += l[i, k] * gr[k]
        li = lam[i]
        if li > 0.0:
            tmp[i] = li * cl + tl
        elif li < 0.0:
            tmp[i] = li * cr + tr
        else:
            tmp[i] = 0.5 * (tl + tr)
    for k in range(m):
        s = 0.0
        for i in range(m):
            s += r[k, i] * tmp[i]
        out[k] = -s
    return True


@njit(cache=True)
def _project_source(kind, g, u0, gy, positive, out, lam, r, l):
    """out = -R I(+/-) R^-1 gy at state u0 (x-direction eigensystem)."""
    m = u0.shape[0]
    nb_eigen_x(kind, g, u0, lam, r, l)
    for k in range(m):
        out[k] = 0.0
    for i in range(m):
        li = lam[i]
        wgt = 0.5 if li == 0.0 else (1.0 if (li > 0.0) == positive else 0.0)
        if wgt == 0.0:
            continue
        ci = 0.0
        for k in range(m):
            ci += l[i, k] * gy[k]
        for k in range(m):
            out[k] -= wgt * r[k, i] * ci


@njit(cache=True)
def _perm_jac_y(kind, g, u, vec, out, tmp_u, tmp_v, tmp_o):
    """out = A_y(u) @ vec for 2-D Euler via the x/y component swap."""
    tmp_u[0] = u[0]
    tmp_u[1] = u[2]
    tmp_u[2] = u[1]
    tmp_u[3] = u[3]
    tmp_v[0] = vec[0]
    tmp_v[1] = vec[2]
    tmp_v[2] = vec[1]
    tmp_v[3] = vec[3]
    nb_jac_times(kind, g, 1.0, tmp_u, tmp_v, tmp_o)
    out[0] = tmp_o[0]
    out[1] = tmp_o[2]
    out[2] = tmp_o[1]
    out[3] = tmp_o[3]


@njit(cache=True)
def grp_sweep(kind, g, speed, ul, sl, ur, sr, tl, tr, threshold, zero_slopes, u0, ut):
    """GRP at every face.

    ``ul, sl, ur, sr`` are (m, nf) conserved traces and normal slopes;
    ``tl, tr`` tangential slopes (m, nf) or empty (0, 0) arrays in 1-D.
    Fills ``u0`` and ``ut``.  Returns (status, bad_face, n_nonlinear).
    """
    m, nf = ul.shape
    two_d = tl.shape[0] > 0
    lam = np.empty(m)
    r = np.empty((m, m))
    l = np.empty((m, m))
    tmp = np.empty(m)
    gl = np.zeros(m)
    gr = np.zeros(m)
    hl = np.zeros(m)
    hr = np.zeros(m)
    sa = np.zeros(m)
    sb = np.zeros(m)
    ua = np.empty(m)
    ub = np.empty(m)
    uz = np.empty(m)
    dud = np.empty(m)
    t1 = np.empty(m)
    t2 = np.empty(m)
    t3 = np.empty(m)
    n_nl = 0
    for j in range(nf):
        for k in range(m):
            ua[k] = ul[k, j]
            ub[k] = ur[k, j]
            if zero_slopes:
                sa[k] = 0.0
                sb[k] = 0.0
            else:
                sa[k] = sl[k, j]
                sb[k] = sr[k, j]
        if kind == ADVECTION or kind == BURGERS:
            a = ua[0]
            b = ub[0]
            if kind == ADVECTION:
                if speed >= 0.0:
                    u0[0, j] = a
                    ut[0, j] = -speed * sa[0]
                else:
                    u0[0, j] = b
                    ut[0, j] = -speed * sb[0]
            else:
                if a > b:
                    if a + b >= 0.0:
                        u0[0, j] = a
                        ut[0, j] = -a * sa[0]
                    else:
                        u0[0, j] = b
                        ut[0, j] = -b * sb[0]
                elif a >= 0.0:
                    u0[0, j] = a
                    ut[0, j] = -a * sa[0]
                elif b <= 0.0:
                    u0[0, j] = b
                    ut[0, j] = -b * sb[0]
                else:
                    u0[0, j] = 0.0
                    ut[0, j] = 0.0
            continue
        if not (nb_is_physical(kind, g, ua) and nb_is_physical(kind, g, ub)):
            return BAD_STATE, j, n_nl
        if two_d:
            for k in range(m):
                t1[k] = tl[k, j]
            _perm_jac_y(kind, g, ua, t1, gl, t2, t3, dud)
            for k in range(m):
                t1[k] = tr[k, j]
            _perm_jac_y(kind, g, ub, t1, gr, t2, t3, dud)
        wl = _cons_to_prim4(kind, g, ua)
        wr = _cons_to_prim4(kind, g, ub)
        if _relative_jump(wl, wr, g) <= threshold:
            # acoustic path: linearized Riemann state, then characteristic upwinding
            for k in range(m):
                uz[k] = 0.5 * (ua[k] + ub[k])
            nb_eigen_x(kind, g, uz, lam, r, l)
            for k in range(m):
                t1[k] = ub[k] - ua[k]
            for k in range(m):
                uz[k] = ua[k]
            for i in range(m):
                if lam[i] < 0.0:
                    ci = 0.0
                    for k in range(m):
                        ci += l[i, k] * t1[k]
                    for k in range(m):
                        uz[k] += ci * r[k, i]
            if not _acoustic_core(kind, g, speed, uz, sa, sb, gl, gr, dud, lam, r, l, tmp):
                return BAD_STATE, j, n_nl
            for k in range(m):
                u0[k, j] = uz[k]
                ut[k, j] = dud[k]
            continue
        n_nl += 1
        dwl = _slope_to_prim4(kind, g, wl, sa)
        dwr = _slope_to_prim4(kind, g, wr, sb)
        h4l = (0.0, 0.0, 0.0, 0.0)
        h4r = (0.0, 0.0, 0.0, 0.0)
        if two_d:
            # planar Riemann state fixes the eigen-frame of the tangential sources
            ps, us, st, res = nb_star_state(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g)
            if st != OK:
                return st, j, n_nl
            rs, vs, pss = nb_sample(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g, ps, us, 0.0)
            vt0 = wl[2] if vs >= 0.0 else wr[2]
            uz[0] = rs
            uz[1] = rs * vs
            uz[2] = rs * vt0
            uz[3] = pss / (g - 1.0) + 0.5 * rs * (vs * vs + vt0 * vt0)
            _project_source(kind, g, uz, gl, True, hl, lam, r, l)
            _project_source(kind, g, uz, gr, False, hr, lam, r, l)
            h4l = (hl[0], hl[1], hl[2], hl[3])
            h4r = (hr[0], hr[1], hr[2], hr[3])
        w0, wt, st, det = nb_grp_euler(g, wl, wr, dwl, dwr, h4l, h4r)
        if st != OK:
            return st, j, n_nl
        _store_cons(kind, g, w0, wt, u0, ut, j)
    return OK, -1, n_nl


# ---------------------------------------------------------------------------
# Python-level API (single interface)


def _as_vec(x, m):
    if x is None:
        return np.zeros(m)
    return np.asarray(x, dtype=float).reshape(m)


def _check_status(status):
    if status == VACUUM:
        raise VacuumError("GRP traces generate a vacuum")
    if status == NO_CONVERGENCE:
        raise RiemannConvergenceError("star-pressure iteration did not converge")
    if status == BAD_STATE:
        raise DomainError("non-physical GRP input state")


def _prim4(sys, u):
    return _cons_to_prim4(sys.kind, sys.gamma, np.asarray(u, dtype=float))


def _check_euler_state(sys, u, what):
    if not nb_is_physical(sys.kind, sys.gamma, np.asarray(u, dtype=float)):
        raise DomainError(f"non-physical {what}: {np.asarray(u)}")


def acoustic_grp(sys, u0, slope_l, slope_r):
    """Linearized GRP: -(R L+ R^-1 u_l' + R L- R^-1 u_r')."""
    return quasi1d_acoustic(sys, u0, GRPInput(ReconSide(u0, slope_l), ReconSide(u0, slope_r)))


def quasi1d_acoustic(sys, u0, inp):
    """Acoustic GRP with tangential flux gradients treated as sources."""
    m = sys.m
    u0 = _as_vec(u0, m)
    if sys.is_euler:
        _check_euler_state(sys, u0, "acoustic GRP state u0")
    out = np.empty(m)
    ok = _acoustic_core(
        sys.kind,
        sys.gamma,
        float(sys.speed),
        u0,
        _as_vec(inp.left.slope, m),
        _as_vec(inp.right.slope, m),
        _as_vec(inp.tangential_flux_grad_l, m),
        _as_vec(inp.tangential_flux_grad_r, m),
        out,
        np.empty(m),
        np.empty((m, m)),
        np.empty((m, m)),
        np.empty(m),
    )
    if not ok:
        raise DomainError("non-physical acoustic GRP state")
    return out


def _euler_inputs(sys, inp):
    m = sys.m
    ul, ur = _as_vec(inp.left.value, m), _as_vec(inp.right.value, m)
    _check_euler_state(sys, ul, "left trace")
    _check_euler_state(sys, ur, "right trace")
    wl, wr = _prim4(sys, ul), _prim4(sys, ur)
    g = sys.gamma
    dwl = _slope_to_prim4(sys.kind, g, wl, _as_vec(inp.left.slope, m))
    dwr = _slope_to_prim4(sys.kind, g, wr, _as_vec(inp.right.slope, m))
    return ul, ur, wl, wr, dwl, dwr


def _tangential_sources(sys, inp, wl, wr):
    """Projected tangential sources (-R I+ R^-1 g_y,l, -R I- R^-1 g_y,r)."""
    zero = (0.0, 0.0, 0.0, 0.0)
    if inp.tangential_flux_grad_l is None and inp.tangential_flux_grad_r is None:
        return zero, zero
    if sys.kind != EULER2D:
        raise ValueError("tangential gradients require a 2-D system")
    g = sys.gamma
    ps, us, st, _ = nb_star_state(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g)
    _check_status(st)
    rs, vs, pss = nb_sample(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g, ps, us, 0.0)
    vt0 = wl[2] if vs >= 0.0 else wr[2]
    uz = np.array([rs, rs * vs, rs * vt0, pss / (g - 1.0) + 0.5 * rs * (vs * vs + vt0 * vt0)])
    m = 4
    hl = np.empty(m)
    hr = np.empty(m)
    lam, r, l = np.empty(m), np.empty((m, m)), np.empty((m, m))
    _project_source(sys.kind, g, uz, _as_vec(inp.tangential_flux_grad_l, m), True, hl, lam, r, l)
    _project_source(sys.kind, g, uz, _as_vec(inp.tangential_flux_grad_r, m), False, hr, lam, r, l)
    return tuple(hl), tuple(hr)


def _to_result(sys, w0, wt, label):
    u0 = np.empty((sys.m, 1))
    ut = np.empty((sys.m, 1))
    _store_cons(sys.kind, sys.gamma, w0, wt, u0, ut, 0)
    return GRPResult(u0[:, 0], ut[:, 0], label)


def nonlinear_grp_euler(sys, inp):
    """Genuinely nonlinear GRP for 1-D Euler traces (no tangential terms)."""
    if not sys.is_euler:
        raise ValueError("nonlinear_grp_euler requires an Euler system")
    ul, ur, wl, wr, dwl, dwr = _euler_inputs(sys, inp)
    zero = (0.0, 0.0, 0.0, 0.0)
    w0, wt, st, _ = nb_grp_euler(sys.gamma, wl, wr, dwl, dwr, zero, zero)
    _check_status(st)
    return _to_result(sys, w0, wt, "nonlinear")


def quasi1d_nonlinear(sys, inp):
    """Nonlinear quasi-1-D GRP at a face Gauss point of a 2-D Euler field.

    The tangential flux gradients are projected onto the characteristic
    fields of the planar Riemann state and carried as sources on each side.
    """
    if sys.kind != EULER2D:
        raise ValueError("quasi1d_nonlinear requires the 2-D Euler system")
    ul, ur, wl, wr, dwl, dwr = _euler_inputs(sys, inp)
    hl, hr = _tangential_sources(sys, inp, wl, wr)
    w0, wt, st, _ = nb_grp_euler(sys.gamma, wl, wr, dwl, dwr, hl, hr)
    _check_status(st)
    return _to_result(sys, w0, wt, "nonlinear")


def grp_linear_system(sys, inp):
    """The 2x2 system for (dv/dt, dp/dt) at x = 0, or None outside star regions."""
    ul, ur, wl, wr, dwl, dwr = _euler_inputs(sys, inp)
    hl, hr = _tangential_sources(sys, inp, wl, wr) if sys.kind == EULER2D else ((0.0,) * 4, (0.0,) * 4)
    al, bl, dl, ar, br, dr, inside = nb_linear_system(sys.gamma, wl, wr, dwl, dwr, hl, hr)
    if not inside:
        return None
    return GRPLinearSystem(al, bl, dl, ar, br, dr)


def scalar_grp(sys, inp):
    if sys.kind not in (ADVECTION, BURGERS):
        raise NotImplementedError(f"scalar GRP does not support {sys.name}")
    u0 = np.empty((1, 1))
    ut = np.empty((1, 1))
    vals = [np.array([[float(np.ravel(x)[0])]]) for x in (inp.left.value, inp.left.slope, inp.right.value, inp.right.slope)]
    empty = np.empty((0, 0))
    grp_sweep(sys.kind, sys.gamma, float(sys.speed), vals[0], vals[1], vals[2], vals[3], empty, empty, 0.0, False, u0, ut)
    return GRPResult(u0[:, 0], ut[:, 0], "nonlinear")


def grp_dispatch(sys, inp, threshold=DEFAULT_THRESHOLD):
    """'nonlinear' when any relative primitive jump exceeds ``threshold``."""
    if not sys.is_euler:
        return "nonlinear"
    ul, ur, wl, wr, _, _ = _euler_inputs(sys, inp)
    return "nonlinear" if _relative_jump(wl, wr, sys.gamma) > threshold else "acoustic"


def solve_grp(sys, inp, threshold=DEFAULT_THRESHOLD):
    """Dispatching entry point used for single interfaces."""
    if not sys.is_euler:
        return scalar_grp(sys, inp)
    m = sys.m
    ul = np.asarray(inp.left.value, dtype=float).reshape(m, 1)
    ur = np.asarray(inp.right.value, dtype=float).reshape(m, 1)
    sl = np.asarray(inp.left.slope, dtype=float).reshape(m, 1)
    sr = np.asarray(inp.right.slope, dtype=float).reshape(m, 1)
    if inp.tangential_flux_grad_l is not None:
        raise ValueError("solve_grp takes tangential slopes through grp_sweep; use quasi1d_* here")
    u0 = np.empty((m, 1))
    ut = np.empty((m, 1))
    empty = np.empty((0, 0))
    st, _, nnl = grp_sweep(sys.kind, sys.gamma, float(sys.speed), ul, sl, ur, sr, empty, empty, threshold, False, u0, ut)
    _check_status(st)
    return GRPResult(u0[:, 0], ut[:, 0], "nonlinear" if nnl else "acoustic")


@njit(cache=True)
def godunov_sweep(kind, g, speed, ul, ur, u0):
    """Exact Riemann state at x/t = 0 for every face (no time derivative).

    Returns (status, bad_face).
    """
    m, nf = ul.shape
    for j in range(nf):
        if kind == ADVECTION or kind == BURGERS:
            u0[0, j] = nb_scalar_godunov(kind, speed, ul[0, j], ur[0, j])
            continue
        if not (nb_is_physical(kind, g, ul[:, j]) and nb_is_physical(kind, g, ur[:, j])):
            return BAD_STATE, j
        wl = _cons_to_prim4(kind, g, ul[:, j])
        wr = _cons_to_prim4(kind, g, ur[:, j])
        ps, us, st, res = nb_star_state(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g)
        if st != OK:
            return st, j
        rs, vs, pss = nb_sample(wl[0], wl[1], wl[3], wr[0], wr[1], wr[3], g, ps, us, 0.0)
        vt = wl[2] if vs >= 0.0 else wr[2]
        rho_l = rs
        u0[0, j] = rho_l
        u0[1, j] = rho_l * vs
        e = pss / (g - 1.0) + 0.5 * rho_l * (vs * vs + vt * vt)
        if kind == EULER1D:
            u0[2, j] = e
        else:
            u0[2, j] = rho_l * vt
            u0[3, j] = e
    return OK, -1
