"""Two-stage fourth-order time stepping and the RK4 baseline.

For an ODE ``u' = L(u)`` with ``dL/dt`` available, one step reads

    u*      = u + A dt L(u) + A^2 dt^2 / 2 * L_t(u)
    u^{n+1} = u + dt (B0 L(u) + B1 L(u*)) + dt^2 / 2 * (C0 L_t(u) + C1 L_t(u*))

which is fourth order for (A, B0, B1, C0, C1) = (1/2, 1, 0, 1/3, 2/3).

The finite-volume version builds L and L_t from interface GRP data: the
half step uses the flux at the mid-time value ``u0 + dt/4 * du0/dt`` and
the full step uses the Hermite flux

    f(u0) + dt/6 * (A(u0) du0/dt + 2 A(u0*) du0*/dt).
"""

import time as _time
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import grp as _grp
from .eqsys import EULER1D, EULER2D, cons_to_prim, nb_flux_x, nb_is_physical, nb_jac_times
from .fvmesh import CellField, apply_bc
from .reconstruct import GHOST, LINEAR, _mode_code, _projection_flag, gauss_offsets, weno5_traces, x_face_traces_2d
from .riemann import NO_CONVERGENCE, OK, VACUUM, RiemannConvergenceError, VacuumError


class PositivityError(ArithmeticError):
    """A cell lost positive density or pressure during a step."""

    def __init__(self, message, stage=None, cell=None, time=None):
        super().__init__(message)
        self.stage = stage
        self.cell = cell
        self.time = time


@dataclass(frozen=True)
class TwoStageCoefficients:
    A: float = 0.5
    B0: float = 1.0
    B1: float = 0.0
    C0: float = 1.0 / 3.0
    C1: float = 2.0 / 3.0


DEFAULT_COEFFS = TwoStageCoefficients()


def verify_order_conditions(c=DEFAULT_COEFFS):
    """Residuals of the six fourth-order conditions (all zero when satisfied)."""
    A, B0, B1, C0, C1 = c.A, c.B0, c.B1, c.C0, c.C1
    return np.array(
        [
            B0 + B1 - 1.0,
            A * B1 + 0.5 * (C0 + C1) - 0.5,
            A * A * B1 + A * C1 - 1.0 / 3.0,
            A * A * C1 - 1.0 / 6.0,
            A**3 * B1 + 2.0 * A * A * C1 - 1.0 / 3.0,
            2.0 * A**3 * B1 + 3.0 * A * A * C1 - 0.5,
        ]
    )


@dataclass
class StageCounters:
    reconstructions: int = 0
    grp_solves: int = 0
    flux_evals: int = 0
    wall_clock: float = 0.0
    nonlinear_faces: int = 0
    trace_replacements: int = 0
    mid_fallbacks: int = 0
    steps: int = 0

    def add(self, other):
        for k in self.__dataclass_fields__:
            setattr(self, k, getattr(self, k) + getattr(other, k))
        return self


@dataclass(frozen=True)
class StepOptions:
    mode: str = "weno"
    projection: object = None  # None -> characteristic for Euler, component for scalars
    threshold: float = _grp.DEFAULT_THRESHOLD
    zero_slopes: bool = False  # forces piecewise-constant GRP data (Godunov limit)
    gauss_k: int = 2


DEFAULT_OPTIONS = StepOptions()


def ode_two_stage_step(L, dtL, un, dt, coeffs=DEFAULT_COEFFS):
    """One two-stage step for ``u' = L(u)`` given ``dtL(u) = dL/dt``."""
    c = coeffs
    l0 = L(un)
    lt0 = dtL(un)
    us = un + c.A * dt * l0 + 0.5 * c.A * c.A * dt * dt * lt0
    rhs = c.B0 * l0
    if c.B1:
        rhs = rhs + c.B1 * L(us)
    return un + dt * rhs + 0.5 * dt * dt * (c.C0 * lt0 + c.C1 * dtL(us))


# ---------------------------------------------------------------------------
# face flux kernels


@njit(cache=True)
def mid_fluxes(kind, g, speed, u0, ut, tau, out):
    """out = f(u0 + tau * ut); falls back to f(u0) where that is unphysical."""
    m, nf = u0.shape
    w = np.empty(m)
    f = np.empty(m)
    fallbacks = 0
    for j in range(nf):
        for c in range(m):
            w[c] = u0[c, j] + tau * ut[c, j]
        if not nb_is_physical(kind, g, w):
            fallbacks += 1
            for c in range(m):
                w[c] = u0[c, j]
        nb_flux_x(kind, g, speed, w, f)
        for c in range(m):
            out[c, j] = f[c]
    return fallbacks


@njit(cache=True)
def hermite_fluxes(kind, g, speed, u0, ut, u0s, uts, dt, out):
    """out = f(u0) + dt/6 * (A(u0) ut + 2 A(u0s) uts)."""
    m, nf = u0.shape
    a = np.empty(m)
    b = np.empty(m)
    v = np.empty(m)
    f = np.empty(m)
    for j in range(nf):
        for c in range(m):
            v[c] = u0[c, j]
        nb_flux_x(kind, g, speed, v, f)
        for c in range(m):
            b[c] = ut[c, j]
        nb_jac_times(kind, g, speed, v, b, a)
        for c in range(m):
            out[c, j] = f[c] + dt / 6.0 * a[c]
        for c in range(m):
            v[c] = u0s[c, j]
            b[c] = uts[c, j]
        nb_jac_times(kind, g, speed, v, b, a)
        for c in range(m):
            out[c, j] += dt / 3.0 * a[c]


@njit(cache=True)
def plain_fluxes(kind, g, speed, u0, out):
    m, nf = u0.shape
    v = np.empty(m)
    f = np.empty(m)
    for j in range(nf):
        for c in range(m):
            v[c] = u0[c, j]
        nb_flux_x(kind, g, speed, v, f)
        for c in range(m):
            out[c, j] = f[c]


# ---------------------------------------------------------------------------
# helpers

_EMPTY = np.empty((0, 0))
_PERM = [0, 2, 1, 3]


def _raise_status(status, where):
    if status == OK:
        return
    if status == VACUUM:
        raise VacuumError(f"vacuum generated in the Riemann problem at {where}")
    if status == NO_CONVERGENCE:
        raise RiemannConvergenceError(f"star-pressure iteration failed at {where}")
    raise PositivityError(f"non-physical interface state at {where}")


def _check_positivity(sys, field, stage):
    if not sys.is_euler:
        if not np.all(np.isfinite(field.interior())):
            raise PositivityError(f"non-finite value after {stage}", stage, None, field.time)
        return
    u = field.interior()
    w = cons_to_prim(sys, u, check=False)
    bad = ~((w[0] > 0.0) & (w[-1] > 0.0) & np.isfinite(w[0]) & np.isfinite(w[-1]))
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        g = field.grid
        coords = tuple(float(g.centers(a)[i]) for a, i in enumerate(idx))
        raise PositivityError(
            f"non-physical state in cell {idx} at x={coords} after {stage} (t={field.time:.6g})",
            stage,
            idx,
            field.time,
        )


def _flatten(a):
    """(K, m, nf, nt) -> contiguous (m, K*nf*nt)."""
    return np.ascontiguousarray(a.transpose(1, 0, 2, 3).reshape(a.shape[1], -1))


# ---------------------------------------------------------------------------
# one-dimensional scheme


def _grp_faces_1d(sys, field, opts, counters, stage):
    tr = weno5_traces(sys, field, mode=opts.mode, projection=opts.projection)
    counters.reconstructions += 1
    counters.trace_replacements += tr.replaced
    u0 = np.empty_like(tr.value_l)
    ut = np.empty_like(tr.value_l)
    st, bad, nnl = _grp.grp_sweep(
        sys.kind, sys.gamma, float(sys.speed), tr.value_l, tr.slope_l, tr.value_r, tr.slope_r,
        _EMPTY, _EMPTY, opts.threshold, opts.zero_slopes, u0, ut,
    )
    counters.grp_solves += 1
    counters.nonlinear_faces += nnl
    if st != OK:
        x = field.grid.faces(0)[bad]
        _raise_status(st, f"face x={x:.6g} during {stage} (t={field.time:.6g})")
    return u0, ut


def _update_1d(field, flux, factor):
    g = field.grid.ghost
    n = field.grid.nx
    field.data[:, g : g + n] -= factor * (flux[:, 1:] - flux[:, :-1])


def fv1d_two_stage_step(sys, field, bc, dt, opts=DEFAULT_OPTIONS):
    """Advance a 1-D field by ``dt``.  Returns (new_field, counters)."""
    t0 = _time.perf_counter()
    cnt = StageCounters()
    k, g, sp = sys.kind, sys.gamma, float(sys.speed)
    dx = field.grid.dx
    cur = field.copy()
    apply_bc(cur, bc, cur.time)
    u0, ut = _grp_faces_1d(sys, cur, opts, cnt, "stage 1")
    fmid = np.empty_like(u0)
    cnt.mid_fallbacks += mid_fluxes(k, g, sp, u0, ut, 0.25 * dt, fmid)
    cnt.flux_evals += 1
    star = cur.copy()
    star.time = cur.time + 0.5 * dt
    _update_1d(star, fmid, 0.5 * dt / dx)
    _check_positivity(sys, star, "intermediate stage")
    apply_bc(star, bc, star.time)
    u0s, uts = _grp_faces_1d(sys, star, opts, cnt, "stage 2")
    f4 = np.empty_like(u0)
    hermite_fluxes(k, g, sp, u0, ut, u0s, uts, dt, f4)
    cnt.flux_evals += 1
    new = cur.copy()
    new.time = cur.time + dt
    _update_1d(new, f4, dt / dx)
    _check_positivity(sys, new, "final update")
    cnt.steps = 1
    cnt.wall_clock = _time.perf_counter() - t0
    return new, cnt


def _godunov_rate_1d(sys, field, bc, opts, cnt):
    apply_bc(field, bc, field.time)
    tr = weno5_traces(sys, field, mode=opts.mode, projection=opts.projection)
    cnt.reconstructions += 1
    cnt.trace_replacements += tr.replaced
    u0 = np.empty_like(tr.value_l)
    st, bad = _grp.godunov_sweep(sys.kind, sys.gamma, float(sys.speed), tr.value_l, tr.value_r, u0)
    cnt.grp_solves += 1
    if st != OK:
        _raise_status(st, f"face {bad} (t={field.time:.6g})")
    f = np.empty_like(u0)
    plain_fluxes(sys.kind, sys.gamma, float(sys.speed), u0, f)
    cnt.flux_evals += 1
    rate = np.zeros_like(field.data)
    gh, n = field.grid.ghost, field.grid.nx
    rate[:, gh : gh + n] = -(f[:, 1:] - f[:, :-1]) / field.grid.dx
    return rate


# ---------------------------------------------------------------------------
# two-dimensional scheme


def _grp_faces_2d(sys, field, opts, cnt, stage):
    """GRP data at Gauss points of x-faces and (in the swapped frame) y-faces."""
    grid = field.grid
    offsets = gauss_offsets(opts.gauss_k)
    linear = _mode_code(opts.mode) == LINEAR
    char = _projection_flag(sys, opts.projection)
    u = np.ascontiguousarray(field.data)
    sw = np.ascontiguousarray(u[_PERM].transpose(0, 2, 1))
    trx = x_face_traces_2d(sys, u, grid.dx, grid.dy, offsets, linear, char)
    trY = x_face_traces_2d(sys, sw, grid.dy, grid.dx, offsets, linear, char)
    cnt.reconstructions += 1
    cnt.trace_replacements += trx.replaced + trY.replaced
    out = []
    for name, tr in (("x", trx), ("y", trY)):
        shape = tr.value_l.shape
        vl, sl, vr, sr, tl, tR = (_flatten(a) for a in (tr.value_l, tr.slope_l, tr.value_r, tr.slope_r, tr.tan_l, tr.tan_r))
        u0 = np.empty_like(vl)
        ut = np.empty_like(vl)
        st, bad, nnl = _grp.grp_sweep(sys.kind, sys.gamma, 1.0, vl, sl, vr, sr, tl, tR, opts.threshold, opts.zero_slopes, u0, ut)
        cnt.nonlinear_faces += nnl
        if st != OK:
            kk, f, t_ = np.unravel_index(bad, (shape[0], shape[2], shape[3]))
            _raise_status(st, f"{name}-face {f}, cell {t_}, Gauss point {kk} during {stage} (t={field.time:.6g})")
        out.append((u0, ut, shape))
    cnt.grp_solves += 1
    return out


def _assemble_2d(faces, flux_of, weights, grid):
    """Divergence of Gauss-weighted face fluxes, shape (4, nx, ny)."""
    (ax, bx, shx), (ay, by, shy) = faces
    fx = flux_of(ax, bx, 0).reshape(shx[1], shx[0], shx[2], shx[3])
    fy = flux_of(ay, by, 1).reshape(shy[1], shy[0], shy[2], shy[3])
    fx = np.einsum("mkft,k->mft", fx, weights)  # (4, nx+1, ny)
    fy = np.einsum("mkft,k->mft", fy, weights)[_PERM].transpose(0, 2, 1)  # (4, nx, ny+1)
    return (fx[:, 1:, :] - fx[:, :-1, :]) / grid.dx + (fy[:, :, 1:] - fy[:, :, :-1]) / grid.dy


def _gauss_weights(k):
    return 0.5 * np.polynomial.legendre.leggauss(k)[1]


def fv2d_two_stage_step(sys, field, bc, dt, opts=DEFAULT_OPTIONS):
    """Advance a 2-D Euler field by ``dt``.  Returns (new_field, counters)."""
    if sys.kind != EULER2D:
        raise ValueError("fv2d_two_stage_step requires the 2-D Euler system")
    t0 = _time.perf_counter()
    cnt = StageCounters()
    g = sys.gamma
    grid = field.grid
    wts = _gauss_weights(opts.gauss_k)
    cur = field.copy()
    apply_bc(cur, bc, cur.time)
    faces1 = _grp_faces_2d(sys, cur, opts, cnt, "stage 1")

    def mid(u0, ut, i):
        f = np.empty_like(u0)
        cnt.mid_fallbacks += mid_fluxes(EULER2D, g, 1.0, u0, ut, 0.25 * dt, f)
        return f

    div = _assemble_2d(faces1, mid, wts, grid)
    cnt.flux_evals += 1
    star = cur.copy()
    star.time = cur.time + 0.5 * dt
    star.data[(slice(None),) + grid.interior] -= 0.5 * dt * div
    _check_positivity(sys, star, "intermediate stage")
    apply_bc(star, bc, star.time)
    faces2 = _grp_faces_2d(sys, star, opts, cnt, "stage 2")

    def herm(u0s, uts, i):
        u0, ut, _ = faces1[i]
        f = np.empty_like(u0)
        hermite_fluxes(EULER2D, g, 1.0, u0, ut, u0s, uts, dt, f)
        return f

    div = _assemble_2d(faces2, herm, wts, grid)
    cnt.flux_evals += 1
    new = cur.copy()
    new.time = cur.time + dt
    new.data[(slice(None),) + grid.interior] -= dt * div
    _check_positivity(sys, new, "final update")
    cnt.steps = 1
    cnt.wall_clock = _time.perf_counter() - t0
    return new, cnt


def _godunov_rate_2d(sys, field, bc, opts, cnt):
    apply_bc(field, bc, field.time)
    grid = field.grid
    offsets = gauss_offsets(opts.gauss_k)
    linear = _mode_code(opts.mode) == LINEAR
    char = _projection_flag(sys, opts.projection)
    u = np.ascontiguousarray(field.data)
    sw = np.ascontiguousarray(u[_PERM].transpose(0, 2, 1))
    faces = []
    for arr, dn, dt_ in ((u, grid.dx, grid.dy), (sw, grid.dy, grid.dx)):
        tr = x_face_traces_2d(sys, arr, dn, dt_, offsets, linear, char)
        cnt.trace_replacements += tr.replaced
        vl, vr = _flatten(tr.value_l), _flatten(tr.value_r)
        u0 = np.empty_like(vl)
        st, bad = _grp.godunov_sweep(sys.kind, sys.gamma, 1.0, vl, vr, u0)
        if st != OK:
            _raise_status(st, f"face {bad} (t={field.time:.6g})")
        faces.append((u0, None, tr.value_l.shape))
    cnt.reconstructions += 1
    cnt.grp_solves += 1

    def plain(u0, _, i):
        f = np.empty_like(u0)
        plain_fluxes(EULER2D, sys.gamma, 1.0, u0, f)
        return f

    rate = np.zeros_like(field.data)
    rate[(slice(None),) + grid.interior] = -_assemble_2d(faces, plain, _gauss_weights(opts.gauss_k), grid)
    cnt.flux_evals += 1
    return rate


# ---------------------------------------------------------------------------
# RK4 baseline


def rk4_step(sys, field, bc, dt, opts=DEFAULT_OPTIONS):
    """Classical RK4 on the Godunov-flux semi-discretization."""
    t0 = _time.perf_counter()
    cnt = StageCounters()
    rate_fn = _godunov_rate_2d if field.grid.dims == 2 else _godunov_rate_1d
    cur = field.copy()
    stages = ((0.0, None), (0.5, 0), (0.5, 1), (1.0, 2))
    ks = []
    for i, (c, prev) in enumerate(stages):
        if prev is None:
            tmp = cur.copy()
        else:
            tmp = CellField(cur.grid, cur.data + c * dt * ks[prev], cur.time + c * dt)
            _check_positivity(sys, tmp, f"RK stage {i + 1}")
        ks.append(rate_fn(sys, tmp, bc, opts, cnt))
    new = cur.copy()
    new.data += dt / 6.0 * (ks[0] + 2.0 * ks[1] + 2.0 * ks[2] + ks[3])
    new.time = cur.time + dt
    _check_positivity(sys, new, "final update")
    cnt.steps = 1
    cnt.wall_clock = _time.perf_counter() - t0
    return new, cnt


def two_stage_step(sys, field, bc, dt, opts=DEFAULT_OPTIONS):
    if field.grid.dims == 2:
        return fv2d_two_stage_step(sys, field, bc, dt, opts)
    return fv1d_two_stage_step(sys, field, bc, dt, opts)
