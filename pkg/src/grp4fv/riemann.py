"""Exact Riemann solvers for the 1-D Euler equations and scalar laws."""

import math
from dataclasses import dataclass
from typing import NamedTuple

from numba import njit

from .eqsys import ADVECTION, BURGERS, DomainError

RTOL = 1e-12
MAX_ITER = 100

# status codes returned by the jitted solver
OK = 0
VACUUM = 1
NO_CONVERGENCE = 2


class VacuumError(ArithmeticError):
    """The Riemann data generate a vacuum."""


class RiemannConvergenceError(ArithmeticError):
    pass


class PrimitiveState(NamedTuple):
    rho: float
    u: float
    p: float


@dataclass(frozen=True)
class RiemannSolution:
    left: PrimitiveState
    right: PrimitiveState
    gamma: float
    p_star: float
    u_star: float
    rho_star_l: float
    rho_star_r: float
    wave_l: str  # "shock" | "rarefaction"
    wave_r: str


@njit(cache=True)
def _pressure_fn(p, rho, pk, ck, g):
    """Toro's f_K(p) and its derivative for one side."""
    if p > pk:
        a = 2.0 / ((g + 1.0) * rho)
        b = (g - 1.0) / (g + 1.0) * pk
        q = math.sqrt(a / (p + b))
        return (p - pk) * q, q * (1.0 - 0.5 * (p - pk) / (p + b))
    r = p / pk
    f = 2.0 * ck / (g - 1.0) * (r ** ((g - 1.0) / (2.0 * g)) - 1.0)
    df = r ** (-(g + 1.0) / (2.0 * g)) / (rho * ck)
    return f, df


@njit(cache=True)
def nb_star_state(rl, ul, pl, rr, ur, pr, g):
    """Star pressure and velocity.  Returns (p*, u*, status, residual)."""
    cl = math.sqrt(g * pl / rl)
    cr = math.sqrt(g * pr / rr)
    du = ur - ul
    if 2.0 * (cl + cr) / (g - 1.0) <= du:
        return 0.0, 0.0, VACUUM, du
    if pl == pr and ul == ur:
        return pl, ul, OK, 0.0
    # two-rarefaction guess
    z = (g - 1.0) / (2.0 * g)
    num = cl + cr - 0.5 * (g - 1.0) * du
    den = cl / pl**z + cr / pr**z
    p = (num / den) ** (1.0 / z)
    # bracket: f(0+) < 0 (no vacuum) and f increases monotonically
    lo = 0.0
    hi = max(pl, pr, p)
    fh = _pressure_fn(hi, rl, pl, cl, g)[0] + _pressure_fn(hi, rr, pr, cr, g)[0] + du
    while fh < 0.0:
        lo = hi
        hi *= 4.0
        fh = _pressure_fn(hi, rl, pl, cl, g)[0] + _pressure_fn(hi, rr, pr, cr, g)[0] + du
    if not (lo < p < hi):
        p = 0.5 * (lo + hi)
    res = 0.0
    for _ in range(MAX_ITER):
        fl, dfl = _pressure_fn(p, rl, pl, cl, g)
        fr, dfr = _pressure_fn(p, rr, pr, cr, g)
        res = fl + fr + du
        if res < 0.0:
            lo = p
        else:
            hi = p
        pn = p - res / (dfl + dfr)
        if not (lo < pn < hi):
            pn = 0.5 * (lo + hi)
        if abs(pn - p) <= RTOL * pn:
            p = pn
            fl = _pressure_fn(p, rl, pl, cl, g)[0]
            fr = _pressure_fn(p, rr, pr, cr, g)[0]
            return p, 0.5 * (ul + ur) + 0.5 * (fr - fl), OK, 0.0
        p = pn
    return p, 0.0, NO_CONVERGENCE, res


@njit(cache=True)
def nb_sample(rl, ul, pl, rr, ur, pr, g, ps, us, xi):
    """Self-similar Riemann solution (rho, u, p) on the ray x/t = xi."""
    if xi <= us:
        cl = math.sqrt(g * pl / rl)
        if ps > pl:
            pr_ = ps / pl
            s = ul - cl * math.sqrt((g + 1.0) / (2.0 * g) * pr_ + (g - 1.0) / (2.0 * g))
            if xi <= s:
                return rl, ul, pl
            gm = (g - 1.0) / (g + 1.0)
            return rl * (pr_ + gm) / (gm * pr_ + 1.0), us, ps
        head = ul - cl
        if xi <= head:
            return rl, ul, pl
        cs = cl * (ps / pl) ** ((g - 1.0) / (2.0 * g))
        if xi >= us - cs:
            return rl * (ps / pl) ** (1.0 / g), us, ps
        c = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * (ul - xi))
        u = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * ul + xi)
        rho = rl * (c / cl) ** (2.0 / (g - 1.0))
        return rho, u, pl * (c / cl) ** (2.0 * g / (g - 1.0))
    cr = math.sqrt(g * pr / rr)
    if ps > pr:
        pr_ = ps / pr
        s = ur + cr * math.sqrt((g + 1.0) / (2.0 * g) * pr_ + (g - 1.0) / (2.0 * g))
        if xi >= s:
            return rr, ur, pr
        gm = (g - 1.0) / (g + 1.0)
        return rr * (pr_ + gm) / (gm * pr_ + 1.0), us, ps
    head = ur + cr
    if xi >= head:
        return rr, ur, pr
    cs = cr * (ps / pr) ** ((g - 1.0) / (2.0 * g))
    if xi <= us + cs:
        return rr * (ps / pr) ** (1.0 / g), us, ps
    c = 2.0 / (g + 1.0) * (cr - 0.5 * (g - 1.0) * (ur - xi))
    u = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * ur + xi)
    rho = rr * (c / cr) ** (2.0 / (g - 1.0))
    return rho, u, pr * (c / cr) ** (2.0 * g / (g - 1.0))


def _check_prim(w, side):
    if not (w.rho > 0.0 and w.p > 0.0) or not all(map(math.isfinite, w)):
        raise DomainError(f"{side} state must be physical, got {w}")


def exact_riemann_euler(w_l, w_r, gamma=1.4):
    """Solve the 1-D Euler Riemann problem exactly.

    Raises :class:`VacuumError` when the data create a vacuum and
    :class:`RiemannConvergenceError` if the pressure iteration stalls.
    """
    w_l = PrimitiveState(*map(float, w_l))
    w_r = PrimitiveState(*map(float, w_r))
    _check_prim(w_l, "left")
    _check_prim(w_r, "right")
    g = float(gamma)
    ps, us, status, res = nb_star_state(*w_l, *w_r, g)
    if status == VACUUM:
        raise VacuumError(f"vacuum generated: velocity jump {res:.6g} exceeds critical value")
    if status == NO_CONVERGENCE:
        raise RiemannConvergenceError(f"pressure iteration did not converge, residual {res:.3e}")
    gm = (g - 1.0) / (g + 1.0)

    def star_rho(w):
        if ps > w.p:
            r = ps / w.p
            return w.rho * (r + gm) / (gm * r + 1.0), "shock"
        return w.rho * (ps / w.p) ** (1.0 / g), "rarefaction"

    rsl, wl = star_rho(w_l)
    rsr, wr = star_rho(w_r)
    return RiemannSolution(w_l, w_r, g, ps, us, rsl, rsr, wl, wr)


def sample_riemann(sol, xi):
    return PrimitiveState(*nb_sample(*sol.left, *sol.right, sol.gamma, sol.p_star, sol.u_star, float(xi)))


@njit(cache=True)
def nb_scalar_godunov(kind, speed, ul, ur):
    """Godunov state at x/t = 0 for linear advection or Burgers."""
    if kind == ADVECTION:
        return ul if speed >= 0.0 else ur
    if ul > ur:
        s = 0.5 * (ul + ur)
        return ul if s >= 0.0 else ur
    if ul >= 0.0:
        return ul
    if ur <= 0.0:
        return ur
    return 0.0


def scalar_riemann(sys, u_l, u_r):
    if sys.kind not in (ADVECTION, BURGERS):
        raise NotImplementedError(f"scalar Riemann solver does not support {sys.name}")
    return nb_scalar_godunov(sys.kind, float(sys.speed), float(u_l), float(u_r))
