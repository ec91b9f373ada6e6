"""Acceptance suite: one or more tests per numbered criterion.

The terminal summary (see conftest.py) prints one PASS/FAIL line per
criterion.  The double Mach run is marked ``slow``; deselect it with
``-m "not slow"`` for a quick pass.
"""

import math
import time

import numpy as np
import pytest

from grp4fv import eqsys as E
from grp4fv import fvmesh as M
from grp4fv import grp as G
from grp4fv import riemann as RM
from grp4fv import stepper as S
from grp4fv.harness import analysis as A
from grp4fv.harness import presets as P
from grp4fv.harness import runner as R
from oracles import bisection_star, taylor4, upwind_symbol

criterion = pytest.mark.criterion
EULER = E.euler1d()
CONSERVATION_TOL = 1e-12


def _orders(rows):
    return [r.l1_order for r in rows[1:]]


def _conservation_check(drifts):
    def check(f0, f, m):
        scale = np.maximum(A.abs_totals(f0), A.abs_totals(f))
        drifts[m] = A.conservation_drift(f0.totals(), f.totals(), scale)

    return check


# --- 1 ------------------------------------------------------------------


@criterion(1, "order conditions of the two-stage coefficients")
def test_c01_order_conditions():
    res = S.verify_order_conditions(S.DEFAULT_COEFFS)
    print("residuals", res)
    assert res.shape == (6,)
    assert np.all(np.abs(res) <= 1e-15)


# --- 2 ------------------------------------------------------------------


@criterion(2, "fourth order on u' = -u^2")
def test_c02_ode_fourth_order():
    errs = []
    for dt in (0.1, 0.05, 0.025, 0.0125):
        u = 1.0
        for _ in range(round(1.0 / dt)):
            u = S.ode_two_stage_step(lambda v: -v * v, lambda v: 2.0 * v**3, u, dt)
        errs.append(abs(u - 0.5))
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    print("errors", errs, "orders", rates)
    assert all(abs(r - 4.0) <= 0.2 for r in rates)


# --- 3 ------------------------------------------------------------------


@criterion(3, "linear exactness on the upwind semi-discretization")
@pytest.mark.parametrize("nu", [0.2, 0.5, 0.9])
def test_c03_linear_amplification(nu):
    n, dt = 64, 0.01
    j = np.arange(n)
    worst = 0.0
    for k in range(n):
        theta = 2 * np.pi * k / n
        mode = np.exp(1j * theta * j)

        def L(u):
            return -nu / dt * (u - np.roll(u, 1))

        new = S.ode_two_stage_step(L, lambda u: L(L(u)), mode, dt)
        g_expected = taylor4(upwind_symbol(theta, nu))
        worst = max(worst, np.abs(new - g_expected * mode).max())
    print("max amplification defect", worst)
    assert worst <= 1e-13


# --- 4-7 and 10 -----------------------------------------------------------


@pytest.fixture(scope="module")
def drifts():
    return {}


@criterion(4, "advection convergence table")
def test_c04_advection(drifts):
    d = {}
    rows = A.convergence_study(P.preset("advection"), "grp4", [40, 80, 160], check=_conservation_check(d))
    drifts["advection"] = d
    print([(r.m, r.l1_error, r.l1_order) for r in rows])
    assert all(4.3 <= o <= 5.2 for o in _orders(rows))
    assert 5.28e-6 / 5 <= rows[1].l1_error <= 5.28e-6 * 5


@criterion(5, "Burgers convergence table at t = 1/pi")
def test_c05_burgers(drifts):
    d = {}
    p = P.preset("burgers", end_time=1.0 / math.pi)
    rows = A.convergence_study(p, "grp4", [40, 80, 160, 320], check=_conservation_check(d))
    drifts["burgers"] = d
    print([(r.m, r.l1_error, r.l1_order) for r in rows])
    assert all(o >= 3.8 for o in _orders(rows))


@criterion(6, "Euler smooth-wave convergence table")
def test_c06_euler_smooth(drifts):
    d = {}
    rows = A.convergence_study(P.preset("euler_smooth"), "grp4", [40, 80, 160], check=_conservation_check(d))
    drifts["euler_smooth"] = d
    print([(r.m, r.l1_error, r.l1_order) for r in rows])
    assert all(4.5 <= o <= 5.3 for o in _orders(rows))


@criterion(7, "isentropic vortex convergence")
def test_c07_vortex(drifts):
    d = {}
    p = P.preset("vortex")
    assert p.gauss_k == 3
    rows = A.convergence_study(p, "grp4", [40, 80], check=_conservation_check(d))
    drifts["vortex"] = d
    print([(r.m, r.l1_error, r.l1_order) for r in rows])
    assert rows[1].l1_order >= 3.7


@criterion(10, "conservation on periodic presets")
def test_c10_conservation(drifts):
    expected = {"advection", "burgers", "euler_smooth", "vortex"}
    periodic = set()
    for pid in P.list_presets():
        bc = P.preset(pid).bc
        sides = [b for b in (bc.left, bc.right, bc.bottom, bc.top) if b is not None]
        if all(isinstance(b, M.Periodic) for b in sides):
            periodic.add(pid)
    assert periodic == expected
    missing = expected - set(drifts)
    assert not missing, f"convergence runs did not complete for {sorted(missing)}"
    worst = max(float(np.max(v)) for d in drifts.values() for v in d.values())
    print("worst relative drift", worst)
    assert worst <= CONSERVATION_TOL


# --- 8 ------------------------------------------------------------------


def _random_prims(rng, n):
    return np.stack([rng.uniform(0.5, 2.0, n), rng.uniform(-1.0, 1.0, n), rng.uniform(0.5, 2.0, n)])


def _sweep(ul, sl, ur, sr, threshold):
    m, n = ul.shape
    u0, ut = np.empty((m, n)), np.empty((m, n))
    empty = np.empty((0, 0))
    status, bad, _ = G.grp_sweep(EULER.kind, EULER.gamma, 0.0, ul, sl, ur, sr, empty, empty, threshold, False, u0, ut)
    assert status == 0, f"sweep failed at face {bad}"
    return u0, ut


@criterion(8, "GRP solver properties")
def test_c08a_zero_slopes():
    rng = np.random.default_rng(8)
    n = 10_000
    ul = E.prim_to_cons(EULER, _random_prims(rng, n))
    ur = E.prim_to_cons(EULER, _random_prims(rng, n))
    z = np.zeros_like(ul)
    _, ut = _sweep(ul, z, ur, z.copy(), 0.0)
    assert np.all(ut == 0.0)


@criterion(8, "GRP solver properties")
def test_c08b_acoustic_limit():
    rng = np.random.default_rng(9)
    n = 1000
    w = _random_prims(rng, n)
    ul = E.prim_to_cons(EULER, w)
    ur = ul * (1.0 + 1e-6 * rng.uniform(-1, 1, (3, n)))
    sl, sr = rng.normal(size=(3, n)), rng.normal(size=(3, n))
    u0, nl = _sweep(ul, sl, ur, sr, 0.0)
    worst = 0.0
    for j in range(n):
        ac = G.acoustic_grp(EULER, u0[:, j], sl[:, j], sr[:, j])
        worst = max(worst, np.abs(nl[:, j] - ac).max() / np.abs(ac).max())
    print("worst relative difference", worst)
    assert worst <= 1e-4


@criterion(8, "GRP solver properties")
def test_c08c_smooth_flow_rate():
    # smooth profile: traces carry a truncation error delta, slopes are exact
    def prim(x):
        return np.array([1 + 0.2 * np.sin(x), 0.5 + 0.1 * np.cos(x), 1 + 0.3 * np.sin(2 * x)])

    def dprim(x):
        return np.array([0.2 * np.cos(x), -0.1 * np.sin(x), 0.6 * np.cos(2 * x)])

    xs = np.linspace(0.1, 6.0, 40)
    errs = []
    for delta in (1e-3, 1e-4, 1e-5):
        worst = 0.0
        for k, x in enumerate(xs):
            w, dw = prim(x), dprim(x)
            u = E.prim_to_cons(EULER, w)
            jac = np.array([[1, 0, 0], [w[1], w[0], 0], [0.5 * w[1] ** 2, w[0] * w[1], 1 / 0.4]])
            du = jac @ dw
            exact = -E.jacobian(EULER, u, 0) @ du
            pert = delta * np.array([1.0, -0.7, 0.4]) * (1 if k % 2 else -1)
            r = G.nonlinear_grp_euler(EULER, G.GRPInput(G.ReconSide(u + pert, du), G.ReconSide(u - pert, du)))
            worst = max(worst, np.abs(r.dudt - exact).max() / np.abs(exact).max())
        errs.append(worst)
    rates = [math.log10(a / b) for a, b in zip(errs, errs[1:])]
    print("relative rate error", errs, "orders", rates)
    assert all(r >= 0.9 for r in rates)
    assert errs[-1] <= 1e-3


# --- 9 ------------------------------------------------------------------


@criterion(9, "exact Riemann solver against bisection")
def test_c09_riemann_oracle():
    pairs = [((1.0, 0.0, 1.0), (0.125, 0.0, 0.1))]
    rng = np.random.default_rng(10)
    while len(pairs) < 101:
        wl = (rng.uniform(0.1, 5), rng.uniform(-2, 2), rng.uniform(0.1, 10))
        wr = (rng.uniform(0.1, 5), rng.uniform(-2, 2), rng.uniform(0.1, 10))
        # skip pairs that open a vacuum
        cl, cr = math.sqrt(1.4 * wl[2] / wl[0]), math.sqrt(1.4 * wr[2] / wr[0])
        if 5 * (cl + cr) <= wr[1] - wl[1]:
            continue
        pairs.append((wl, wr))
    for wl, wr in pairs:
        sol = RM.exact_riemann_euler(wl, wr)
        p, u = bisection_star(wl, wr)
        assert sol.p_star == pytest.approx(p, rel=1e-9, abs=1e-9)
        assert sol.u_star == pytest.approx(u, rel=1e-9, abs=1e-9)


# --- 11 -----------------------------------------------------------------


def _smoke(config):
    rep = R.run_simulation(config)
    rho = rep.final_field.interior()[0]
    print(config, "steps", rep.steps, "rho range", rho.min(), rho.max(), "wall", round(rep.wall_clock, 1))
    assert rep.final_field.time == pytest.approx(rep.preset.end_time if "end_time" not in config else config["end_time"])
    assert np.all(np.isfinite(rep.final_field.data))
    assert rho.min() > 0
    return rep, rho


@criterion(11, "shock-capturing smoke runs")
def test_c11_woodward_colella():
    _smoke({"problem": "woodward_colella", "cells": 800})


@criterion(11, "shock-capturing smoke runs")
def test_c11_large_pressure_ratio():
    _, rho = _smoke({"problem": "large_pressure_ratio", "cells": 400, "cfl": 0.2})
    # a single right-moving shock: density jump at one location only
    assert rho.max() > 1.0


@criterion(11, "shock-capturing smoke runs")
def test_c11_shock_vortex():
    _smoke({"problem": "shock_vortex", "cells_x": 400, "cells_y": 100})


@criterion(11, "shock-capturing smoke runs")
@pytest.mark.slow
def test_c11_double_mach():
    _, rho = _smoke({"problem": "double_mach", "cells_x": 960, "cells_y": 240})
    assert rho.max() <= 22.0 * 1.05


# --- 12 -----------------------------------------------------------------


@criterion(12, "stage counts and wall clock versus RK4")
def test_c12_cost():
    p = P.preset("euler_smooth")
    g = p.grid(320)
    end = p.end_time
    # warm the JIT caches before timing
    for scheme in ("grp4", "rk4"):
        R.advance(p, R.initial_field(p, g), scheme, end_time=0.05)
    stats = {}
    for scheme in ("grp4", "rk4"):
        f = R.initial_field(p, g)
        t0 = time.perf_counter()
        f, c = R.advance(p, f, scheme, end_time=end)
        stats[scheme] = (c, time.perf_counter() - t0)
    c2, w2 = stats["grp4"]
    c4, w4 = stats["rk4"]
    print("grp4", c2, w2, "rk4", c4, w4)
    assert c2.reconstructions == 2 * c2.steps and c2.grp_solves == 2 * c2.steps
    assert c4.reconstructions == 4 * c4.steps and c4.grp_solves == 4 * c4.steps
    assert c2.steps == c4.steps
    assert w2 < w4
