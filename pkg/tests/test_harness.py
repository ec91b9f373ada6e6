import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grp4fv import fvmesh as M
from grp4fv.harness import analysis as A
from grp4fv.harness import output as O
from grp4fv.harness import presets as P
from grp4fv.harness import runner as R
from grp4fv.harness.exact import burgers_exact


def test_advection_preset():
    p = P.preset("advection")
    assert p.extents == ((0.0, 2.0),) and p.end_time == 10.0
    x = np.linspace(0, 2, 7)
    assert np.allclose(p.exact(x, 0.3)[0], np.sin(np.pi * (x - 0.3)))


def test_euler_smooth_and_vortex_exact():
    p = P.preset("euler_smooth")
    u = p.exact(np.array([1.0]), 0.5)
    assert u[0, 0] == pytest.approx(1 + 0.2 * np.sin(0.5))
    v = P.preset("vortex")
    x, y = np.meshgrid(np.linspace(0.3, 9.7, 6), np.linspace(0.3, 9.7, 6), indexing="ij")
    # shifted by (t, t) with period 10
    assert np.allclose(v.exact(x, y, 3.0), v.exact(x - 3.0, y - 3.0, 0.0))
    assert np.allclose(v.exact(x, y, 10.0), v.exact(x, y, 0.0))


def test_unknown_preset_lists_ids():
    with pytest.raises(M.ConfigError, match="advection"):
        P.preset("nope")


def test_every_preset_builds_and_reference_invariant():
    for pid in P.list_presets():
        p = P.preset(pid)
        assert (p.exact is not None) == (p.reference == P.ANALYTIC)
        assert p.default_meshes


@pytest.mark.parametrize("label", ["a", "b", "c"])
def test_two_d_riemann_data_flagged(label):
    p = P.preset(f"riemann2d_{label}")
    assert p.corrupt_data
    assert "corrupt_data=true" in p.describe()
    states = P.RIEMANN_2D[label][0]
    assert any(w[0] <= 0 or w[3] <= 0 for w in states)
    with pytest.raises(M.ConfigError):
        R.run_simulation({"problem": p.id, "cells": 10})


def test_preset_params():
    p = P.preset("shock_vortex", rc=0.1)
    assert p.params["vortex_rc"] == 0.1
    with pytest.raises(M.ConfigError):
        P.preset("advection", rc=0.1)
    assert P.preset("burgers", end_time=3 / math.pi).reference == P.FINE_MESH


def test_shock_vortex_far_field_is_rankine_hugoniot():
    p = P.preset("shock_vortex")
    u = p.initial(np.array([0.01, 1.9]), np.array([0.99, 0.01]))
    g = 1.4
    flux = lambda q: np.array([q[1], q[1] ** 2 / q[0] + (g - 1) * (q[3] - 0.5 * q[1] ** 2 / q[0]), 0.0,
                                q[1] / q[0] * (q[3] + (g - 1) * (q[3] - 0.5 * q[1] ** 2 / q[0]))])
    assert np.allclose(flux(u[:, 0]), flux(u[:, 1]), rtol=1e-12)


# --- norms -------------------------------------------------------------


def _field(values, x1=1.0):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    g = M.Grid.uniform1d(0.0, x1, values.shape[1])
    f = M.CellField.zeros(g, values.shape[0])
    f.data[:, 3:-3] = values
    return f


def test_error_norms_identical_and_offset():
    a = _field(np.sin(np.arange(10.0)))
    assert A.error_norms(a, a) == (0.0, 0.0)
    b = _field(np.sin(np.arange(10.0)) + 1e-3)
    l1, linf = A.error_norms(b, a)
    assert l1 == pytest.approx(1e-3) and linf == pytest.approx(1e-3)


def test_error_norms_fixture():
    # two components, four cells on [0, 2] (dx = 0.5)
    f = _field([[1.0, 2.0, 3.0, 4.0], [0.0, 0.0, 0.0, 0.0]], x1=2.0)
    e = _field([[1.5, 2.0, 2.0, 4.0], [0.0, -0.25, 0.0, 0.0]], x1=2.0)
    # |diff| sum = 0.5 + 1.0 + 0.25 = 1.75; * 0.5 / 2 = 0.4375
    assert A.error_norms(f, e) == (pytest.approx(0.4375), 1.0)


def test_error_norms_grid_mismatch():
    with pytest.raises(ValueError):
        A.error_norms(_field(np.ones(4)), _field(np.ones(5)))


def test_orders_and_rows():
    rows = A.build_rows([10, 20, 40], [1.0, 1 / 16, 1 / 512], [2.0, 1.0, 0.5])
    assert rows[0].l1_order is None
    assert rows[1].l1_order == pytest.approx(4.0) and rows[2].l1_order == pytest.approx(5.0)
    assert rows[2].linf_order == pytest.approx(1.0)


def test_remap_preserves_integrals():
    fine = _field(np.sin(np.linspace(0, 3, 400)) + 2)
    coarse = A.remap_1d(fine, M.Grid.uniform1d(0, 1, 30))
    assert np.allclose(coarse.totals(), fine.totals(), rtol=1e-13)


# --- Burgers exact solution ----------------------------------------------


def test_burgers_exact_initial_and_fixed_point():
    x = np.linspace(0, 2, 9)
    assert np.allclose(burgers_exact(x, 0.0), 0.25 + 0.5 * np.sin(np.pi * x))
    # foot point x - u t = 0 with u = 1/4 makes the sine vanish
    t = 0.3
    assert burgers_exact(np.array([0.25 * t]), t)[0] == pytest.approx(0.25, abs=1e-14)


@given(st.floats(0.0, 2.0), st.floats(0.0, 1.9 / math.pi))
@settings(max_examples=100)
def test_burgers_exact_residual(x, t):
    u = burgers_exact(np.array([x]), t, tol=1e-14)[0]
    assert abs(u - 0.25 - 0.5 * np.sin(np.pi * (x - u * t))) <= 1e-12


# --- config and runs ------------------------------------------------------


def test_parse_config():
    cfg = R.parse_config("# comment\nproblem = sod\ncells=50\nchar_projection=false\noutput=csv\n")
    assert cfg.problem == "sod" and cfg.cells == 50 and cfg.char_projection is False
    for bad in ("problem=sod\nfoo=1", "cells=10", "problem=sod\nproblem=sod", "problem=sod\ncfl=abc",
                "problem=sod\nscheme=rk2", "problem=sod\ngauss_k=5", "problem=sod\ncells=10\ncells_x=10"):
        with pytest.raises(M.ConfigError):
            R.parse_config(bad)


def test_sod_run_matches_exact_riemann_solution():
    rep = R.run_simulation({"problem": "sod", "cells": 100})
    f = rep.final_field
    ref = A.reference_field(rep.preset, f.grid)
    l1 = np.abs(f.interior()[0] - ref.interior()[0]).sum() * f.grid.dx
    assert l1 <= 2e-2
    assert rep.counters.reconstructions == 2 * rep.steps


def test_advection_run_conserves():
    rep = R.run_simulation({"problem": "advection", "cells": 40})
    assert rep.final_field.time == pytest.approx(10.0, abs=1e-12)
    assert np.all(rep.conservation_drift <= 1e-12)


def test_outputs_are_deterministic(tmp_path):
    paths = []
    for k in range(2):
        rep = R.run_simulation({"problem": "sod", "cells": 30, "end_time": 0.05, "output": "csv", "out_dir": str(tmp_path / str(k))})
        paths.append(rep.outputs)
    for a, b in zip(*paths):
        assert a.read_bytes() == b.read_bytes()
    lines = paths[0][1].read_text().splitlines()
    assert lines[0] == "x,rho,v,p,E" and len(lines) == 31
    assert lines[1].split(",")[0] == "%.12e" % (0.5 / 30)


def test_vtk_output(tmp_path):
    rep = R.run_simulation({"problem": "vortex", "cells": 12, "end_time": 0.05, "output": "vtk", "out_dir": str(tmp_path)})
    text = rep.outputs[1].read_text().splitlines()
    assert text[0].startswith("# vtk DataFile")
    assert "DATASET STRUCTURED_POINTS" in text and "DIMENSIONS 13 13 1" in text and "CELL_DATA 144" in text
    names = [ln.split()[1] for ln in text if ln.startswith("SCALARS")]
    assert names == ["rho", "u", "v", "p", "E"]
    assert len(text) == 8 + 5 * (2 + 144)


def test_convergence_csv(tmp_path):
    rows = A.build_rows([10, 20], [1e-2, 1e-3], [2e-2, 3e-3])
    text = O.write_convergence_csv(rows, tmp_path / "c.csv").read_text().splitlines()
    assert text[0] == "m,l1,l1_order,linf,linf_order"
    assert text[1] == "10,1.000000000000e-02,nan,2.000000000000e-02,nan"


def test_convergence_orders_translation_invariant():
    base = P.preset("advection")
    shift = 0.37

    def exact(x, t):
        return base.exact(np.asarray(x) - shift, t)

    moved = P.ProblemPreset(
        id="advection_shifted", title="", system=base.system, extents=((shift, 2.0 + shift),),
        initial=lambda x: exact(x, 0.0), bc=base.bc, end_time=1.0, exact=exact, reference=P.ANALYTIC,
    )
    a = A.convergence_study(base, "grp4", [20, 40], end_time=1.0)
    b = A.convergence_study(moved, "grp4", [20, 40])
    assert b[1].l1_order == pytest.approx(a[1].l1_order, abs=1e-6)


def test_convergence_needs_analytic_reference():
    with pytest.raises(M.ConfigError):
        A.convergence_study(P.preset("woodward_colella"), "grp4", [20])


def test_convergence_aborts_with_partial_rows(monkeypatch):
    calls = {"n": 0}
    real = R.advance

    def flaky(*args, **kw):
        calls["n"] += 1
        if calls["n"] == 2:
            raise ArithmeticError("boom")
        return real(*args, **kw)

    monkeypatch.setattr(R, "advance", flaky)
    with pytest.raises(A.ConvergenceAborted) as info:
        A.convergence_study(P.preset("advection"), "grp4", [10, 20], end_time=0.1)
    assert len(info.value.rows) == 1
