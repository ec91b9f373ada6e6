import math

import numpy as np
import pytest

from grp4fv import eqsys as E
from grp4fv import fvmesh as M


def test_grid_geometry():
    g = M.Grid.uniform2d(0, 2, 4, -1, 1, 8)
    assert (g.nx, g.ny, g.dims) == (4, 8, 2)
    assert g.dx == 0.5 and g.dy == 0.25 and g.cell_volume == 0.125
    assert g.shape == (10, 14)
    assert np.allclose(g.centers(0), [0.25, 0.75, 1.25, 1.75])
    assert np.allclose(g.faces(1)[[0, -1]], [-1, 1])
    assert len(g.centers(0, ghosts=True)) == 10


def test_grid_rejects_bad_extents():
    with pytest.raises(ValueError):
        M.Grid.uniform1d(1.0, 0.0, 10)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_gauss_face_points_exactness(k):
    x, w = M.gauss_face_points(k)
    assert w.sum() == pytest.approx(1.0)
    for deg in range(2 * k):
        exact = (0.5 ** (deg + 1) - (-0.5) ** (deg + 1)) / (deg + 1)
        assert np.dot(w, x**deg) == pytest.approx(exact, abs=1e-15)


def test_projection_is_exact_for_polynomials():
    g = M.Grid.uniform1d(0, 1, 10)
    f = M.project_cell_averages(lambda x: x**6, g)
    e = g.faces(0)
    assert np.allclose(f.interior()[0], (e[1:] ** 7 - e[:-1] ** 7) / (7 * g.dx), rtol=1e-13)
    g2 = M.Grid.uniform2d(0, 1, 4, 0, 2, 3)
    f2 = M.project_cell_averages(lambda x, y: np.array([x * y, 1 + 0 * x * y]), g2)
    xc, yc = np.meshgrid(g2.centers(0), g2.centers(1), indexing="ij")
    assert np.allclose(f2.interior()[0], xc * yc)
    assert np.allclose(f2.totals(), [1.0, 2.0])


def _ramp(nx=8):
    g = M.Grid.uniform1d(0, 1, nx)
    f = M.CellField.zeros(g, 3)
    f.data[:, 3:-3] = np.arange(1, nx + 1)
    return f


def test_periodic_bc():
    f = _ramp()
    M.apply_bc(f, M.BoundarySpec.all(M.PERIODIC))
    assert list(f.data[0, :3]) == [6, 7, 8]
    assert list(f.data[0, -3:]) == [1, 2, 3]


def test_reflective_bc_flips_normal_momentum():
    f = _ramp()
    M.apply_bc(f, M.BoundarySpec.all(M.REFLECTIVE))
    assert list(f.data[0, :3]) == [3, 2, 1]
    assert list(f.data[1, :3]) == [-3, -2, -1]
    assert list(f.data[2, -3:]) == [8, 7, 6]


def test_outflow_bc():
    f = _ramp()
    M.apply_bc(f, M.BoundarySpec.all(M.OUTFLOW))
    assert list(f.data[0, :3]) == [1, 1, 1] and list(f.data[0, -3:]) == [8, 8, 8]


def test_2d_bcs_fill_corners():
    g = M.Grid.uniform2d(0, 1, 4, 0, 1, 4)
    f = M.CellField.zeros(g, 4)
    f.data[:, 3:-3, 3:-3] = 1.0
    f.data[2, 3:-3, 3:-3] = 0.5
    M.apply_bc(f, M.BoundarySpec(M.PERIODIC, M.PERIODIC, M.REFLECTIVE, M.OUTFLOW))
    assert np.all(f.data[0] == 1.0)
    assert np.all(f.data[2, :, :3] == -0.5)
    assert np.all(f.data[2, :, -3:] == 0.5)


def test_dirichlet_bc():
    g = M.Grid.uniform1d(0, 1, 8)
    f = M.CellField.zeros(g, 1)
    M.apply_bc(f, M.BoundarySpec(M.Dirichlet(lambda x, t: (x + t)[None]), M.OUTFLOW), t=1.0)
    assert np.allclose(f.data[0, :3], 1.0 + g.centers(0, ghosts=True)[:3])


def test_unpaired_periodic_rejected():
    with pytest.raises(M.ConfigError):
        M.BoundarySpec(M.PERIODIC, M.OUTFLOW)


def test_double_mach_top_split():
    top = M.DoubleMachTop((0,) * 4, (0,) * 4)
    assert top.split(0.0, 0.0) == pytest.approx(1 / 6)
    assert top.split(0.1, 1.0) == pytest.approx(1 / 6 + (1 + 20 * 0.1) / math.sqrt(3))


def test_compute_dt():
    s = E.euler1d()
    g = M.Grid.uniform1d(0, 1, 10)
    f = M.project_cell_averages(lambda x: E.prim_to_cons(s, np.array(np.broadcast_arrays(1.0 + 0 * x, 1.0, 1.4))), g)
    assert M.compute_dt(s, f, 0.5) == pytest.approx(0.5 * 0.1 / (1 + math.sqrt(1.4 * 1.4)))
    assert M.compute_dt(s, f, 0.5, t=0.99, t_end=1.0) == pytest.approx(0.01)
    with pytest.raises(ValueError):
        M.compute_dt(s, f, 1.5)


def test_cellfield_shape_check():
    g = M.Grid.uniform1d(0, 1, 10)
    with pytest.raises(ValueError):
        M.CellField(g, np.zeros((1, 10)))
