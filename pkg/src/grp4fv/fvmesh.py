"""Uniform structured grids, ghost-cell boundary conditions and quadrature."""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .eqsys import max_wavespeed

GHOST = 3


class ConfigError(ValueError):
    """Inconsistent mesh or boundary configuration."""


@dataclass(frozen=True)
class Grid:
    extents: tuple  # ((xmin, xmax, nx),) or ((xmin, xmax, nx), (ymin, ymax, ny))
    ghost: int = GHOST

    def __post_init__(self):
        if len(self.extents) not in (1, 2):
            raise ConfigError("grids are 1-D or 2-D")
        for lo, hi, n in self.extents:
            if not (hi > lo) or int(n) != n or n < 1:
                raise ConfigError(f"bad extent ({lo}, {hi}, {n})")
        if self.ghost < GHOST:
            raise ConfigError(f"ghost width must be at least {GHOST}")

    @classmethod
    def uniform1d(cls, xmin, xmax, nx, ghost=GHOST):
        return cls(((float(xmin), float(xmax), int(nx)),), ghost)

    @classmethod
    def uniform2d(cls, xmin, xmax, nx, ymin, ymax, ny, ghost=GHOST):
        return cls(((float(xmin), float(xmax), int(nx)), (float(ymin), float(ymax), int(ny))), ghost)

    @property
    def dims(self):
        return len(self.extents)

    @property
    def nx(self):
        return self.extents[0][2]

    @property
    def ny(self):
        return self.extents[1][2] if self.dims == 2 else 1

    @property
    def dx(self):
        lo, hi, n = self.extents[0]
        return (hi - lo) / n

    @property
    def dy(self):
        if self.dims == 1:
            return 1.0
        lo, hi, n = self.extents[1]
        return (hi - lo) / n

    @property
    def cell_volume(self):
        return self.dx * self.dy

    @property
    def shape(self):
        """Cell counts including ghosts."""
        return tuple(n + 2 * self.ghost for _, _, n in self.extents)

    def centers(self, axis=0, ghosts=False):
        lo, hi, n = self.extents[axis]
        h = (hi - lo) / n
        g = self.ghost if ghosts else 0
        return lo + h * (np.arange(-g, n + g) + 0.5)

    def faces(self, axis=0):
        lo, hi, n = self.extents[axis]
        return lo + (hi - lo) / n * np.arange(n + 1)

    @property
    def interior(self):
        g = self.ghost
        return tuple(slice(g, g + n) for _, _, n in self.extents)


@dataclass
class CellField:
    grid: Grid
    data: np.ndarray  # (m, *grid.shape)
    time: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape[1:] != self.grid.shape:
            raise ValueError(f"data shape {self.data.shape[1:]} does not match grid {self.grid.shape}")

    @classmethod
    def zeros(cls, grid, m, time=0.0):
        return cls(grid, np.zeros((m,) + grid.shape), time)

    @property
    def m(self):
        return self.data.shape[0]

    def interior(self):
        return self.data[(slice(None),) + self.grid.interior]

    def copy(self):
        return CellField(self.grid, self.data.copy(), self.time)

    def totals(self):
        """Integral of each component over the interior."""
        ax = tuple(range(1, self.data.ndim))
        return self.interior().sum(axis=ax) * self.grid.cell_volume


# ---------------------------------------------------------------------------
# quadrature


def gauss_face_points(k, extent=(-0.5, 0.5)):
    """Gauss-Legendre nodes on ``extent`` with weights summing to 1."""
    if k not in (1, 2, 3):
        raise ValueError(f"face quadrature supports k in {{1, 2, 3}}, got {k}")
    a, b = map(float, extent)
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * w


def _cell_quadrature(grid, axis, ghosts, npts=5):
    x, w = np.polynomial.legendre.leggauss(npts)
    c = grid.centers(axis, ghosts)
    h = grid.dx if axis == 0 else grid.dy
    return c[:, None] + 0.5 * h * x[None, :], 0.5 * w


def project_cell_averages(fn, grid, ghosts=False, time=0.0):
    """Cell averages of ``fn`` by 5-point Gauss quadrature per axis.

    ``fn(x)`` (1-D) or ``fn(x, y)`` (2-D) takes broadcastable arrays and
    returns an array of shape (m, *x.shape) (a scalar function may return
    x.shape).  With ``ghosts=False`` the ghost cells are left at zero.
    """
    xq, wx = _cell_quadrature(grid, 0, ghosts)
    if grid.dims == 1:
        vals = np.asarray(fn(xq), dtype=float)
        if vals.ndim == 2:
            vals = vals[None]
        avg = vals @ wx
    else:
        yq, wy = _cell_quadrature(grid, 1, ghosts)
        X = xq[:, None, :, None]
        Y = yq[None, :, None, :]
        vals = np.asarray(fn(X, Y), dtype=float)
        if vals.ndim == 4:
            vals = vals[None]
        vals = np.broadcast_to(vals, vals.shape[:1] + (xq.shape[0], yq.shape[0], 5, 5))
        avg = np.einsum("mijab,a,b->mij", vals, wx, wy)
    if ghosts:
        return CellField(grid, avg, time)
    out = CellField.zeros(grid, avg.shape[0], time)
    out.data[(slice(None),) + grid.interior] = avg
    return out


# ---------------------------------------------------------------------------
# boundary conditions


@dataclass(frozen=True)
class Periodic:
    kind: str = "periodic"


@dataclass(frozen=True)
class Reflective:
    kind: str = "reflective"


@dataclass(frozen=True)
class Outflow:
    kind: str = "outflow"


@dataclass(frozen=True)
class Dirichlet:
    """Ghost cells set from a state function ``fn(x, t)`` or ``fn(x, y, t)``.

    The function returns conserved states with components on axis 0.
    """

    fn: object
    kind: str = "dirichlet"


@dataclass(frozen=True)
class DoubleMachTop:
    """Top boundary of the double Mach reflection: moving shock trace."""

    post: tuple  # conserved post-shock state
    pre: tuple
    x0: float = 1.0 / 6.0
    speed: float = 10.0
    kind: str = "doubleMachTop"

    def split(self, t, y=1.0):
        """x where the incident shock meets the line at height y."""
        return self.x0 + (y + 2.0 * self.speed * t) / math.sqrt(3.0)


@dataclass(frozen=True)
class DoubleMachBottom:
    """Post-shock inflow for x < x0, reflecting wall beyond."""

    post: tuple
    x0: float = 1.0 / 6.0
    kind: str = "doubleMachBottom"


PERIODIC, REFLECTIVE, OUTFLOW = Periodic(), Reflective(), Outflow()


@dataclass(frozen=True)
class BoundarySpec:
    left: object = OUTFLOW
    right: object = OUTFLOW
    bottom: object = None
    top: object = None

    def __post_init__(self):
        pairs = [(self.left, self.right)]
        if self.bottom is not None or self.top is not None:
            pairs.append((self.bottom, self.top))
        for a, b in pairs:
            if isinstance(a, Periodic) != isinstance(b, Periodic):
                raise ConfigError("periodic boundaries must be paired on opposite sides")

    @classmethod
    def all(cls, bc, dims=1):
        return cls(bc, bc, bc, bc) if dims == 2 else cls(bc, bc)


def _normal_component(sys_m, axis):
    # momentum component normal to the boundary; None for scalars
    if sys_m == 1:
        return None
    return 1 + axis


def _fill_side(data, bc, axis, side, g, n, grid, t):
    """Fill the ghost layer on one side along ``axis`` (array axis axis+1)."""
    ax = axis + 1
    m = data.shape[0]

    def sl(a, b):
        idx = [slice(None)] * data.ndim
        idx[ax] = slice(a, b)
        return tuple(idx)

    def at(i):
        idx = [slice(None)] * data.ndim
        idx[ax] = i
        return tuple(idx)

    if side == 0:
        ghost_idx = [g - 1 - i for i in range(g)]  # outward order
        inner_idx = [g + i for i in range(g)]
    else:
        ghost_idx = [g + n + i for i in range(g)]
        inner_idx = [g + n - 1 - i for i in range(g)]
    if isinstance(bc, Periodic):
        if side == 0:
            data[sl(0, g)] = data[sl(n, n + g)]
        else:
            data[sl(g + n, 2 * g + n)] = data[sl(g, 2 * g)]
        return
    if isinstance(bc, Outflow):
        for gi in ghost_idx:
            data[at(gi)] = data[at(inner_idx[0])]
        return
    if isinstance(bc, Reflective):
        k = _normal_component(m, axis)
        for gi, ii in zip(ghost_idx, inner_idx):
            data[at(gi)] = data[at(ii)]
            if k is not None:
                data[at(gi)][k] *= -1.0
        return
    if isinstance(bc, Dirichlet):
        _fill_dirichlet(data, bc.fn, axis, ghost_idx, grid, t)
        return
    if isinstance(bc, DoubleMachTop):
        if axis != 1 or side != 1:
            raise ConfigError("doubleMachTop applies to the top boundary only")
        xc = grid.centers(0, ghosts=True)
        ytop = grid.extents[1][1]
        post = np.asarray(bc.post, dtype=float)[:, None]
        pre = np.asarray(bc.pre, dtype=float)[:, None]
        for gi in ghost_idx:
            yc = grid.extents[1][0] + grid.dy * (gi - g + 0.5)
            xs = bc.split(t, ytop) + (yc - ytop) / math.sqrt(3.0)
            data[:, :, gi] = np.where(xc[None, :] < xs, post, pre)
        return
    if isinstance(bc, DoubleMachBottom):
        if axis != 1 or side != 0:
            raise ConfigError("doubleMachBottom applies to the bottom boundary only")
        xc = grid.centers(0, ghosts=True)
        wall = xc >= bc.x0
        post = np.asarray(bc.post, dtype=float)[:, None]
        for gi, ii in zip(ghost_idx, inner_idx):
            mirrored = data[:, :, ii].copy()
            mirrored[2] *= -1.0
            data[:, :, gi] = np.where(wall[None, :], mirrored, post)
        return
    raise ConfigError(f"unknown boundary condition {bc!r}")


def _fill_dirichlet(data, fn, axis, ghost_idx, grid, t):
    x, wx = np.polynomial.legendre.leggauss(5)
    wx = 0.5 * wx
    g = grid.ghost
    if grid.dims == 1:
        for gi in ghost_idx:
            xc = grid.extents[0][0] + grid.dx * (gi - g + 0.5)
            vals = np.asarray(fn(xc + 0.5 * grid.dx * x, t), dtype=float).reshape(data.shape[0], 5)
            data[:, gi] = vals @ wx
        return
    for gi in ghost_idx:
        other = 1 - axis
        oc = grid.centers(other, ghosts=True)
        h_o = grid.dx if other == 0 else grid.dy
        h_n = grid.dx if axis == 0 else grid.dy
        nc = grid.extents[axis][0] + h_n * (gi - g + 0.5)
        pn = nc + 0.5 * h_n * x  # (5,)
        po = oc[:, None] + 0.5 * h_o * x[None, :]  # (n_o, 5)
        if axis == 0:
            X, Y = pn[None, :, None], po[:, None, :]
        else:
            X, Y = po[:, None, :], pn[None, :, None]
        vals = np.asarray(fn(X, Y, t), dtype=float)
        vals = np.broadcast_to(vals, (data.shape[0], len(oc), 5, 5))
        avg = np.einsum("moab,a,b->mo", vals, wx, wx)
        if axis == 0:
            data[:, gi, :] = avg
        else:
            data[:, :, gi] = avg


def apply_bc(field, spec, t=None):
    """Fill ghost cells of ``field`` in place and return it.

    In 2-D the x-sides are filled first (interior rows only), then the
    y-sides across the full width, which also fills the corners.
    """
    grid = field.grid
    t = field.time if t is None else t
    g = grid.ghost
    data = field.data
    if grid.dims == 1:
        _fill_side(data, spec.left, 0, 0, g, grid.nx, grid, t)
        _fill_side(data, spec.right, 0, 1, g, grid.nx, grid, t)
        return field
    if spec.bottom is None or spec.top is None:
        raise ConfigError("2-D fields need bottom and top boundary conditions")
    rows = data[:, :, g : g + grid.ny]
    # view keeps writes in place; Dirichlet on x-sides needs all rows, so use full data then
    for side, bc in ((0, spec.left), (1, spec.right)):
        if isinstance(bc, Dirichlet):
            _fill_side(data, bc, 0, side, g, grid.nx, grid, t)
        else:
            _fill_side(rows, bc, 0, side, g, grid.nx, grid, t)
    _fill_side(data, spec.bottom, 1, 0, g, grid.ny, grid, t)
    _fill_side(data, spec.top, 1, 1, g, grid.ny, grid, t)
    return field


# ---------------------------------------------------------------------------
# time step


def compute_dt(sys, field, cfl, t=0.0, t_end=None):
    """CFL time step ``cfl * min(dx, dy) / max|lambda|`` clipped to ``t_end``."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    grid = field.grid
    h = grid.dx if grid.dims == 1 else min(grid.dx, grid.dy)
    smax = max_wavespeed(sys, field.interior())
    remaining = math.inf if t_end is None else t_end - t
    if smax <= 0.0:
        if t_end is None:
            raise ValueError("zero wave speed and no end time")
        return remaining
    return min(cfl * h / smax, remaining)
