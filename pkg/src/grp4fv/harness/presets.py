"""Benchmark problem presets.

Every initial/exact function returns *conserved* variables with the
component on axis 0 and accepts broadcastable coordinate arrays, so it can
be fed straight to :func:`grp4fv.fvmesh.project_cell_averages`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import eqsys
from ..fvmesh import (
    OUTFLOW,
    PERIODIC,
    REFLECTIVE,
    BoundarySpec,
    ConfigError,
    Dirichlet,
    DoubleMachBottom,
    DoubleMachTop,
    Grid,
)
from ..riemann import exact_riemann_euler, sample_riemann
from .exact import burgers_exact, isentropic_vortex

ANALYTIC = "analytic"
FINE_MESH = "fineMesh"
NONE = "none"

FINE_MESH_CELLS = 4000


@dataclass(frozen=True)
class ProblemPreset:
    id: str
    title: str
    system: eqsys.EquationSystem
    extents: tuple
    initial: Callable
    bc: BoundarySpec
    end_time: float
    cfl: float = 0.5
    default_meshes: tuple = ()
    exact: Callable | None = None
    reference: str = NONE
    fine_cells: int | None = None
    gauss_k: int = 2
    provenance_note: str = ""
    corrupt_data: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.exact is not None) != (self.reference == ANALYTIC):
            raise ValueError(f"{self.id}: exact solution present iff reference policy is analytic")
        if self.reference == FINE_MESH and not self.fine_cells:
            raise ValueError(f"{self.id}: fine-mesh reference needs a cell count")

    @property
    def dims(self):
        return len(self.extents)

    def grid(self, nx, ny=None):
        """Uniform grid; in 2-D ``ny`` defaults to square cells."""
        (x0, x1), *rest = self.extents
        if self.dims == 1:
            return Grid.uniform1d(x0, x1, int(nx))
        y0, y1 = rest[0]
        if ny is None:
            ny = max(1, int(round(nx * (y1 - y0) / (x1 - x0))))
        return Grid.uniform2d(x0, x1, int(nx), y0, y1, int(ny))

    def describe(self):
        """Flat key=value dump of the preset (used in run reports)."""
        lines = [
            f"problem={self.id}",
            f"title={self.title}",
            f"system={self.system.name}",
            f"gamma={self.system.gamma}" if self.system.is_euler else None,
            "domain=" + " x ".join(f"[{a:g},{b:g}]" for a, b in self.extents),
            f"end_time={self.end_time:.12g}",
            f"cfl={self.cfl:g}",
            "default_meshes=" + ",".join(_mesh_str(m) for m in self.default_meshes),
            f"reference={self.reference}" + (f"({self.fine_cells})" if self.fine_cells else ""),
            f"gauss_k={self.gauss_k}" if self.dims == 2 else None,
        ]
        lines += [f"{k}={v:g}" for k, v in sorted(self.params.items())]
        if self.corrupt_data:
            lines.append("corrupt_data=true")
        if self.provenance_note:
            lines.append(f"provenance_note={self.provenance_note}")
        return "\n".join(x for x in lines if x is not None) + "\n"


def _mesh_str(m):
    return "x".join(map(str, m)) if isinstance(m, tuple) else str(m)


# ---------------------------------------------------------------------------
# helpers


def _cons1d(rho, v, p, gamma=1.4):
    rho, v, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, v, p)))
    return np.array([rho, rho * v, p / (gamma - 1.0) + 0.5 * rho * v * v])


def _cons2d(rho, u, v, p, gamma=1.4):
    rho, u, v, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, u, v, p)))
    return np.array([rho, rho * u, rho * v, p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)])


def _state_column(w, gamma=1.4):
    """Conserved constant state shaped (4, 1, 1, 1) for 2-D broadcasting."""
    return _cons2d(*w, gamma=gamma).reshape(4, 1, 1, 1)


def _piecewise_1d(x, x0, wl, wr, gamma=1.4):
    left = np.asarray(x) < x0
    w = [np.where(left, a, b) for a, b in zip(wl, wr)]
    return _cons1d(*w, gamma=gamma)


# ---------------------------------------------------------------------------
# scalar problems


def _advection():
    sys = eqsys.advection(1.0)

    def exact(x, t):
        return np.sin(math.pi * (np.asarray(x) - t))[None]

    return ProblemPreset(
        id="advection",
        title="linear advection u_t + u_x = 0, u0 = sin(pi x)",
        system=sys,
        extents=((0.0, 2.0),),
        initial=lambda x: exact(x, 0.0),
        bc=BoundarySpec.all(PERIODIC),
        end_time=10.0,
        default_meshes=(40, 80, 160, 320),
        exact=exact,
        reference=ANALYTIC,
    )


def _burgers(end_time=1.0 / math.pi):
    sys = eqsys.burgers()
    shock_time = 2.0 / math.pi
    smooth = end_time < shock_time

    def exact(x, t):
        return burgers_exact(np.asarray(x, dtype=float), t)[None]

    note = ""
    if not smooth:
        note = "end time at or beyond shock formation (t=2/pi): reference switches to a fine-mesh run"
    return ProblemPreset(
        id="burgers",
        title="Burgers u_t + (u^2/2)_x = 0, u0 = 1/4 + sin(pi x)/2",
        system=sys,
        extents=((0.0, 2.0),),
        initial=lambda x: exact(x, 0.0),
        bc=BoundarySpec.all(PERIODIC),
        end_time=end_time,
        default_meshes=(40, 80, 160, 320, 640),
        exact=exact if smooth else None,
        reference=ANALYTIC if smooth else FINE_MESH,
        fine_cells=None if smooth else FINE_MESH_CELLS,
        provenance_note=note,
    )


# ---------------------------------------------------------------------------
# 1-D Euler


def _euler_smooth():
    sys = eqsys.euler1d()

    def exact(x, t):
        x = np.asarray(x, dtype=float)
        return _cons1d(1.0 + 0.2 * np.sin(x - t), 1.0, 1.0)

    return ProblemPreset(
        id="euler_smooth",
        title="1-D Euler density wave rho = 1 + 0.2 sin(x), v = p = 1",
        system=sys,
        extents=((0.0, 2.0 * math.pi),),
        initial=lambda x: exact(x, 0.0),
        bc=BoundarySpec.all(PERIODIC),
        end_time=10.0,
        default_meshes=(40, 80, 160, 320),
        exact=exact,
        reference=ANALYTIC,
        provenance_note="domain unstated; [0, 2pi] is the only periodic-compatible choice",
    )


SOD_LEFT = (1.0, 0.0, 1.0)
SOD_RIGHT = (0.125, 0.0, 0.1)


def _sod():
    sys = eqsys.euler1d()
    star = exact_riemann_euler(SOD_LEFT, SOD_RIGHT, sys.gamma)

    def exact(x, t):
        x = np.asarray(x, dtype=float)
        if t <= 0.0:
            return _piecewise_1d(x, 0.5, SOD_LEFT, SOD_RIGHT)
        xi = (x - 0.5) / t
        w = np.array([sample_riemann(star, s) for s in xi.ravel()]).T
        return _cons1d(*w.reshape((3,) + xi.shape))

    return ProblemPreset(
        id="sod",
        title="Sod shock tube (1,0,1)/(0.125,0,0.1) split at x = 0.5",
        system=sys,
        extents=((0.0, 1.0),),
        initial=lambda x: exact(x, 0.0),
        bc=BoundarySpec.all(OUTFLOW),
        end_time=0.2,
        default_meshes=(100, 200, 400),
        exact=exact,
        reference=ANALYTIC,
        provenance_note="extra regression problem with an exact Riemann reference; not one of the ten benchmark examples",
    )


def _shu_osher():
    sys = eqsys.euler1d()
    left = (3.857143, 2.629369, 10.333333)

    def init(x):
        x = np.asarray(x, dtype=float)
        smooth = (1.0 + 0.2 * np.sin(5.0 * x), 0.0, 1.0)
        w = [np.where(x < -4.0, a, b) for a, b in zip(left, smooth)]
        return _cons1d(*w)

    return ProblemPreset(
        id="shu_osher",
        title="shock / entropy-wave interaction",
        system=sys,
        extents=((-5.0, 5.0),),
        initial=init,
        bc=BoundarySpec.all(OUTFLOW),
        end_time=1.8,
        default_meshes=(400,),
        reference=FINE_MESH,
        fine_cells=FINE_MESH_CELLS,
        provenance_note="domain [-5,5] and output time 1.8 unstated; standard values adopted",
    )


def _woodward_colella():
    sys = eqsys.euler1d()

    def init(x):
        x = np.asarray(x, dtype=float)
        p = np.where(x < 0.1, 1000.0, np.where(x > 0.9, 100.0, 0.01))
        return _cons1d(1.0, 0.0, p)

    return ProblemPreset(
        id="woodward_colella",
        title="interacting blast waves",
        system=sys,
        extents=((0.0, 1.0),),
        initial=init,
        bc=BoundarySpec.all(REFLECTIVE),
        end_time=0.038,
        default_meshes=(200, 800),
        reference=FINE_MESH,
        fine_cells=FINE_MESH_CELLS,
        provenance_note="output time unstated; standard t = 0.038 adopted",
    )


def _large_pressure_ratio():
    sys = eqsys.euler1d()

    def init(x):
        return _piecewise_1d(x, 0.3, (10000.0, 0.0, 10000.0), (1.0, 0.0, 1.0))

    return ProblemPreset(
        id="large_pressure_ratio",
        title="strong rarefaction, pressure and density ratio 1e4",
        system=sys,
        extents=((0.0, 1.0),),
        initial=init,
        bc=BoundarySpec.all(OUTFLOW),
        end_time=0.12,
        cfl=0.2,
        default_meshes=(300, 400),
        reference=FINE_MESH,
        fine_cells=FINE_MESH_CELLS,
        provenance_note="output time unstated; default 0.12 (override with end_time)",
    )


# ---------------------------------------------------------------------------
# 2-D Euler


def _vortex():
    sys = eqsys.euler2d()

    def exact(x, y, t):
        return _cons2d(*isentropic_vortex(x, y, t))

    return ProblemPreset(
        id="vortex",
        title="isentropic vortex advected by the mean flow (1, 1)",
        system=sys,
        extents=((0.0, 10.0), (0.0, 10.0)),
        initial=lambda x, y: exact(x, y, 0.0),
        bc=BoundarySpec.all(PERIODIC, 2),
        end_time=2.0,
        default_meshes=(40, 80, 160, 320),
        exact=exact,
        reference=ANALYTIC,
        gauss_k=3,
    )


# quadrant order: (x>.5,y>.5), (x<.5,y>.5), (x<.5,y<.5), (x>.5,y<.5); entries (rho, u, v, p)
RIEMANN_2D = {
    "a": (
        ((1.4, 8.0, 20.0, 8.0), (-4.125, 4.125, -4.125, -4.125), (-4.125, -4.125, -4.125, 4.125), (1.0, 116.5, 116.5, 116.5)),
        0.26,
        200,
    ),
    "b": (
        ((1.0, 2.0, 1.0625, 0.5179), (0.0, 0.0, 0.0, 0.0), (0.3, -0.3, 0.2145, -0.4259), (1.0, 1.0, 0.4, 0.4)),
        0.055,
        300,
    ),
    "c": (
        ((1.0, 0.5197, 0.8, 0.5197), (0.1, -0.6259, 0.1, 0.1), (0.1, 0.1, 0.1, -0.6259), (1.0, 0.4, 0.4, 0.4)),
        0.3,
        500,
    ),
}


def _quadrant_data_physical(states):
    return all(w[0] > 0.0 and w[3] > 0.0 for w in states)


def _riemann2d(label):
    sys = eqsys.euler2d()
    states, t_end, mesh = RIEMANN_2D[label]
    corrupt = not _quadrant_data_physical(states)

    def init(x, y):
        east = np.asarray(x) > 0.5
        north = np.asarray(y) > 0.5
        comps = []
        for k in range(4):
            q1, q2, q3, q4 = (s[k] for s in states)
            comps.append(np.where(north, np.where(east, q1, q2), np.where(east, q4, q3)))
        rho, u, v, p = np.broadcast_arrays(*comps)
        if corrupt:
            # keep the printed numbers; conversion would reject them
            return np.array([rho, u, v, p])
        return _cons2d(rho, u, v, p)

    note = "printed quadrant data stored verbatim"
    if corrupt:
        note += "; contains non-positive density or pressure as printed, so the problem cannot be run"
    return ProblemPreset(
        id=f"riemann2d_{label}",
        title=f"2-D four-quadrant Riemann problem, configuration {label}",
        system=sys,
        extents=((0.0, 1.0), (0.0, 1.0)),
        initial=init,
        bc=BoundarySpec.all(OUTFLOW, 2),
        end_time=t_end,
        default_meshes=(mesh,),
        provenance_note=note,
        corrupt_data=corrupt,
        params={},
    )


DMR_GAMMA = 1.4
DMR_PRE = (1.4, 0.0, 0.0, 1.0)
DMR_POST = (8.0, 8.25 * math.cos(math.pi / 6.0), -8.25 * math.sin(math.pi / 6.0), 116.5)


def _double_mach():
    sys = eqsys.euler2d(DMR_GAMMA)
    x0 = 1.0 / 6.0
    post = tuple(_cons2d(*DMR_POST).ravel())
    pre = tuple(_cons2d(*DMR_PRE).ravel())
    post_col = _state_column(DMR_POST)

    def init(x, y):
        behind = np.asarray(x) < x0 + np.asarray(y) / math.sqrt(3.0)
        return np.where(behind[None], _cons2d(*DMR_POST).reshape(4, *([1] * np.ndim(behind))),
                        _cons2d(*DMR_PRE).reshape(4, *([1] * np.ndim(behind))))

    bc = BoundarySpec(
        left=Dirichlet(lambda x, y, t: post_col),
        right=OUTFLOW,
        bottom=DoubleMachBottom(post, x0),
        top=DoubleMachTop(post, pre, x0, 10.0),
    )
    return ProblemPreset(
        id="double_mach",
        title="double Mach reflection of a Mach 10 shock",
        system=sys,
        extents=((0.0, 4.0), (0.0, 1.0)),
        initial=init,
        bc=bc,
        end_time=0.2,
        default_meshes=((960, 240),),
    )


def _shock_vortex(rc=0.05, eps=0.3, alpha=0.204, mach=1.1):
    sys = eqsys.euler2d()
    g = sys.gamma
    u1 = math.sqrt(g) * mach
    m2 = mach * mach
    rho2 = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0)
    p2 = 1.0 + 2.0 * g / (g + 1.0) * (m2 - 1.0)
    u2 = u1 / rho2
    xc, yc = 0.25, 0.5

    def init(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xb, yb = x - xc, y - yc
        tau2 = (xb * xb + yb * yb) / (rc * rc)
        e = np.exp(alpha * (1.0 - tau2))
        du = eps / rc * e * yb
        dv = -eps / rc * e * xb
        temp = 1.0 - (g - 1.0) * eps * eps / (4.0 * alpha * g) * e * e
        rho_v = temp ** (1.0 / (g - 1.0))
        left = x < 0.5
        rho = np.where(left, rho_v, rho2)
        u = np.where(left, u1 + du, u2)
        v = np.where(left, dv, 0.0)
        p = np.where(left, rho_v * temp, p2)
        return _cons2d(rho, u, v, p, gamma=g)

    inflow = _state_column((1.0, u1, 0.0, 1.0))
    bc = BoundarySpec(
        left=Dirichlet(lambda x, y, t: inflow),
        right=OUTFLOW,
        bottom=REFLECTIVE,
        top=REFLECTIVE,
    )
    return ProblemPreset(
        id="shock_vortex",
        title="stationary Mach 1.1 shock interacting with a vortex",
        system=sys,
        extents=((0.0, 2.0), (0.0, 1.0)),
        initial=init,
        bc=bc,
        end_time=0.6,
        default_meshes=((400, 100),),
        provenance_note=(
            "vortex radius scale r_c and tau are undefined; tau = r/r_c with r_c = 0.05; "
            "output time and lateral boundaries unstated, t = 0.6 with reflective walls adopted"
        ),
        params={"vortex_rc": rc, "vortex_eps": eps, "vortex_alpha": alpha, "mach": mach},
    )


# ---------------------------------------------------------------------------
# registry

_FACTORIES = {
    "advection": _advection,
    "burgers": _burgers,
    "euler_smooth": _euler_smooth,
    "sod": _sod,
    "shu_osher": _shu_osher,
    "woodward_colella": _woodward_colella,
    "large_pressure_ratio": _large_pressure_ratio,
    "vortex": _vortex,
    "riemann2d_a": lambda: _riemann2d("a"),
    "riemann2d_b": lambda: _riemann2d("b"),
    "riemann2d_c": lambda: _riemann2d("c"),
    "double_mach": _double_mach,
    "shock_vortex": _shock_vortex,
}

# keyword overrides each preset accepts (problem-specific config keys)
PRESET_PARAMS = {
    "burgers": ("end_time",),
    "shock_vortex": ("rc", "eps", "alpha", "mach"),
}


def list_presets():
    return list(_FACTORIES)


def preset(pid, **params):
    """Build the named preset.  Unknown ids raise ConfigError listing valid ids."""
    try:
        factory = _FACTORIES[pid]
    except KeyError:
        raise ConfigError(f"unknown problem {pid!r}; valid ids: {', '.join(_FACTORIES)}") from None
    if params:
        allowed = PRESET_PARAMS.get(pid, ())
        extra = set(params) - set(allowed)
        if extra:
            raise ConfigError(f"problem {pid!r} does not take parameters {sorted(extra)}")
        return factory(**params)
    return factory()
