"""Error norms, convergence tables and fine-mesh references."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..fvmesh import CellField, ConfigError, project_cell_averages
from .presets import ANALYTIC, FINE_MESH


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    l1_error: float
    linf_error: float
    l1_order: float | None = None
    linf_order: float | None = None


class ConvergenceAborted(RuntimeError):
    """A run inside a convergence study failed; ``rows`` holds the completed part."""

    def __init__(self, rows, cause):
        super().__init__(f"convergence study aborted after {len(rows)} meshes: {cause}")
        self.rows = rows
        self.cause = cause


def error_norms(field, exact):
    """(L1, Linf) of ``field - exact`` over interior cells.

    L1 sums |error| * cell volume over cells and components, then divides
    by the number of components.
    """
    if field.grid != exact.grid or field.m != exact.m:
        raise ValueError("error_norms needs fields on the same grid with the same components")
    e = np.abs(field.interior() - exact.interior())
    return float(e.sum() * field.grid.cell_volume / field.m), float(e.max())


def orders(errors):
    """log2 ratios of successive errors (None for the first entry)."""
    out = [None]
    for a, b in zip(errors[:-1], errors[1:]):
        out.append(math.log2(a / b) if a > 0 and b > 0 else math.nan)
    return out


def build_rows(meshes, l1, linf):
    return [
        ConvergenceRow(int(m), a, b, oa, ob)
        for m, a, b, oa, ob in zip(meshes, l1, linf, orders(l1), orders(linf))
    ]


def conservation_drift(before, after, scale):
    """Per-component |total change| relative to the integral of |u|."""
    scale = np.maximum(np.asarray(scale, dtype=float), np.finfo(float).tiny)
    return np.abs(np.asarray(after) - np.asarray(before)) / scale


def abs_totals(field):
    ax = tuple(range(1, field.data.ndim))
    return np.abs(field.interior()).sum(axis=ax) * field.grid.cell_volume


def exact_field(preset, grid, t):
    if preset.exact is None:
        raise ConfigError(f"problem {preset.id!r} has no analytic solution")
    if preset.dims == 1:
        return project_cell_averages(lambda x: preset.exact(x, t), grid, time=t)
    return project_cell_averages(lambda x, y: preset.exact(x, y, t), grid, time=t)


@lru_cache(maxsize=8)
def _fine_solution(pid, end_time, cells, scheme):
    from .presets import preset as make_preset
    from .runner import advance, initial_field

    pre = make_preset(pid)
    field = initial_field(pre, pre.grid(cells))
    field, _ = advance(pre, field, scheme, end_time=end_time)
    return field


def remap_1d(fine, grid):
    """Conservative restriction of a 1-D fine field onto ``grid``."""
    xf = fine.grid.faces(0)
    cum = np.concatenate([np.zeros((fine.m, 1)), np.cumsum(fine.interior(), axis=1) * fine.grid.dx], axis=1)
    xc = grid.faces(0)
    out = CellField.zeros(grid, fine.m, fine.time)
    ints = np.array([np.interp(xc, xf, c) for c in cum])
    g = grid.ghost
    out.data[:, g : g + grid.nx] = np.diff(ints, axis=1) / grid.dx
    return out


def reference_field(preset, grid, t=None, scheme="grp4"):
    """Analytic averages, or a fine-mesh run restricted to ``grid``."""
    t = preset.end_time if t is None else t
    if preset.reference == ANALYTIC:
        return exact_field(preset, grid, t)
    if preset.reference == FINE_MESH and preset.dims == 1:
        fine = _fine_solution(preset.id, float(t), int(preset.fine_cells), scheme)
        return remap_1d(fine, grid)
    raise ConfigError(f"problem {preset.id!r} has no reference solution")


def convergence_study(preset, scheme="grp4", meshes=None, opts=None, cfl=None, end_time=None, check=None):
    """Run ``preset`` on each mesh and tabulate errors against the exact solution.

    ``check(field0, field, m)`` is an optional hook called after every run
    (used by tests to assert conservation).
    """
    from .runner import advance, initial_field

    if preset.reference != ANALYTIC:
        raise ConfigError(f"convergence study needs an analytic reference; {preset.id!r} has {preset.reference}")
    meshes = list(meshes or preset.default_meshes)
    t_end = preset.end_time if end_time is None else end_time
    l1, linf, done = [], [], []
    for m in meshes:
        grid = preset.grid(m)
        f0 = initial_field(preset, grid)
        try:
            f, _ = advance(preset, f0, scheme, opts=opts, cfl=cfl, end_time=t_end)
        except (ArithmeticError, ValueError) as exc:
            raise ConvergenceAborted(build_rows(done, l1, linf), exc) from exc
        a, b = error_norms(f, exact_field(preset, grid, t_end))
        l1.append(a)
        linf.append(b)
        done.append(m)
        if check is not None:
            check(f0, f, m)
    return build_rows(done, l1, linf)
