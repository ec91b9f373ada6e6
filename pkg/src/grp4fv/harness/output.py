"""CSV and legacy-VTK writers.  Output is byte-deterministic for equal input."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..eqsys import cons_to_prim

FMT = "%.12e"


def _fmt(v):
    return FMT % v


def _columns(sys, field):
    """Column names and arrays (cell-centred, interior cells)."""
    grid = field.grid
    u = field.interior()
    if grid.dims == 1:
        coords = [("x", grid.centers(0))]
    else:
        X, Y = np.meshgrid(grid.centers(0), grid.centers(1), indexing="ij")
        coords = [("x", X), ("y", Y)]
    if not sys.is_euler:
        return coords + [("u", u[0])]
    w = cons_to_prim(sys, u, check=False)
    rho, p = w[0], w[-1]
    vel = w[1:-1]
    # specific total energy
    energy = u[-1] / rho
    if grid.dims == 1:
        return coords + [("rho", rho), ("v", vel[0]), ("p", p), ("E", energy)]
    return coords + [("rho", rho), ("u", vel[0]), ("v", vel[1]), ("p", p), ("E", energy)]


def _open(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="\n", encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_csv(sys, field, path):
    """One row per cell.  In 2-D rows run with x fastest."""
    cols = _columns(sys, field)
    names = [c[0] for c in cols]
    data = np.stack([np.asarray(c[1], dtype=float).T.ravel() for c in cols], axis=1)
    with _open(path) as fh:
        fh.write(",".join(names) + "\n")
        for row in data:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return Path(path)


def _order_str(o):
    return "nan" if o is None or (isinstance(o, float) and math.isnan(o)) else _fmt(o)


def write_convergence_csv(rows, path):
    with _open(path) as fh:
        fh.write("m,l1,l1_order,linf,linf_order\n")
        for r in rows:
            fh.write(f"{r.m},{_fmt(r.l1_error)},{_order_str(r.l1_order)},{_fmt(r.linf_error)},{_order_str(r.linf_order)}\n")
    return Path(path)


def format_convergence_table(rows):
    lines = [f"{'m':>6} {'L1 error':>12} {'order':>6} {'Linf error':>12} {'order':>6}"]
    for r in rows:
        o1 = "" if r.l1_order is None else f"{r.l1_order:.2f}"
        o2 = "" if r.linf_order is None else f"{r.linf_order:.2f}"
        lines.append(f"{r.m:>6} {r.l1_error:>12.4e} {o1:>6} {r.linf_error:>12.4e} {o2:>6}")
    return "\n".join(lines)


def write_structured_2d(sys, field, path, title="grp4fv output"):
    """Legacy ASCII VTK structured-points file with cell-centred primitives."""
    grid = field.grid
    if grid.dims != 2:
        raise ValueError("structured-points output needs a 2-D field")
    (x0, _, _), (y0, _, _) = grid.extents
    cols = _columns(sys, field)[2:]
    with _open(path) as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(title.replace("\n", " ")[:255] + "\n")
        fh.write("ASCII\nDATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {grid.nx + 1} {grid.ny + 1} 1\n")
        fh.write(f"ORIGIN {_fmt(x0)} {_fmt(y0)} {_fmt(0.0)}\n")
        fh.write(f"SPACING {_fmt(grid.dx)} {_fmt(grid.dy)} {_fmt(1.0)}\n")
        fh.write(f"CELL_DATA {grid.nx * grid.ny}\n")
        for name, arr in cols:
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            # VTK point order: x fastest
            for v in np.asarray(arr, dtype=float).T.ravel():
                fh.write(_fmt(v) + "\n")
    return Path(path)
