"""Run orchestration: config parsing, time loop and run reports."""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..fvmesh import ConfigError, apply_bc, compute_dt, project_cell_averages
from ..stepper import StageCounters, StepOptions, rk4_step, two_stage_step
from .analysis import abs_totals, conservation_drift
from .output import write_csv, write_structured_2d
from .presets import PRESET_PARAMS, preset as make_preset

SCHEMES = {"grp4": two_stage_step, "rk4": rk4_step}
OUTPUTS = ("csv", "vtk", "none")

# problem-specific keys -> preset keyword
_PARAM_KEYS = {"vortex_rc": "rc", "vortex_eps": "eps", "vortex_alpha": "alpha", "mach": "mach"}


@dataclass
class RunConfig:
    problem: str
    scheme: str = "grp4"
    cells: int | None = None
    cells_x: int | None = None
    cells_y: int | None = None
    cfl: float | None = None
    end_time: float | None = None
    gauss_k: int | None = None
    recon_mode: str = "weno"
    char_projection: bool = True
    grp_threshold: float = 1e-6
    output: str = "none"
    out_dir: str = "."
    params: dict = field(default_factory=dict)

    def validate(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {sorted(SCHEMES)}, got {self.scheme!r}")
        if self.recon_mode not in ("weno", "linear"):
            raise ConfigError(f"recon_mode must be weno or linear, got {self.recon_mode!r}")
        if self.output not in OUTPUTS:
            raise ConfigError(f"output must be one of {OUTPUTS}, got {self.output!r}")
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.end_time is not None and self.end_time < 0.0:
            raise ConfigError("end_time must be non-negative")
        if self.gauss_k is not None and self.gauss_k not in (1, 2, 3):
            raise ConfigError(f"gauss_k must be 1, 2 or 3, got {self.gauss_k}")
        if self.grp_threshold < 0.0:
            raise ConfigError("grp_threshold must be non-negative")
        for name in ("cells", "cells_x", "cells_y"):
            v = getattr(self, name)
            if v is not None and v < 6:
                raise ConfigError(f"{name} must be at least 6, got {v}")
        if self.cells is not None and (self.cells_x is not None or self.cells_y is not None):
            raise ConfigError("give either cells or cells_x/cells_y, not both")
        return self


def _parse_bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


_CONVERTERS = {
    "problem": str,
    "scheme": str,
    "cells": int,
    "cells_x": int,
    "cells_y": int,
    "cfl": float,
    "end_time": float,
    "gauss_k": int,
    "recon_mode": str,
    "char_projection": _parse_bool,
    "grp_threshold": float,
    "output": str,
    "out_dir": str,
}


def parse_config(text):
    """Parse flat ``key=value`` lines (``#`` comments).  Unknown keys are errors."""
    values, params = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in values or key in params:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _CONVERTERS:
                values[key] = _CONVERTERS[key](val)
            elif key in _PARAM_KEYS:
                params[key] = float(val)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {val!r}") from None
    if "problem" not in values:
        raise ConfigError("config is missing the 'problem' key")
    return RunConfig(**values, params=params).validate()


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)


@dataclass
class RunReport:
    final_field: object
    counters: StageCounters
    wall_clock: float
    outputs: list
    preset: object
    steps: int
    conservation_drift: np.ndarray
    config_dump: str = ""


def initial_field(preset, grid):
    if preset.corrupt_data:
        raise ConfigError(f"problem {preset.id!r} carries corrupt printed data and cannot be run")
    return project_cell_averages(preset.initial, grid)


def step_options(preset, opts=None):
    if opts is None:
        return StepOptions(gauss_k=preset.gauss_k)
    return opts


def advance(preset, field, scheme="grp4", opts=None, cfl=None, end_time=None, callback=None):
    """March ``field`` to ``end_time`` with CFL steps clipped at the end.

    Returns (field, accumulated counters).
    """
    try:
        step = SCHEMES[scheme]
    except KeyError:
        raise ConfigError(f"scheme must be one of {sorted(SCHEMES)}, got {scheme!r}") from None
    sys = preset.system
    opts = step_options(preset, opts)
    cfl = preset.cfl if cfl is None else cfl
    t_end = preset.end_time if end_time is None else end_time
    total = StageCounters()
    apply_bc(field, preset.bc, field.time)
    # relative guard against a sliver final step from round-off
    eps = 1e-12 * max(1.0, abs(t_end))
    while field.time < t_end - eps:
        dt = compute_dt(sys, field, cfl, field.time, t_end)
        field, cnt = step(sys, field, preset.bc, dt, opts)
        total.add(cnt)
        if callback is not None:
            callback(field, cnt)
    return field, total


def _preset_for(cfg):
    kwargs = {}
    for key, val in cfg.params.items():
        kwargs[_PARAM_KEYS[key]] = val
    if cfg.problem == "burgers" and cfg.end_time is not None:
        kwargs["end_time"] = cfg.end_time
    if kwargs:
        allowed = PRESET_PARAMS.get(cfg.problem, ())
        bad = [k for k in kwargs if k not in allowed]
        if bad:
            raise ConfigError(f"problem {cfg.problem!r} does not accept {bad}")
    return make_preset(cfg.problem, **kwargs)


def _grid_for(cfg, pre):
    if pre.dims == 1:
        if cfg.cells_y is not None:
            raise ConfigError("cells_y is only valid for 2-D problems")
        nx = cfg.cells or cfg.cells_x
        if nx is None:
            nx = pre.default_meshes[0]
        return pre.grid(nx)
    default = pre.default_meshes[0]
    dnx, dny = default if isinstance(default, tuple) else (default, None)
    if cfg.cells is not None:
        return pre.grid(cfg.cells)
    nx = cfg.cells_x if cfg.cells_x is not None else dnx
    ny = cfg.cells_y if cfg.cells_y is not None else (dny if cfg.cells_x is None else None)
    return pre.grid(nx, ny)


def config_dump(cfg, pre, grid):
    lines = [
        f"scheme={cfg.scheme}",
        "cells=" + "x".join(str(n) for n in ((grid.nx,) if grid.dims == 1 else (grid.nx, grid.ny))),
        f"recon_mode={cfg.recon_mode}",
        f"char_projection={'true' if cfg.char_projection else 'false'}",
        f"grp_threshold={cfg.grp_threshold:g}",
    ]
    text = pre.describe()
    if cfg.cfl is not None:
        text = text.replace(f"cfl={pre.cfl:g}\n", f"cfl={cfg.cfl:g}\n")
    if cfg.end_time is not None:
        text = text.replace(f"end_time={pre.end_time:.12g}\n", f"end_time={cfg.end_time:.12g}\n")
    if cfg.gauss_k is not None and grid.dims == 2:
        text = text.replace(f"gauss_k={pre.gauss_k}\n", f"gauss_k={cfg.gauss_k}\n")
    return text + "\n".join(lines) + "\n"


def run_simulation(config):
    """Run one configured problem.  ``config`` is a RunConfig or a dict of keys."""
    if isinstance(config, dict):
        d = dict(config)
        params = {k: d.pop(k) for k in list(d) if k in _PARAM_KEYS}
        unknown = set(d) - set(_CONVERTERS)
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}")
        config = RunConfig(**d, params=params)
    cfg = config.validate()
    pre = _preset_for(cfg)
    grid = _grid_for(cfg, pre)
    if cfg.output == "vtk" and grid.dims != 2:
        raise ConfigError("vtk output needs a 2-D problem")
    opts = StepOptions(
        mode=cfg.recon_mode,
        projection="characteristic" if cfg.char_projection else "component",
        threshold=cfg.grp_threshold,
        gauss_k=cfg.gauss_k if cfg.gauss_k is not None else pre.gauss_k,
    )
    end_time = pre.end_time if cfg.end_time is None else cfg.end_time
    field0 = initial_field(pre, grid)
    tot0 = field0.totals()
    scale = abs_totals(field0)
    t0 = _time.perf_counter()
    final, counters = advance(pre, field0.copy(), cfg.scheme, opts, cfg.cfl, end_time)
    wall = _time.perf_counter() - t0
    drift = conservation_drift(tot0, final.totals(), np.maximum(scale, abs_totals(final)))
    dump = config_dump(cfg, pre, grid)
    outputs = []
    if cfg.output != "none":
        out = Path(cfg.out_dir)
        stem = f"{pre.id}_{cfg.scheme}"
        cfg_path = out / f"{stem}.cfg"
        out.mkdir(parents=True, exist_ok=True)
        cfg_path.write_text(dump)
        outputs.append(cfg_path)
        if cfg.output == "csv":
            outputs.append(write_csv(pre.system, final, out / f"{stem}.csv"))
        else:
            outputs.append(write_structured_2d(pre.system, final, out / f"{stem}.vtk", title=pre.title))
    return RunReport(final, counters, wall, outputs, pre, counters.steps, drift, dump)
