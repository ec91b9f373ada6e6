"""Command-line entry point ``solver``.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys

from ..eqsys import DomainError
from ..fvmesh import ConfigError
from ..riemann import RiemannConvergenceError, VacuumError
from ..stepper import PositivityError, StepOptions
from .analysis import ConvergenceAborted, convergence_study
from .exact import ExactSolutionError
from .output import format_convergence_table, write_convergence_csv
from .presets import list_presets, preset
from .runner import load_config, run_simulation

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
NUMERIC_ERRORS = (PositivityError, VacuumError, RiemannConvergenceError, DomainError, ExactSolutionError, FloatingPointError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _meshes(text):
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"meshes must be comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("at least one mesh is required")
    return out


def build_parser():
    p = _Parser(prog="solver", description="Two-stage fourth-order GRP finite-volume solver")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run one configured problem")
    run.add_argument("--config", required=True, help="flat key=value config file")
    run.add_argument("--out", help="output directory (overrides out_dir)")
    run.add_argument("--threads", type=int, default=None, help="numba worker threads")
    conv = sub.add_parser("convergence", help="convergence table against the analytic solution")
    conv.add_argument("--problem", required=True)
    conv.add_argument("--scheme", choices=("grp4", "rk4"), default="grp4")
    conv.add_argument("--meshes", type=_meshes, default=None)
    conv.add_argument("--linear-recon", action="store_true", help="linear (unlimited) reconstruction")
    conv.add_argument("--out", help="write the table as CSV to this path")
    conv.add_argument("--threads", type=int, default=None)
    sub.add_parser("list-problems", help="list problem ids")
    return p


def _set_threads(n):
    if n is None:
        return
    import numba

    if not 1 <= n <= numba.config.NUMBA_NUM_THREADS:
        raise ConfigError(f"--threads must lie in [1, {numba.config.NUMBA_NUM_THREADS}], got {n}")
    numba.set_num_threads(n)


def _cmd_run(args):
    cfg = load_config(args.config)
    if args.out:
        cfg.out_dir = args.out
    rep = run_simulation(cfg)
    c = rep.counters
    print(f"problem {rep.preset.id} reached t={rep.final_field.time:.6g} in {rep.steps} steps ({rep.wall_clock:.2f} s)")
    print(
        f"reconstructions={c.reconstructions} solver_sweeps={c.grp_solves} flux_evals={c.flux_evals} "
        f"nonlinear_faces={c.nonlinear_faces} trace_replacements={c.trace_replacements} mid_fallbacks={c.mid_fallbacks}"
    )
    print("conservation drift: " + " ".join(f"{d:.3e}" for d in rep.conservation_drift))
    for path in rep.outputs:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_convergence(args):
    pre = preset(args.problem)
    opts = StepOptions(mode="linear" if args.linear_recon else "weno", gauss_k=pre.gauss_k)
    try:
        rows = convergence_study(pre, args.scheme, args.meshes, opts)
    except ConvergenceAborted as exc:
        if exc.rows:
            print(format_convergence_table(exc.rows))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(format_convergence_table(rows))
    if args.out:
        print(f"wrote {write_convergence_csv(rows, args.out)}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _set_threads(getattr(args, "threads", None))
        if args.command == "list-problems":
            for pid in list_presets():
                p = preset(pid)
                flag = " [corrupt data]" if p.corrupt_data else ""
                print(f"{pid:22s} {p.title}{flag}")
            return EXIT_OK
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_convergence(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
