# -*- coding: utf-8 -*-

"""Top-level package for screenbem."""

import os
import sys
import json
import logging
from dataclasses import replace

from screenbem.__version__ import __version__  # noqa
from screenbem.exc import (  # noqa
    ScreenBemError,
    ScreenBemNumericalError,
    ScreenBemValidationError,
)

FORMAT = "%(asctime)-15s %(name)-8s %(levelname)s: %(message)s"

_logger = logging.getLogger(__name__)
_logger.addHandler(logging.NullHandler())
_logger.setLevel(logging.DEBUG)


def _stream_handler():
    handler = logging.StreamHandler(sys.stdout)
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(fmt=FORMAT))
    return handler


if bool(os.environ.get("SCREENBEM_LOGGING", False)):
    _logger.addHandler(_stream_handler())

from screenbem.config import ExperimentConfig, GridSpec, QuadratureConfig  # noqa: E402,F401
from screenbem.mesh import (  # noqa: E402,F401
    MeshLevelPair,
    SurfaceMesh,
    boundary,
    load_mesh,
    refine_graded,
    refine_levels,
    refine_uniform,
    save_mesh,
)
from screenbem.geometries import builtin  # noqa: E402,F401
from screenbem.multiscreen import generalized_vertices, inflate  # noqa: E402,F401
from screenbem.jumps import (  # noqa: E402,F401
    JumpVector,
    TraceField,
    basis_trace,
    build_prolongation,
    coordinates,
    expand,
    jump_space,
    naive_space,
)
from screenbem.assembly import assemble_rhs, assemble_W  # noqa: E402,F401
from screenbem.potential import (  # noqa: E402,F401
    EvaluationGrid,
    eval_DL,
    exact_plus_solution,
    grid_error,
)
from screenbem.precond import (  # noqa: E402,F401
    SchwarzPreconditioner,
    condition_number,
    partition_dofs,
)
from screenbem.solver import direct_solve, pcg  # noqa: E402,F401


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ScreenBemValidationError("Expected comma separated integers, got {0!r}.".format(text))


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ScreenBemValidationError("Expected comma separated numbers, got {0!r}.".format(text))


def _parser():
    import argparse

    parser = argparse.ArgumentParser(
        prog="screenbem",
        description="Galerkin BEM for the Laplace hypersingular equation on multiscreens",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    for name in ("solve", "eval", "inflate", "cond", "exp1", "exp2", "exp3"):
        p = sub.add_parser(name)
        p.add_argument("mesh", nargs="?", default=None, help="Mesh file or builtin spec")
        p.add_argument("--geometry", help="Builtin spec such as plus:n=5, or a mesh file")
        p.add_argument("--config", help="JSON file with a saved configuration")
        p.add_argument("--levels", type=int, help="Number of mesh levels")
        p.add_argument("--coarse-levels", dest="coarse_levels", help="e.g. 0,1")
        p.add_argument("--coarse-level", dest="coarse_level", type=int)
        p.add_argument("--graded", type=float, help="Grading exponent (2D)")
        p.add_argument("--g", dest="g", help="Constant Neumann vector, e.g. 1,2")
        p.add_argument("--tol", type=float)
        p.add_argument("--maxit", type=int)
        p.add_argument("--no-precondition", dest="precondition", action="store_false", default=None)
        p.add_argument("--out", help="Output directory")
        p.add_argument("--threads", type=int)
        p.add_argument("--quad-far", dest="quad_far", type=int)
        p.add_argument("--quad-sing", dest="quad_sing", type=int)
        p.add_argument("--near-threshold", dest="near_threshold", type=float)
        p.add_argument("--grid", action="store_true", help="Also evaluate the potential")
        p.add_argument("--grid-points", dest="grid_points", type=int)
        p.add_argument("--grid-extent", dest="grid_extent", type=float)
        p.add_argument("--dump-matrix", dest="dump_matrix", help="Write W (.bin or .mtx)")
        p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("plot")
    p.add_argument("csv")
    p.add_argument("--x", default="h")
    p.add_argument("--y", required=True, help="Comma separated columns")
    p.add_argument("--group")
    p.add_argument("--title")
    p.add_argument("--svg", help="Output file")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _config(args):
    overrides = {
        "geometry": args.geometry or args.mesh,
        "levels": args.levels,
        "coarse_level": args.coarse_level,
        "graded": args.graded,
        "tol": args.tol,
        "maxit": args.maxit,
        "precondition": args.precondition,
        "out": args.out,
        "threads": args.threads,
    }
    if args.coarse_levels is not None:
        overrides["coarse_levels"] = _int_list(args.coarse_levels)
    if args.g is not None:
        overrides["g"] = _float_list(args.g)
    if args.config:
        config = ExperimentConfig.from_json_file(args.config)
        config = config.updated(**{k: v for k, v in overrides.items() if v is not None})
    else:
        config = ExperimentConfig.for_command(args.command, **overrides)
    quad = {
        k: v
        for k, v in (
            ("far_order", args.quad_far),
            ("singular_order", args.quad_sing),
            ("near_threshold", args.near_threshold),
        )
        if v is not None
    }
    if quad:
        config = config.updated(quadrature=replace(config.quadrature, **quad))
    if args.grid or args.grid_points or args.grid_extent:
        grid = {}
        if args.grid_points:
            grid["points"] = args.grid_points
        if args.grid_extent:
            grid["extent"] = args.grid_extent
        config = config.updated(grid=replace(config.grid or GridSpec(), **grid))
    return config


def main(argv=None):
    """Run the command line; returns the exit status."""
    args = _parser().parse_args(argv)
    if args.command is None:
        _parser().print_help()
        return 2
    handler = None
    if args.verbose:
        handler = _stream_handler()
        _logger.addHandler(handler)
    try:
        if args.command == "plot":
            from screenbem.plotting import emit_plot

            ys = [y for y in args.y.split(",") if y]
            print(emit_plot(args.csv, args.x, ys, args.svg, args.title, args.group))
            return 0
        from screenbem import experiments

        config = _config(args)
        if args.command == "solve":
            result = experiments.cmd_solve(config, dump_matrix_path=args.dump_matrix)
        else:
            result = experiments.COMMANDS[args.command](config)
        print(json.dumps(result, indent=2, default=str))
        return 0
    except ScreenBemValidationError as e:
        print("screenbem: error: {0}".format(e), file=sys.stderr)
        return e.exit_code
    except ScreenBemNumericalError as e:
        print("screenbem: numerical failure: {0}".format(e), file=sys.stderr)
        return e.exit_code
    finally:
        if handler is not None:
            _logger.removeHandler(handler)


def cli():
    sys.exit(main())


if __name__ == "__main__":
    cli()
