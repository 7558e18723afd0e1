"""
命令行接口
Command-line front end: validate, solve, represent, random and cusp.

Exit codes: 0 success, 1 a domain failure (constraint, solver, relation),
2 an I/O, parse or usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from config import DEFAULT_RETRY_CAP, DEFAULT_SEED, VERSION
from config.settings import ToleranceConfig, get_tolerance_config
from flagcoords.cusp_analysis import cusp_reports, torus_parabolicity_check
from flagcoords.delta_solver import enumerate_lifts, lift_mdecoration, parse_branch
from flagcoords.errors import ConfigurationError, FileFormatError, FlagCoordsError
from flagcoords.io_formats import (
    DecorationFile,
    RunConfig,
    TriangulationFile,
    cusp_payload,
    cusp_text,
    dumps,
    format_float,
    read_decoration,
    read_loops,
    read_mdecoration,
    read_triangulation,
    representation_payload,
    representation_text,
    torus_check_payload,
    validation_payload,
    validation_text,
    write_model,
)
from flagcoords.random_instances import catalogued_triangulation, random_decoration
from flagcoords.representation_builder import (
    TORUS_RELATION,
    build_representation,
    standard_torus_loops,
)
from flagcoords.surface_complex import is_standard_torus, validate_decoration
from monitoring.metrics import track_computation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Arguments that parse but make no sense together."""


def _emit(config: RunConfig, payload: Dict, text: str) -> None:
    sys.stdout.write(dumps(payload) if config.format == "json" else text + "\n")


def _tolerances(config: RunConfig) -> ToleranceConfig:
    tol = get_tolerance_config()
    if config.tol is not None:
        tol = tol.with_overrides(constraint=config.tol, compatibility=config.tol)
    return tol


# -- commands ---------------------------------------------------------------

@track_computation("cmd_validate")
def cmd_validate(args: argparse.Namespace, config: RunConfig) -> int:
    t = read_triangulation(args.triangulation)
    d = read_decoration(args.decoration)
    report = validate_decoration(t, d, _tolerances(config))
    _emit(config, validation_payload(report), validation_text(report))
    return EXIT_OK if report.passed else EXIT_FAILURE


@track_computation("cmd_solve")
def cmd_solve(args: argparse.Namespace, config: RunConfig) -> int:
    t = read_triangulation(args.triangulation)
    md = read_mdecoration(args.mdecoration)
    tol = _tolerances(config)
    out = Path(args.out)
    if config.branch == "all":
        lifts = list(enumerate_lifts(t, md, tol))
    else:
        try:
            branch = parse_branch([int(c) for c in config.branch], t.num_faces)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        lifts = [(branch, lift_mdecoration(t, md, branch, tol))]
    written = []
    for branch, decoration in lifts:
        path = out / f"lift_{''.join(str(b) for b in branch)}.json"
        write_model(path, DecorationFile.from_decoration(decoration))
        written.append(str(path))
    logger.info("wrote %d lift(s)", len(written))
    _emit(config, {"lifts": written}, "\n".join(written))
    return EXIT_OK


def _loops_for(args: argparse.Namespace, t):
    if args.loops is not None:
        loops_file = read_loops(args.loops)
        return loops_file.loops(), loops_file.relation
    if is_standard_torus(t):
        return standard_torus_loops(), TORUS_RELATION
    return None, None


@track_computation("cmd_represent")
def cmd_represent(args: argparse.Namespace, config: RunConfig) -> int:
    t = read_triangulation(args.triangulation)
    d = read_decoration(args.decoration)
    tol = _tolerances(config)
    loops, relation = _loops_for(args, t)
    rep = build_representation(t, d, loops, relation, tol)
    cusps = cusp_reports(t, d, tol)
    payload = representation_payload(rep)
    payload["cusps"] = [cusp_payload(r) for r in cusps]
    text = "\n".join([representation_text(rep), *(cusp_text(r) for r in cusps)])
    _emit(config, payload, text)
    return EXIT_OK


@track_computation("cmd_random")
def cmd_random(args: argparse.Namespace, config: RunConfig) -> int:
    try:
        t = catalogued_triangulation(args.genus, args.punctures)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rng = np.random.default_rng(config.seed)
    instance = random_decoration(t, rng, config.retry_cap, symmetric=args.symmetric, tolerances=_tolerances(config))
    out = Path(args.out)
    tri_path, dec_path = out / "triangulation.json", out / "decoration.json"
    write_model(tri_path, TriangulationFile.from_triangulation(t))
    write_model(dec_path, DecorationFile.from_decoration(instance.decoration))
    _emit(config, {"triangulation": str(tri_path), "decoration": str(dec_path)},
          f"{tri_path}\n{dec_path}")
    return EXIT_OK


@track_computation("cmd_cusp")
def cmd_cusp(args: argparse.Namespace, config: RunConfig) -> int:
    t = read_triangulation(args.triangulation)
    d = read_decoration(args.decoration)
    tol = _tolerances(config)
    reports = cusp_reports(t, d, tol)
    payload = {"cusps": [cusp_payload(r) for r in reports]}
    lines = [cusp_text(r) for r in reports]
    if is_standard_torus(t):
        check = torus_parabolicity_check(t, d, tol)
        payload["torus_check"] = torus_check_payload(check)
        lines.append(f"torus criterion: lhs={format_float(check.lhs)} rhs={format_float(check.rhs)} "
                     f"satisfied={check.satisfied}")
    _emit(config, payload, "\n".join(lines))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "represent": cmd_represent,
    "random": cmd_random,
    "cusp": cmd_cusp,
}


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="constraint and compatibility tolerance")
    common.add_argument("--format", choices=["json", "text"], default="text")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="flagcoords", description="Flag coordinates on PU(2,1) representation varieties.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check every constraint of a decoration")
    p.add_argument("triangulation", type=Path)
    p.add_argument("decoration", type=Path)

    p = sub.add_parser("solve", parents=[common], help="lift an m-decoration to decorations")
    p.add_argument("triangulation", type=Path)
    p.add_argument("mdecoration", type=Path)
    p.add_argument("--branch", default="all", help="'all' or one bit per face")
    p.add_argument("--out", type=Path, default=Path("."))

    p = sub.add_parser("represent", parents=[common], help="generator matrices, relation residual and cusps")
    p.add_argument("triangulation", type=Path)
    p.add_argument("decoration", type=Path)
    p.add_argument("--loops", type=Path, default=None)

    p = sub.add_parser("random", parents=[common], help="random decorated catalogued surface")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--punctures", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--retry-cap", type=int, default=DEFAULT_RETRY_CAP)
    p.add_argument("--symmetric", action="store_true", help="mirror one flag triple onto both faces")
    p.add_argument("--out", type=Path, default=Path("."))

    p = sub.add_parser("cusp", parents=[common], help="classify the holonomy at every puncture")
    p.add_argument("triangulation", type=Path)
    p.add_argument("decoration", type=Path)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    inputs = [getattr(args, name) for name in ("triangulation", "decoration", "mdecoration", "loops")
              if getattr(args, name, None) is not None]
    return RunConfig(
        command=args.command,
        inputs=inputs,
        tol=args.tol,
        seed=getattr(args, "seed", DEFAULT_SEED),
        format=args.format,
        branch=getattr(args, "branch", None),
        retry_cap=getattr(args, "retry_cap", DEFAULT_RETRY_CAP),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        config = _run_config(args)
    except ValueError as exc:
        sys.stderr.write(f"flagcoords: invalid arguments: {exc}\n")
        return EXIT_USAGE

    try:
        return COMMANDS[config.command](args, config)
    except (FileFormatError, ConfigurationError, UsageError, OSError) as exc:
        sys.stderr.write(f"flagcoords: {exc}\n")
        return EXIT_USAGE
    except FlagCoordsError as exc:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(f"flagcoords: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILURE


def cli_entry() -> None:
    sys.exit(main())


__all__: List[str] = ["main", "build_parser", "cli_entry", "COMMANDS"]
