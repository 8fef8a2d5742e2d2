"""Command-line driver for refinement studies.

Exit codes: 0 success, 2 bad configuration, 3 solve failure, 4 I/O failure.
"""

import argparse
import os
import sys
from dataclasses import dataclass, fields

from . import __version__
from ._validation import (ConfigError, parse_gammas, parse_levels, validate_degrees,
                          validate_meshsize, validate_order)
from .analysis import (SCHEMES, convergence_study, dof_formula, max_principle_report,
                       solve_problem)
from .assembly import assemble_system, export_coordinates
from .mesh import DOMAINS, FAMILIES, MeshError, build_mesh, domain_id
from .problems import get_problem, problem_ids
from .solver import SolverError, estimate_condition

EXIT_OK, EXIT_CONFIG, EXIT_SOLVE, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "SPDWG_THREADS"


@dataclass
class RunConfig:
    """One experiment.  ``None`` means "use the problem's default"."""

    problem: str = None
    variant: str = None
    k: int = None
    s: int = None
    gammas: tuple = None
    mesh: str = None
    domain: str = None
    levels: tuple = None
    quad_order: int = None
    meshsize: str = "area"
    format: str = "csv"
    output: str = None
    max_principle: bool = False
    dof_report: bool = False
    condition: bool = False
    dump_matrix: str = None
    dump_mesh: str = None
    threads: int = None


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _convert(key, value):
    """Turn a raw string (from a file or a flag) into a RunConfig value."""
    if value is None:
        return None
    if key in ("k", "s", "threads"):
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    if key == "quad_order":
        return validate_order(value)
    if key == "gammas":
        return parse_gammas(value)
    if key == "levels":
        return parse_levels(value)
    if key in ("max_principle", "dof_report", "condition"):
        if isinstance(value, bool):
            return value
        try:
            return _BOOL[str(value).strip().lower()]
        except KeyError:
            raise ConfigError(f"{key} must be true or false, got {value!r}") from None
    return str(value)


def read_config_file(path):
    """Parse ``key = value`` lines; '#' starts a comment."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (p.strip() for p in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}; "
                                  f"known keys: {', '.join(sorted(known))}")
            values[key] = _convert(key, value)
    return values


def build_parser():
    p = argparse.ArgumentParser(
        prog="spdwg",
        description="Simplified primal-dual weak Galerkin refinement studies "
                    "for Fokker-Planck benchmarks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--problem", help=f"benchmark id ({', '.join(problem_ids())})")
    p.add_argument("--variant", help="named variant of the benchmark")
    p.add_argument("--k", help="weak function degree")
    p.add_argument("--s", help="primal degree (k-1 or k-2)")
    p.add_argument("--gammas", help="stabilization weights, e.g. 1,1,1")
    p.add_argument("--mesh", choices=FAMILIES, help="partition family")
    p.add_argument("--domain", help=f"domain for --dof-report ({', '.join(DOMAINS)})")
    p.add_argument("--levels", help="refinement levels, e.g. 0..4 or 1,2,3")
    p.add_argument("--quad-order", help="element quadrature exactness override")
    p.add_argument("--meshsize", choices=("area", "diameter"),
                   help="element size convention in the stabilizer (default area)")
    p.add_argument("--format", choices=("csv", "markdown"), help="table format")
    p.add_argument("--output", "-o", help="write the table here instead of stdout")
    p.add_argument("--max-principle", action="store_const", const=True,
                   help="report extrema of u_h on the finest level")
    p.add_argument("--dof-report", action="store_const", const=True,
                   help="tabulate simplified and general dual dimensions")
    p.add_argument("--condition", action="store_const", const=True,
                   help="append condition number estimates")
    p.add_argument("--dump-matrix", metavar="PATH",
                   help="write the finest saddle matrix in coordinate format")
    p.add_argument("--dump-mesh", metavar="PATH", help="write the finest mesh as text")
    p.add_argument("--threads", help=f"assembly threads (default ${THREADS_ENV} or 1)")
    return p


def config_from_args(argv=None):
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = _convert(f.name, flag)
    return RunConfig(**values)


# -- output helpers ---------------------------------------------------------------

def _dof_table(config):
    k = 2 if config.k is None else config.k
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    family = config.mesh or "tri"
    domain = domain_id(config.domain or "omega1")
    levels = config.levels or (0, 1, 2, 3)
    rows = []
    for level in levels:
        mesh = build_mesh(domain, family, level)
        simple, general = (dof_formula(mesh.n_elements, mesh.n_edges, k, sch) for sch in SCHEMES)
        rows.append((level, mesh.n_elements, mesh.n_edges, simple, general, general - simple))
    head = ("level", "NT", "NE", "simplified", "general", "difference")
    if config.format == "markdown":
        lines = [f"**DOF** k={k}, {family} mesh on {domain}", "",
                 "| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        lines += ["| " + " | ".join(str(v) for v in r) + " |" for r in rows]
    else:
        lines = [",".join(head)] + [",".join(str(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _resolve_problem(config):
    try:
        problem = get_problem(config.problem, config.variant)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    if config.mesh and config.mesh != problem.family:
        options = problem.mesh_options if config.mesh == "tri" else {}
        problem = problem.with_config(family=config.mesh, mesh_options=options)
    return problem


def run(config, stdout=None, stderr=None):
    """Execute one experiment; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text = _run(config)
    except (ConfigError, MeshError, ValueError, KeyError) as exc:
        print(f"spdwg: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (SolverError, ArithmeticError, MemoryError) as exc:
        print(f"spdwg: solve failed: {exc}", file=stderr)
        return EXIT_SOLVE
    except OSError as exc:
        print(f"spdwg: I/O error: {exc}", file=stderr)
        return EXIT_IO
    try:
        if config.output:
            _write(config.output, text)
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"spdwg: I/O error: {exc}", file=stderr)
        return EXIT_IO
    return EXIT_OK


def _run(config):
    if config.format not in ("csv", "markdown"):
        raise ConfigError(f"format must be csv or markdown, got {config.format!r}")
    validate_meshsize(config.meshsize)
    threads = config.threads
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = _convert("threads", env) if env else 1
    if threads < 1:
        raise ConfigError(f"threads must be positive, got {threads}")
    if config.dof_report and not config.problem:
        return _dof_table(config)
    if not config.problem:
        raise ConfigError("--problem is required (or use --dof-report)")

    problem = _resolve_problem(config)
    k = problem.k if config.k is None else config.k
    s = problem.s if config.s is None else config.s
    if config.k is not None and config.s is None:
        s = min(problem.s, k - 1)
    validate_degrees(k, s)
    gammas = config.gammas or tuple(float(g) for g in problem.gammas)
    levels = config.levels or problem.levels
    options = dict(element_order=config.quad_order, threads=threads, meshsize=config.meshsize)

    parts = []
    if config.dof_report:
        parts.append(_dof_table(RunConfig(k=k, mesh=problem.family, domain=problem.domain,
                                          levels=levels, format=config.format)))
    if config.max_principle:
        mesh, system, sol = solve_problem(problem, levels[-1], k, s, gammas, **options)
        parts.append(f"# extrema of u_h: {problem.name}, k={k}, s={s}, "
                     f"1/h={1 / mesh.spacing:g}\n" + max_principle_report(sol, mesh).to_text())
    else:
        report = convergence_study(problem, levels, k, s, gammas, **options)
        parts.append(report.to_markdown() if config.format == "markdown" else report.to_csv())
    if config.condition:
        lines = ["level,n_unknowns,condition,exact_or_converged"]
        for level in levels:
            mesh = build_mesh(problem.domain, problem.family, level, **problem.mesh_options)
            system = assemble_system(mesh, problem, k, s, gammas, **options)
            est, ok = estimate_condition(system)
            lines.append(f"{level},{system.matrix().shape[0]},{est:.6e},{str(ok).lower()}")
        parts.append("\n".join(lines) + "\n")
    if config.dump_matrix or config.dump_mesh:
        mesh, system, _ = solve_problem(problem, levels[-1], k, s, gammas, **options)
        if config.dump_matrix:
            with open(config.dump_matrix, "w", encoding="utf-8") as fh:
                export_coordinates(system.matrix(), fh)
        if config.dump_mesh:
            with open(config.dump_mesh, "w", encoding="utf-8") as fh:
                mesh.dump(fh)
    return "\n".join(parts)


def main(argv=None):
    try:
        config = config_from_args(argv)
    except ConfigError as exc:
        print(f"spdwg: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"spdwg: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
