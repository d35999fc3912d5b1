"""
Main module: command-line front end for solving, tuning, spectra, table
reproduction and problem export.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.markup import escape

from .benchmark import ALPHA_MODES, reproduce_table, resolve_alpha, tune_alpha
from .cache import clear_tuning_cache
from .config import RunDefaults, apply_overrides, ensure_directories, load_config
from .constants import EXAMPLE_IDS, ORDERINGS, OUTPUT_FORMATS
from .exceptions import (
    AllGridPointsDiverged,
    CgDidNotConverge,
    ConfigurationError,
    MaxIterationsExceeded,
    NotPositiveDefinite,
    OracleCapExceeded,
    ProblemFormatError,
    SingularSubsystem,
    SolverDiverged,
    SplitSolveError,
    SymmetryViolation,
)
from .inner_solver import InnerSolveChoice
from .problems import Problem, build_problem, export_problem, spec_for_size
from .solvers import MethodKind, SolverConfig, run
from .spectral import alpha_grid, generalized_eigs, optimal_alpha, rho_curve, spectrum_bracket
from .table_converter import (
    convert_reports,
    convert_spectrum,
    convert_table,
    convert_tune,
    report_record,
    rho_curve_csv,
    tune_grid_csv,
)
from .validation import check_size_cap, parse_grid, parse_size, parse_size_list

console = Console(stderr=True)

METHOD_CHOICES = [kind.value for kind in MethodKind] + ["all"]


def parse_alpha(text: str):
    """A positive float or one of the keywords paper (alias table), grid, theoretical."""
    if text in ALPHA_MODES:
        return text
    try:
        value = float(text)
    except ValueError:
        raise ConfigurationError(f"alpha must be a positive number or paper/grid/theoretical, got {text!r}")
    if not np.isfinite(value) or value <= 0.0:
        raise ConfigurationError(f"alpha must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--example", choices=EXAMPLE_IDS, required=True, help="Benchmark problem")
    common.add_argument("--method", choices=METHOD_CHOICES, default="tscsp", help="Splitting method")
    common.add_argument("--tol", type=float, help="Relative residual tolerance")
    common.add_argument("--max-iter", type=int, help="Outer iteration limit")
    common.add_argument("--inner", choices=("cholesky", "cg"), help="Inner SPD solver")
    common.add_argument("--cg-tol", type=float, help="Inner CG relative tolerance")
    common.add_argument("--ordering", choices=ORDERINGS, help="Fill-reducing ordering of the direct solver")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format")
    common.add_argument("--out", help="Output file (default: stdout)")
    common.add_argument("--grid", help="Parameter grid lo:hi:step")
    common.add_argument("--workers", type=int, help="Worker threads for grid search and tables")
    common.add_argument("--allow-large", action="store_true", help="Allow sizes above the configured cap")
    common.add_argument("--config", help="JSON file with run defaults")
    common.add_argument("--error-json", action="store_true", help="Print errors as a JSON object on stdout")
    common.add_argument("--no-cache", action="store_true", help="Neither read nor write stored tuning results")
    common.add_argument("--clear-cache", action="store_true", help="Delete stored tuning results before running")

    sized = argparse.ArgumentParser(add_help=False)
    sized.add_argument("--m", help="Mesh size (Examples 1-3)")
    sized.add_argument("--n", help="Order, '32^2' accepted (Example 4 and synthetic)")
    sized.add_argument("--seed", type=int, help="Seed of the synthetic problem")
    sized.add_argument("--identical", action="store_true", help="Synthetic problem with T = W")

    parser = argparse.ArgumentParser(prog="splitsolve", description="Splitting iterations for (W + iT) z = b")
    subparsers = parser.add_subparsers(dest="command", required=True)

    solve = subparsers.add_parser("solve", parents=[common, sized], help="Run one method (or all)")
    solve.add_argument("--alpha", default="paper", help="Float, or paper / grid / theoretical")
    solve.add_argument("--history", action="store_true", help="Include the residual history")

    tune = subparsers.add_parser("tune", parents=[common, sized], help="Grid search for the best parameter")
    tune.add_argument("--grid-out", help="Write the full grid as CSV")

    spectrum = subparsers.add_parser("spectrum", parents=[common, sized], help="Generalized spectrum and optimum")
    spectrum.add_argument("--curve", help="Write rho(alpha) over the grid as CSV")

    table = subparsers.add_parser("reproduce-table", parents=[common], help="Run every method at every size")
    table.add_argument("--sizes", required=True, help="Comma-separated sizes, e.g. 32,64 or 32^2")
    table.add_argument("--alpha", default="paper", help="paper / grid / theoretical or a float")
    table.set_defaults(method="all")

    subparsers.add_parser("export", parents=[common, sized], help="Write W, T, b and a JSON sidecar")
    return parser


def resolve_defaults(args: argparse.Namespace) -> RunDefaults:
    """Built-ins, then the config file, then command-line flags."""
    defaults = load_config(args.config)
    return apply_overrides(defaults, {
        "tolerance": args.tol,
        "max_iterations": args.max_iter,
        "inner": args.inner,
        "cg_tolerance": args.cg_tol,
        "ordering": args.ordering,
        "format": args.format,
        "max_workers": args.workers,
        "grid": parse_grid(args.grid) if args.grid else None,
        "use_cache": False if args.no_cache else None,
    })


def base_config(defaults: RunDefaults, method: MethodKind, alpha: float = 1.0,
                record_history: bool = False) -> SolverConfig:
    inner = InnerSolveChoice(kind=defaults.inner, cg_tolerance=defaults.cg_tolerance, ordering=defaults.ordering)
    return SolverConfig(method=method, alpha=alpha, tolerance=defaults.tolerance,
                        max_iterations=defaults.max_iterations, inner=inner, record_history=record_history)


def selected_methods(args: argparse.Namespace) -> List[MethodKind]:
    if args.method == "all":
        return list(MethodKind)
    return [MethodKind(args.method)]


def problem_from_args(args: argparse.Namespace, defaults: RunDefaults) -> Problem:
    """Build the requested problem after checking the size against the cap."""
    flag = "--m" if args.example in ("1", "2", "3") else "--n"
    raw = args.m if flag == "--m" else args.n
    if raw is None:
        raise ConfigurationError(f"example {args.example} needs {flag}")
    size = parse_size(raw)
    check_size_cap(args.example, size, defaults.size_cap, args.allow_large)
    return build_problem(spec_for_size(args.example, size, args.seed, args.identical))


def emit(text: str, out: Optional[str]) -> None:
    """Write to `out` or stdout."""
    if not out:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        if path.parent != Path("."):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Unable to write {out}: {e}")
    console.print(f"[green]Wrote {out}[/green]")


def cmd_solve(args: argparse.Namespace, defaults: RunDefaults) -> int:
    request = parse_alpha(args.alpha)
    problem = problem_from_args(args, defaults)
    show_progress = console.is_terminal

    reports = []
    for method in selected_methods(args):
        base = base_config(defaults, method, record_history=args.history)
        alpha, source = resolve_alpha(problem, method, request, base, defaults.grid,
                                      defaults.max_workers, show_progress, defaults.use_cache)
        console.print(f"[bold cyan]{method.label}[/bold cyan] alpha={alpha:g} ({source}), n={problem.n}")
        cfg = base_config(defaults, method, alpha, record_history=args.history)
        reports.append(run(problem, cfg))

    records = [report_record(report, args.example, problem.n, args.history) for report in reports]
    emit(convert_reports(records, defaults.format), args.out)
    for report in reports:
        report.raise_for_status()
    return 0


def cmd_tune(args: argparse.Namespace, defaults: RunDefaults) -> int:
    problem = problem_from_args(args, defaults)
    text = ""
    grids = []
    for method in selected_methods(args):
        result = tune_alpha(problem, method, base_config(defaults, method), defaults.grid,
                            defaults.max_workers, console.is_terminal, defaults.use_cache)
        console.print(f"[bold cyan]{method.label}[/bold cyan] best alpha={result.best_alpha:g} "
                      f"({result.best_iterations} iterations)")
        text += convert_tune(result, args.example, problem.n, defaults.format)
        grids.append(result)

    emit(text, args.out)
    if args.grid_out:
        emit("".join(tune_grid_csv(result) for result in grids), args.grid_out)
    return 0


def cmd_spectrum(args: argparse.Namespace, defaults: RunDefaults) -> int:
    problem = problem_from_args(args, defaults)
    if args.allow_large:
        mus = spectrum_bracket(problem.W, problem.T)
    else:
        mus = generalized_eigs(problem.W, problem.T)
    info = optimal_alpha(mus)
    product = info.alpha_opt_minus * info.alpha_opt_plus
    if abs(product - 1.0) > 1e-12:
        raise SplitSolveError(f"alpha_opt- * alpha_opt+ = {product!r}, expected 1")

    emit(convert_spectrum(info, args.example, problem.n, defaults.format), args.out)
    if args.curve:
        lo, hi, step = defaults.grid
        emit(rho_curve_csv(rho_curve(mus, alpha_grid(lo, hi, step))), args.curve)
    return 0


def cmd_reproduce_table(args: argparse.Namespace, defaults: RunDefaults) -> int:
    sizes = parse_size_list(args.sizes)
    for size in sizes:
        check_size_cap(args.example, size, defaults.size_cap, args.allow_large)
    request = parse_alpha(args.alpha)
    methods = selected_methods(args)

    artifact = reproduce_table(args.example, sizes, methods, request,
                               base=base_config(defaults, methods[0]), grid=defaults.grid,
                               max_workers=defaults.max_workers, show_progress=console.is_terminal,
                               use_cache=defaults.use_cache)
    emit(convert_table(artifact, defaults.format), args.out)
    return 0


def cmd_export(args: argparse.Namespace, defaults: RunDefaults) -> int:
    problem = problem_from_args(args, defaults)
    directory = args.out or str(Path(defaults.output_dir) / problem.spec.label)
    export_problem(problem, directory)
    console.print(f"[green]Exported {problem.spec.label} (n = {problem.n}) to {directory}[/green]")
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "tune": cmd_tune,
    "spectrum": cmd_spectrum,
    "reproduce-table": cmd_reproduce_table,
    "export": cmd_export,
}


def _fail(args: Optional[argparse.Namespace], title: str, error: BaseException, code: int = 1,
          hint: str = "") -> int:
    if args is not None and getattr(args, "error_json", False):
        sys.stdout.write(json.dumps({"error": type(error).__name__, "message": str(error)}) + "\n")
    console.print(f"[bold red]{title}:[/bold red] {escape(str(error))}{hint}")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit status."""
    args = build_parser().parse_args(argv)
    try:
        defaults = resolve_defaults(args)
        if args.clear_cache:
            removed = clear_tuning_cache()
            console.print(f"[green]Removed {removed} stored tuning result(s)[/green]")
        if args.command == "export" and not args.out:
            ensure_directories(defaults.output_dir)
        return COMMANDS[args.command](args, defaults)

    except OracleCapExceeded as e:
        return _fail(args, "Size Error", e, hint="; try a smaller --m/--n or pass --allow-large")
    except ConfigurationError as e:
        return _fail(args, "Configuration Error", e)
    except (NotPositiveDefinite, SingularSubsystem) as e:
        return _fail(args, "Factorization Error", e)
    except CgDidNotConverge as e:
        return _fail(args, "Inner Solve Error", e)
    except (MaxIterationsExceeded, SolverDiverged, AllGridPointsDiverged) as e:
        return _fail(args, "Convergence Error", e)
    except (ProblemFormatError, SymmetryViolation) as e:
        return _fail(args, "Problem File Error", e)
    except SplitSolveError as e:
        return _fail(args, "Error", e)
    except Exception as e:
        return _fail(args, "Unexpected Error", e, code=2)


if __name__ == "__main__":
    sys.exit(main())
