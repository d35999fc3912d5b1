"""
Table reproduction: run every method at every size with a chosen parameter.

Tabulated parameters ship in data/tabulated_alphas.json, keyed by example,
method and table column. Example 4 columns give n = m^2.
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from rich.console import Console

from . import cache
from .constants import DEFAULT_GRID, FAILED_CELL
from .exceptions import ConfigurationError, SplitSolveError
from .performance import batch_process, with_progress
from .problems import Problem, build_problem, spec_for_size
from .solvers import MethodKind, SolverConfig, run
from .spectral import TuneResult, alpha_grid, grid_search_alpha, optimal_alpha, spectrum_bracket

console = Console(stderr=True)

TABLE_FILE = Path(__file__).parent / "data" / "tabulated_alphas.json"
ALPHA_MODES = ("paper", "table", "grid", "theoretical")
TABULATED_MODES = ("paper", "table")

AlphaRequest = Union[float, str]


@dataclass
class TableCell:
    method: MethodKind
    size: int
    alpha: Optional[float]
    alpha_source: str
    iterations: Optional[int] = None
    converged: bool = False
    seconds: Optional[float] = None
    error: Optional[str] = None
    tabulated_iterations: Optional[int] = None

    @property
    def display_iterations(self) -> str:
        return str(self.iterations) if self.converged else FAILED_CELL


@dataclass
class TableArtifact:
    example: str
    sizes: List[int]
    methods: List[MethodKind]
    tolerance: float
    inner: str
    alpha_mode: str
    date: str = field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))
    cells: List[TableCell] = field(default_factory=list)

    def cell(self, method: MethodKind, size: int) -> TableCell:
        for cell in self.cells:
            if cell.method is MethodKind(method) and cell.size == size:
                return cell
        raise KeyError((method, size))

    def row(self, method: MethodKind) -> List[TableCell]:
        return [self.cell(method, size) for size in self.sizes]


@lru_cache(maxsize=None)
def _load_table(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Unable to load tabulated parameters from {path}: {e}")


def load_tabulated_alphas(path: Optional[Union[str, Path]] = None) -> dict:
    """The versioned table of tabulated parameters and iteration counts."""
    table = _load_table(str(path or TABLE_FILE))
    if table.get("version") != 1:
        raise ConfigurationError(f"Unsupported tabulated parameter version {table.get('version')!r}")
    return table


def tabulated_entry(example: str, method: MethodKind, size: int,
                    table: Optional[dict] = None) -> Optional[Tuple[float, int]]:
    """
    (alpha, iterations) tabulated for this example, method and size.

    Returns None when the size is not a table column or the cell is empty.
    """
    table = table or load_tabulated_alphas()
    entry = table["examples"].get(str(example))
    if entry is None:
        return None

    column = size
    if entry["size"] == "n = m^2":
        root = math.isqrt(size)
        if root * root != size:
            return None
        column = root
    if column not in table["columns"]:
        return None

    index = table["columns"].index(column)
    values = entry["methods"][MethodKind(method).value]
    alpha, iterations = values["alpha"][index], values["iterations"][index]
    if alpha is None:
        return None
    return float(alpha), iterations


def tune_alpha(problem: Problem, method: MethodKind, base: SolverConfig,
               grid: Sequence[float] = DEFAULT_GRID, max_workers: int = 1,
               show_progress: bool = False, use_cache: Optional[bool] = None) -> TuneResult:
    """
    Grid search for the parameter.

    A stored result is reused only for the same W, T, b, method, grid,
    tolerance, iteration cap and inner solver settings.
    """
    method = MethodKind(method)
    signature = cache.tuning_signature(problem, method, base, grid)
    key = cache.tuning_key(problem.spec.label, signature)
    stored = cache.load_tuning(key, signature, use_cache=use_cache)
    if stored is not None:
        return TuneResult(method=method, best_alpha=stored["best_alpha"], best_iterations=stored["best_iterations"],
                          grid=[tuple(point) for point in stored["grid"]])

    lo, hi, step = grid
    total = len(alpha_grid(lo, hi, step))
    with with_progress(total, f"Tuning {method.label}", enabled=show_progress) as advance:
        result = grid_search_alpha(problem, method, (lo, hi), step, base=base,
                                   max_workers=max_workers, progress=advance)

    cache.store_tuning(key, signature, {
        "best_alpha": result.best_alpha,
        "best_iterations": result.best_iterations,
        "grid": [list(point) for point in result.grid],
    }, use_cache=use_cache)
    return result


def resolve_alpha(problem: Problem, method: MethodKind, request: AlphaRequest, base: SolverConfig,
                  grid: Sequence[float] = DEFAULT_GRID, max_workers: int = 1,
                  show_progress: bool = False, use_cache: Optional[bool] = None) -> Tuple[float, str]:
    """
    The parameter to run with and where it came from.

    `request` is a positive float, "paper" (alias "table"), "grid" or
    "theoretical". The theoretical optimum exists for TSCSP only; other
    methods fall back to the tabulated value. A missing tabulated value
    falls back to grid search.
    """
    method = MethodKind(method)
    if not isinstance(request, str):
        return float(request), "explicit"
    if request not in ALPHA_MODES:
        raise ConfigurationError(f"alpha must be a positive number or one of {ALPHA_MODES}, got {request!r}")

    if request == "theoretical":
        if method is MethodKind.TSCSP:
            info = optimal_alpha(spectrum_bracket(problem.W, problem.T))
            return info.alpha_opt_minus, "theoretical"
        console.print(f"[yellow]No closed-form optimum for {method.label}; using the tabulated value[/yellow]")
        request = "paper"

    if request in TABULATED_MODES:
        size = problem.spec.m if problem.spec.m is not None else problem.spec.n
        entry = tabulated_entry(problem.spec.example, method, size)
        if entry is not None:
            return entry[0], "table"
        console.print(f"[yellow]No tabulated alpha for {method.label} on {problem.spec.label}; "
                      f"falling back to grid search[/yellow]")

    result = tune_alpha(problem, method, base, grid, max_workers, show_progress, use_cache)
    return result.best_alpha, "grid"


def _run_cell(problem: Problem, method: MethodKind, request: AlphaRequest, base: SolverConfig,
              grid: Sequence[float], size: int, use_cache: Optional[bool] = None) -> TableCell:
    tabulated = tabulated_entry(problem.spec.example, method, size)
    cell = TableCell(method=method, size=size, alpha=None, alpha_source="",
                     tabulated_iterations=tabulated[1] if tabulated else None)
    try:
        cell.alpha, cell.alpha_source = resolve_alpha(problem, method, request, base, grid, use_cache=use_cache)
        cfg = SolverConfig(method=method, alpha=cell.alpha, tolerance=base.tolerance,
                           max_iterations=base.max_iterations, inner=base.inner)
        report = run(problem, cfg)
    except SplitSolveError as e:
        cell.error = str(e)
        return cell

    cell.iterations = report.iterations
    cell.converged = report.converged
    cell.seconds = report.seconds
    if not report.converged:
        cell.error = "diverged" if report.diverged else f"no convergence in {report.iterations} iterations"
    return cell


def reproduce_table(example: str, sizes: Sequence[int], methods: Sequence[MethodKind],
                    alpha: AlphaRequest = "table", base: Optional[SolverConfig] = None,
                    grid: Sequence[float] = DEFAULT_GRID, max_workers: int = 1,
                    show_progress: bool = False, use_cache: Optional[bool] = None) -> TableArtifact:
    """
    Run every (method, size) cell of one example.

    A failing cell is recorded as FAILED_CELL with its error message; the
    rest of the table still runs. Cells come back in (method, size) order.
    """
    if not sizes:
        raise ConfigurationError("reproduce-table needs at least one size")
    if not methods:
        raise ConfigurationError("reproduce-table needs at least one method")
    methods = [MethodKind(method) for method in methods]
    base = base or SolverConfig(method=methods[0], alpha=1.0)

    console.print(f"[bold cyan]Building example {example} at sizes {', '.join(map(str, sizes))}[/bold cyan]")
    problems: Dict[int, Problem] = {size: build_problem(spec_for_size(example, size)) for size in sizes}

    jobs = [(method, size) for method in methods for size in sizes]
    with with_progress(len(jobs), f"Example {example}", enabled=show_progress) as advance:
        def evaluate(job: Tuple[MethodKind, int]) -> TableCell:
            method, size = job
            cell = _run_cell(problems[size], method, alpha, base, grid, size, use_cache)
            advance()
            return cell

        cells = batch_process(jobs, evaluate, max_workers=max_workers)

    for cell in cells:
        if not cell.converged:
            console.print(f"[yellow]{cell.method.label} at size {cell.size}: {cell.error}[/yellow]")

    return TableArtifact(
        example=str(example),
        sizes=list(sizes),
        methods=methods,
        tolerance=base.tolerance,
        inner=base.inner.kind.value,
        alpha_mode=alpha if isinstance(alpha, str) else f"{float(alpha):g}",
        cells=cells,
    )
