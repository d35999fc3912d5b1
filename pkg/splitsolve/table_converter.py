"""
Module for converting solver reports, tuning results, spectra and tables to
Markdown, CSV or JSON text.
"""

import csv
import io
import json
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .benchmark import TableArtifact
from .constants import FAILED_CELL, OUTPUT_FORMATS, REPORT_KEYS, TIMING_NOTE
from .exceptions import ConfigurationError
from .solvers import SolveReport
from .spectral import SpectralInfo, TuneResult


def _check_format(fmt: str) -> None:
    if fmt not in OUTPUT_FORMATS:
        raise ConfigurationError(f"format must be one of {OUTPUT_FORMATS}, got {fmt!r}")


def _to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _markdown_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    table = "| " + " | ".join(str(h) for h in header) + " |\n"
    table += "| " + " | ".join(['---'] * len(header)) + " |\n"
    for row in rows:
        table += "| " + " | ".join(str(value) for value in row) + " |\n"
    return table


def report_record(report: SolveReport, example: str, n: int, include_history: bool = False) -> Dict[str, Any]:
    """Schema-stable record of one solve."""
    record = {
        "example": example,
        "method": report.method.value,
        "alpha": report.alpha,
        "n": n,
        "iterations": report.iterations,
        "converged": report.converged,
        "final_relres": report.final_relative_residual,
        "seconds": round(report.seconds, 2),
    }
    if include_history and report.residual_history is not None:
        record["residual_history"] = list(report.residual_history)
    return record


def convert_reports(records: List[Dict[str, Any]], fmt: str = "markdown") -> str:
    """
    Render solve records. JSON gives an object for one record and a list
    for several.
    """
    _check_format(fmt)
    if fmt == "json":
        return json.dumps(records[0] if len(records) == 1 else records, indent=2) + "\n"
    if fmt == "csv":
        return _to_csv(REPORT_KEYS, [[record[key] for key in REPORT_KEYS] for record in records])

    markdown = ""
    for record in records:
        markdown += f"## {record['method'].upper()} on example {record['example']} (n = {record['n']})\n\n"
        markdown += f"- alpha: {record['alpha']:g}\n"
        markdown += f"- iterations: {record['iterations']}\n"
        markdown += f"- converged: {'yes' if record['converged'] else 'no'}\n"
        markdown += f"- final relative residual: {record['final_relres']:.3e}\n"
        markdown += f"- seconds: {record['seconds']:.2f}\n"
        if "residual_history" in record:
            markdown += "- residual history: " + ", ".join(f"{r:.3e}" for r in record["residual_history"]) + "\n"
        markdown += "\n"
    return markdown


def convert_tune(result: TuneResult, example: str, n: int, fmt: str = "markdown") -> str:
    _check_format(fmt)
    record = {
        "example": example,
        "method": result.method.value,
        "n": n,
        "best_alpha": result.best_alpha,
        "best_iterations": result.best_iterations,
        "grid_points": len(result.grid),
    }
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    if fmt == "csv":
        return _to_csv(list(record), [list(record.values())])
    return (f"## Tuned {result.method.label} on example {example} (n = {n})\n\n"
            f"- best alpha: {result.best_alpha:g}\n"
            f"- best iterations: {result.best_iterations}\n"
            f"- grid points: {len(result.grid)}\n")


def tune_grid_csv(result: TuneResult) -> str:
    """alpha,iterations per grid point; unconverged points carry max_iterations + 1."""
    return _to_csv(["alpha", "iterations"], result.grid)


def spectral_record(info: SpectralInfo) -> Dict[str, Any]:
    return {
        "mu_min": info.mu_min,
        "mu_max": info.mu_max,
        "case": info.case,
        "gamma": info.gamma,
        "delta": info.delta,
        "eta": info.eta,
        "alpha_opt_minus": info.alpha_opt_minus,
        "alpha_opt_plus": info.alpha_opt_plus,
        "alpha_opt_product": info.alpha_opt_minus * info.alpha_opt_plus,
        "rho_opt": info.rho_opt,
    }


def convert_spectrum(info: SpectralInfo, example: str, n: int, fmt: str = "markdown") -> str:
    _check_format(fmt)
    record = dict(example=example, n=n, **spectral_record(info))
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    if fmt == "csv":
        return _to_csv(list(record), [list(record.values())])

    markdown = f"## TSCSP spectrum of example {example} (n = {n})\n\n"
    for key, value in record.items():
        if key in ("example", "n"):
            continue
        markdown += f"- {key}: {value:.10g}\n" if isinstance(value, float) else f"- {key}: {value}\n"
    return markdown


def rho_curve_csv(points: Sequence[Tuple[float, float]]) -> str:
    return _to_csv(["alpha", "rho"], [[f"{alpha:.6g}", repr(rho)] for alpha, rho in points])


def _cell_record(cell) -> Dict[str, Any]:
    return {
        "method": cell.method.value,
        "size": cell.size,
        "alpha": cell.alpha,
        "alpha_source": cell.alpha_source,
        "iterations": cell.iterations,
        "converged": cell.converged,
        "seconds": None if cell.seconds is None else round(cell.seconds, 2),
        "tabulated_iterations": cell.tabulated_iterations,
        "error": cell.error,
    }


def convert_table(artifact: TableArtifact, fmt: str = "markdown") -> str:
    """
    Render a reproduced table: one block of alpha / Iter / CPU rows per
    method, one column per size. Failed cells show FAILED_CELL.
    """
    _check_format(fmt)
    if fmt == "json":
        return json.dumps({
            "example": artifact.example,
            "tolerance": artifact.tolerance,
            "inner": artifact.inner,
            "alpha_mode": artifact.alpha_mode,
            "date": artifact.date,
            "timing_note": TIMING_NOTE,
            "sizes": artifact.sizes,
            "cells": [_cell_record(cell) for cell in artifact.cells],
        }, indent=2) + "\n"
    if fmt == "csv":
        records = [_cell_record(cell) for cell in artifact.cells]
        header = list(records[0]) if records else []
        return _to_csv(header, [[record[key] for key in header] for record in records])

    size_label = "n" if artifact.example in ("4", "synthetic") else "m"
    markdown = f"# Numerical results for example {artifact.example}\n\n"
    markdown += (f"*tolerance {artifact.tolerance:g}, inner solver {artifact.inner}, "
                 f"alpha {artifact.alpha_mode}, {artifact.date}*\n\n")

    rows: List[List[str]] = []
    for method in artifact.methods:
        cells = artifact.row(method)
        rows.append([method.label, "alpha"] + [_format_alpha(cell.alpha) for cell in cells])
        rows.append(["", "Iter"] + [cell.display_iterations for cell in cells])
        rows.append(["", "CPU"] + [_format_seconds(cell) for cell in cells])
    markdown += _markdown_table(["Method", size_label] + [str(size) for size in artifact.sizes], rows)
    markdown += f"\n{TIMING_NOTE}\n"
    return markdown


def _format_alpha(alpha: Optional[float]) -> str:
    return FAILED_CELL if alpha is None else f"{alpha:g}"


def _format_seconds(cell) -> str:
    return f"{cell.seconds:.2f}" if cell.converged and cell.seconds is not None else ""
