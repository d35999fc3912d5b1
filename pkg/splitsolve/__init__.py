"""
Splitting iterations for complex symmetric systems (W + iT) z = b.
"""

from .linalg import ComplexVector, SparseSymMatrix
from .inner_solver import InnerSolveChoice, factorize
from .solvers import (
    MethodKind,
    SolveReport,
    SolverConfig,
    gsor_solve,
    iterate,
    mhss_solve,
    pmhss_solve,
    run,
    scsp_solve,
    tscsp_solve,
)
from .spectral import generalized_eigs, grid_search_alpha, optimal_alpha, tscsp_spectral_radius
from .problems import build_example1, build_example2, build_example3, build_example4, build_problem
from .benchmark import reproduce_table
from .main import main

__all__ = [
    'ComplexVector',
    'SparseSymMatrix',
    'InnerSolveChoice',
    'factorize',
    'MethodKind',
    'SolveReport',
    'SolverConfig',
    'gsor_solve',
    'iterate',
    'mhss_solve',
    'pmhss_solve',
    'run',
    'scsp_solve',
    'tscsp_solve',
    'generalized_eigs',
    'grid_search_alpha',
    'optimal_alpha',
    'tscsp_spectral_radius',
    'build_example1',
    'build_example2',
    'build_example3',
    'build_example4',
    'build_problem',
    'reproduce_table',
    'main',
]
