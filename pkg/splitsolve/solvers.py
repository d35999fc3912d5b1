"""
Stationary splitting iterations for (W + iT) z = b.

All five methods share one driver: a method builds its cached factorizations
and a list of step functions; one outer iteration applies every step once.
TSCSP, MHSS and PMHSS have two half-steps, SCSP and GSOR one step. GSOR works
in real arithmetic on the pair (x, y) stored as re/im of the iterate.
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional

import numpy as np

from .constants import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, DIVERGENCE_THRESHOLD
from .exceptions import ConfigurationError, MaxIterationsExceeded, SolverDiverged
from .inner_solver import InnerSolveChoice, SpdFactorization, factorize
from .linalg import ComplexVector, SparseSymMatrix, combine, residual_relnorm, shifted

Step = Callable[[ComplexVector], ComplexVector]


class MethodKind(str, Enum):
    TSCSP = "tscsp"
    SCSP = "scsp"
    MHSS = "mhss"
    PMHSS = "pmhss"
    GSOR = "gsor"

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class SolverConfig:
    method: MethodKind
    alpha: float
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    inner: InnerSolveChoice = field(default_factory=InnerSolveChoice)
    record_history: bool = False

    def __post_init__(self):
        object.__setattr__(self, "method", MethodKind(self.method))
        if not np.isfinite(self.alpha) or self.alpha <= 0.0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 < self.tolerance < 1.0:
            raise ConfigurationError(f"tolerance must lie in (0, 1), got {self.tolerance}")
        if self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass
class SolveReport:
    method: MethodKind
    alpha: float
    iterations: int
    converged: bool
    final_relative_residual: float
    solution: ComplexVector
    setup_seconds: float = 0.0
    iterate_seconds: float = 0.0
    residual_history: Optional[List[float]] = None
    diverged: bool = False
    inner_solves: int = 0

    @property
    def seconds(self) -> float:
        return self.setup_seconds + self.iterate_seconds

    def raise_for_status(self) -> None:
        """Raise if the run did not converge."""
        if self.diverged:
            raise SolverDiverged(
                f"{self.method.label} diverged at iteration {self.iterations} "
                f"(relative residual {self.final_relative_residual:.3e}, alpha={self.alpha:g})"
            )
        if not self.converged:
            raise MaxIterationsExceeded(
                f"{self.method.label} stopped after {self.iterations} iterations "
                f"(relative residual {self.final_relative_residual:.3e}, alpha={self.alpha:g})"
            )


@dataclass
class _Plan:
    factorizations: List[SpdFactorization]
    steps: List[Step]

    def solve_count(self) -> int:
        return sum(f.solve_count for f in self.factorizations)


def _times_i(B: SparseSymMatrix, z: ComplexVector) -> ComplexVector:
    """i * B z = (-B y, B x)."""
    return ComplexVector(-(B.csr @ z.im), B.csr @ z.re)


def _plan_scale_splitting(problem, alpha: float, inner: InnerSolveChoice, two_step: bool) -> _Plan:
    W, T, b = problem.W, problem.T, problem.b
    first = factorize(combine(alpha, W, 1.0, T), inner)
    skew_first = combine(1.0, W, -alpha, T)
    shift_first = b.scale(alpha - 1j)

    def scaled_half(z: ComplexVector) -> ComplexVector:
        # (aW + T) z' = i(W - aT) z + (a - i) b
        return first.solve_complex(_times_i(skew_first, z) + shift_first)

    if not two_step:
        return _Plan([first], [scaled_half])

    second = factorize(combine(1.0, W, alpha, T), inner)
    skew_second = combine(alpha, W, -1.0, T)
    shift_second = b.scale(1.0 - alpha * 1j)

    def transposed_half(z: ComplexVector) -> ComplexVector:
        # (W + aT) z' = i(aW - T) z + (1 - ai) b
        return second.solve_complex(_times_i(skew_second, z) + shift_second)

    return _Plan([first, second], [scaled_half, transposed_half])


def _plan_tscsp(problem, alpha, inner) -> _Plan:
    return _plan_scale_splitting(problem, alpha, inner, two_step=True)


def _plan_scsp(problem, alpha, inner) -> _Plan:
    return _plan_scale_splitting(problem, alpha, inner, two_step=False)


def _plan_mhss(problem, alpha, inner) -> _Plan:
    W, T, b = problem.W, problem.T, problem.b
    w_shifted = factorize(shifted(W, alpha), inner)
    t_shifted = factorize(shifted(T, alpha), inner)
    minus_ib = b.scale(-1j)

    def w_half(z: ComplexVector) -> ComplexVector:
        # (aI + W) z' = (aI - iT) z + b
        Tx, Ty = T.csr @ z.re, T.csr @ z.im
        return w_shifted.solve_complex(ComplexVector(alpha * z.re + Ty + b.re, alpha * z.im - Tx + b.im))

    def t_half(z: ComplexVector) -> ComplexVector:
        # (aI + T) z' = (aI + iW) z - ib
        Wx, Wy = W.csr @ z.re, W.csr @ z.im
        return t_shifted.solve_complex(ComplexVector(alpha * z.re - Wy + minus_ib.re, alpha * z.im + Wx + minus_ib.im))

    return _Plan([w_shifted, t_shifted], [w_half, t_half])


def _plan_pmhss(problem, alpha, inner) -> _Plan:
    W, T, b = problem.W, problem.T, problem.b
    w_factor = factorize(W, inner)
    second = factorize(combine(alpha, W, 1.0, T), inner)
    minus_ib = b.scale(-1j)

    def w_half(z: ComplexVector) -> ComplexVector:
        # ((a + 1) W) z' = (aW - iT) z + b, with (a + 1) folded into the solve
        Wx, Wy = W.csr @ z.re, W.csr @ z.im
        Tx, Ty = T.csr @ z.re, T.csr @ z.im
        rhs = ComplexVector(alpha * Wx + Ty + b.re, alpha * Wy - Tx + b.im)
        solved = w_factor.solve_complex(rhs)
        return ComplexVector(solved.re / (alpha + 1.0), solved.im / (alpha + 1.0))

    def t_half(z: ComplexVector) -> ComplexVector:
        # (aW + T) z' = (a + i) W z - ib
        Wz = ComplexVector(W.csr @ z.re, W.csr @ z.im).scale(alpha + 1j)
        return second.solve_complex(Wz + minus_ib)

    return _Plan([w_factor, second], [w_half, t_half])


def _plan_gsor(problem, alpha, inner) -> _Plan:
    W, T, b = problem.W, problem.T, problem.b
    w_factor = factorize(W, inner)
    f, g = alpha * b.re, alpha * b.im

    def sweep(z: ComplexVector) -> ComplexVector:
        x, y = z.re, z.im
        # W x' = (1 - a) W x + a T y + a f
        x_new = w_factor.solve((1.0 - alpha) * (W.csr @ x) + alpha * (T.csr @ y) + f)
        # W y' = -a T x' + (1 - a) W y + a g
        y_new = w_factor.solve(-alpha * (T.csr @ x_new) + (1.0 - alpha) * (W.csr @ y) + g)
        return ComplexVector(x_new, y_new)

    return _Plan([w_factor], [sweep])


_PLANNERS: Dict[MethodKind, Callable[..., _Plan]] = {
    MethodKind.TSCSP: _plan_tscsp,
    MethodKind.SCSP: _plan_scsp,
    MethodKind.MHSS: _plan_mhss,
    MethodKind.PMHSS: _plan_pmhss,
    MethodKind.GSOR: _plan_gsor,
}


def _plan(problem, cfg: SolverConfig) -> _Plan:
    return _PLANNERS[cfg.method](problem, cfg.alpha, cfg.inner)


def iterate(problem, cfg: SolverConfig, half_steps: bool = False) -> Iterator[ComplexVector]:
    """
    Yield the iterates z^(1), z^(2), ... from the null initial guess.

    With `half_steps`, two-half-step methods also yield z^(k+1/2). The
    generator is unbounded; the caller decides when to stop.
    """
    plan = _plan(problem, cfg)
    z = ComplexVector.zeros(problem.n)
    while True:
        for step in plan.steps:
            z = step(z)
            if half_steps:
                yield z
        if not half_steps:
            yield z


def run(problem, cfg: SolverConfig) -> SolveReport:
    """
    Solve from z = 0 until ||b - Az|| / ||b|| < tolerance or the iteration limit.

    The residual is checked after every full outer iteration. A relative
    residual above the divergence threshold stops the run with diverged=True.

    Raises:
        NotPositiveDefinite: If a subsystem matrix cannot be factorized
        CgDidNotConverge: If an inner CG solve fails
    """
    start = time.perf_counter()
    plan = _plan(problem, cfg)
    setup_seconds = time.perf_counter() - start

    W, T, b = problem.W, problem.T, problem.b
    z = ComplexVector.zeros(problem.n)
    relres = residual_relnorm(W, T, b, z)
    history = [relres] if cfg.record_history else None
    converged = relres < cfg.tolerance
    diverged = False
    iterations = 0

    start = time.perf_counter()
    while not converged and iterations < cfg.max_iterations:
        for step in plan.steps:
            z = step(z)
        iterations += 1
        relres = residual_relnorm(W, T, b, z)
        if history is not None:
            history.append(relres)
        if relres < cfg.tolerance:
            converged = True
        elif not np.isfinite(relres) or relres > DIVERGENCE_THRESHOLD:
            diverged = True
            break
    iterate_seconds = time.perf_counter() - start

    return SolveReport(
        method=cfg.method,
        alpha=cfg.alpha,
        iterations=iterations,
        converged=converged,
        final_relative_residual=relres,
        solution=z,
        setup_seconds=setup_seconds,
        iterate_seconds=iterate_seconds,
        residual_history=history,
        diverged=diverged,
        inner_solves=plan.solve_count(),
    )


def _run_checked(method: MethodKind, problem, cfg: SolverConfig) -> SolveReport:
    if cfg.method is not method:
        raise ConfigurationError(f"{method.label} solver called with a {cfg.method.label} configuration")
    return run(problem, cfg)


def tscsp_solve(problem, cfg: SolverConfig) -> SolveReport:
    return _run_checked(MethodKind.TSCSP, problem, cfg)


def scsp_solve(problem, cfg: SolverConfig) -> SolveReport:
    return _run_checked(MethodKind.SCSP, problem, cfg)


def mhss_solve(problem, cfg: SolverConfig) -> SolveReport:
    return _run_checked(MethodKind.MHSS, problem, cfg)


def pmhss_solve(problem, cfg: SolverConfig) -> SolveReport:
    return _run_checked(MethodKind.PMHSS, problem, cfg)


def gsor_solve(problem, cfg: SolverConfig) -> SolveReport:
    return _run_checked(MethodKind.GSOR, problem, cfg)
