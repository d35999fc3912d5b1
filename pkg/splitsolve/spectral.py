"""
Spectral machinery for the splitting iterations.

The TSCSP iteration matrix is similar to a rational function of
S = W^(-1/2) T W^(-1/2), so its spectral radius is a scalar maximum over the
generalized eigenvalues mu of the pencil (T, W). This module computes those
eigenvalues, the optimal parameter, dense iteration-matrix oracles for all
five methods, and the experimental grid search.
"""

from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import eigsh

from .constants import BRACKET_MAX_K, ORACLE_CAP, UNIT_TOLERANCE
from .exceptions import (
    AllGridPointsDiverged,
    CgDidNotConverge,
    ConfigurationError,
    NotPositiveDefinite,
    SingularSubsystem,
)
from .linalg import SparseSymMatrix, as_dense, check_oracle_size
from .performance import batch_process
from .solvers import MethodKind, SolverConfig, run


@dataclass(frozen=True)
class OptimalAlphaWork:
    betas: Tuple[float, ...]
    case: str
    split_index: Optional[int] = None


@dataclass(frozen=True)
class SpectralInfo:
    mus: Tuple[float, ...]
    gamma: float
    delta: float
    eta: float
    alpha_opt_minus: float
    alpha_opt_plus: float
    rho_opt: float
    work: OptimalAlphaWork

    @property
    def mu_min(self) -> float:
        return self.mus[0]

    @property
    def mu_max(self) -> float:
        return self.mus[-1]

    @property
    def case(self) -> str:
        return self.work.case


@dataclass
class TuneResult:
    method: MethodKind
    best_alpha: float
    best_iterations: int
    grid: List[Tuple[float, int]] = field(default_factory=list)


# --- generalized eigenvalues ---

def generalized_eigs(W, T, cap: Optional[int] = ORACLE_CAP) -> np.ndarray:
    """
    All eigenvalues of the pencil T v = mu W v in ascending order.

    Raises:
        NotPositiveDefinite: If W is not SPD
        OracleCapExceeded: If the order exceeds `cap`
    """
    cap = np.inf if cap is None else cap
    Wd, Td = as_dense(W, cap), as_dense(T, cap)
    try:
        mus = scipy.linalg.eigh(Td, Wd, eigvals_only=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"W is not positive definite: {e}")
    return _clean_spectrum(mus)


def _clean_spectrum(mus: np.ndarray) -> np.ndarray:
    mus = np.sort(np.asarray(mus, dtype=np.float64))
    scale = max(1.0, float(np.max(np.abs(mus)))) if mus.size else 1.0
    # round-off below zero for a semidefinite T
    mus[(mus < 0.0) & (mus > -UNIT_TOLERANCE * scale)] = 0.0
    return mus


def spectrum_bracket(W: SparseSymMatrix, T: SparseSymMatrix, cap: int = ORACLE_CAP) -> np.ndarray:
    """
    The generalized eigenvalues that decide the optimal parameter.

    Small pencils return the full spectrum. Larger ones return the smallest
    and largest eigenvalue and, when the spectrum straddles 1, the nearest
    eigenvalues on both sides of 1, found with ARPACK.
    """
    if W.n <= cap:
        return generalized_eigs(W, T, cap)
    Wc, Tc = W.csr.tocsc(), T.csr.tocsc()
    try:
        smallest = eigsh(Tc, k=1, M=Wc, sigma=-1e-3, which="LM", return_eigenvectors=False)
        largest = eigsh(Tc, k=1, M=Wc, which="LA", return_eigenvectors=False)
        found = [smallest, largest]
        if smallest[0] < 1.0 < largest[0]:
            k = 2
            while True:
                near_one = eigsh(Tc, k=k, M=Wc, sigma=1.0, which="LM", return_eigenvectors=False)
                # both neighbours of 1 are among the k nearest once each side is hit
                if (near_one <= 1.0).any() and (near_one >= 1.0).any() or k >= min(BRACKET_MAX_K, W.n - 1):
                    break
                k = min(2 * k, BRACKET_MAX_K, W.n - 1)
            found.append(near_one)
    except RuntimeError as e:
        raise NotPositiveDefinite(f"sparse pencil eigensolve failed: {e}")
    return _clean_spectrum(np.unique(np.concatenate(found)))


# --- scalar amplification and the optimal parameter ---

def scalar_amplification(mu: float, alpha: float) -> float:
    """lambda_mu(alpha) = (mu - alpha)(1 - alpha mu) / ((mu + alpha)(1 + alpha mu))."""
    return (mu - alpha) * (1.0 - alpha * mu) / ((mu + alpha) * (1.0 + alpha * mu))


def tscsp_spectral_radius(mus: Sequence[float], alpha: float) -> float:
    """max_j |lambda_mu_j(alpha)|, the spectral radius of the TSCSP iteration matrix."""
    mus = np.asarray(mus, dtype=np.float64)
    if mus.size == 0:
        raise ConfigurationError("spectral radius of an empty spectrum")
    if alpha <= 0.0:
        raise ConfigurationError(f"alpha must be positive, got {alpha}")
    values = (mus - alpha) * (1.0 - alpha * mus) / ((mus + alpha) * (1.0 + alpha * mus))
    return float(np.max(np.abs(values)))


def rho_curve(mus: Sequence[float], alphas: Iterable[float]) -> List[Tuple[float, float]]:
    return [(float(alpha), tscsp_spectral_radius(mus, alpha)) for alpha in alphas]


def _beta(mu: float) -> float:
    return mu + 1.0 / mu


def optimal_alpha(mus: Sequence[float], bracket: str = "balanced") -> SpectralInfo:
    """
    Optimal TSCSP parameters for the spectrum `mus`.

    Case (a), all mu on one side of 1: gamma = mu_1, delta = mu_n. Case (b),
    mu_k <= 1 <= mu_k+1: the far end is mu_n if mu_1 mu_n >= 1 else mu_1,
    paired with the near-1 eigenvalue. "literal" takes mu_k+1 (resp. mu_k)
    as the near-1 eigenvalue; "balanced" takes whichever of the two has the
    smaller mu + 1/mu. Then eta = sqrt((1 + gamma^2)(1 + delta^2) / (gamma delta))
    and alpha_opt are the roots of alpha^2 - eta alpha + 1 = 0.

    rho at the optimum grows with mu + 1/mu of both bracket ends, so
    "balanced" (the default) never gives a larger rho than "literal"; the two
    differ only when the other neighbour of 1 has the smaller mu + 1/mu. DESIGN.md
    records this choice under the optimal-parameter bracket.

    Raises:
        ConfigurationError: If a nonpositive eigenvalue is present
    """
    if bracket not in ("balanced", "literal"):
        raise ConfigurationError(f"bracket must be 'balanced' or 'literal', got {bracket!r}")
    values = np.sort(np.asarray(mus, dtype=np.float64))
    if values.size == 0:
        raise ConfigurationError("optimal alpha of an empty spectrum")
    if values[0] <= 0.0:
        raise ConfigurationError(f"optimal alpha needs positive eigenvalues, got {values[0]:.3e}")

    lower = values <= 1.0 + UNIT_TOLERANCE
    first, last = float(values[0]), float(values[-1])
    split_index = None
    if lower.all() or (values >= 1.0 - UNIT_TOLERANCE).all():
        case = "all-below-one" if lower.all() else "all-above-one"
        gamma, delta = first, last
    else:
        case = "straddling"
        split_index = int(np.count_nonzero(lower))
        mu_k, mu_k1 = float(values[split_index - 1]), float(values[split_index])
        upper_far = first * last >= 1.0
        if bracket == "literal":
            near = mu_k1 if upper_far else mu_k
        else:
            near = mu_k1 if _beta(mu_k1) <= _beta(mu_k) else mu_k
        gamma, delta = (near, last) if upper_far else (first, near)

    eta = float(np.sqrt((1.0 + gamma ** 2) * (1.0 + delta ** 2) / (gamma * delta)))
    alpha_plus = 0.5 * (eta + np.sqrt(max(eta * eta - 4.0, 0.0)))
    rho_opt = abs((delta ** 2 - eta * delta + 1.0) / (delta ** 2 + eta * delta + 1.0))

    return SpectralInfo(
        mus=tuple(float(mu) for mu in values),
        gamma=gamma,
        delta=delta,
        eta=eta,
        alpha_opt_minus=float(1.0 / alpha_plus),
        alpha_opt_plus=float(alpha_plus),
        rho_opt=float(rho_opt),
        work=OptimalAlphaWork(betas=tuple(float(_beta(mu)) for mu in values), case=case, split_index=split_index),
    )


def gsor_convergence_interval(W, T, cap: Optional[int] = ORACLE_CAP) -> float:
    """Upper end of the GSOR convergence interval, 2 / (1 + rho(W^-1 T))."""
    mus = generalized_eigs(W, T, cap)
    return 2.0 / (1.0 + float(np.max(np.abs(mus))))


# --- dense oracles ---

def _inv(matrix: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    try:
        lu = scipy.linalg.lu_factor(matrix, check_finite=False)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise SingularSubsystem(f"dense subsystem matrix cannot be factorized: {e}")
    if np.any(np.abs(np.diag(lu[0])) == 0.0):
        raise SingularSubsystem("dense subsystem matrix is singular")
    return lambda rhs: scipy.linalg.lu_solve(lu, rhs, check_finite=False)


def _dense_step(method: MethodKind, Wd: np.ndarray, Td: np.ndarray, alpha: float):
    """Affine map (Z, B) -> one outer step applied to the columns of Z."""
    n = Wd.shape[0]
    eye = np.eye(n)

    if method is MethodKind.GSOR:
        solve_w = _inv(Wd)

        def gsor(Z, B):
            x, y = Z[:n], Z[n:]
            x_new = solve_w((1 - alpha) * Wd @ x + alpha * Td @ y + alpha * B[:n])
            y_new = solve_w(-alpha * Td @ x_new + (1 - alpha) * Wd @ y + alpha * B[n:])
            return np.vstack([x_new, y_new])

        return gsor

    if method in (MethodKind.TSCSP, MethodKind.SCSP):
        first = _inv(alpha * Wd + Td)
        second = _inv(Wd + alpha * Td)

        def scaled(Z, B):
            return first(1j * (Wd - alpha * Td) @ Z + (alpha - 1j) * B)

        if method is MethodKind.SCSP:
            return scaled
        return lambda Z, B: second(1j * (alpha * Wd - Td) @ scaled(Z, B) + (1 - alpha * 1j) * B)

    if method is MethodKind.MHSS:
        first, second = _inv(alpha * eye + Wd), _inv(alpha * eye + Td)
        return lambda Z, B: second((alpha * eye + 1j * Wd) @ first((alpha * eye - 1j * Td) @ Z + B) - 1j * B)

    first, second = _inv((alpha + 1) * Wd), _inv(alpha * Wd + Td)
    return lambda Z, B: second((alpha * Wd + 1j * Wd) @ first((alpha * Wd - 1j * Td) @ Z + B) - 1j * B)


def dense_affine_map(W, T, b, alpha: float, method: MethodKind,
                     cap: Optional[int] = ORACLE_CAP) -> Tuple[np.ndarray, np.ndarray]:
    """
    Dense (G, c) with z^(k+1) = G z^(k) + c for one outer step.

    For GSOR the map acts on the stacked real vector (x; y) of length 2n;
    `b` may be None, giving c = 0.
    """
    method = MethodKind(method)
    Wd, Td = as_dense(W, cap), as_dense(T, cap)
    n = Wd.shape[0]
    step = _dense_step(method, Wd, Td, alpha)
    bz = np.zeros(n, dtype=np.complex128) if b is None else np.asarray(b.to_complex())

    if method is MethodKind.GSOR:
        stacked = np.concatenate([bz.real, bz.imag])[:, None]
        G = step(np.eye(2 * n), np.zeros((2 * n, 1)))
        c = step(np.zeros((2 * n, 1)), stacked)[:, 0]
        return G, c

    G = step(np.eye(n, dtype=np.complex128), np.zeros((n, 1), dtype=np.complex128))
    c = step(np.zeros((n, 1), dtype=np.complex128), bz[:, None])[:, 0]
    return G, c


def dense_iteration_matrix(W, T, alpha: float, method: MethodKind = MethodKind.TSCSP,
                           cap: Optional[int] = ORACLE_CAP) -> np.ndarray:
    """The exact dense iteration matrix of one outer step."""
    return dense_affine_map(W, T, None, alpha, method, cap)[0]


def splitting_matrices(W, T, alpha: float, cap: Optional[int] = ORACLE_CAP) -> Tuple[np.ndarray, np.ndarray]:
    """
    Dense M and N of the TSCSP splitting W + iT = M - N:

        M = (T + aW)(W - iT)^-1 (W + aT) / (2a)
        N = (T - aW)(W - iT)^-1 (W - aT) / (2a)
    """
    Wd, Td = as_dense(W, cap), as_dense(T, cap)
    solve = _inv(Wd - 1j * Td)
    M = (Td + alpha * Wd) @ solve(Wd + alpha * Td) / (2 * alpha)
    N = (Td - alpha * Wd) @ solve(Wd - alpha * Td) / (2 * alpha)
    return M, N


def dense_spectral_radius(G: np.ndarray) -> float:
    check_oracle_size(G.shape[0], 2 * ORACLE_CAP)
    return float(np.max(np.abs(np.linalg.eigvals(G))))


# --- experimental tuning ---

def alpha_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if lo <= 0.0 or step <= 0.0 or hi <= lo:
        raise ConfigurationError(f"invalid grid lo={lo}, hi={hi}, step={step}; need 0 < lo < hi and step > 0")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def grid_search_alpha(problem, method: MethodKind, alpha_range: Tuple[float, float], step: float,
                      base: Optional[SolverConfig] = None, max_workers: int = 1,
                      progress: Optional[Callable[[], None]] = None) -> TuneResult:
    """
    Run the solver at every grid value and keep the fewest iterations.

    Non-converged runs count as max_iterations + 1; ties go to the smaller alpha.

    Raises:
        AllGridPointsDiverged: If no grid value converged
    """
    method = MethodKind(method)
    alphas = alpha_grid(alpha_range[0], alpha_range[1], step)
    template = base or SolverConfig(method=method, alpha=1.0)

    def evaluate(alpha: float) -> Tuple[float, int, bool]:
        cfg = SolverConfig(method=method, alpha=float(alpha), tolerance=template.tolerance,
                           max_iterations=template.max_iterations, inner=template.inner)
        try:
            report = run(problem, cfg)
            outcome = (float(alpha), report.iterations, report.converged)
        except (NotPositiveDefinite, CgDidNotConverge):
            outcome = (float(alpha), template.max_iterations, False)
        if progress is not None:
            progress()
        return outcome

    outcomes = batch_process(list(alphas), evaluate, max_workers=max_workers)
    if not any(converged for _, _, converged in outcomes):
        raise AllGridPointsDiverged(
            f"{method.label}: no alpha in [{alphas[0]:g}, {alphas[-1]:g}] converged "
            f"within {template.max_iterations} iterations"
        )

    grid = [(alpha, iterations if converged else template.max_iterations + 1)
            for alpha, iterations, converged in outcomes]
    best_alpha, best_iterations = min(grid, key=lambda item: (item[1], item[0]))
    return TuneResult(method=method, best_alpha=best_alpha, best_iterations=best_iterations, grid=grid)
