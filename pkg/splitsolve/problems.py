"""
Benchmark problems (W + iT) z = b and their exchange on disk.

Examples 1 and 2 come from a 2D Laplacian K = I (x) V_m + V_m (x) I on the
unit square with h = 1/(m+1) and are normalized by h^2. Example 3 couples a
Dirichlet Laplacian T with a periodic one in W. Example 4 is a pair of
Toeplitz tridiagonal matrices. Synthetic problems are random SPD pairs.
"""

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sps
from rich.console import Console
from slugify import slugify

from .constants import EXAMPLE2_DAMPING, EXAMPLE2_OMEGA, EXAMPLE4_THETA1, EXAMPLE4_THETA2, ORACLE_CAP
from .exceptions import ConfigurationError, DimensionMismatch, NotPositiveDefinite, ProblemFormatError, ZeroRightHandSide
from .exchange import read_complex_vector, read_matrix_market, write_complex_vector, write_matrix_market
from .linalg import ComplexVector, SparseSymMatrix, apply_system, combine, kron, kron_sum, shifted, tridiag
from .validation import safe_path_join

console = Console(stderr=True)

SPEC_FILE = "problem.json"
W_FILE = "W.mtx"
T_FILE = "T.mtx"
B_FILE = "b.vec"


@dataclass(frozen=True)
class ProblemSpec:
    """Which benchmark problem and its parameters."""

    example: str
    m: Optional[int] = None
    n: Optional[int] = None
    tau: Optional[float] = None
    omega: Optional[float] = None
    mu_damp: Optional[float] = None
    theta1: Optional[float] = None
    theta2: Optional[float] = None
    seed: Optional[int] = None
    identical: bool = False

    @property
    def label(self) -> str:
        size = f"m{self.m}" if self.m is not None else f"n{self.n}"
        suffix = f"-seed{self.seed}" if self.seed is not None else ""
        return slugify(f"example {self.example} {size}{suffix}")

    def to_json(self) -> dict:
        return {key: value for key, value in asdict(self).items() if value is not None}


@dataclass(frozen=True)
class Problem:
    W: SparseSymMatrix
    T: SparseSymMatrix
    b: ComplexVector
    spec: ProblemSpec
    normalized: bool = False

    def __post_init__(self):
        if not (self.W.n == self.T.n == self.b.n):
            raise DimensionMismatch(f"W, T, b dimensions differ: {self.W.n}, {self.T.n}, {self.b.n}")
        if self.b.norm() == 0.0:
            raise ZeroRightHandSide("right-hand side b must be nonzero")

    @property
    def n(self) -> int:
        return self.W.n


def _laplacian_2d(m: int, scaled: bool = True) -> Tuple[SparseSymMatrix, float]:
    h = 1.0 / (m + 1)
    V = tridiag(m, -1.0, 2.0, -1.0)
    if scaled:
        V = V.scaled(h ** -2)
    return kron_sum(V), h


def _manufactured_rhs(W: SparseSymMatrix, T: SparseSymMatrix, factor: complex) -> ComplexVector:
    """b = factor * A 1."""
    return apply_system(W, T, ComplexVector(np.ones(W.n), np.zeros(W.n))).scale(factor)


def build_example1(m: int, tau: Optional[float] = None) -> Problem:
    """
    W = K + (3 - sqrt 3)/tau I, T = K + (3 + sqrt 3)/tau I,
    b_j = (1 - i) j / (tau (j + 1)^2), all scaled by h^2.
    """
    _require_size(m, "m")
    K, h = _laplacian_2d(m)
    tau = h if tau is None else float(tau)
    if tau <= 0.0:
        raise ConfigurationError(f"tau must be positive, got {tau}")

    W = shifted(K, (3.0 - math.sqrt(3.0)) / tau)
    T = shifted(K, (3.0 + math.sqrt(3.0)) / tau)
    j = np.arange(1, K.n + 1, dtype=np.float64)
    magnitude = j / (tau * (j + 1.0) ** 2)
    b = ComplexVector(magnitude, -magnitude)

    h2 = h * h
    return Problem(W.scaled(h2), T.scaled(h2), b.scale(h2), ProblemSpec("1", m=m, tau=tau), normalized=True)


def build_example2(m: int, omega: float = EXAMPLE2_OMEGA, mu_damp: float = EXAMPLE2_DAMPING,
                   check: bool = True) -> Problem:
    """
    W = K - omega^2 I, T = 10 omega I + mu K, b = (1 + i) A 1, all scaled by h^2.

    W is SPD only while omega^2 stays below the smallest eigenvalue of K;
    with `check` that is verified from the known spectrum of K.
    """
    _require_size(m, "m")
    K, h = _laplacian_2d(m)
    if check:
        smallest = 8.0 * (m + 1) ** 2 * math.sin(math.pi * h / 2.0) ** 2
        if omega ** 2 >= smallest:
            raise NotPositiveDefinite(
                f"W = K - omega^2 I is not SPD: omega^2 = {omega ** 2:g} >= lambda_min(K) = {smallest:g}"
            )

    W = shifted(K, -omega ** 2)
    T = shifted(K, 10.0 * omega, scale=mu_damp)
    h2 = h * h
    W, T = W.scaled(h2), T.scaled(h2)
    b = _manufactured_rhs(W, T, 1 + 1j)
    spec = ProblemSpec("2", m=m, omega=float(omega), mu_damp=float(mu_damp))
    return Problem(W, T, b, spec, normalized=True)


def build_example3(m: int) -> Problem:
    """
    T = I (x) V + V (x) I, W = 10 (I (x) V_c + V_c (x) I) + 9 (e_1 e_m^T + e_m e_1^T) (x) I,
    V = tridiag(-1, 2, -1), V_c = V - e_1 e_m^T - e_m e_1^T, b = (1 + i) A 1.
    """
    if m < 2:
        raise ConfigurationError(f"m must be >= 2 for Example 3, got {m}")
    V = tridiag(m, -1.0, 2.0, -1.0)
    corners = SparseSymMatrix(sps.csr_matrix(([1.0, 1.0], ([0, m - 1], [m - 1, 0])), shape=(m, m)), validate=False)
    V_c = combine(1.0, V, -1.0, corners)

    T = kron_sum(V)
    W = combine(10.0, kron_sum(V_c), 9.0, kron(corners, SparseSymMatrix.identity(m)))
    b = _manufactured_rhs(W, T, 1 + 1j)
    return Problem(W, T, b, ProblemSpec("3", m=m))


def build_example4(n: int, theta1: float = EXAMPLE4_THETA1, theta2: float = EXAMPLE4_THETA2) -> Problem:
    """W = tridiag(-1 + theta1, 2, -1 + theta1), T = tridiag(-1 + theta2, 2, -1 + theta2), b = A 1."""
    _require_size(n, "n")
    W = tridiag(n, -1.0 + theta1, 2.0, -1.0 + theta1)
    T = tridiag(n, -1.0 + theta2, 2.0, -1.0 + theta2)
    b = _manufactured_rhs(W, T, 1.0)
    return Problem(W, T, b, ProblemSpec("4", n=n, theta1=float(theta1), theta2=float(theta2)))


def random_spd(n: int, rng: np.random.Generator, shift: float = 0.1) -> np.ndarray:
    """Dense random SPD matrix with smallest eigenvalue at least `shift`."""
    X = rng.standard_normal((n, n))
    S = X @ X.T / n
    return 0.5 * (S + S.T) + shift * np.eye(n)


def build_synthetic(n: int, seed: int = 0, identical: bool = False) -> Problem:
    """Random SPD pair (W, T) of order n, with T = W when `identical`; b = A 1."""
    _require_size(n, "n")
    rng = np.random.default_rng(seed)
    W = SparseSymMatrix.from_dense(random_spd(n, rng))
    T = W if identical else SparseSymMatrix.from_dense(random_spd(n, rng))
    b = _manufactured_rhs(W, T, 1.0)
    return Problem(W, T, b, ProblemSpec("synthetic", n=n, seed=seed, identical=identical))


def spec_for_size(example: str, size: int, seed: Optional[int] = None, identical: bool = False) -> ProblemSpec:
    """Default spec of an example at one size: m for Examples 1-3, n otherwise."""
    if example in ("1", "2", "3"):
        return ProblemSpec(example, m=size)
    if example == "4":
        return ProblemSpec(example, n=size)
    if example == "synthetic":
        return ProblemSpec(example, n=size, seed=0 if seed is None else seed, identical=identical)
    raise ConfigurationError(f"unknown example {example!r}")


def build_problem(spec: ProblemSpec) -> Problem:
    """Construct the problem described by `spec`."""
    if spec.example == "1":
        return build_example1(_size(spec.m, "m"), spec.tau)
    if spec.example == "2":
        return build_example2(_size(spec.m, "m"), _default(spec.omega, EXAMPLE2_OMEGA),
                              _default(spec.mu_damp, EXAMPLE2_DAMPING))
    if spec.example == "3":
        return build_example3(_size(spec.m, "m"))
    if spec.example == "4":
        return build_example4(_size(spec.n, "n"), _default(spec.theta1, EXAMPLE4_THETA1),
                              _default(spec.theta2, EXAMPLE4_THETA2))
    if spec.example == "synthetic":
        return build_synthetic(_size(spec.n, "n"), spec.seed or 0, spec.identical)
    raise ConfigurationError(f"unknown example {spec.example!r}")


def verify_definiteness(problem: Problem, cap: int = ORACLE_CAP) -> Tuple[float, float]:
    """
    Smallest dense eigenvalues of W and T.

    Warns when W is not SPD or T is not positive semidefinite.
    """
    if problem.n > cap:
        raise ConfigurationError(f"dense definiteness check limited to n <= {cap}, got {problem.n}")
    w_min = float(scipy.linalg.eigvalsh(problem.W.to_dense())[0])
    t_min = float(scipy.linalg.eigvalsh(problem.T.to_dense())[0])
    if w_min <= 0.0:
        console.print(f"[yellow]W of {problem.spec.label} is not positive definite (lambda_min = {w_min:.3e})[/yellow]")
    if t_min < -1e-12:
        console.print(f"[yellow]T of {problem.spec.label} is indefinite (lambda_min = {t_min:.3e})[/yellow]")
    return w_min, t_min


def export_problem(problem: Problem, directory: Union[str, Path]) -> Path:
    """
    Write W and T as symmetric Matrix Market files, b as a complex vector
    dump, and the problem spec as a JSON sidecar.

    Returns:
        The export directory
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ProblemFormatError(f"Unable to create export directory {directory}: {e}")

    write_matrix_market(safe_path_join(str(directory), W_FILE), problem.W, comment=f"W of {problem.spec.label}")
    write_matrix_market(safe_path_join(str(directory), T_FILE), problem.T, comment=f"T of {problem.spec.label}")
    write_complex_vector(safe_path_join(str(directory), B_FILE), problem.b)

    sidecar = dict(problem.spec.to_json(), normalized=problem.normalized)
    try:
        with open(safe_path_join(str(directory), SPEC_FILE), "w", encoding="utf-8") as f:
            json.dump(sidecar, f, indent=2)
    except OSError as e:
        raise ProblemFormatError(f"Unable to write {SPEC_FILE}: {e}")
    return directory


def import_problem(directory: Union[str, Path]) -> Problem:
    """
    Read a problem written by export_problem.

    Raises:
        ProblemFormatError: If a file is missing or malformed
        SymmetryViolation: If a stored matrix is not symmetric
    """
    directory = Path(directory)
    try:
        with open(safe_path_join(str(directory), SPEC_FILE), "r", encoding="utf-8") as f:
            sidecar = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ProblemFormatError(f"Unable to read {SPEC_FILE} in {directory}: {e}")

    normalized = bool(sidecar.pop("normalized", False))
    try:
        spec = ProblemSpec(**sidecar)
    except TypeError as e:
        raise ProblemFormatError(f"Unexpected field in {SPEC_FILE}: {e}")

    W = read_matrix_market(safe_path_join(str(directory), W_FILE))
    T = read_matrix_market(safe_path_join(str(directory), T_FILE))
    b = read_complex_vector(safe_path_join(str(directory), B_FILE))
    return Problem(W, T, b, spec, normalized=normalized)


def _require_size(value: int, name: str) -> None:
    if value is None or int(value) < 1:
        raise ConfigurationError(f"{name} must be >= 1, got {value}")


def _size(value: Optional[int], name: str) -> int:
    _require_size(value, name)
    return int(value)


def _default(value: Optional[float], fallback: float) -> float:
    return fallback if value is None else float(value)
