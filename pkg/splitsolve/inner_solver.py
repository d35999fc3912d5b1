"""
Solvers for the real symmetric positive definite subsystems of each outer step.

The direct mode runs SuperLU in symmetric mode with diagonal pivoting only,
so the LU factors of an SPD matrix are L and D L^T and the Cholesky factor is
L D^(1/2). A nonpositive or off-diagonal pivot means the matrix is not SPD.
"""

import hashlib
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sps
from scipy.sparse.csgraph import reverse_cuthill_mckee
from scipy.sparse.linalg import cg, splu

from .constants import CG_ITERATIONS_PER_UNKNOWN, DEFAULT_CG_TOLERANCE, ORDERINGS
from .exceptions import CgDidNotConverge, ConfigurationError, DimensionMismatch, NotPositiveDefinite
from .linalg import ComplexVector, RealVector, SparseSymMatrix

OrderingHook = Callable[[sps.csr_matrix], np.ndarray]


class InnerKind(str, Enum):
    CHOLESKY = "cholesky"
    CG = "cg"


@dataclass(frozen=True)
class InnerSolveChoice:
    """
    How the SPD subsystems are solved.

    `ordering` is "natural", "rcm" (reverse Cuthill-McKee), "mmd" (SuperLU's
    minimum degree on A + A^T) or a callable returning a permutation of the
    rows. Iteration counts do not depend on it.
    """

    kind: InnerKind = InnerKind.CHOLESKY
    cg_tolerance: float = DEFAULT_CG_TOLERANCE
    cg_max_iterations: Optional[int] = None
    ordering: Union[str, OrderingHook] = "natural"

    def __post_init__(self):
        object.__setattr__(self, "kind", InnerKind(self.kind))
        if not 0.0 < self.cg_tolerance < 1.0:
            raise ConfigurationError(f"cg_tolerance must lie in (0, 1), got {self.cg_tolerance}")
        if self.cg_max_iterations is not None and self.cg_max_iterations < 1:
            raise ConfigurationError(f"cg_max_iterations must be >= 1, got {self.cg_max_iterations}")
        if isinstance(self.ordering, str) and self.ordering not in ORDERINGS:
            raise ConfigurationError(f"ordering must be one of {ORDERINGS} or a callable, got {self.ordering!r}")

    def max_iterations_for(self, n: int) -> int:
        return self.cg_max_iterations or CG_ITERATIONS_PER_UNKNOWN * n


def fingerprint(A: SparseSymMatrix) -> Tuple[int, str]:
    """(dimension, checksum of the CSR arrays)."""
    digest = hashlib.sha1()
    for array in (A.row_ptr, A.col_idx, A.values):
        digest.update(np.ascontiguousarray(array).tobytes())
    return A.n, digest.hexdigest()


class SpdFactorization:
    """Reusable handle for repeated solves with one SPD matrix."""

    def __init__(self, matrix: SparseSymMatrix, choice: InnerSolveChoice):
        self.matrix = matrix
        self.choice = choice
        self.fingerprint = fingerprint(matrix)
        self.permutation: Optional[np.ndarray] = None
        self._lu = None
        self._solves = 0
        self._lock = threading.Lock()

    @property
    def method(self) -> str:
        return "direct" if self.choice.kind is InnerKind.CHOLESKY else "iterative"

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def solve_count(self) -> int:
        """Number of real right-hand sides solved so far."""
        return self._solves

    def _factor(self) -> None:
        csr = self.matrix.csr
        permc_spec = "NATURAL"
        ordering = self.choice.ordering
        if callable(ordering) or ordering == "rcm":
            perm = ordering(csr) if callable(ordering) else reverse_cuthill_mckee(csr, symmetric_mode=True)
            perm = np.asarray(perm, dtype=np.intp)
            if not np.array_equal(np.sort(perm), np.arange(self.n)):
                raise ConfigurationError("ordering hook must return a permutation of range(n)")
            self.permutation = perm
            csr = csr[perm][:, perm]
        elif ordering == "mmd":
            permc_spec = "MMD_AT_PLUS_A"

        try:
            lu = splu(sps.csc_matrix(csr), permc_spec=permc_spec, diag_pivot_thresh=0.0,
                      options=dict(SymmetricMode=True))
        except RuntimeError as e:
            raise NotPositiveDefinite(f"factorization of order {self.n} failed: {e}")

        if not np.array_equal(lu.perm_r, lu.perm_c):
            raise NotPositiveDefinite(f"zero pivot forced off-diagonal pivoting in a matrix of order {self.n}")
        pivots = lu.U.diagonal()
        if np.any(pivots <= 0.0):
            index = int(np.argmax(pivots <= 0.0))
            raise NotPositiveDefinite(f"nonpositive pivot {pivots[index]:.3e} at step {index} of {self.n}")
        self._lu = lu

    def lower_factor(self) -> Tuple[sps.csc_matrix, np.ndarray]:
        """
        Cholesky factor L and symmetric permutation p with A[p][:, p] = L L^T.

        Only available for direct factorizations.
        """
        if self._lu is None:
            raise ConfigurationError("lower_factor() requires a direct factorization")
        lu = self._lu
        factor = sps.csc_matrix(lu.L @ sps.diags(np.sqrt(lu.U.diagonal())))
        # SuperLU: A_factored[perm_c][:, perm_c] = L U when perm_r == perm_c
        order = np.argsort(lu.perm_c)
        if self.permutation is not None:
            order = self.permutation[order]
        return factor, order

    def solve(self, rhs: RealVector) -> RealVector:
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (self.n,):
            raise DimensionMismatch(f"right-hand side of shape {rhs.shape} for a matrix of order {self.n}")
        with self._lock:
            self._solves += 1

        if self.choice.kind is InnerKind.CG:
            return self._solve_cg(rhs)
        if self.permutation is None:
            return self._lu.solve(rhs)
        x = np.empty_like(rhs)
        x[self.permutation] = self._lu.solve(rhs[self.permutation])
        return x

    def _solve_cg(self, rhs: RealVector) -> RealVector:
        maxiter = self.choice.max_iterations_for(self.n)
        x, info = cg(self.matrix.csr, rhs, rtol=self.choice.cg_tolerance, atol=0.0, maxiter=maxiter)
        if info != 0:
            raise CgDidNotConverge(
                f"CG did not reach relative residual {self.choice.cg_tolerance:g} "
                f"within {maxiter} iterations (order {self.n})"
            )
        return x

    def solve_complex(self, rhs: ComplexVector) -> ComplexVector:
        return ComplexVector(self.solve(rhs.re), self.solve(rhs.im))


def factorize(A: SparseSymMatrix, choice: Optional[InnerSolveChoice] = None) -> SpdFactorization:
    """
    Prepare repeated solves with the SPD matrix A.

    Direct mode factorizes eagerly; iterative mode only keeps the matrix.

    Raises:
        NotPositiveDefinite: If direct factorization meets a nonpositive pivot
    """
    factorization = SpdFactorization(A, choice or InnerSolveChoice())
    if factorization.choice.kind is InnerKind.CHOLESKY:
        factorization._factor()
    return factorization


def solve_real(F: SpdFactorization, rhs: RealVector) -> RealVector:
    return F.solve(rhs)


def solve_complex(F: SpdFactorization, rhs: ComplexVector) -> ComplexVector:
    """One factorization, two real solves: (A^-1 re, A^-1 im)."""
    return F.solve_complex(rhs)
