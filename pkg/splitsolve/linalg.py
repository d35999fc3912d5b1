"""
Sparse and dense real/complex primitives shared by every solver.

Complex quantities are always carried as pairs of real objects: a complex
vector is (re, im) and a complex matrix W + iT is the pair (W, T).
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sps

from .constants import ORACLE_CAP, SYMMETRY_RTOL
from .exceptions import DimensionMismatch, OracleCapExceeded, SymmetryViolation, ZeroRightHandSide

RealVector = np.ndarray
DenseComplexMatrix = np.ndarray


def _readonly(array: np.ndarray) -> np.ndarray:
    view = array.view()
    view.flags.writeable = False
    return view


class SparseSymMatrix:
    """
    Real symmetric matrix in compressed-row storage, both triangles stored.

    The wrapped CSR matrix is canonical (sorted column indices, no duplicate
    entries) and must not be modified after construction.
    """

    __slots__ = ("_csr",)

    def __init__(self, matrix, validate: bool = True):
        csr = sps.csr_matrix(matrix, dtype=np.float64, copy=True)
        if csr.shape[0] != csr.shape[1]:
            raise DimensionMismatch(f"matrix must be square, got shape {csr.shape}")
        csr.sum_duplicates()
        csr.sort_indices()
        if validate:
            _check_symmetric(csr)
        self._csr = csr

    @classmethod
    def from_dense(cls, array, validate: bool = True) -> "SparseSymMatrix":
        return cls(sps.csr_matrix(np.asarray(array, dtype=np.float64)), validate=validate)

    @classmethod
    def identity(cls, n: int) -> "SparseSymMatrix":
        return cls(sps.identity(n, format="csr"), validate=False)

    @property
    def n(self) -> int:
        return self._csr.shape[0]

    @property
    def shape(self):
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def row_ptr(self) -> np.ndarray:
        return _readonly(self._csr.indptr)

    @property
    def col_idx(self) -> np.ndarray:
        return _readonly(self._csr.indices)

    @property
    def values(self) -> np.ndarray:
        return _readonly(self._csr.data)

    @property
    def csr(self) -> sps.csr_matrix:
        """The underlying scipy matrix. Treat as read-only."""
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    def scaled(self, factor: float) -> "SparseSymMatrix":
        return SparseSymMatrix(self._csr * float(factor), validate=False)

    def __matmul__(self, v):
        return spmv(self, v)

    def __repr__(self) -> str:
        return f"SparseSymMatrix(n={self.n}, nnz={self.nnz})"


def _check_symmetric(csr: sps.csr_matrix) -> None:
    transposed = csr.transpose().tocsr()
    transposed.sum_duplicates()
    transposed.sort_indices()
    if not (np.array_equal(csr.indptr, transposed.indptr) and np.array_equal(csr.indices, transposed.indices)):
        raise SymmetryViolation("matrix pattern is not structurally symmetric")
    bound = SYMMETRY_RTOL * np.maximum(1.0, np.abs(csr.data))
    if np.any(np.abs(csr.data - transposed.data) > bound):
        worst = float(np.max(np.abs(csr.data - transposed.data)))
        raise SymmetryViolation(f"matrix values are not symmetric (max |a_ij - a_ji| = {worst:.3e})")


@dataclass(frozen=True)
class ComplexVector:
    """z = re + i*im with real component arrays of equal length."""

    re: RealVector
    im: RealVector

    def __post_init__(self):
        re = np.asarray(self.re, dtype=np.float64)
        im = np.asarray(self.im, dtype=np.float64)
        if re.ndim != 1 or re.shape != im.shape:
            raise DimensionMismatch(f"re and im must be 1-D of equal length, got {re.shape} and {im.shape}")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def zeros(cls, n: int) -> "ComplexVector":
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def from_complex(cls, values) -> "ComplexVector":
        values = np.asarray(values, dtype=np.complex128)
        return cls(values.real.copy(), values.imag.copy())

    @property
    def n(self) -> int:
        return self.re.shape[0]

    def to_complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    def norm(self) -> float:
        """Complex 2-norm sqrt(||re||^2 + ||im||^2)."""
        return float(np.sqrt(np.dot(self.re, self.re) + np.dot(self.im, self.im)))

    def scale(self, factor: complex) -> "ComplexVector":
        """Multiply by the complex scalar `factor`."""
        a, b = float(np.real(factor)), float(np.imag(factor))
        return ComplexVector(a * self.re - b * self.im, a * self.im + b * self.re)

    def __add__(self, other: "ComplexVector") -> "ComplexVector":
        return ComplexVector(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexVector") -> "ComplexVector":
        return ComplexVector(self.re - other.re, self.im - other.im)


def _require_same_n(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"operands have mismatched dimensions {dims}")


def spmv(A: SparseSymMatrix, v: RealVector) -> RealVector:
    """Sparse matrix-vector product A @ v."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {v.shape}")
    _require_same_n(A.n, v.shape[0])
    return A.csr @ v


def apply_system(W: SparseSymMatrix, T: SparseSymMatrix, z: ComplexVector) -> ComplexVector:
    """(W + iT) z expanded into real pairs: (W x - T y, W y + T x)."""
    _require_same_n(W.n, T.n, z.n)
    return ComplexVector(W.csr @ z.re - T.csr @ z.im, W.csr @ z.im + T.csr @ z.re)


def residual_relnorm(W: SparseSymMatrix, T: SparseSymMatrix, b: ComplexVector, z: ComplexVector) -> float:
    """||b - (W + iT) z||_2 / ||b||_2 in the complex 2-norm."""
    b_norm = b.norm()
    if b_norm == 0.0:
        raise ZeroRightHandSide("relative residual is undefined for a zero right-hand side")
    return (b - apply_system(W, T, z)).norm() / b_norm


def combine(a: float, A: SparseSymMatrix, b: float, B: SparseSymMatrix) -> SparseSymMatrix:
    """The linear combination a*A + b*B on the union pattern."""
    _require_same_n(A.n, B.n)
    return SparseSymMatrix(float(a) * A.csr + float(b) * B.csr, validate=False)


def shifted(A: SparseSymMatrix, shift: float, scale: float = 1.0) -> SparseSymMatrix:
    """scale*A + shift*I."""
    return SparseSymMatrix(float(scale) * A.csr + float(shift) * sps.identity(A.n, format="csr"), validate=False)


def tridiag(n: int, lower: float, diag: float, upper: float) -> SparseSymMatrix:
    """Symmetric Toeplitz tridiagonal matrix of order n."""
    if n < 1:
        raise DimensionMismatch(f"order must be >= 1, got {n}")
    if lower != upper:
        raise SymmetryViolation(f"tridiag bands must match for symmetry, got {lower} and {upper}")
    if n == 1:
        return SparseSymMatrix(sps.csr_matrix([[float(diag)]]), validate=False)
    matrix = sps.diags([lower, diag, upper], [-1, 0, 1], shape=(n, n), format="csr")
    return SparseSymMatrix(matrix, validate=False)


def kron_sum(V: SparseSymMatrix) -> SparseSymMatrix:
    """Kronecker sum I (x) V + V (x) I of order m^2."""
    eye = sps.identity(V.n, format="csr")
    return SparseSymMatrix(sps.kron(eye, V.csr, format="csr") + sps.kron(V.csr, eye, format="csr"), validate=False)


def kron(A: SparseSymMatrix, B: SparseSymMatrix) -> SparseSymMatrix:
    """Kronecker product A (x) B; symmetric whenever A and B are."""
    return SparseSymMatrix(sps.kron(A.csr, B.csr, format="csr"), validate=False)


def check_oracle_size(n: int, cap: Optional[int] = None) -> None:
    cap = ORACLE_CAP if cap is None else cap
    if n > cap:
        raise OracleCapExceeded(f"dense oracle requested for order {n} above the cap {cap}")


def as_dense(A: Union[SparseSymMatrix, np.ndarray], cap: Optional[int] = None) -> np.ndarray:
    """Dense copy of a matrix for the small-scale oracles."""
    check_oracle_size(A.shape[0], cap)
    return A.to_dense() if isinstance(A, SparseSymMatrix) else np.array(A, dtype=np.float64)

