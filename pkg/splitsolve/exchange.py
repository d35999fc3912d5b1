"""
Exchange formats: Matrix Market files for matrices, dump files for vectors.

Vector dumps start with a one-line header holding the length n. Text dumps
then list one entry per line (complex vectors: "re im" per line); binary
dumps follow the header with little-endian float64 blocks (complex vectors:
the re block, then the im block).
"""

from pathlib import Path
from typing import Union

import numpy as np
import scipy.io
import scipy.sparse as sps

from .exceptions import ProblemFormatError
from .linalg import ComplexVector, RealVector, SparseSymMatrix

PathLike = Union[str, Path]

_FLOAT = np.dtype("<f8")


def write_matrix_market(path: PathLike, A: SparseSymMatrix, comment: str = "") -> None:
    """Write A as a real symmetric coordinate file (lower triangle stored)."""
    try:
        scipy.io.mmwrite(str(path), sps.coo_matrix(A.csr), comment=comment, field="real",
                         precision=17, symmetry="symmetric")
    except OSError as e:
        raise ProblemFormatError(f"Unable to write matrix file {path}: {e}")


def read_matrix_market(path: PathLike) -> SparseSymMatrix:
    """
    Read a coordinate Matrix Market file into a SparseSymMatrix.

    Symmetric storage is expanded to both triangles; general storage is
    accepted only if it passes the symmetry check.

    Raises:
        ProblemFormatError: If the file cannot be parsed
        SymmetryViolation: If the stored matrix is not symmetric
    """
    try:
        matrix = scipy.io.mmread(str(path))
    except (OSError, ValueError, IndexError) as e:
        raise ProblemFormatError(f"Unable to read matrix file {path}: {e}")
    if not sps.issparse(matrix):
        raise ProblemFormatError(f"{path} is not a coordinate (sparse) Matrix Market file")
    if np.iscomplexobj(matrix.data):
        raise ProblemFormatError(f"{path} holds complex entries; expected real")
    return SparseSymMatrix(matrix)


def write_vector(path: PathLike, v: RealVector, binary: bool = False) -> None:
    v = np.asarray(v, dtype=_FLOAT)
    _write_dump(path, v.shape[0], [v], binary)


def read_vector(path: PathLike, binary: bool = False) -> RealVector:
    return _read_dump(path, 1, binary)[0]


def write_complex_vector(path: PathLike, z: ComplexVector, binary: bool = False) -> None:
    _write_dump(path, z.n, [z.re, z.im], binary)


def read_complex_vector(path: PathLike, binary: bool = False) -> ComplexVector:
    re, im = _read_dump(path, 2, binary)
    return ComplexVector(re, im)


def _write_dump(path: PathLike, n: int, columns, binary: bool) -> None:
    try:
        if binary:
            with open(path, "wb") as f:
                f.write(f"{n}\n".encode("ascii"))
                for column in columns:
                    f.write(np.asarray(column, dtype=_FLOAT).tobytes())
        else:
            with open(path, "w", encoding="utf-8") as f:
                f.write(f"{n}\n")
                for row in zip(*columns):
                    f.write(" ".join(repr(float(value)) for value in row) + "\n")
    except OSError as e:
        raise ProblemFormatError(f"Unable to write vector file {path}: {e}")


def _read_dump(path: PathLike, width: int, binary: bool):
    try:
        if binary:
            with open(path, "rb") as f:
                n = _parse_header(f.readline().decode("ascii", errors="replace"), path)
                payload = f.read()
            if len(payload) != width * n * _FLOAT.itemsize:
                raise ProblemFormatError(f"{path}: expected {width * n} binary entries")
            return np.frombuffer(payload, dtype=_FLOAT).reshape(width, n).astype(np.float64)

        with open(path, "r", encoding="utf-8") as f:
            n = _parse_header(f.readline(), path)
            rows = [line.split() for line in f if line.strip()]
    except OSError as e:
        raise ProblemFormatError(f"Unable to read vector file {path}: {e}")

    if n == 0 and not rows:
        return np.zeros((width, 0))
    if len(rows) != n or any(len(row) != width for row in rows):
        raise ProblemFormatError(f"{path}: expected {n} rows of {width} entries")
    try:
        return np.array(rows, dtype=np.float64).T
    except ValueError as e:
        raise ProblemFormatError(f"{path}: non-numeric entry ({e})")


def _parse_header(line: str, path: PathLike) -> int:
    try:
        n = int(line.strip())
    except ValueError:
        raise ProblemFormatError(f"{path}: first line must hold the vector length")
    if n < 0:
        raise ProblemFormatError(f"{path}: negative vector length {n}")
    return n
