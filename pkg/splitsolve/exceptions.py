"""
Custom exceptions for the splitting-solver package.
"""


class SplitSolveError(Exception):
    """Base exception for solver, problem and benchmark operations."""
    pass


class ConfigurationError(SplitSolveError, ValueError):
    """Raised when a configuration value or request is invalid."""
    pass


class DimensionMismatch(SplitSolveError, ValueError):
    """Raised when operands do not share a dimension."""
    pass


class SymmetryViolation(SplitSolveError, ValueError):
    """Raised when a matrix is structurally or numerically nonsymmetric."""
    pass


class NotPositiveDefinite(SplitSolveError):
    """Raised when a nonpositive pivot shows up during a Cholesky-type factorization."""
    pass


class CgDidNotConverge(SplitSolveError):
    """Raised when conjugate gradient exhausts its iteration budget."""
    pass


class ZeroRightHandSide(SplitSolveError, ValueError):
    """Raised when a relative residual is requested for b = 0."""
    pass


class OracleCapExceeded(SplitSolveError, ValueError):
    """Raised when a dense oracle is asked for a matrix above the configured cap."""
    pass


class SingularSubsystem(SplitSolveError):
    """Raised when a dense subsystem matrix cannot be inverted."""
    pass


class MaxIterationsExceeded(SplitSolveError):
    """Raised on demand when a solve stopped at its iteration limit."""
    pass


class SolverDiverged(SplitSolveError):
    """Raised on demand when a solve was aborted by the divergence guard."""
    pass


class AllGridPointsDiverged(SplitSolveError):
    """Raised when no grid value of the parameter produced a converged solve."""
    pass


class ProblemFormatError(SplitSolveError):
    """Raised when an exchange file is malformed."""
    pass


class CacheError(SplitSolveError):
    """Raised when a tuning result cannot be written to the cache."""
    pass
