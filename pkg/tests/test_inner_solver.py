import numpy as np
import pytest
import scipy.sparse as sps

from splitsolve.exceptions import CgDidNotConverge, ConfigurationError, DimensionMismatch, NotPositiveDefinite
from splitsolve.inner_solver import InnerKind, InnerSolveChoice, factorize, fingerprint, solve_complex, solve_real
from splitsolve.linalg import ComplexVector, SparseSymMatrix, kron_sum, tridiag
from splitsolve.problems import random_spd

CG = InnerSolveChoice(kind=InnerKind.CG)


def test_identity_factor_is_identity():
    F = factorize(SparseSymMatrix.identity(6))
    L, order = F.lower_factor()
    np.testing.assert_allclose(L.toarray(), np.eye(6), atol=1e-15)
    assert sorted(order) == list(range(6))
    assert F.method == "direct"


def test_laplacian_factorizes():
    F = factorize(tridiag(10, -1.0, 2.0, -1.0))
    np.testing.assert_allclose(F.solve(F.matrix.csr @ np.ones(10)), np.ones(10), atol=1e-10)


def test_zero_diagonal_is_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        factorize(tridiag(4, 1.0, 0.0, 1.0))


def test_indefinite_is_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        factorize(SparseSymMatrix.from_dense(np.diag([1.0, -2.0, 3.0])))


@pytest.mark.parametrize("ordering", ["natural", "rcm", "mmd"])
def test_cholesky_factor_reconstructs_matrix(rng, ordering):
    for n in (5, 40, 200):
        A = SparseSymMatrix.from_dense(random_spd(n, rng))
        F = factorize(A, InnerSolveChoice(ordering=ordering))
        L, order = F.lower_factor()
        dense = A.to_dense()[np.ix_(order, order)]
        error = np.linalg.norm((L @ L.T).toarray() - dense) / np.linalg.norm(dense)
        assert error <= 1e-10
        np.testing.assert_allclose(np.tril(L.toarray()), L.toarray())


def test_ordering_hook(rng):
    A = kron_sum(tridiag(6, -1.0, 2.0, -1.0))
    reverse = lambda csr: np.arange(csr.shape[0])[::-1]
    F = factorize(A, InnerSolveChoice(ordering=reverse))
    rhs = rng.standard_normal(A.n)
    np.testing.assert_allclose(A.csr @ F.solve(rhs), rhs, atol=1e-10)

    bad = InnerSolveChoice(ordering=lambda csr: np.zeros(csr.shape[0], dtype=int))
    with pytest.raises(ConfigurationError):
        factorize(A, bad)


@pytest.mark.parametrize("choice", [
    InnerSolveChoice(),
    InnerSolveChoice(kind=InnerKind.CG, cg_tolerance=1e-8),
    InnerSolveChoice(kind=InnerKind.CG, cg_tolerance=1e-10),
])
def test_solve_real_contract(rng, choice):
    tolerance = 1e-12 if choice.kind is InnerKind.CHOLESKY else choice.cg_tolerance
    for _ in range(50):
        n = int(rng.integers(5, 101))
        A = random_spd(n, rng)
        F = factorize(SparseSymMatrix.from_dense(A), choice)
        rhs = rng.standard_normal(n)
        x = solve_real(F, rhs)
        assert np.linalg.norm(A @ x - rhs) / np.linalg.norm(rhs) <= tolerance


def test_solve_real_manufactured_and_zero():
    A = tridiag(20, -1.0, 2.0, -1.0)
    F = factorize(A)
    np.testing.assert_allclose(solve_real(F, A.csr @ np.ones(20)), np.ones(20), atol=1e-10)
    assert not np.any(solve_real(F, np.zeros(20)))


def test_solve_real_matches_dense(rng):
    A = random_spd(20, rng)
    rhs = rng.standard_normal(20)
    F = factorize(SparseSymMatrix.from_dense(A))
    np.testing.assert_allclose(solve_real(F, rhs), np.linalg.solve(A, rhs), rtol=1e-10, atol=1e-12)


def test_resolve_is_bit_identical(rng):
    F = factorize(SparseSymMatrix.from_dense(random_spd(15, rng)))
    rhs = rng.standard_normal(15)
    np.testing.assert_array_equal(F.solve(rhs), F.solve(rhs))


def test_solve_complex_components(rng):
    A = random_spd(12, rng)
    F = factorize(SparseSymMatrix.from_dense(A))
    f = rng.standard_normal(12)

    real_only = solve_complex(F, ComplexVector(f, np.zeros(12)))
    assert not np.any(real_only.im)

    twin = solve_complex(F, ComplexVector(f, f.copy()))
    np.testing.assert_array_equal(twin.re, twin.im)

    rhs = ComplexVector(f, rng.standard_normal(12))
    np.testing.assert_allclose(solve_complex(F, rhs).to_complex(), np.linalg.solve(A, rhs.to_complex()),
                               rtol=1e-10, atol=1e-12)


def test_solve_complex_is_two_real_solves(rng):
    F = factorize(SparseSymMatrix.from_dense(random_spd(6, rng)))
    solve_complex(F, ComplexVector(rng.standard_normal(6), rng.standard_normal(6)))
    assert F.solve_count == 2


def test_direct_and_cg_agree(rng):
    for _ in range(10):
        n = int(rng.integers(10, 60))
        A = SparseSymMatrix.from_dense(random_spd(n, rng, shift=1.0))
        rhs = rng.standard_normal(n)
        direct = factorize(A).solve(rhs)
        iterative = factorize(A, CG).solve(rhs)
        np.testing.assert_allclose(iterative, direct, rtol=1e-9, atol=1e-9)


def test_cg_iteration_budget():
    A = kron_sum(tridiag(30, -1.0, 2.0, -1.0))
    F = factorize(A, InnerSolveChoice(kind="cg", cg_max_iterations=2))
    assert F.method == "iterative"
    with pytest.raises(CgDidNotConverge):
        F.solve(np.ones(A.n))


def test_dimension_mismatch():
    F = factorize(tridiag(4, -1.0, 2.0, -1.0))
    with pytest.raises(DimensionMismatch):
        F.solve(np.ones(5))


def test_choice_validation():
    with pytest.raises(ConfigurationError):
        InnerSolveChoice(cg_tolerance=0.0)
    with pytest.raises(ConfigurationError):
        InnerSolveChoice(cg_max_iterations=0)
    with pytest.raises(ConfigurationError):
        InnerSolveChoice(ordering="amd")
    assert InnerSolveChoice().max_iterations_for(7) == 70


def test_fingerprint_tracks_values():
    A = tridiag(5, -1.0, 2.0, -1.0)
    assert fingerprint(A) == fingerprint(tridiag(5, -1.0, 2.0, -1.0))
    assert fingerprint(A) != fingerprint(tridiag(5, -1.0, 3.0, -1.0))
    assert fingerprint(A)[0] == 5
