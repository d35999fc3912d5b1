"""
Shared fixtures: random SPD pairs, small benchmark problems and an isolated cache.
"""

import numpy as np
import pytest
import scipy.sparse as sps

from splitsolve import config
from splitsolve.linalg import ComplexVector, SparseSymMatrix
from splitsolve.problems import Problem, ProblemSpec, build_example1, build_example4, build_synthetic, random_spd


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep grid-tuning results out of the working tree."""
    cache_dir = tmp_path / "cache"
    monkeypatch.setattr(config, "CACHE_DIR", str(cache_dir))
    return cache_dir


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_pair(rng, n, identical=False, singular_t=False):
    """(W, T, b) with W SPD and T SPD (or T = W, or T singular of rank n - 1)."""
    W = random_spd(n, rng)
    if identical:
        T = W
    elif singular_t:
        B = rng.standard_normal((n, n - 1))
        S = B @ B.T / n
        T = 0.5 * (S + S.T)
    else:
        T = random_spd(n, rng)
    b = ComplexVector(rng.standard_normal(n), rng.standard_normal(n))
    return SparseSymMatrix.from_dense(W), SparseSymMatrix.from_dense(T), b


def make_problem(W, T, b):
    return Problem(W, T, b, ProblemSpec("synthetic", n=W.n))


@pytest.fixture
def small_problem(rng):
    return make_problem(*make_pair(rng, 8))


@pytest.fixture
def zero_matrix():
    return lambda n: SparseSymMatrix(sps.csr_matrix((n, n)))


@pytest.fixture(scope="session")
def example1_m32():
    return build_example1(32)


@pytest.fixture(scope="session")
def example4_n64():
    return build_example4(64)


@pytest.fixture(scope="session")
def identical_synthetic():
    return build_synthetic(12, seed=3, identical=True)


def dense_solution(problem):
    A = problem.W.to_dense() + 1j * problem.T.to_dense()
    return np.linalg.solve(A, problem.b.to_complex())
