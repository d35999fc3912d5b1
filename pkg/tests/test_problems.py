import math

import numpy as np
import pytest
import scipy.linalg

from splitsolve.exceptions import (
    ConfigurationError,
    DimensionMismatch,
    NotPositiveDefinite,
    ProblemFormatError,
    SymmetryViolation,
    ZeroRightHandSide,
)
from splitsolve.linalg import ComplexVector, SparseSymMatrix, apply_system
from splitsolve.problems import (
    Problem,
    ProblemSpec,
    build_example1,
    build_example2,
    build_example3,
    build_example4,
    build_problem,
    build_synthetic,
    export_problem,
    import_problem,
    spec_for_size,
    verify_definiteness,
)
from splitsolve.solvers import SolverConfig, tscsp_solve


def test_example1_entries_at_m2():
    problem = build_example1(2)
    h = 1.0 / 3.0
    assert problem.n == 4
    assert problem.normalized
    np.testing.assert_allclose(problem.W.diagonal(), 4.0 + h * (3.0 - math.sqrt(3.0)))
    np.testing.assert_allclose(problem.T.diagonal(), 4.0 + h * (3.0 + math.sqrt(3.0)))
    assert problem.W.to_dense()[0, 1] == pytest.approx(-1.0)
    assert problem.b.re[0] == pytest.approx(h / 4.0)
    assert problem.b.im[0] == pytest.approx(-h / 4.0)
    # b_j = (1 - i) j / (tau (j + 1)^2) scaled by h^2, with tau = h
    assert problem.b.re[3] == pytest.approx(h * 4.0 / 25.0)


def test_example1_custom_tau():
    problem = build_example1(4, tau=0.5)
    assert problem.spec.tau == 0.5
    with pytest.raises(ConfigurationError):
        build_example1(4, tau=0.0)


def test_example2_is_spd_and_manufactured():
    problem = build_example2(4)
    w_min, t_min = verify_definiteness(problem)
    assert w_min > 0.0
    assert t_min > 0.0
    ones = ComplexVector(np.ones(problem.n), np.zeros(problem.n))
    expected = apply_system(problem.W, problem.T, ones).scale(1 + 1j)
    np.testing.assert_allclose(problem.b.re, expected.re)
    np.testing.assert_allclose(problem.b.im, expected.im)


def test_example2_rejects_indefinite_w():
    with pytest.raises(NotPositiveDefinite):
        build_example2(4, omega=5.0)
    problem = build_example2(4, omega=5.0, check=False)
    w_min, _ = verify_definiteness(problem)
    assert w_min < 0.0


def test_example3_structure():
    problem = build_example3(4)
    W = problem.W.to_dense()
    T = problem.T.to_dense()
    np.testing.assert_array_equal(W, W.T)
    assert scipy.linalg.eigvalsh(W)[0] > 0.0
    assert scipy.linalg.eigvalsh(T)[0] > 0.0
    assert not problem.normalized
    # first row couples to the periodic neighbour through V_c and the corner term
    assert W[0, 3] == pytest.approx(-10.0)
    assert W[0, 12] == pytest.approx(9.0 - 10.0)
    assert T[0, 3] == 0.0


def test_example3_needs_two_points():
    with pytest.raises(ConfigurationError):
        build_example3(1)


def test_example4_spectra():
    problem = build_example4(16)
    w = scipy.linalg.eigvalsh(problem.W.to_dense())
    t = scipy.linalg.eigvalsh(problem.T.to_dense())
    assert 1.0 < w[0] and w[-1] < 3.0
    assert 0.4 < t[0] and t[-1] < 3.6
    ones = ComplexVector(np.ones(16), np.zeros(16))
    expected = apply_system(problem.W, problem.T, ones)
    np.testing.assert_allclose(problem.b.re, expected.re)
    np.testing.assert_allclose(problem.b.im, expected.im)


def test_synthetic_is_reproducible():
    first = build_synthetic(10, seed=7)
    second = build_synthetic(10, seed=7)
    np.testing.assert_array_equal(first.W.to_dense(), second.W.to_dense())
    np.testing.assert_array_equal(first.T.to_dense(), second.T.to_dense())
    identical = build_synthetic(10, seed=7, identical=True)
    assert identical.T is identical.W


def test_problem_checks_dimensions_and_rhs():
    W = SparseSymMatrix.identity(3)
    with pytest.raises(DimensionMismatch):
        Problem(W, SparseSymMatrix.identity(4), ComplexVector(np.ones(3), np.zeros(3)), ProblemSpec("synthetic", n=3))
    with pytest.raises(ZeroRightHandSide):
        Problem(W, W, ComplexVector.zeros(3), ProblemSpec("synthetic", n=3))


@pytest.mark.parametrize("example, size, field", [
    ("1", 8, "m"),
    ("2", 8, "m"),
    ("3", 8, "m"),
    ("4", 64, "n"),
    ("synthetic", 6, "n"),
])
def test_spec_for_size_and_build(example, size, field):
    spec = spec_for_size(example, size)
    assert getattr(spec, field) == size
    problem = build_problem(spec)
    assert problem.n == (size * size if field == "m" else size)
    assert problem.spec.example == example


def test_unknown_example():
    with pytest.raises(ConfigurationError):
        spec_for_size("5", 8)
    with pytest.raises(ConfigurationError):
        build_problem(ProblemSpec("5", n=8))


def test_spec_label():
    assert ProblemSpec("1", m=32).label == "example-1-m32"
    assert ProblemSpec("synthetic", n=12, seed=3).label == "example-synthetic-n12-seed3"


def test_export_import_identical_pair(tmp_path):
    problem = build_synthetic(16, seed=2, identical=True)
    export_problem(problem, tmp_path / "pair")
    loaded = import_problem(tmp_path / "pair")
    assert loaded.spec == problem.spec
    np.testing.assert_array_equal(loaded.W.to_dense(), problem.W.to_dense())
    np.testing.assert_array_equal(loaded.T.to_dense(), problem.T.to_dense())
    np.testing.assert_array_equal(loaded.b.re, problem.b.re)


def test_export_import_keeps_iteration_count(tmp_path):
    problem = build_example1(8)
    export_problem(problem, tmp_path / "ex1")
    loaded = import_problem(tmp_path / "ex1")
    assert loaded.normalized
    cfg = SolverConfig(method="tscsp", alpha=0.5)
    assert tscsp_solve(loaded, cfg).iterations == tscsp_solve(problem, cfg).iterations


def test_import_rejects_asymmetric_matrix(tmp_path):
    export_problem(build_example4(2), tmp_path)
    (tmp_path / "T.mtx").write_text(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 3\n"
        "1 1 2.0\n"
        "1 2 -0.5\n"
        "2 2 2.0\n"
    )
    with pytest.raises(SymmetryViolation):
        import_problem(tmp_path)


def test_import_missing_sidecar(tmp_path):
    with pytest.raises(ProblemFormatError):
        import_problem(tmp_path)
