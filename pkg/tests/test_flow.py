import numpy as np
import pytest

from hamindex.corpus import trig_corpus
from hamindex.errors import EvaluationError, InvalidArgumentError
from hamindex.flow import fundamental_solution, gauss_legendre_tableau, integrate, iterate_path, monodromy
from hamindex.symplectic import CoefficientPath, constant_path, rotation
from oracles import rotation_exact

TWO_PI = 2 * np.pi


def test_zero_field_gives_identity():
    g = fundamental_solution(constant_path(np.zeros((2, 2))))
    assert np.all(g.values == np.eye(2))
    assert np.array_equal(monodromy(g), np.eye(2))


def test_identity_field_closed_form():
    g = fundamental_solution(constant_path(np.eye(2)))
    for t, v in zip(g.times[::64], g.values[::64]):
        assert np.allclose(v, rotation_exact(t), atol=1e-8)
    assert np.allclose(monodromy(g), np.eye(2), atol=1e-8)


def test_half_identity_gives_minus_identity():
    g = fundamental_solution(constant_path(0.5 * np.eye(2)))
    assert np.allclose(monodromy(g), -np.eye(2), atol=1e-8)


def test_path_starts_at_identity_exactly():
    g = fundamental_solution(constant_path(np.diag([1.0, -2.0])))
    assert np.array_equal(g.values[0], np.eye(2))
    assert np.all(np.diff(g.times) > 0)


def test_steps_validation():
    with pytest.raises(InvalidArgumentError):
        integrate(constant_path(np.eye(2)), TWO_PI, 8)
    with pytest.raises(InvalidArgumentError):
        integrate(constant_path(np.eye(2)), -1.0, 64)


def test_nonfinite_evaluation_reports_time():
    def f(t):
        return np.full((2, 2), np.nan) if t > 3.0 else np.eye(2)

    with pytest.raises(EvaluationError) as exc:
        fundamental_solution(CoefficientPath(f, TWO_PI, 1))
    assert exc.value.t > 3.0


def test_iteration_examples():
    g = fundamental_solution(constant_path(np.eye(2)))
    assert iterate_path(g, 1) is g
    g3 = iterate_path(g, 3)
    assert g3.horizon == pytest.approx(3 * TWO_PI)
    assert np.allclose(monodromy(g3), np.eye(2), atol=1e-7)
    h = fundamental_solution(constant_path(0.5 * np.eye(2)))
    assert np.allclose(monodromy(iterate_path(h, 2)), np.eye(2), atol=1e-7)


def test_iteration_rule_exact_at_samples():
    B = trig_corpus(size=1)[0]
    g = fundamental_solution(B)
    g3 = iterate_path(g, 3)
    N = len(g.times) - 1
    M = monodromy(g)
    assert np.array_equal(g3.values[2 * N + 5], g.values[5] @ (M @ M))
    assert np.allclose(monodromy(g3), np.linalg.matrix_power(M, 3), atol=1e-12)


def test_iteration_rejects_bad_m():
    g = fundamental_solution(constant_path(np.eye(2)))
    for bad in (0, -2, 1.5):
        with pytest.raises(InvalidArgumentError):
            iterate_path(g, bad)


def test_cocycle_for_constant_coefficient():
    B = np.array([[1.0, 0.3], [0.3, -0.5]])
    g = fundamental_solution(constant_path(B))
    i, j = 128, 320
    assert np.allclose(g.values[i + j], g.values[i] @ g.values[j], atol=1e-7)


def test_symplectic_along_corpus_paths():
    for B in trig_corpus(size=20):
        assert fundamental_solution(B).max_defect() <= 1e-9


def test_grid_doubling_order():
    # Gauss collocation with three stages is sixth order: errors drop by about 2^6
    B = trig_corpus(size=3)[2]
    ref = monodromy(integrate(B, TWO_PI, 2048))
    e1 = np.max(np.abs(monodromy(integrate(B, TWO_PI, 32)) - ref))
    e2 = np.max(np.abs(monodromy(integrate(B, TWO_PI, 64)) - ref))
    assert e1 / e2 > 2 ** 5


def test_tableau_one_stage_is_midpoint():
    a, b, c = gauss_legendre_tableau(1)
    assert np.allclose(a, [[0.5]]) and np.allclose(b, [1.0]) and np.allclose(c, [0.5])
