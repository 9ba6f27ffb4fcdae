import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamindex import galerkin
from hamindex.corpus import positive_corpus, random_constant_symmetric, trig_corpus
from hamindex.errors import InvalidArgumentError, NonConvergenceError
from hamindex.flow import fundamental_solution, monodromy
from hamindex.index import (IndexPair, assemble_galerkin_form, constant_block_oracle, index_counts,
                            maslov_index, maslov_index_galerkin, maslov_index_report)
from hamindex.symplectic import constant_path, kernel_dimension, trig_path
from oracles import constant_index_closed

TWO_PI = 2 * np.pi


def test_zero_form_spectrum_m1():
    form = assemble_galerkin_form(constant_path(np.zeros((2, 2))), TWO_PI, 1)
    assert np.allclose(np.sort(form.eigenvalues()), [-1, -1, 0, 0, 1, 1], atol=1e-12)


def test_b_i_form_is_mode_diagonal():
    b = 0.7
    form = assemble_galerkin_form(constant_path(b * np.eye(2)), TWO_PI, 3)
    expected = np.repeat(TWO_PI * (galerkin.modes(3) - b), 2)
    # the j = 0 entry carries the same formula: 0 - b tau
    assert np.allclose(form.F, np.diag(expected), atol=1e-10)


def test_form_symmetric(rng):
    B = trig_corpus(size=4)[3]
    F = assemble_galerkin_form(B, TWO_PI, 6).F
    assert np.allclose(F, F.T, atol=1e-10)


def test_index_counts_examples():
    zero = assemble_galerkin_form(constant_path(np.zeros((2, 2))), TWO_PI, 2)
    assert index_counts(zero, 0.5) == (4, 4, 2)
    half = assemble_galerkin_form(constant_path(0.5 * np.eye(2)), TWO_PI, 2)
    assert index_counts(half, 1e-3)[2] == 0
    assert index_counts(zero, 1e3) == (0, 0, zero.dim)
    with pytest.raises(InvalidArgumentError):
        index_counts(zero, 0.0)


def test_counts_sum_to_dimension():
    B = trig_corpus(size=2)[1]
    form = assemble_galerkin_form(B, TWO_PI, 5)
    for d in (1e-3, 0.1, 1.0):
        assert sum(index_counts(form, d)) == (2 * 5 + 1) * 2 * B.n


def test_galerkin_examples():
    assert maslov_index_galerkin(constant_path(np.zeros((2, 2))), TWO_PI, 8) == IndexPair(-1, 2)
    assert maslov_index_galerkin(constant_path(0.5 * np.eye(2)), TWO_PI, 8) == IndexPair(1, 0)
    assert maslov_index_galerkin(constant_path(1.5 * np.eye(2)), TWO_PI, 8) == IndexPair(3, 0)


def test_maslov_index_identity():
    assert maslov_index(constant_path(np.eye(2))) == IndexPair(1, 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_coefficient(n):
    assert tuple(maslov_index(constant_path(np.zeros((2 * n, 2 * n))))) == (-n, 2 * n)


def test_perturbed_coefficient_self_consistent(rng):
    S = rng.normal(size=(2, 2))
    S = S + S.T
    B = trig_path(0.5 * np.eye(2), [0.1 * S], [np.zeros((2, 2))])
    rep = maslov_index_report(B)
    assert rep.pair.nu == kernel_dimension(monodromy(fundamental_solution(B)) - np.eye(2), 1e-8)
    assert (rep.levels[-1]["i"], rep.levels[-1]["nu"]) == (rep.levels[-2]["i"], rep.levels[-2]["nu"])


def test_oracle_examples():
    assert constant_block_oracle(0.5 * np.eye(2), TWO_PI, 2) == IndexPair(1, 0)
    assert constant_block_oracle(np.zeros((4, 4))) == IndexPair(-2, 4)
    D = np.diag([1.0, -1.0])
    assert constant_block_oracle(D) == maslov_index_galerkin(constant_path(D), TWO_PI, 32)


@given(st.sampled_from([0, 0.25, 0.5, 1, 1.5, 2.5]), st.integers(1, 3))
def test_constant_closed_forms(b, n):
    assert tuple(maslov_index(constant_path(b * np.eye(2 * n)))) == constant_index_closed(b, n)
    assert tuple(constant_block_oracle(b * np.eye(2 * n))) == constant_index_closed(b, n)


@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 2))
def test_oracle_agreement_random_constant(seed, n):
    B = random_constant_symmetric(np.random.default_rng(seed), n)
    assert maslov_index(constant_path(B)) == constant_block_oracle(B)


def test_nonconvergence_reports_diagnostic():
    with pytest.raises(NonConvergenceError) as exc:
        maslov_index_report(constant_path(np.eye(2)), max_level=8)
    assert "levels" in exc.value.diagnostic


def test_nullity_consistency_small_corpus():
    for B in trig_corpus(size=10):
        rep = maslov_index_report(B)
        assert rep.pair.nu == kernel_dimension(rep.monodromy - np.eye(2 * B.n), 1e-8)
        assert 0 <= rep.pair.nu <= 2 * B.n


def test_positive_definite_bound_small_corpus():
    for B in positive_corpus(size=10):
        assert maslov_index(B).i >= B.n


def test_form_scales_with_period():
    # a constant b on period 2 pi k behaves like b k on period 2 pi
    B = constant_path(0.3 * np.eye(2))
    assert maslov_index_report(B.with_period(3 * TWO_PI), 3 * TWO_PI).pair == maslov_index(
        constant_path(0.9 * np.eye(2)))


def test_hyperbolic_monodromy_nullity():
    # |gamma(2 pi)| is near 1e9 here; the raw relative SVD threshold would report nu = 2
    from hamindex.index import monodromy_nullity

    B = random_constant_symmetric(np.random.default_rng(7630), 2)
    M = monodromy(fundamental_solution(constant_path(B)))
    assert np.linalg.norm(M, 2) > 1e8
    assert monodromy_nullity(M) == 0
    assert maslov_index(constant_path(B)) == constant_block_oracle(B)


def test_monodromy_nullity_jordan_and_identity():
    from hamindex.index import monodromy_nullity

    assert monodromy_nullity(np.eye(4)) == 4
    assert monodromy_nullity(np.array([[1.0, 1.0], [0.0, 1.0]])) == 1
    assert monodromy_nullity(-np.eye(2)) == 0
