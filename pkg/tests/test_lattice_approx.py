from fractions import Fraction

import hypothesis.strategies as st
import pytest
from exact_linalg import ExactLinearAlgebra, IntMatrix, infinity_norm
from exceptions import BadKError, BudgetExceededError, NotInLatticeError, RankDeficientError
from hypothesis import assume, given, settings
from lattice_approx import LatticeApproximator

EXAMPLE1_M2 = IntMatrix.from_columns([(2, 0), (3, 0), (0, 2), (0, 3)])
PRIMES_235 = IntMatrix.from_rows([[15, 10, 6]])


@pytest.fixture
def approximator():
    return LatticeApproximator()


@st.composite
def lattice_instances(draw, max_rows=2, max_cols=5, entry_bound=9):
    rows = draw(st.integers(min_value=1, max_value=max_rows))
    cols = draw(st.integers(min_value=rows, max_value=max_cols))
    entry = st.integers(min_value=-entry_bound, max_value=entry_bound)
    matrix = IntMatrix.from_rows(draw(st.lists(st.lists(entry, min_size=cols, max_size=cols), min_size=rows, max_size=rows)))
    assume(ExactLinearAlgebra.rank(matrix) == rows)
    coefficients = draw(st.lists(st.integers(min_value=-5, max_value=5), min_size=cols, max_size=cols))
    return matrix, matrix.apply(coefficients)


def test_delta_of_example1(approximator):
    assert approximator.delta(EXAMPLE1_M2) == (4, (0, 2))


def test_delta_of_one_row(approximator):
    assert approximator.delta(PRIMES_235) == (6, (2,))


def test_delta_rejects_rank_deficient_matrices(approximator):
    with pytest.raises(RankDeficientError):
        approximator.delta(IntMatrix.from_rows([[1, 2], [2, 4]]))


def test_delta_respects_the_budget():
    with pytest.raises(BudgetExceededError) as error:
        LatticeApproximator(delta_budget=2).delta(PRIMES_235)
    assert error.value.count == 3
    assert error.value.budget == 2


def test_sparse_basis_chain_of_example1(approximator):
    chain = approximator.select_sparse_basis(EXAMPLE1_M2, 3)
    assert chain.column_indices == [0, 2, 1]
    assert chain.dets == [4, 2]
    assert chain.certified_bound == 1
    assert chain.exact_from_step is None


def test_sparse_basis_chain_stops_once_exact(approximator):
    chain = approximator.select_sparse_basis(IntMatrix.from_rows([[1, 2, 3]]), 3)
    assert chain.column_indices == [0]
    assert chain.dets == [1]
    assert chain.certified_bound == 0
    assert chain.exact_from_step == 0


def test_sparse_basis_chain_stops_after_reaching_the_full_lattice(approximator):
    chain = approximator.select_sparse_basis(IntMatrix.from_rows([[4, 6, 3, 5]]), 4)
    assert chain.column_indices == [2, 0]
    assert chain.dets == [3, 1]
    assert chain.exact_from_step == 1
    # a chain running to k columns would report dets[-1]/2 = 1/2
    assert chain.certified_bound == 0


@given(lattice_instances())
@settings(max_examples=60, deadline=None)
def test_sparse_basis_chain_halves_the_determinant(instance):
    matrix, _ = instance
    approximator = LatticeApproximator()
    chain = approximator.select_sparse_basis(matrix, matrix.cols)
    for previous, current in zip(chain.dets, chain.dets[1:]):
        assert previous % current == 0
        assert 2 * current <= previous


def test_example1_all_ones_needs_every_column(approximator):
    solution = approximator.approximate_lattice(EXAMPLE1_M2, (1, 1), 3)
    assert solution.error == 1
    assert solution.certified_bound.exact_value() == 1
    assert approximator.approximate_lattice(EXAMPLE1_M2, (1, 1), 4).error == 0


def test_zero_target_is_exact(approximator):
    solution = approximator.approximate_lattice(EXAMPLE1_M2, (0, 0), 2)
    assert solution.error == 0
    assert solution.x == (0, 0, 0, 0)


def test_example2_one_column(approximator):
    solution = approximator.approximate_lattice(PRIMES_235, (3,), 1)
    assert solution.error == 3
    assert approximator.certified_bound(PRIMES_235, 1) == 3
    assert approximator.certified_bound(PRIMES_235, 2) == Fraction(3, 2)


def test_exactness_threshold(approximator):
    assert approximator.exactness_threshold(PRIMES_235) == 3
    assert approximator.exactness_threshold(IntMatrix.identity(2)) == 2
    for target in range(-20, 21):
        assert approximator.approximate_lattice(PRIMES_235, (target,), 3).error == 0


def test_target_outside_the_lattice(approximator):
    with pytest.raises(NotInLatticeError):
        approximator.approximate_lattice(IntMatrix.from_rows([[2, 4]]), (3,), 1)


def test_k_out_of_range(approximator):
    with pytest.raises(BadKError):
        approximator.approximate_lattice(EXAMPLE1_M2, (2, 2), 1)
    with pytest.raises(BadKError):
        approximator.certified_bound(EXAMPLE1_M2, 5)


@given(lattice_instances())
@settings(max_examples=150, deadline=None)
def test_error_never_exceeds_the_certified_bound(instance):
    matrix, target = instance
    approximator = LatticeApproximator()
    delta_value, _ = approximator.delta(matrix)
    previous_error = None
    for k in range(matrix.rows, matrix.cols + 1):
        solution = approximator.approximate_lattice(matrix, target, k)
        residual = tuple(value - wanted for value, wanted in zip(matrix.apply(solution.x), target))

        assert len(solution.support) <= k
        assert solution.error == infinity_norm(residual)
        assert solution.error <= Fraction(delta_value, 2 ** (k - matrix.rows + 1))
        if previous_error is not None:
            assert solution.error <= previous_error
        previous_error = solution.error


@given(lattice_instances())
@settings(max_examples=60, deadline=None)
def test_targets_are_hit_from_the_exactness_threshold_on(instance):
    matrix, target = instance
    approximator = LatticeApproximator()
    threshold = approximator.exactness_threshold(matrix)
    assume(threshold <= matrix.cols)
    assert approximator.approximate_lattice(matrix, target, threshold).error == 0


@given(
    lattice_instances(max_rows=3, max_cols=4),
    st.lists(st.fractions(min_value=-30, max_value=30, max_denominator=7), min_size=3, max_size=3),
)
@settings(max_examples=200, deadline=None)
def test_hnf_rounding_certificate(instance, target):
    matrix, _ = instance
    target = target[: matrix.rows]
    rounding = LatticeApproximator.hnf_round(matrix, target)

    assert rounding.error <= Fraction(rounding.hnf.det_lambda, 2)
    for i, value in enumerate(rounding.residual):
        assert abs(value) <= Fraction(rounding.hnf.H.entries[i][i], 2)
    assert tuple(value - wanted for value, wanted in zip(matrix.apply(rounding.x), target)) == rounding.residual


def test_lattice_determinant_is_the_gcd_of_maximal_minors():
    assert LatticeApproximator.lattice_determinant(IntMatrix.from_rows([[4, 6, 10]])) == 2
    assert LatticeApproximator.lattice_determinant(EXAMPLE1_M2) == 1
