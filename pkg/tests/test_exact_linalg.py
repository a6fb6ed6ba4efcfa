from fractions import Fraction
from itertools import product

import hypothesis.strategies as st
import pytest
from exact_linalg import ExactLinearAlgebra, IntMatrix, round_half_up
from exceptions import NotSquareError, RankDeficientError, SingularMatrixError
from hypothesis import assume, given, settings


def matrix_strategy(min_rows=1, max_rows=3, max_extra_cols=2, entry_bound=9, square=False):
    def build(shape):
        rows, cols = shape
        entry = st.integers(min_value=-entry_bound, max_value=entry_bound)
        return st.lists(st.lists(entry, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(IntMatrix.from_rows)

    def shape(rows):
        if square:
            return st.just((rows, rows))
        return st.integers(min_value=rows, max_value=rows + max_extra_cols).map(lambda cols: (rows, cols))

    return st.integers(min_value=min_rows, max_value=max_rows).flatmap(shape).flatmap(build)


def cofactor_determinant(entries):
    if len(entries) == 1:
        return entries[0][0]
    total = 0
    for column in range(len(entries)):
        minor = [row[:column] + row[column + 1 :] for row in entries[1:]]
        total += (-1) ** column * entries[0][column] * cofactor_determinant(minor)
    return total


@given(matrix_strategy(square=True, max_rows=4))
@settings(max_examples=100)
def test_determinant_matches_cofactor_expansion(matrix):
    assert ExactLinearAlgebra.determinant(matrix) == cofactor_determinant([list(row) for row in matrix.entries])


def test_determinant_needs_square_matrix():
    with pytest.raises(NotSquareError):
        ExactLinearAlgebra.determinant(IntMatrix.from_rows([[1, 2, 3]]))


def test_determinant_of_large_entries_is_exact():
    big = 10**40
    matrix = IntMatrix.from_rows([[big, 1], [1, big]])
    assert ExactLinearAlgebra.determinant(matrix) == big * big - 1


@given(matrix_strategy())
@settings(max_examples=100)
def test_hnf_is_canonical_and_unimodular(matrix):
    assume(ExactLinearAlgebra.rank(matrix) == matrix.rows)
    result = ExactLinearAlgebra.hnf(matrix)
    hermite = result.H

    for i in range(hermite.rows):
        assert hermite.entries[i][i] > 0
        for j in range(i + 1, hermite.cols):
            assert hermite.entries[i][j] == 0
        for j in range(i):
            assert 0 <= hermite.entries[i][j] < hermite.entries[i][i]

    assert abs(ExactLinearAlgebra.determinant(result.U)) == 1
    product_columns = matrix.multiply(result.U).columns()
    assert product_columns[: matrix.rows] == hermite.columns()
    assert all(all(value == 0 for value in column) for column in product_columns[matrix.rows :])


def test_hnf_of_one_row_is_the_gcd():
    result = ExactLinearAlgebra.hnf(IntMatrix.from_rows([[15, 10, 6]]))
    assert result.H.entries == ((1,),)
    assert result.det_lambda == 1


def test_hnf_of_diagonal_lattice():
    result = ExactLinearAlgebra.hnf(IntMatrix.from_rows([[2, 0], [0, 3]]))
    assert result.diagonal == (2, 3)
    assert result.det_lambda == 6


def test_hnf_rejects_rank_deficient_matrices():
    with pytest.raises(RankDeficientError):
        ExactLinearAlgebra.hnf(IntMatrix.from_rows([[1, 2], [2, 4]]))
    with pytest.raises(RankDeficientError):
        ExactLinearAlgebra.hnf(IntMatrix.from_rows([[1], [1]]))


def test_rank():
    assert ExactLinearAlgebra.rank(IntMatrix.from_rows([[1, 2, 3], [2, 4, 6]])) == 1
    assert ExactLinearAlgebra.rank(IntMatrix.from_rows([[1, 0, 3], [0, 1, 6]])) == 2


@given(matrix_strategy(square=True), st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=3))
@settings(max_examples=100)
def test_solve_rational_solves_exactly(matrix, vector):
    assume(ExactLinearAlgebra.determinant(matrix) != 0)
    vector = vector[: matrix.rows]
    solution = ExactLinearAlgebra.solve_rational(matrix, vector)
    assert all(isinstance(value, Fraction) for value in solution)
    assert matrix.apply(solution) == tuple(vector)


def test_solve_rational_rejects_singular_matrices():
    with pytest.raises(SingularMatrixError):
        ExactLinearAlgebra.solve_rational(IntMatrix.from_rows([[1, 2], [2, 4]]), (1, 1))


def test_in_lattice_for_one_row():
    even = IntMatrix.from_rows([[4, 6]])
    assert ExactLinearAlgebra.in_lattice(even, (10,))
    assert not ExactLinearAlgebra.in_lattice(even, (7,))
    assert ExactLinearAlgebra.in_lattice(IntMatrix.from_rows([[2, 3]]), (7,))


@given(matrix_strategy(max_rows=2, entry_bound=5), st.lists(st.integers(min_value=-6, max_value=6), min_size=2, max_size=2))
@settings(max_examples=60)
def test_in_lattice_matches_brute_force(matrix, vector):
    assume(ExactLinearAlgebra.rank(matrix) == matrix.rows)
    vector = tuple(vector[: matrix.rows])
    result = ExactLinearAlgebra.hnf(matrix)
    # coefficients of H within the box suffice, since H is triangular with positive diagonal
    reachable = {
        result.H.apply(coefficients)
        for coefficients in product(range(-13, 14), repeat=matrix.rows)
    }
    assert ExactLinearAlgebra.in_lattice(matrix, vector) == (vector in reachable)


@given(matrix_strategy(max_rows=3, entry_bound=6), st.lists(st.integers(min_value=-50, max_value=50), min_size=3, max_size=3))
@settings(max_examples=100)
def test_reduce_modulo_lattice_stays_in_the_coset(matrix, vector):
    assume(ExactLinearAlgebra.rank(matrix) == matrix.rows)
    vector = tuple(vector[: matrix.rows])
    result = ExactLinearAlgebra.hnf(matrix)
    reduced = ExactLinearAlgebra.reduce_modulo_lattice(result, vector)

    assert all(0 <= reduced[i] < result.H.entries[i][i] for i in range(matrix.rows))
    difference = tuple(left - right for left, right in zip(vector, reduced))
    assert ExactLinearAlgebra.in_lattice(matrix, difference, result)


def test_pnorm_is_the_infinity_norm_of_basis_coordinates():
    basis = IntMatrix.from_rows([[2, 0], [0, 2]])
    assert ExactLinearAlgebra.pnorm(basis, (1, -3)) == Fraction(3, 2)
    assert ExactLinearAlgebra.pnorm(IntMatrix.identity(3), (0, 0, 0)) == 0


def test_round_half_up_resolves_ties_upwards():
    assert round_half_up(Fraction(1, 2)) == 1
    assert round_half_up(Fraction(-1, 2)) == 0
    assert round_half_up(Fraction(-3, 2)) == -1
    assert round_half_up(Fraction(7, 3)) == 2
    assert round_half_up(5) == 5
