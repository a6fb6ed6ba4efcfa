from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from exceptions import (
    DimensionMismatchError,
    NotSquareError,
    RankDeficientError,
    SingularMatrixError,
    ValidationError,
)
from sympy import QQ, ZZ

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.14
    from sympy.core.numbers import igcdex
from sympy.polys.matrices import DomainMatrix

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]


@dataclass(frozen=True)
class IntMatrix:
    """
    A dense matrix of arbitrary-precision integers in row-major order. Instances are immutable.
    """

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) == 0 or len(self.entries[0]) == 0:
            raise ValidationError("A matrix needs at least one row and one column")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise ValidationError("All rows of a matrix must have the same length")
            for entry in row:
                if isinstance(entry, bool) or not isinstance(entry, int):
                    raise ValidationError(f"Matrix entries must be integers, got {entry!r}")

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(entry) for entry in row) + "]" for row in self.entries) + "]"

    @staticmethod
    def from_rows(rows: Iterable[Iterable[int]]) -> IntMatrix:
        return IntMatrix(tuple(tuple(int(entry) for entry in row) for row in rows))

    @staticmethod
    def from_columns(columns: Iterable[Iterable[int]]) -> IntMatrix:
        columns = [tuple(int(entry) for entry in column) for column in columns]
        if len(columns) == 0:
            raise ValidationError("A matrix needs at least one column")
        return IntMatrix(tuple(zip(*columns)))

    @staticmethod
    def identity(size: int) -> IntMatrix:
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(size)) for i in range(size)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def column(self, index: int) -> IntVector:
        return tuple(row[index] for row in self.entries)

    def columns(self) -> list[IntVector]:
        return [self.column(index) for index in range(self.cols)]

    def select_columns(self, column_indices: Sequence[int]) -> IntMatrix:
        if len(column_indices) == 0:
            raise ValidationError("Cannot select an empty set of columns")
        return IntMatrix(tuple(tuple(row[index] for index in column_indices) for row in self.entries))

    def apply(self, vector: Sequence[int | Fraction]) -> tuple:
        """
        Returns the product of this matrix with a column vector. Works for integer and rational vectors alike.
        """
        if len(vector) != self.cols:
            raise DimensionMismatchError(f"Cannot multiply a {self.rows}x{self.cols} matrix with a vector of length {len(vector)}")
        return tuple(sum(entry * value for entry, value in zip(row, vector)) for row in self.entries)

    def multiply(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionMismatchError(f"Cannot multiply {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        return IntMatrix.from_columns(self.apply(column) for column in other.columns())

    def to_domain_matrix(self, domain=ZZ) -> DomainMatrix:
        return DomainMatrix([[domain(entry) for entry in row] for row in self.entries], (self.rows, self.cols), domain)


@dataclass(frozen=True)
class HnfResult:
    """
    Column-style Hermite normal form D·U = [H | 0] with H lower triangular, positive diagonal and off-diagonal entries
    reduced into [0, H_ii).
    """

    H: IntMatrix
    U: IntMatrix
    det_lambda: int

    @property
    def diagonal(self) -> IntVector:
        return tuple(self.H.entries[i][i] for i in range(self.H.rows))


def to_rational_vector(values: Iterable[int | Fraction | str]) -> RatVector:
    return tuple(Fraction(value) for value in values)


def infinity_norm(vector: Iterable[int | Fraction]) -> int | Fraction:
    return max((abs(value) for value in vector), default=0)


def round_half_up(value: Fraction | int) -> int:
    """The integer closest to value, ties resolved toward positive infinity."""
    return math.floor(Fraction(value) + Fraction(1, 2))


class ExactLinearAlgebra:
    @staticmethod
    def determinant(matrix: IntMatrix) -> int:
        """
        Exact determinant of a square integer matrix by fraction-free (Bareiss) elimination over the integers.

        Raises:
            NotSquareError: If the matrix is not square.
        """
        if not matrix.is_square:
            raise NotSquareError(f"The determinant needs a square matrix, got {matrix.rows}x{matrix.cols}")
        return int(matrix.to_domain_matrix(ZZ).det())

    @staticmethod
    def rank(matrix: IntMatrix) -> int:
        return matrix.to_domain_matrix(ZZ).convert_to(QQ).rank()

    @staticmethod
    def hnf(matrix: IntMatrix) -> HnfResult:
        """
        Computes the Hermite normal form of a matrix with full row rank by unimodular column operations.

        Every step replaces a pair of columns (c_i, c_j) by (x·c_i + y·c_j, -b/g·c_i + a/g·c_j), where a, b are the
        entries of both columns in the current row and x·a + y·b = g = gcd(a, b). The same operations are applied to
        the identity to obtain U.

        Args:
            matrix: The m×l matrix D.

        Returns:
            HnfResult: H, U and det(D·Z^l) = product of the diagonal of H.

        Raises:
            RankDeficientError: If D does not have full row rank.
        """
        rows, cols = matrix.rows, matrix.cols
        if cols < rows:
            raise RankDeficientError(f"A {rows}x{cols} matrix cannot have full row rank")

        work = [list(column) for column in matrix.columns()]
        transform = [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]

        def combine(i: int, j: int, a: int, b: int, c: int, d: int) -> None:
            # column_i <- a*column_i + b*column_j, column_j <- c*column_i + d*column_j
            for columns in (work, transform):
                first, second = columns[i], columns[j]
                columns[i] = [a * u + b * v for u, v in zip(first, second)]
                columns[j] = [c * u + d * v for u, v in zip(first, second)]

        for row in range(rows):
            for other in range(row + 1, cols):
                pivot, entry = work[row][row], work[other][row]
                if entry == 0:
                    continue
                x, y, g = map(int, igcdex(pivot, entry))
                combine(row, other, x, y, -entry // g, pivot // g)

            if work[row][row] == 0:
                raise RankDeficientError(f"The matrix {matrix} does not have full row rank")
            if work[row][row] < 0:
                work[row] = [-value for value in work[row]]
                transform[row] = [-value for value in transform[row]]

        for row in range(rows):
            pivot = work[row][row]
            for earlier in range(row):
                quotient = work[earlier][row] // pivot
                if quotient != 0:
                    work[earlier] = [u - quotient * v for u, v in zip(work[earlier], work[row])]
                    transform[earlier] = [u - quotient * v for u, v in zip(transform[earlier], transform[row])]

        hermite = IntMatrix.from_columns(work[:rows])
        det_lambda = int(math.prod(work[i][i] for i in range(rows)))
        return HnfResult(H=hermite, U=IntMatrix.from_columns(transform), det_lambda=det_lambda)

    @staticmethod
    def solve_rational(matrix: IntMatrix, vector: Sequence[int | Fraction]) -> RatVector:
        """
        Solves M·x = v exactly over the rationals.

        Raises:
            NotSquareError: If M is not square.
            SingularMatrixError: If M is not invertible.
            DimensionMismatchError: If v does not have M.rows entries.
        """
        if not matrix.is_square:
            raise NotSquareError(f"Expected a square matrix, got {matrix.rows}x{matrix.cols}")
        if len(vector) != matrix.rows:
            raise DimensionMismatchError(f"Expected a vector of length {matrix.rows}, got {len(vector)}")
        if ExactLinearAlgebra.determinant(matrix) == 0:
            raise SingularMatrixError(f"The matrix {matrix} is singular")

        right_hand_side = DomainMatrix(
            [[QQ(Fraction(value).numerator, Fraction(value).denominator)] for value in vector], (len(vector), 1), QQ
        )
        solution = matrix.to_domain_matrix(QQ).lu_solve(right_hand_side)
        return tuple(Fraction(int(QQ.numer(row[0])), int(QQ.denom(row[0]))) for row in solution.to_list())

    @staticmethod
    def in_lattice(matrix: IntMatrix, vector: Sequence[int], hnf_result: HnfResult | None = None) -> bool:
        """
        Decides whether the vector lies in the lattice generated by the columns of the matrix by forward substitution
        through the Hermite normal form.

        Raises:
            DimensionMismatchError: If the vector length differs from the number of rows.
            RankDeficientError: If the matrix does not have full row rank.
        """
        if len(vector) != matrix.rows:
            raise DimensionMismatchError(f"Expected a vector of length {matrix.rows}, got {len(vector)}")
        hermite = (hnf_result or ExactLinearAlgebra.hnf(matrix)).H
        coefficients: list[int] = []
        for i in range(hermite.rows):
            remainder = vector[i] - sum(hermite.entries[i][j] * coefficients[j] for j in range(i))
            quotient, rest = divmod(remainder, hermite.entries[i][i])
            if rest != 0:
                return False
            coefficients.append(quotient)
        return True

    @staticmethod
    def reduce_modulo_lattice(hnf_result: HnfResult, vector: Sequence[int]) -> IntVector:
        """
        Returns the canonical representative of vector + D·Z^l inside the box [0, H_11) × … × [0, H_mm).
        """
        hermite = hnf_result.H
        reduced = list(vector)
        for i in range(hermite.rows):
            quotient = reduced[i] // hermite.entries[i][i]
            if quotient != 0:
                for row in range(i, hermite.rows):
                    reduced[row] -= quotient * hermite.entries[row][i]
        return tuple(reduced)

    @staticmethod
    def pnorm(basis: IntMatrix, vector: Sequence[int | Fraction]) -> Fraction:
        """
        The norm whose unit ball is the parallelepiped B·[-1, 1]^m, i.e. ‖B^{-1}v‖_∞.

        Raises:
            SingularMatrixError: If B is not invertible.
        """
        return Fraction(infinity_norm(ExactLinearAlgebra.solve_rational(basis, vector)))
