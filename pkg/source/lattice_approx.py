import math
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from approximation_classes import NormTag, RootBound, RoundingResult, SparseBasisChain, SparseSolution
from environment_variable_getter import EnvironmentVariableGetter
from exact_linalg import ExactLinearAlgebra, IntMatrix, IntVector, infinity_norm, round_half_up, to_rational_vector
from exceptions import (
    BadKError,
    BudgetExceededError,
    DimensionMismatchError,
    NotInLatticeError,
    RankDeficientError,
)
from logger import LoggerMixin

DEFAULT_BUDGET = 1_000_000


class LatticeApproximator(LoggerMixin):
    """
    Sparse integer approximation of a target b ∈ A·Z^n: pick few columns of A whose lattice is as fine as possible and
    round b into that lattice through its Hermite normal form.
    """

    def __init__(self, delta_budget: Optional[int] = None):
        super().__init__()

        if delta_budget is None:
            budget = EnvironmentVariableGetter.get_int("SPARSEAPPROX_BUDGET", DEFAULT_BUDGET)
            delta_budget = EnvironmentVariableGetter.get_int("SPARSEAPPROX_DELTA_BUDGET", budget)
        self.delta_budget = delta_budget

    def delta(self, matrix: IntMatrix) -> tuple[int, tuple[int, ...]]:
        """
        Computes the smallest absolute determinant over all invertible m×m submatrices of A.

        Args:
            matrix: The m×n matrix A.

        Returns:
            tuple[int, tuple[int, ...]]: The minimum and the lexicographically smallest column set attaining it.

        Raises:
            RankDeficientError: If A does not have full row rank.
            BudgetExceededError: If there are more column subsets than the configured budget allows.
        """
        rows, cols = matrix.rows, matrix.cols
        if cols < rows or ExactLinearAlgebra.rank(matrix) < rows:
            raise RankDeficientError(f"The matrix {matrix} does not have full row rank")

        subset_count = math.comb(cols, rows)
        if subset_count > self.delta_budget:
            raise BudgetExceededError("column subsets", subset_count, self.delta_budget)

        best_value, best_indices = None, None
        for indices in combinations(range(cols), rows):
            value = abs(ExactLinearAlgebra.determinant(matrix.select_columns(indices)))
            self.log.trace(f"|det A_{indices}| = {value}")
            if value != 0 and (best_value is None or value < best_value):
                best_value, best_indices = value, indices
                if best_value == 1:
                    break

        self.log.debug(f"delta = {best_value} attained by the columns {best_indices}")
        return best_value, best_indices

    @staticmethod
    def hnf_round(matrix: IntMatrix, target: Sequence[int | Fraction]) -> RoundingResult:
        """
        Rounds d into the lattice D·Z^l coordinate by coordinate along the triangular Hermite normal form. Every
        coordinate of the residual is at most H_ii/2 in absolute value, thus the ∞-error is at most det(D·Z^l)/2.

        Raises:
            RankDeficientError: If D does not have full row rank.
            DimensionMismatchError: If d does not have one entry per row of D.
        """
        if len(target) != matrix.rows:
            raise DimensionMismatchError(f"Expected a target of length {matrix.rows}, got {len(target)}")
        target = to_rational_vector(target)
        hnf_result = ExactLinearAlgebra.hnf(matrix)
        hermite = hnf_result.H

        z: list[int] = []
        for i in range(hermite.rows):
            remainder = target[i] - sum(hermite.entries[i][j] * z[j] for j in range(i))
            z.append(round_half_up(remainder / hermite.entries[i][i]))

        x = hnf_result.U.apply(z + [0] * (matrix.cols - matrix.rows))
        residual = tuple(value - wanted for value, wanted in zip(matrix.apply(x), target))
        return RoundingResult(x=x, error=Fraction(infinity_norm(residual)), residual=residual, hnf=hnf_result)

    @staticmethod
    def lattice_determinant(matrix: IntMatrix) -> int:
        """det(D·Z^l), which equals the gcd of all maximal minors of D."""
        return ExactLinearAlgebra.hnf(matrix).det_lambda

    @staticmethod
    def _validate_k(matrix: IntMatrix, k: int) -> None:
        if k < matrix.rows or k > matrix.cols:
            raise BadKError(f"k must lie in [{matrix.rows}, {matrix.cols}], got {k}")

    def select_sparse_basis(self, matrix: IntMatrix, k: int) -> SparseBasisChain:
        """
        Builds a chain of column sets starting at a basis of minimal determinant. Each step adds the column outside the
        current lattice that makes the next lattice as fine as possible (lowest index on ties). The new lattice contains
        the old one, so its determinant divides the old one and is at most half of it.

        Once the chain lattice equals A·Z^n every target is represented exactly; the chain stops there and the certified
        bound drops to 0. This replaces dets[-1]/2, the bound a chain of full length would report, by the tighter value
        0, and the returned chain may hold fewer than k columns.

        Raises:
            RankDeficientError: If A does not have full row rank.
            BadKError: If k is not within [m, n].
        """
        self._validate_k(matrix, k)
        delta_value, basis_indices = self.delta(matrix)
        full_lattice_determinant = self.lattice_determinant(matrix)

        column_indices = list(basis_indices)
        dets = [delta_value]
        exact_from_step = 0 if delta_value == full_lattice_determinant else None

        for step in range(1, k - matrix.rows + 1):
            if exact_from_step is not None:
                break
            current = matrix.select_columns(column_indices)
            current_hnf = ExactLinearAlgebra.hnf(current)

            best_index, best_det = None, None
            for index in range(matrix.cols):
                if index in column_indices:
                    continue
                if ExactLinearAlgebra.in_lattice(current, matrix.column(index), current_hnf):
                    continue
                candidate_det = self.lattice_determinant(matrix.select_columns(column_indices + [index]))
                self.log.trace(f"Step {step}: adding column {index} gives det {candidate_det}")
                if best_det is None or candidate_det < best_det:
                    best_index, best_det = index, candidate_det

            column_indices.append(best_index)
            dets.append(best_det)
            self.log.debug(f"Step {step}: added column {best_index}, det {dets[-2]} -> {best_det}")
            if best_det == full_lattice_determinant:
                exact_from_step = step

        certified_bound = Fraction(0) if exact_from_step is not None else Fraction(dets[-1], 2)
        return SparseBasisChain(
            column_indices=column_indices, dets=dets, certified_bound=certified_bound, exact_from_step=exact_from_step
        )

    def certified_bound(self, matrix: IntMatrix, k: int) -> Fraction:
        """δ(A)/2^(k-m+1), the worst case error guaranteed for k columns."""
        self._validate_k(matrix, k)
        delta_value, _ = self.delta(matrix)
        return Fraction(delta_value, 2 ** (k - matrix.rows + 1))

    def exactness_threshold(self, matrix: IntMatrix) -> int:
        """
        The least k with δ(A)/2^(k-m+1) < 1. From there on every integer target in A·Z^n is hit exactly. The value may
        exceed n, in which case the guarantee does not apply to A.
        """
        delta_value, _ = self.delta(matrix)
        return matrix.rows - 1 + delta_value.bit_length()

    def approximate_lattice(self, matrix: IntMatrix, target: IntVector, k: int) -> SparseSolution:
        """
        Approximates b ∈ A·Z^n with at most k non-zero integer coefficients.

        Every prefix of the column chain is rounded and the best result is kept, so the error never increases with k.

        Args:
            matrix: The m×n matrix A with full row rank.
            target: The target b, which has to lie in A·Z^n.
            k: The sparsity, m <= k <= n.

        Returns:
            SparseSolution: The coefficients, the ∞-error and the certified bound δ(A)/2^(k-m+1).

        Raises:
            NotInLatticeError: If b is not in A·Z^n.
            BadKError: If k is not within [m, n].
        """
        self.log.info(f"Approximating {target} with {k} of the {matrix.cols} columns of a {matrix.rows}-row matrix")
        if len(target) != matrix.rows:
            raise DimensionMismatchError(f"Expected a target of length {matrix.rows}, got {len(target)}")
        self._validate_k(matrix, k)
        if not ExactLinearAlgebra.in_lattice(matrix, target):
            raise NotInLatticeError(f"The target {target} is not in the lattice generated by {matrix}")

        chain = self.select_sparse_basis(matrix, k)

        best_x, best_error = None, None
        for prefix_length in range(matrix.rows, len(chain.column_indices) + 1):
            prefix = chain.column_indices[:prefix_length]
            rounding = self.hnf_round(matrix.select_columns(prefix), target)
            if best_error is None or rounding.error < best_error:
                best_x = [0] * matrix.cols
                for index, value in zip(prefix, rounding.x):
                    best_x[index] = value
                best_error = rounding.error

        x = tuple(best_x)
        error = Fraction(infinity_norm(value - wanted for value, wanted in zip(matrix.apply(x), target)))
        bound = Fraction(chain.dets[0], 2 ** (k - matrix.rows + 1))
        self.log.info(f"Reached an error of {error} (certified bound {bound}) with support {sorted(set(chain.column_indices))}")
        return SparseSolution(
            x=x,
            error=error,
            norm_tag=NormTag.LINF,
            certified_bound=RootBound.rational(bound),
            column_indices=tuple(chain.column_indices),
        )
