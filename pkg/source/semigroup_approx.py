from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from approximation_classes import NormTag, RootBound, SemigroupRepresentation, SparseSolution
from environment_variable_getter import EnvironmentVariableGetter
from exact_linalg import ExactLinearAlgebra, IntMatrix, IntVector, RatVector, infinity_norm, round_half_up
from exceptions import (
    BadInputError,
    BadKError,
    BudgetExceededError,
    DimensionMismatchError,
    InternalPigeonholeViolation,
    NoWitnessError,
    NotSimplicialError,
    NotSpanningError,
    SingularMatrixError,
)
from lattice_approx import DEFAULT_BUDGET, LatticeApproximator
from logger import LoggerMixin


@dataclass(frozen=True)
class SemigroupInstance:
    """
    A matrix A together with m of its columns forming the basis B. All errors of semigroup approximations are measured
    in the norm ‖v‖_P(B) = ‖B^-1 v‖_∞ whose unit ball is the parallelepiped spanned by B.

    Use SemigroupInstance.build, it derives coordinates, mu and the simplicial flag from A and the basis indices.
    """

    matrix: IntMatrix
    basis_indices: tuple[int, ...]
    basis: IntMatrix
    basis_determinant: int
    coordinates: tuple[RatVector, ...]
    mu: Fraction
    simplicial: bool

    @staticmethod
    def build(matrix: IntMatrix, basis_indices: Sequence[int]) -> SemigroupInstance:
        basis_indices = tuple(basis_indices)
        if len(basis_indices) != matrix.rows or len(set(basis_indices)) != matrix.rows:
            raise BadInputError(f"Expected {matrix.rows} distinct basis indices, got {basis_indices}")
        if any(index < 0 or index >= matrix.cols for index in basis_indices):
            raise BadInputError(f"Basis indices {basis_indices} out of range for {matrix.cols} columns")

        basis = matrix.select_columns(basis_indices)
        determinant = ExactLinearAlgebra.determinant(basis)
        if determinant == 0:
            raise SingularMatrixError(f"The basis columns {basis_indices} are linearly dependent")

        coordinates = tuple(ExactLinearAlgebra.solve_rational(basis, column) for column in matrix.columns())
        return SemigroupInstance(
            matrix=matrix,
            basis_indices=basis_indices,
            basis=basis,
            basis_determinant=abs(determinant),
            coordinates=coordinates,
            mu=max(Fraction(infinity_norm(coordinate)) for coordinate in coordinates),
            simplicial=all(value >= 0 for coordinate in coordinates for value in coordinate),
        )

    @staticmethod
    def from_vector(values: Sequence[int], basis_index: int = 0) -> SemigroupInstance:
        """The one-row instance of a knapsack vector a with basis a_(basis_index)."""
        return SemigroupInstance.build(IntMatrix.from_rows([values]), (basis_index,))

    @property
    def m(self) -> int:
        return self.matrix.rows

    @property
    def n(self) -> int:
        return self.matrix.cols

    @property
    def non_basis_indices(self) -> list[int]:
        return [index for index in range(self.n) if index not in self.basis_indices]

    def require_simplicial(self) -> None:
        if not self.simplicial:
            raise NotSimplicialError(f"Not every column of {self.matrix} lies in the cone of the basis {self.basis_indices}")

    def error_of(self, x: Sequence[int], target: Sequence[int]) -> Fraction:
        """‖Ax - b‖_P(B), recomputed from scratch."""
        difference = tuple(value - wanted for value, wanted in zip(self.matrix.apply(x), target))
        return ExactLinearAlgebra.pnorm(self.basis, difference)

    def assemble(self, representation: SemigroupRepresentation) -> IntVector:
        x = list(representation.coefficients)
        for position, index in enumerate(self.basis_indices):
            x[index] += representation.basis_coefficients[position]
        return tuple(x)

    def split(self, coefficients: Sequence[int]) -> SemigroupRepresentation:
        if len(coefficients) != self.n:
            raise DimensionMismatchError(f"Expected {self.n} coefficients, got {len(coefficients)}")
        if any(value < 0 for value in coefficients):
            raise BadInputError(f"Semigroup coefficients must be non-negative, got {tuple(coefficients)}")
        non_basis = [0 if index in self.basis_indices else value for index, value in enumerate(coefficients)]
        return SemigroupRepresentation(
            basis_coefficients=[coefficients[index] for index in self.basis_indices], coefficients=non_basis
        )


@dataclass(frozen=True)
class SubsumState:
    """A subset of the current generators, as a bit mask over the support, and the B-coordinates of its sum."""

    subset: int
    coordinates: RatVector


class SylvesterSequence:
    @staticmethod
    def term(index: int) -> int:
        """t_0 = 1 and t_i = t_(i-1)·(t_(i-1) + 1), i.e. 1, 2, 6, 42, 1806, ..."""
        if index < 0:
            raise BadInputError(f"Sylvester terms are indexed from 0, got {index}")
        value = 1
        for _ in range(index):
            value = value * (value + 1)
        return value

    @staticmethod
    def phi(n: int) -> Fraction:
        """φ(n) = Σ_{i=1..n} 1/t_i, with φ(0) = 0."""
        if n < 0:
            raise BadInputError(f"φ is defined for n >= 0, got {n}")
        return sum((Fraction(1, SylvesterSequence.term(index)) for index in range(1, n + 1)), Fraction(0))

    @staticmethod
    def k2_ratio(n: int) -> Fraction:
        """φ(n-2)/(2φ(n-2)+1), the worst case error for two columns in units of a_1."""
        phi = SylvesterSequence.phi(n - 2)
        return phi / (2 * phi + 1)


class SemigroupApproximator(LoggerMixin):
    def __init__(self, budget: Optional[int] = None):
        super().__init__()

        self.lattice_approximator = LatticeApproximator(delta_budget=budget)
        if budget is None:
            budget = EnvironmentVariableGetter.get_int("SPARSEAPPROX_BUDGET", DEFAULT_BUDGET)
        self.budget = budget
        self.coefficient_cap = EnvironmentVariableGetter.get_int("SPARSEAPPROX_COEFFICIENT_CAP", 64)

    def approximate_spanning(self, matrix: IntMatrix, target: IntVector, k: int) -> SparseSolution:
        """
        Non-negative sparse approximation for a matrix whose columns positively span R^m.

        A column chain of k-m columns approximates b with integer (possibly negative) coefficients. At most m further
        columns express -(a_1 + ... + a_m) non-negatively for the first m chain columns a_1, ..., a_m. With them every
        negative entry x_l is rewritten as x_l·a_l = Σ L·ν_j·a_j + (1-L)·x_l·a_l with non-negative integers L·ν_j.

        Args:
            matrix: The m×n matrix A, its columns have to span R^m positively.
            target: The target b ∈ A·Z^n.
            k: The sparsity, at least 2m.

        Returns:
            SparseSolution: Non-negative coefficients with ‖Ax - b‖_∞ <= δ(A)/2^(k-2m+1).

        Raises:
            BadKError: If k < 2m.
            NotSpanningError: If the columns do not span R^m positively.
            NotInLatticeError: If b is not in A·Z^n.
        """
        rows = matrix.rows
        if k < 2 * rows:
            raise BadKError(f"Non-negative approximation of a spanning matrix needs k >= 2m = {2 * rows}, got {k}")

        lattice_k = min(k - rows, matrix.cols)
        lattice_solution = self.lattice_approximator.approximate_lattice(matrix, target, lattice_k)
        chain_basis = list(lattice_solution.column_indices[:rows])
        basis = matrix.select_columns(chain_basis)

        negative_basis_sum = tuple(-sum(values) for values in basis.entries)
        caratheodory_indices, caratheodory_coefficients = self._find_caratheodory_columns(matrix, negative_basis_sum)
        self.log.debug(
            f"-(sum of columns {chain_basis}) = Σ {caratheodory_coefficients} · a_{caratheodory_indices} with non-negative coefficients"
        )

        x = [0] * matrix.cols
        for index, value in enumerate(lattice_solution.x):
            if value >= 0:
                x[index] += value
                continue

            # x_l·a_l = B·(c + t·1) + t·Σ y_j·a_j with t = max(-c_i), every coefficient non-negative
            coordinates = ExactLinearAlgebra.solve_rational(basis, tuple(value * entry for entry in matrix.column(index)))
            shift = max(Fraction(0), max(-coordinate for coordinate in coordinates))
            weights: dict[int, Fraction] = {}
            for position, column_index in enumerate(chain_basis):
                weights[column_index] = weights.get(column_index, Fraction(0)) + coordinates[position] + shift
            for position, column_index in enumerate(caratheodory_indices):
                weights[column_index] = weights.get(column_index, Fraction(0)) + shift * caratheodory_coefficients[position]

            lifting = math.lcm(*(weight.denominator for weight in weights.values()))
            x[index] += (1 - lifting) * value
            for column_index, weight in weights.items():
                x[column_index] += int(lifting * weight)
            self.log.trace(f"Lifted the negative entry x_{index} = {value} with L = {lifting}")

        x = tuple(x)
        error = Fraction(infinity_norm(value - wanted for value, wanted in zip(matrix.apply(x), target)))
        delta_value, _ = self.lattice_approximator.delta(matrix)
        bound = Fraction(delta_value, 2 ** (k - 2 * rows + 1))
        return SparseSolution(x=x, error=error, norm_tag=NormTag.LINF, certified_bound=RootBound.rational(bound))

    def _find_caratheodory_columns(self, matrix: IntMatrix, vector: IntVector) -> tuple[tuple[int, ...], RatVector]:
        subset_count = math.comb(matrix.cols, matrix.rows)
        if subset_count > self.budget:
            raise BudgetExceededError("column subsets", subset_count, self.budget)

        for indices in combinations(range(matrix.cols), matrix.rows):
            candidate = matrix.select_columns(indices)
            if ExactLinearAlgebra.determinant(candidate) == 0:
                continue
            coefficients = ExactLinearAlgebra.solve_rational(candidate, vector)
            if all(value >= 0 for value in coefficients):
                return indices, coefficients

        raise NotSpanningError(f"The columns of {matrix} do not span the whole space positively")

    def reduce_to_S(self, instance: SemigroupInstance, coefficients: Sequence[int]) -> tuple[list[int], list[int]]:  # noqa: N802
        """
        Shrinks the non-basis coefficients until their sum is at most |det B| without changing the represented vector.

        The generators are laid out as a sequence (a_i repeated λ_i times) and scanned through their partial sums. Among
        |det B| + 1 partial sums two fall into the same coset of B·Z^m, the block between them is a non-negative integer
        combination of B and is moved onto the basis coefficients.

        Args:
            instance: A simplicial instance.
            coefficients: λ over all n columns, zero on the basis columns.

        Returns:
            tuple[list[int], list[int]]: The reduced λ' and the credit over the basis columns with A·λ = A·λ' + B·credit.

        Raises:
            NotSimplicialError: If a column lies outside the cone of the basis.
            BadInputError: If λ is non-zero on a basis column.
        """
        instance.require_simplicial()
        if any(coefficients[index] != 0 for index in instance.basis_indices):
            raise BadInputError("reduce_to_S expects zero coefficients on the basis columns")

        reduced = list(coefficients)
        credit = [0] * instance.m
        basis_hnf = ExactLinearAlgebra.hnf(instance.basis)
        determinant = instance.basis_determinant

        while sum(reduced) > determinant:
            sequence = [index for index in instance.non_basis_indices for _ in range(reduced[index])][: determinant + 1]

            seen = {ExactLinearAlgebra.reduce_modulo_lattice(basis_hnf, (0,) * instance.m): 0}
            partial_sum = [0] * instance.m
            block = None
            for position, index in enumerate(sequence, start=1):
                partial_sum = [value + entry for value, entry in zip(partial_sum, instance.matrix.column(index))]
                coset = ExactLinearAlgebra.reduce_modulo_lattice(basis_hnf, partial_sum)
                if coset in seen:
                    block = sequence[seen[coset] : position]
                    break
                seen[coset] = position

            if block is None:
                raise InternalPigeonholeViolation(f"No repeated coset among {len(sequence) + 1} partial sums")

            block_sum = [sum(instance.matrix.column(index)[row] for index in block) for row in range(instance.m)]
            block_coordinates = ExactLinearAlgebra.solve_rational(instance.basis, block_sum)
            for index in block:
                reduced[index] -= 1
            for position, value in enumerate(block_coordinates):
                credit[position] += int(value)
            self.log.trace(f"Moved a block of {len(block)} generators onto the basis, credit {list(block_coordinates)}")

        return reduced, credit

    @staticmethod
    def support_reduction_increment(instance: SemigroupInstance, support_size: int) -> RootBound:
        """
        The error of one merge step with support_size non-basis generators: ((μ·|det B|)^(m-1) / 2^support_size)^(1/m).
        """
        radicand = (instance.mu * instance.basis_determinant) ** (instance.m - 1) / Fraction(2**support_size)
        return RootBound(((Fraction(1), radicand),), instance.m)

    @staticmethod
    def sparsity_bound(instance: SemigroupInstance, k: int, n: Optional[int] = None) -> RootBound:
        """
        Sum of the merge bounds while the support shrinks from n-m to k-m, which equals
        1/(2^(1/m)-1) · (2^(-(k-m)/m) - 2^(-(n-m)/m)) · (μ·|det B|)^((m-1)/m).
        """
        n = instance.n if n is None else n
        terms = tuple(
            SemigroupApproximator.support_reduction_increment(instance, support_size).terms[0]
            for support_size in range(max(k - instance.m, 0) + 1, n - instance.m + 1)
        )
        return RootBound(terms, instance.m)

    def reduce_support_once(
        self, instance: SemigroupInstance, representation: SemigroupRepresentation
    ) -> tuple[SemigroupRepresentation, Fraction]:
        """
        Removes at least one generator from the non-basis support at a bounded cost.

        With the generators ã_i = λ_i·a_i of the support, two subsets I and J are searched (Gray-code order, first hit
        wins) such that Σ_I ã - Σ_J ã plus a non-negative combination of B has P(B)-norm at most
        ((μ·|det B|)^(m-1) / 2^s)^(1/m), s being the support size. Adding that vector doubles the coefficients on I\\J and
        clears those on J\\I. Such a pair exists by counting incomparable subsums, running out of candidates is a bug.

        Returns:
            tuple[SemigroupRepresentation, Fraction]: The new representation and the P(B)-norm of the change.

        Raises:
            NotSimplicialError: If a column lies outside the cone of the basis.
            InternalPigeonholeViolation: If no pair of subsets meets the bound.
        """
        instance.require_simplicial()
        support = representation.non_basis_support
        if len(support) == 0:
            return representation, Fraction(0)

        generators = [
            tuple(representation.coefficients[index] * value for value in instance.coordinates[index]) for index in support
        ]
        states = self._gray_code_subsums(generators, instance.m)
        increment_bound = self.support_reduction_increment(instance, len(support))
        radicand = increment_bound.terms[0][1]

        for first in states:
            for second in states:
                if second.subset & ~first.subset == 0:
                    continue
                difference = [left - right for left, right in zip(first.coordinates, second.coordinates)]
                basis_multiples = [max(0, round_half_up(-value)) for value in difference]
                error = max(abs(value + multiple) for value, multiple in zip(difference, basis_multiples))
                if error**instance.m > radicand:
                    continue

                coefficients = list(representation.coefficients)
                for position, index in enumerate(support):
                    in_first, in_second = (first.subset >> position) & 1, (second.subset >> position) & 1
                    if in_first and not in_second:
                        coefficients[index] *= 2
                    elif in_second and not in_first:
                        coefficients[index] = 0
                basis_coefficients = [
                    value + multiple for value, multiple in zip(representation.basis_coefficients, basis_multiples)
                ]
                self.log.debug(
                    f"Merged subsets {first.subset:b} and {second.subset:b} of the support {support}, "
                    f"added {basis_multiples} basis columns, increment {error} (bound {increment_bound})"
                )
                return SemigroupRepresentation(basis_coefficients=basis_coefficients, coefficients=coefficients), error

        raise InternalPigeonholeViolation(
            f"None of the {len(states)} subsums of the support {support} allows a merge within {increment_bound}"
        )

    @staticmethod
    def _gray_code_subsums(generators: list[RatVector], dimension: int) -> list[SubsumState]:
        states = [SubsumState(subset=0, coordinates=(Fraction(0),) * dimension)]
        current, coordinates = 0, [Fraction(0)] * dimension
        for step in range(1, 2 ** len(generators)):
            subset = step ^ (step >> 1)
            toggled = (subset ^ current).bit_length() - 1
            sign = 1 if subset & (1 << toggled) else -1
            coordinates = [value + sign * entry for value, entry in zip(coordinates, generators[toggled])]
            current = subset
            states.append(SubsumState(subset=subset, coordinates=tuple(coordinates)))
        return states

    def basis_rounding(self, instance: SemigroupInstance, target: Sequence[int]) -> SparseSolution:
        """Approximates b with the basis columns only, rounding every B-coordinate to the nearest non-negative integer."""
        coordinates = ExactLinearAlgebra.solve_rational(instance.basis, target)
        x = [0] * instance.n
        for position, index in enumerate(instance.basis_indices):
            x[index] = max(0, round_half_up(coordinates[position]))
        x = tuple(x)
        return SparseSolution(x=x, error=instance.error_of(x, target), norm_tag=NormTag.PNORM)

    def find_witness(self, instance: SemigroupInstance, target: Sequence[int]) -> IntVector:
        """
        Searches non-negative integer coefficients λ with A·λ = b.

        For a simplicial instance every non-zero column adds at least 1/|det B| to the coordinate sum of B^-1·(Aλ), so
        Σλ <= |det B|·1ᵀB^-1b and the search is complete. Other instances are searched up to SPARSEAPPROX_COEFFICIENT_CAP
        per coefficient.

        Raises:
            NoWitnessError: If no representation exists within the searched range.
            BudgetExceededError: If the search visits more nodes than the budget allows.
        """
        if len(target) != instance.m:
            raise DimensionMismatchError(f"Expected a target of length {instance.m}, got {len(target)}")
        self.log.info(f"Searching a non-negative representation of {tuple(target)}")

        columns = [index for index in instance.non_basis_indices if any(value != 0 for value in instance.coordinates[index])]
        start = ExactLinearAlgebra.solve_rational(instance.basis, target)
        if instance.simplicial:
            if any(value < 0 for value in start):
                raise NoWitnessError(f"{tuple(target)} lies outside the cone of the basis")
            total_cap = int(sum(start) * instance.basis_determinant)
        else:
            total_cap = self.coefficient_cap * len(columns)

        visited = 0
        chosen = [0] * instance.n

        def search(position: int, remaining: list[Fraction], used: int) -> bool:
            nonlocal visited
            visited += 1
            if visited > self.budget:
                raise BudgetExceededError("witness search nodes", visited, self.budget)

            if position == len(columns):
                if all(value >= 0 and value.denominator == 1 for value in remaining):
                    for basis_position, index in enumerate(instance.basis_indices):
                        chosen[index] = int(remaining[basis_position])
                    return True
                return False

            index = columns[position]
            limit = total_cap - used if instance.simplicial else self.coefficient_cap
            for value in range(limit + 1):
                if instance.simplicial and any(entry < 0 for entry in remaining):
                    break
                chosen[index] = value
                if search(position + 1, remaining, used + value):
                    return True
                remaining = [entry - coordinate for entry, coordinate in zip(remaining, instance.coordinates[index])]
            chosen[index] = 0
            return False

        if not search(0, list(start), 0):
            raise NoWitnessError(f"No non-negative representation of {tuple(target)} found")
        self.log.debug(f"Found the witness {tuple(chosen)} after {visited} nodes")
        return tuple(chosen)

    def approximate_semigroup(
        self,
        instance: SemigroupInstance,
        k: int,
        witness: Optional[Sequence[int]] = None,
        target: Optional[Sequence[int]] = None,
    ) -> SparseSolution:
        """
        Approximates b = A·λ by a non-negative x whose support has at most k-m non-basis columns. The m basis columns are
        always available.

        The non-basis coefficients are alternately shrunk to the finite set S and merged until the support is small
        enough. The result is compared with plain rounding onto the basis, which never errs by more than 1/2.

        Args:
            instance: A simplicial instance.
            k: The sparsity, m <= k <= n.
            witness: The coefficients λ. Searched with find_witness when only the target is given.
            target: The target b, optional when a witness is given.

        Returns:
            SparseSolution: The solution with its P(B)-error and the recursive merge bound as certified bound.

        Raises:
            NotSimplicialError: If a column lies outside the cone of the basis.
            BadKError: If k is not within [m, n].
            NoWitnessError: If only a target is given and no representation is found.
        """
        instance.require_simplicial()
        if k < instance.m or k > instance.n:
            raise BadKError(f"k must lie in [{instance.m}, {instance.n}], got {k}")
        if witness is None:
            if target is None:
                raise BadInputError("Either a witness or a target is needed")
            witness = self.find_witness(instance, target)
        representation = instance.split(witness)
        represented = instance.matrix.apply(tuple(witness))
        if target is not None and tuple(target) != represented:
            raise BadInputError(f"The witness represents {represented}, not {tuple(target)}")
        target = represented

        self.log.info(f"Approximating {target} with {k} columns, starting from a support of {len(representation.non_basis_support)}")
        total_increment = Fraction(0)
        while len(representation.non_basis_support) > k - instance.m:
            coefficients, credit = self.reduce_to_S(instance, representation.coefficients)
            representation = SemigroupRepresentation(
                basis_coefficients=[value + extra for value, extra in zip(representation.basis_coefficients, credit)],
                coefficients=coefficients,
            )
            if len(representation.non_basis_support) <= k - instance.m:
                break
            representation, increment = self.reduce_support_once(instance, representation)
            total_increment += increment

        x = instance.assemble(representation)
        solution = SparseSolution(
            x=x,
            error=instance.error_of(x, target),
            norm_tag=NormTag.PNORM,
            certified_bound=self.sparsity_bound(instance, k),
        )
        self.log.debug(f"Merging reached {solution.error} (sum of increments {total_increment})")

        fallback = self.basis_rounding(instance, target)
        if fallback.error < solution.error:
            self.log.debug(f"Rounding onto the basis is better: {fallback.error}")
            solution.x, solution.error = fallback.x, fallback.error
        return solution

    def approximate_knapsack(self, values: Sequence[int], witness: Sequence[int], k: int) -> SparseSolution:
        """
        The one-row case: approximates b = Σ λ_i·a_i for a sorted positive vector a with k entries, using a_1 as basis.
        Errors are reported in absolute value and certified by (2^-(k-1) - 2^-(n-1))·a_1.
        """
        self._validate_sorted_positive(values)
        instance = SemigroupInstance.from_vector(values)
        solution = self.approximate_semigroup(instance, k, witness=witness)
        smallest = values[0]
        bound = sum((Fraction(1, 2**support_size) for support_size in range(k, len(values))), Fraction(0)) * smallest
        return SparseSolution(
            x=solution.x, error=solution.error * smallest, norm_tag=NormTag.LINF, certified_bound=RootBound.rational(bound)
        )

    @staticmethod
    def _validate_sorted_positive(values: Sequence[int]) -> None:
        if len(values) == 0 or values[0] <= 0 or any(left > right for left, right in zip(values, values[1:])):
            raise BadInputError(f"Expected a non-empty sorted vector of positive integers, got {tuple(values)}")

    def approximate_k2(self, values: Sequence[int], target: int, witness: Optional[Sequence[int]] = None) -> SparseSolution:
        """
        Best approximation of b by λ·a_1 + μ·a_i with λ, μ >= 0 and a single index i >= 2, found by trying every i and
        every μ <= b/a_i. The error never exceeds φ(n-2)/(2φ(n-2)+1)·a_1.

        Args:
            values: The sorted positive vector a, n >= 2.
            target: The target b.
            witness: Optional coefficients λ, checked against b when given.

        Raises:
            BadInputError: If a is not sorted and positive, n < 2, b < 0 or the witness does not represent b.
        """
        self._validate_sorted_positive(values)
        if len(values) < 2:
            raise BadInputError("Two-column approximation needs at least two entries")
        if target < 0:
            raise BadInputError(f"The target has to be non-negative, got {target}")
        if witness is not None and sum(value * count for value, count in zip(values, witness)) != target:
            raise BadInputError(f"The witness {tuple(witness)} does not represent {target}")

        smallest = values[0]
        best_error, best_x = None, None
        for index in range(1, len(values)):
            for multiple in range(target // values[index] + 1):
                remainder = target - multiple * values[index]
                count = round_half_up(Fraction(remainder, smallest))
                error = Fraction(abs(remainder - count * smallest))
                if best_error is None or error < best_error:
                    best_x = [0] * len(values)
                    best_x[0], best_x[index] = count, multiple
                    best_error = error
                    self.log.trace(f"{count}*a_1 + {multiple}*a_{index + 1} misses {target} by {error}")

        bound = SylvesterSequence.k2_ratio(len(values)) * smallest
        return SparseSolution(
            x=tuple(best_x), error=best_error, norm_tag=NormTag.LINF, certified_bound=RootBound.rational(bound)
        )

    @staticmethod
    def exact_threshold(instance: SemigroupInstance) -> int:
        """
        The least n with μ^(m-1)·|det B|^(2m-1) < 2^(n-m). From there on merging down to n-1 columns is exact.
        """
        instance.require_simplicial()
        size = instance.mu ** (instance.m - 1) * instance.basis_determinant ** (2 * instance.m - 1)
        n = instance.m
        while size >= 2 ** (n - instance.m):
            n += 1
        return n
