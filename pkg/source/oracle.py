import math
from collections import deque
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

from approximation_classes import NormTag, OracleReport
from environment_variable_getter import EnvironmentVariableGetter
from exact_linalg import ExactLinearAlgebra, HnfResult, IntMatrix, IntVector, round_half_up, to_rational_vector
from exceptions import BadInputError, BadKError, BudgetExceededError, DimensionMismatchError, RankDeficientError
from lattice_approx import DEFAULT_BUDGET, LatticeApproximator
from logger import LoggerMixin
from semigroup_approx import SemigroupInstance

UNMATCHED = -1


class HopcroftKarpMatching:
    """
    Maximum matching of a bipartite graph given as adjacency lists from left vertices 0..L-1 to right vertices 0..R-1.
    Phases of breadth first layering followed by depth first augmentation along shortest paths.
    """

    def __init__(self, adjacency: list[list[int]], right_count: int):
        self.adjacency = adjacency
        self.match_left = [UNMATCHED] * len(adjacency)
        self.match_right = [UNMATCHED] * right_count
        self.layer = [0] * len(adjacency)

    def maximum_matching_size(self) -> int:
        size = 0
        while self._build_layers():
            for left in range(len(self.adjacency)):
                if self.match_left[left] == UNMATCHED and self._augment(left):
                    size += 1
        return size

    def _build_layers(self) -> bool:
        queue = deque()
        for left in range(len(self.adjacency)):
            if self.match_left[left] == UNMATCHED:
                self.layer[left] = 0
                queue.append(left)
            else:
                self.layer[left] = math.inf

        found_free_right = False
        while queue:
            left = queue.popleft()
            for right in self.adjacency[left]:
                partner = self.match_right[right]
                if partner == UNMATCHED:
                    found_free_right = True
                elif self.layer[partner] == math.inf:
                    self.layer[partner] = self.layer[left] + 1
                    queue.append(partner)
        return found_free_right

    def _augment(self, left: int) -> bool:
        for right in self.adjacency[left]:
            partner = self.match_right[right]
            if partner == UNMATCHED or (self.layer[partner] == self.layer[left] + 1 and self._augment(partner)):
                self.match_left[left] = right
                self.match_right[right] = left
                return True
        self.layer[left] = math.inf
        return False


class Oracle(LoggerMixin):
    """
    Exact brute force values of the worst case sparse approximation error on small instances.

    The lattice sweep relies on periodicity: with M the lcm of det(Λ_I) over all supports I, M·Z^m lies in every Λ_I, so
    the per-target objective only depends on b modulo M and the maximum over A·Z^n is attained inside [0, M)^m. Supports
    without full row rank never lower the maximum since b + M·t escapes every proper subspace for a suitable t.
    """

    def __init__(self, budget: Optional[int] = None):
        super().__init__()

        if budget is None:
            budget = EnvironmentVariableGetter.get_int("SPARSEAPPROX_BUDGET", DEFAULT_BUDGET)
        self.budget = budget
        self.coefficient_cap = EnvironmentVariableGetter.get_int("SPARSEAPPROX_COEFFICIENT_CAP", 64)

    def _check_budget(self, what: str, count: int) -> None:
        if count > self.budget:
            raise BudgetExceededError(what, count, self.budget)

    @staticmethod
    def _closest_hnf_coordinates(hnf_result: HnfResult, target: Sequence[Fraction], radius: Fraction) -> tuple[list[int], Fraction]:
        hermite = hnf_result.H
        rows = hermite.rows
        best: list = [None, radius]
        z = [0] * rows

        def search(row: int, worst: Fraction) -> None:
            if row == rows:
                if best[0] is None or worst < best[1]:
                    best[0], best[1] = list(z), worst
                return
            shift = sum(hermite.entries[row][column] * z[column] for column in range(row))
            pivot = hermite.entries[row][row]
            center = (target[row] - shift) / pivot
            low, high = math.floor(center), math.floor(center) + 1
            # alternate outwards from the center, residuals grow monotonically on both sides
            while True:
                progressed = False
                for value in (low, high):
                    residual = abs(pivot * value + shift - target[row])
                    limit = best[1]
                    if residual < limit or (best[0] is None and residual <= limit):
                        z[row] = value
                        search(row + 1, max(worst, residual))
                        progressed = True
                if not progressed:
                    break
                low, high = low - 1, high + 1

        search(0, Fraction(0))
        return best[0], best[1]

    def cvp_linf(self, matrix: IntMatrix, target: Sequence[int | Fraction]) -> tuple[IntVector, Fraction]:
        """
        Finds integer coefficients x minimizing ‖Dx - d‖_∞ exactly.

        The search runs depth first over the triangular coordinates of the Hermite normal form inside the radius of the
        rounding solution and shrinks the radius whenever a closer point is found.

        Returns:
            tuple[IntVector, Fraction]: The coefficients x and the distance.

        Raises:
            RankDeficientError: If D does not have full row rank.
        """
        if len(target) != matrix.rows:
            raise DimensionMismatchError(f"Expected a target of length {matrix.rows}, got {len(target)}")
        target = to_rational_vector(target)
        rounding = LatticeApproximator.hnf_round(matrix, target)
        if rounding.error == 0:
            return rounding.x, Fraction(0)

        z, distance = self._closest_hnf_coordinates(rounding.hnf, target, rounding.error)
        x = rounding.hnf.U.apply(z + [0] * (matrix.cols - matrix.rows))
        self.log.trace(f"Closest point to {target}: distance {distance} (rounding gave {rounding.error})")
        return x, distance

    def _full_rank_supports(self, matrix: IntMatrix, k: int) -> list[tuple[int, ...]]:
        if k < matrix.rows or k > matrix.cols:
            raise BadKError(f"k must lie in [{matrix.rows}, {matrix.cols}], got {k}")
        self._check_budget("supports", math.comb(matrix.cols, k))
        return [
            support
            for support in combinations(range(matrix.cols), k)
            if ExactLinearAlgebra.rank(matrix.select_columns(support)) == matrix.rows
        ]

    def lattice_target_error(self, matrix: IntMatrix, target: IntVector, k: int) -> tuple[Fraction, tuple[int, ...]]:
        """
        min over supports I of size k with full row rank of dist_∞(b, A_I·Z^k), together with the first minimizing I.
        """
        best_value, best_support = None, None
        for support in self._full_rank_supports(matrix, k):
            _, distance = self.cvp_linf(matrix.select_columns(support), target)
            if best_value is None or distance < best_value:
                best_value, best_support = distance, support
        return best_value, best_support

    def lattice_app(self, matrix: IntMatrix, k: int) -> OracleReport:
        """
        Computes max over b ∈ A·Z^n of the best error with k integer coefficients, in the ∞-norm.

        Args:
            matrix: The m×n matrix A with full row rank.
            k: The sparsity, m <= k <= n.

        Returns:
            OracleReport: The value with the lexicographically smallest maximizing b in [0, M)^m.

        Raises:
            BadKError: If k is not within [m, n].
            BudgetExceededError: If the number of supports or targets exceeds the budget.
        """
        if ExactLinearAlgebra.rank(matrix) < matrix.rows:
            raise RankDeficientError(f"The matrix {matrix} does not have full row rank")
        supports = self._full_rank_supports(matrix, k)
        support_lattices = [matrix.select_columns(support) for support in supports]
        support_hnfs = [ExactLinearAlgebra.hnf(lattice) for lattice in support_lattices]
        modulus = math.lcm(*(hnf_result.det_lambda for hnf_result in support_hnfs))

        full_hnf = ExactLinearAlgebra.hnf(matrix)
        target_count = modulus**matrix.rows // full_hnf.det_lambda
        self._check_budget("targets", target_count)
        self.log.info(f"Sweeping {target_count} targets modulo {modulus} over {len(supports)} supports with k = {k}")

        distance_tables: list[dict[IntVector, Fraction]] = [{} for _ in supports]
        cvp_calls = 0
        best_value, best_target, best_support = None, None, None
        for target in self._lattice_points_in_box(full_hnf, modulus):
            value, value_support = None, None
            for position, support in enumerate(supports):
                coset = ExactLinearAlgebra.reduce_modulo_lattice(support_hnfs[position], target)
                if coset not in distance_tables[position]:
                    distance_tables[position][coset] = self.cvp_linf(support_lattices[position], coset)[1]
                    cvp_calls += 1
                distance = distance_tables[position][coset]
                if value is None or distance < value:
                    value, value_support = distance, support
                    if value == 0:
                        break
            if best_value is None or value > best_value:
                best_value, best_target, best_support = value, target, value_support
                self.log.debug(f"New worst target {target} with error {value}")

        return OracleReport(
            value=best_value,
            witness_b=best_target,
            witness_support=best_support,
            enumeration_stats={
                "supports": len(supports),
                "targets": target_count,
                "cvp_calls": cvp_calls,
                "modulus": modulus,
            },
        )

    @staticmethod
    def _lattice_points_in_box(hnf_result: HnfResult, modulus: int):
        """Yields the points of the lattice with Hermite form H inside [0, modulus)^m in lexicographic order."""
        hermite = hnf_result.H
        rows = hermite.rows
        point = [0] * rows
        w = [0] * rows

        def walk(row: int):
            if row == rows:
                yield tuple(point)
                return
            shift = sum(hermite.entries[row][column] * w[column] for column in range(row))
            pivot = hermite.entries[row][row]
            for value in range(-(shift // pivot), (modulus - 1 - shift) // pivot + 1):
                w[row] = value
                point[row] = shift + pivot * value
                yield from walk(row + 1)

        yield from walk(0)

    def semigroup_target_error(
        self, instance: SemigroupInstance, target: Sequence[int], k: int, basis_fixed: bool = True
    ) -> tuple[Fraction, IntVector, bool]:
        """
        The smallest ‖Ax - b‖_P(B) over non-negative integer x with a sparse support.

        With basis_fixed the support may contain every basis column plus at most k-m further columns, otherwise any k
        columns. Basis columns only move their own B-coordinate, so for them the best value is picked coordinate-wise.
        The remaining coefficients are enumerated depth first, a branch is cut once a B-coordinate of the residual drops
        below minus the incumbent while no remaining column can raise it again. Columns without such a coordinate (only
        possible for non-simplicial instances) are capped at SPARSEAPPROX_COEFFICIENT_CAP.

        Returns:
            tuple[Fraction, IntVector, bool]: The minimum, a minimizing x and whether a coefficient cap was hit, in which
            case the minimum is only taken over the capped range.

        Raises:
            BadKError: If k is not within [m, n].
            BudgetExceededError: If supports or visited nodes exceed the budget.
        """
        if len(target) != instance.m:
            raise DimensionMismatchError(f"Expected a target of length {instance.m}, got {len(target)}")
        if k < instance.m or k > instance.n:
            raise BadKError(f"k must lie in [{instance.m}, {instance.n}], got {k}")

        if basis_fixed:
            non_basis = instance.non_basis_indices
            size = min(k - instance.m, len(non_basis))
            self._check_budget("supports", math.comb(len(non_basis), size))
            supports = [tuple(instance.basis_indices) + extra for extra in combinations(non_basis, size)]
        else:
            self._check_budget("supports", math.comb(instance.n, k))
            supports = list(combinations(range(instance.n), k))

        start = ExactLinearAlgebra.solve_rational(instance.basis, target)
        best: dict = {"value": None, "x": None}
        capped = False
        visited = 0

        for support in supports:
            free_basis = [position for position, index in enumerate(instance.basis_indices) if index in support]
            columns = [
                index
                for index in support
                if index not in instance.basis_indices and any(value != 0 for value in instance.coordinates[index])
            ]
            # coordinates that no column from position p onwards can increase
            monotone = [
                [all(instance.coordinates[index][row] >= 0 for index in columns[position:]) for row in range(instance.m)]
                for position in range(len(columns) + 1)
            ]
            chosen = [0] * instance.n

            def evaluate(residual: list[Fraction]) -> None:
                basis_values = [0] * instance.m
                error = Fraction(0)
                for row, value in enumerate(residual):
                    if row in free_basis:
                        basis_values[row] = max(0, round_half_up(value))
                    error = max(error, abs(value - basis_values[row]))
                if best["value"] is None or error < best["value"]:
                    x = list(chosen)
                    for position, index in enumerate(instance.basis_indices):
                        x[index] += basis_values[position]
                    best["value"], best["x"] = error, tuple(x)

            def cut(residual: list[Fraction], position: int) -> bool:
                return best["value"] is not None and any(
                    monotone[position][row] and residual[row] < -best["value"] for row in range(instance.m)
                )

            def search(position: int, residual: list[Fraction]) -> None:
                nonlocal visited, capped
                visited += 1
                self._check_budget("search nodes", visited)
                if position == len(columns):
                    evaluate(residual)
                    return

                index = columns[position]
                coordinates = instance.coordinates[index]
                bounded = any(monotone[position][row] and coordinates[row] > 0 for row in range(instance.m))
                value = 0
                while bounded or value <= self.coefficient_cap:
                    if cut(residual, position) or best["value"] == 0:
                        break
                    chosen[index] = value
                    search(position + 1, residual)
                    residual = [entry - coordinate for entry, coordinate in zip(residual, coordinates)]
                    value += 1
                else:
                    capped = True
                chosen[index] = 0

            search(0, list(start))
            if best["value"] == 0:
                break

        self.log.trace(f"Target {tuple(target)}: minimum {best['value']} after {visited} nodes")
        return best["value"], best["x"], capped

    def semigroup_app(self, instance: SemigroupInstance, k: int, basis_fixed: bool = True) -> OracleReport:
        """
        Computes the worst case over the finite target set S = {Σ λ_i·a_i : λ ≥ 0 on the non-basis columns,
        Σ λ_i <= |det B|} of semigroup_target_error. With the basis fixed, every other target reduces to one of S plus a
        non-negative combination of B, so the value is exact. Without it the value is exact over S and a lower bound in
        general, the report is flagged accordingly.

        Raises:
            NotSimplicialError: If a column lies outside the cone of the basis.
            BudgetExceededError: If |S| or a per-target search exceeds the budget.
        """
        instance.require_simplicial()
        non_basis = instance.non_basis_indices
        determinant = instance.basis_determinant
        candidate_count = math.comb(len(non_basis) + determinant, len(non_basis))
        self._check_budget("targets in S", candidate_count)
        self.log.info(f"Sweeping {candidate_count} coefficient vectors of S with k = {k}, basis fixed: {basis_fixed}")

        targets = set()
        for coefficients in self._bounded_compositions(len(non_basis), determinant):
            x = [0] * instance.n
            for index, value in zip(non_basis, coefficients):
                x[index] = value
            targets.add(instance.matrix.apply(x))

        best_value, best_target, best_x = None, None, None
        any_capped = False
        for target in sorted(targets):
            value, x, capped = self.semigroup_target_error(instance, target, k, basis_fixed)
            any_capped = any_capped or capped
            if best_value is None or value > best_value:
                best_value, best_target, best_x = value, target, x
                self.log.debug(f"New worst target {target} with error {value}")

        return OracleReport(
            value=best_value,
            witness_b=best_target,
            witness_support=tuple(index for index, value in enumerate(best_x) if value != 0),
            enumeration_stats={"candidates": candidate_count, "targets": len(targets), "capped": int(any_capped)},
            norm_tag=NormTag.PNORM,
            lower_bound_only=not basis_fixed,
        )

    @staticmethod
    def _bounded_compositions(length: int, total: int):
        """Yields all non-negative integer vectors of the given length with entry sum at most total."""
        if length == 0:
            yield ()
            return
        for first in range(total + 1):
            for rest in Oracle._bounded_compositions(length - 1, total - first):
                yield (first,) + rest

    def max_antichain(self, m: int, s: int) -> int:
        """
        Size of the largest antichain of the grid {0, ..., s}^m ordered componentwise. By Dilworth's theorem it equals the
        number of elements minus a maximum matching between strictly comparable pairs.

        Raises:
            BudgetExceededError: If (s+1)^m exceeds the budget.
        """
        if m < 1 or s < 0:
            raise BadInputError(f"Expected m >= 1 and s >= 0, got m = {m}, s = {s}")
        size = (s + 1) ** m
        self._check_budget("grid points", size)

        points = list(product(range(s + 1), repeat=m))
        position_of = {point: position for position, point in enumerate(points)}
        adjacency = []
        for point in points:
            above = product(*(range(value, s + 1) for value in point))
            adjacency.append([position_of[other] for other in above if other != point])

        matching = HopcroftKarpMatching(adjacency, size).maximum_matching_size()
        self.log.debug(f"Grid {m}x{s}: {size} points, maximum matching {matching}")
        return size - matching

    def verify_unique_representation(
        self, values: Sequence[int], target: int, coefficient_sum_cap: Optional[int] = None
    ) -> bool:
        """
        True iff b has exactly one representation Σ λ_i·a_i with non-negative integers λ and Σ λ_i <= the cap (unbounded
        when no cap is given). The enumeration stops at the second representation.

        Raises:
            BadInputError: If an entry of a is not positive.
            BudgetExceededError: If the enumeration visits more nodes than the budget allows.
        """
        if any(value <= 0 for value in values):
            raise BadInputError(f"Expected positive entries, got {tuple(values)}")
        cap = target if coefficient_sum_cap is None else coefficient_sum_cap
        found = 0
        visited = 0

        def search(position: int, remaining: int, budget_left: int) -> None:
            nonlocal found, visited
            visited += 1
            self._check_budget("representation nodes", visited)
            if found > 1:
                return
            if remaining == 0:
                found += 1
                return
            if position == len(values):
                return
            for count in range(min(remaining // values[position], budget_left) + 1):
                search(position + 1, remaining - count * values[position], budget_left - count)

        search(0, target, cap)
        self.log.debug(f"{target} has {'more than one' if found > 1 else found} representation(s) over {tuple(values)}")
        return found == 1
