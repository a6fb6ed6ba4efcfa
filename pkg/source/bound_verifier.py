import math
import random
from fractions import Fraction
from typing import Callable, Optional, Sequence

from approximation_classes import (
    BoundReportRow,
    InstanceFamily,
    InstanceSpec,
    Relation,
    RootBound,
    Verdict,
)
from exact_linalg import IntVector
from exceptions import BudgetExceededError
from instances import InstanceGenerator
from lattice_approx import LatticeApproximator
from logger import LoggerMixin
from oracle import Oracle
from semigroup_approx import SemigroupApproximator, SemigroupInstance

CSV_HEADER = ["instance", "m", "n", "k", "alg_error", "bound", "oracle", "verdict"]


class BoundVerifier(LoggerMixin):
    """
    Runs an approximation algorithm, its certified bound and the brute force oracle side by side on generated instances
    and judges every combination. A row is a VIOLATION when the algorithm exceeds its bound, the oracle exceeds the
    algorithm or the bound, or the oracle contradicts the value predicted for the instance.
    """

    def __init__(self, budget: Optional[int] = None):
        super().__init__()

        self.lattice_approximator = LatticeApproximator(delta_budget=budget)
        self.semigroup_approximator = SemigroupApproximator(budget)
        self.oracle = Oracle(budget)
        self.generator = InstanceGenerator()

    @staticmethod
    def sort_rows(rows: list[BoundReportRow]) -> list[BoundReportRow]:
        return sorted(rows, key=lambda row: (row.instance, row.k))

    @staticmethod
    def judge(
        alg_error: Optional[Fraction],
        bound: Optional[RootBound],
        oracle_value: Optional[Fraction],
        spec: Optional[InstanceSpec] = None,
    ) -> Verdict:
        if alg_error is not None and bound is not None and not bound.admits(alg_error):
            return Verdict.VIOLATION
        if oracle_value is None:
            return Verdict.OK
        if alg_error is not None and oracle_value > alg_error:
            return Verdict.VIOLATION
        if bound is not None and not bound.admits(oracle_value):
            return Verdict.VIOLATION
        if spec is not None and spec.predicted is not None:
            if spec.predicted_relation == Relation.EQUAL and oracle_value != spec.predicted:
                return Verdict.VIOLATION
            if spec.predicted_relation == Relation.AT_LEAST and oracle_value < spec.predicted:
                return Verdict.VIOLATION
            if spec.predicted_relation == Relation.AT_MOST and oracle_value > spec.predicted:
                return Verdict.VIOLATION
        return Verdict.OK

    def _row(
        self,
        spec: InstanceSpec,
        k: int,
        compute: Callable[[], tuple[Optional[Fraction], Optional[RootBound], Optional[Fraction]]],
    ) -> BoundReportRow:
        instance_id = spec.instance_id
        try:
            alg_error, bound, oracle_value = compute()
        except BudgetExceededError as error:
            self.log.warning(f"Skipping {instance_id} with k = {k}: {error}")
            return BoundReportRow(
                instance=instance_id,
                m=spec.matrix.rows,
                n=spec.matrix.cols,
                k=k,
                alg_error=None,
                bound=None,
                oracle=None,
                verdict=Verdict.SKIPPED_BUDGET,
            )

        verdict = self.judge(alg_error, bound, oracle_value, spec)
        if verdict == Verdict.VIOLATION:
            self.log.error(f"{instance_id} with k = {k}: algorithm {alg_error}, bound {bound}, oracle {oracle_value}")
        else:
            self.log.info(f"{instance_id} with k = {k}: {verdict.value}")
        return BoundReportRow(
            instance=instance_id,
            m=spec.matrix.rows,
            n=spec.matrix.cols,
            k=k,
            alg_error=alg_error,
            bound=bound,
            oracle=oracle_value,
            verdict=verdict,
        )

    def _lattice_worst_case(self, spec: InstanceSpec, k: int, fallback_target: Optional[IntVector] = None):
        """The algorithm runs on the target maximizing the oracle, or on the fallback when the sweep is too large."""

        def compute():
            bound = RootBound.rational(self.lattice_approximator.certified_bound(spec.matrix, k))
            try:
                report = self.oracle.lattice_app(spec.matrix, k)
            except BudgetExceededError:
                if fallback_target is None:
                    raise
                solution = self.lattice_approximator.approximate_lattice(spec.matrix, fallback_target, k)
                return solution.error, bound, None
            solution = self.lattice_approximator.approximate_lattice(spec.matrix, report.witness_b, k)
            return solution.error, bound, report.value

        return self._row(spec, k, compute)

    @staticmethod
    def _absolute(instance: SemigroupInstance, value: Fraction) -> Fraction:
        """Converts a P(B)-error of a one-row instance into an absolute error."""
        return value * instance.basis_determinant

    def rows_example1(self, ms: Sequence[int]) -> list[BoundReportRow]:
        rows = []
        for m in ms:
            spec = self.generator.gen_example1(m)
            rows.append(self._lattice_worst_case(spec, 2 * m - 1))
        return rows

    def rows_example2(self, primes: Sequence[int], ms: Sequence[int]) -> list[BoundReportRow]:
        rows = []
        for m in ms:
            for k in range(m, m + len(primes)):
                spec = self.generator.gen_example2(primes, m, k)

                def compute(spec: InstanceSpec = spec, k: int = k):
                    bound = RootBound.rational(self.lattice_approximator.certified_bound(spec.matrix, k))
                    solution = self.lattice_approximator.approximate_lattice(spec.matrix, spec.target, k)
                    report = self.oracle.lattice_app(spec.matrix, k)
                    return solution.error, bound, report.value

                rows.append(self._row(spec, k, compute))
        return rows

    def rows_prop13(self, ks: Sequence[int], n: Optional[int] = None) -> list[BoundReportRow]:
        rows = []
        for k in ks:
            spec = self.generator.gen_prop13(k, k + 2 if n is None else n)

            def compute(spec: InstanceSpec = spec, k: int = k):
                values = spec.matrix.entries[0]
                solution = self.semigroup_approximator.approximate_knapsack(values, spec.witness, k)
                instance = SemigroupInstance.build(spec.matrix, spec.basis_indices)
                value, _, _ = self.oracle.semigroup_target_error(instance, spec.target, k, basis_fixed=False)
                return solution.error, solution.certified_bound, self._absolute(instance, value)

            rows.append(self._row(spec, k, compute))
        return rows

    def rows_prop14(self, ns: Sequence[int]) -> list[BoundReportRow]:
        rows = []
        for n in ns:
            spec = self.generator.gen_prop14(n)

            def compute(spec: InstanceSpec = spec):
                values = spec.matrix.entries[0]
                solution = self.semigroup_approximator.approximate_k2(values, spec.target[0], spec.witness)
                instance = SemigroupInstance.build(spec.matrix, spec.basis_indices)
                value, _, _ = self.oracle.semigroup_target_error(instance, spec.target, 2, basis_fixed=False)
                return solution.error, solution.certified_bound, self._absolute(instance, value)

            rows.append(self._row(spec, 2, compute))
        return rows

    def rows_prop15(self, ns: Sequence[int]) -> list[BoundReportRow]:
        rows = []
        for n in ns:
            spec = self.generator.gen_prop15(n)
            instance = SemigroupInstance.build(spec.matrix, spec.basis_indices)
            for k in range(2, n):

                def compute(k: int = k):
                    solution = self.semigroup_approximator.approximate_semigroup(instance, k, witness=spec.witness)
                    value, _, _ = self.oracle.semigroup_target_error(instance, spec.target, k, basis_fixed=False)
                    return solution.error, solution.certified_bound, value

                rows.append(self._row(spec, k, compute))
        return rows

    def rows_example3(self, ls: Sequence[int]) -> list[BoundReportRow]:
        rows = []
        for l in ls:  # noqa: E741
            spec = self.generator.gen_example3(l)

            def compute(spec: InstanceSpec = spec):
                instance = SemigroupInstance.build(spec.matrix, spec.basis_indices)
                value, _, _ = self.oracle.semigroup_target_error(instance, spec.target, 3, basis_fixed=True)
                return None, None, value

            rows.append(self._row(spec, 3, compute))
        return rows

    def rows_random_lattice(self, count: int, m: int, n: int, entry_bound: int, seed: int) -> list[BoundReportRow]:
        rows = []
        for offset in range(count):
            spec = self.generator.gen_random(InstanceFamily.RANDOM_LATTICE, m, n, entry_bound, seed + offset)
            generator = random.Random(seed + offset)
            coefficients = [generator.randint(-entry_bound, entry_bound) for _ in range(n)]
            fallback_target = spec.matrix.apply(coefficients)
            for k in range(m, n + 1):
                rows.append(self._lattice_worst_case(spec, k, fallback_target))
        return rows

    def rows_random_simplicial(self, count: int, m: int, n: int, entry_bound: int, seed: int) -> list[BoundReportRow]:
        rows = []
        for offset in range(count):
            spec = self.generator.gen_random(InstanceFamily.RANDOM_SIMPLICIAL, m, n, entry_bound, seed + offset)
            instance = SemigroupInstance.build(spec.matrix, spec.basis_indices)
            generator = random.Random(seed + offset)
            fallback_witness = [generator.randint(0, entry_bound) for _ in range(n)]
            for k in range(m, n + 1):

                def compute(k: int = k):
                    bound = self.semigroup_approximator.sparsity_bound(instance, k)
                    try:
                        report = self.oracle.semigroup_app(instance, k)
                    except BudgetExceededError:
                        solution = self.semigroup_approximator.approximate_semigroup(instance, k, witness=fallback_witness)
                        return solution.error, bound, None
                    solution = self.semigroup_approximator.approximate_semigroup(instance, k, target=report.witness_b)
                    return solution.error, bound, report.value

                rows.append(self._row(spec, k, compute))
        return rows

    def rows_antichain(self, ms: Sequence[int], max_s: int) -> list[BoundReportRow]:
        """
        One row per grid {0, ..., s}^m: the oracle column holds the largest antichain, the bound column the upper bound
        (s+1)^(m-1) and the predicted lower bound is C(s+m-1, m-1). The n column holds the size of the grid.
        """
        rows = []
        for m in ms:
            for s in range(max_s + 1):
                upper = RootBound.rational((s + 1) ** (m - 1))
                lower = Fraction(math.comb(s + m - 1, m - 1))
                instance_id = f"Antichain[m={m},s={s}]"
                try:
                    value = Fraction(self.oracle.max_antichain(m, s))
                except BudgetExceededError as error:
                    self.log.warning(f"Skipping {instance_id}: {error}")
                    rows.append(BoundReportRow(instance_id, m, (s + 1) ** m, s, None, None, None, Verdict.SKIPPED_BUDGET))
                    continue
                verdict = self.judge(None, upper, value)
                if value < lower:
                    verdict = Verdict.VIOLATION
                rows.append(BoundReportRow(instance_id, m, (s + 1) ** m, s, None, upper, value, verdict))
        return rows
