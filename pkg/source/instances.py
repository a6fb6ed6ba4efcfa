import math
import random
from fractions import Fraction
from typing import Optional, Sequence

from approximation_classes import InstanceFamily, InstanceSpec, NormTag, Relation
from environment_variable_getter import EnvironmentVariableGetter
from exact_linalg import ExactLinearAlgebra, IntMatrix, IntVector
from exceptions import BadInputError, BadKError, BadLError, NotPrimeError, RankRetryExhaustedError, TauSearchFailedError
from logger import LoggerMixin
from semigroup_approx import SylvesterSequence
from sympy import isprime

RANK_RETRIES = 100


class InstanceGenerator(LoggerMixin):
    """
    Builds the named hard instances together with the value or bound they are known to attain, and seeded random
    instances for property sweeps.
    """

    def __init__(self):
        super().__init__()

        self.tau_doublings = EnvironmentVariableGetter.get_int("SPARSEAPPROX_TAU_DOUBLINGS", 60)

    def gen_example1(self, m: int) -> InstanceSpec:
        """Columns 2e_i and 3e_i. δ = 2^m and the all-ones vector needs all 2m columns, so app_(2m-1) = 1."""
        if m < 1:
            raise BadInputError(f"m has to be positive, got {m}")
        columns = []
        for row in range(m):
            for factor in (2, 3):
                columns.append(tuple(factor if index == row else 0 for index in range(m)))
        return InstanceSpec(
            family=InstanceFamily.EXAMPLE1,
            parameters={"m": m, "k": 2 * m - 1},
            matrix=IntMatrix.from_columns(columns),
            target=(1,) * m,
            predicted=Fraction(1),
            predicted_relation=Relation.EQUAL,
            predicted_scale=NormTag.LINF.value,
        )

    @staticmethod
    def _validate_primes(primes: Sequence[int]) -> None:
        if len(primes) < 2:
            raise BadInputError(f"At least two primes are needed, got {tuple(primes)}")
        if any(left >= right for left, right in zip(primes, primes[1:])):
            raise BadInputError(f"The primes have to be strictly increasing, got {tuple(primes)}")
        for prime in primes:
            if not isprime(prime):
                raise NotPrimeError(f"{prime} is not a prime")

    @staticmethod
    def example2_predicted(primes: Sequence[int], m: int, k: int) -> Fraction:
        """⌊½·p_1···p_(m+n-1-k)⌋ with n the number of primes."""
        return Fraction(math.prod(primes[: m + len(primes) - 1 - k]) // 2)

    def gen_example2(self, primes: Sequence[int], m: int, k: Optional[int] = None) -> InstanceSpec:
        """
        Columns q_i·e_1 with q_i the product of all primes but p_i, followed by e_2, ..., e_m. The worst case error with
        k columns is ⌊½·p_1···p_(m+n-1-k)⌋, attained by example2_hard_target.

        Raises:
            NotPrimeError: If an entry is not prime.
            BadKError: If k is given and not within [m, m+n-1].
        """
        self._validate_primes(primes)
        if m < 1:
            raise BadInputError(f"m has to be positive, got {m}")
        primes = list(primes)
        product = math.prod(primes)
        columns = [(product // prime,) + (0,) * (m - 1) for prime in primes]
        columns += [tuple(1 if index == row else 0 for index in range(m)) for row in range(1, m)]

        parameters: dict = {"primes": primes, "m": m}
        spec = InstanceSpec(family=InstanceFamily.EXAMPLE2, parameters=parameters, matrix=IntMatrix.from_columns(columns))
        if k is not None:
            if k < m or k > m + len(primes) - 1:
                raise BadKError(f"k must lie in [{m}, {m + len(primes) - 1}], got {k}")
            parameters["k"] = k
            spec.target = self.example2_hard_target(primes, m, k)
            spec.predicted = self.example2_predicted(primes, m, k)
            spec.predicted_relation = Relation.EQUAL
            spec.predicted_scale = NormTag.LINF.value
        return spec

    def example2_hard_target(self, primes: Sequence[int], m: int, k: int, large: Optional[int] = None) -> IntVector:
        """
        The target ⌊½·p_1···p_(m+n-1-k)⌋·e_1 + N·(e_2 + ... + e_m). Any support missing one of e_2, ..., e_m is at least N
        away. N defaults to one more than the period of the worst case sweep, which divides the product of all primes.
        """
        if large is None:
            exponent = m + len(primes) - 1 - k
            large = (math.prod(primes) if exponent >= 1 else 1) + 1
        return (int(self.example2_predicted(primes, m, k)),) + (large,) * (m - 1)

    def gen_prop13(self, k: int, n: int, tail_scale: int = 1) -> InstanceSpec:
        """
        a_1 = 2^k, a_i = 2^(k+1) + 2^(i-2) for i = 2..k+1 and a tail a_j = 2^(k+1)·(k+1) + j·tail_scale. The target
        b = a_1 + ... + a_(k+1) = 2^(k+1)·(k+1) - 1 has a unique representation, so k columns miss it by at least 1.

        Raises:
            BadKError: If k is not within [1, n-1].
        """
        if k < 1 or k > n - 1:
            raise BadKError(f"k must lie in [1, {n - 1}], got {k}")
        if tail_scale < 1:
            raise BadInputError(f"The tail scale has to be positive, got {tail_scale}")

        values = [2**k] + [2 ** (k + 1) + 2 ** (index - 2) for index in range(2, k + 2)]
        values += [2 ** (k + 1) * (k + 1) + index * tail_scale for index in range(k + 2, n + 1)]
        witness = (1,) * (k + 1) + (0,) * (n - k - 1)
        return InstanceSpec(
            family=InstanceFamily.PROP13,
            parameters={"k": k, "n": n, "tail_scale": tail_scale},
            matrix=IntMatrix.from_rows([values]),
            basis_indices=(0,),
            target=(2 ** (k + 1) * (k + 1) - 1,),
            witness=witness,
            predicted=Fraction(1),
            predicted_relation=Relation.AT_LEAST,
            predicted_scale=NormTag.LINF.value,
        )

    def gen_prop14(self, n: int, tau: Optional[int] = None) -> InstanceSpec:
        """
        A vector a with app_2(a) >= φ(n-2)/(2φ(n-2)+1)·a_1, built over the rationals with a_1 = 1 and a_i = τ·z_i + r_i
        for i = 2..n, then scaled to integers. Here z_i is the product of t_j + 1 over j = 0..n-2 without j = n-i,
        r_n = 1/(2φ(n-2)+1) and r_i = r_n/t_(n-i). The target is b = a_2 + ... + a_n.

        τ is doubled until both largeness conditions hold exactly: ⌊b/a_i⌋ <= t_(n-i) for every i, and every combination
        λ_i·a_i + λ_j·a_j without a_1 (λ up to ⌊b/a⌋ + 1) misses b by more than the bound. For n = 3 the Prop13 instance
        with k = 2 is returned.

        Raises:
            BadInputError: If n < 3.
            TauSearchFailedError: If SPARSEAPPROX_TAU_DOUBLINGS doublings do not suffice.
        """
        if n < 3:
            raise BadInputError(f"n has to be at least 3, got {n}")
        if n == 3:
            spec = self.gen_prop13(k=2, n=3)
            spec.family = InstanceFamily.PROP14
            spec.parameters = {"n": 3}
            return spec

        ratio = SylvesterSequence.k2_ratio(n)
        r_last = 1 / (2 * SylvesterSequence.phi(n - 2) + 1)
        factors = [SylvesterSequence.term(index) + 1 for index in range(n - 1)]
        z = {index: math.prod(factors[: n - index] + factors[n - index + 1 :]) for index in range(2, n + 1)}
        r = {index: r_last / SylvesterSequence.term(n - index) for index in range(2, n + 1)}

        tau = 2**n if tau is None else tau
        for doubling in range(self.tau_doublings + 1):
            values = {index: tau * z[index] + r[index] for index in range(2, n + 1)}
            if self._prop14_conditions_hold(n, values, ratio):
                break
            self.log.debug(f"τ = {tau} is too small, doubling")
            tau *= 2
        else:
            raise TauSearchFailedError(f"No τ up to {tau // 2} satisfies the largeness conditions for n = {n}")

        scale = math.lcm(*(value.denominator for value in values.values()))
        integers = [scale] + [int(values[index] * scale) for index in range(2, n + 1)]
        self.log.info(f"Built the n = {n} instance with τ = {tau}, scale {scale}")
        return InstanceSpec(
            family=InstanceFamily.PROP14,
            parameters={"n": n, "tau": tau},
            matrix=IntMatrix.from_rows([integers]),
            basis_indices=(0,),
            target=(sum(integers[1:]),),
            witness=(0,) + (1,) * (n - 1),
            predicted=ratio * scale,
            predicted_relation=Relation.AT_LEAST,
            predicted_scale=NormTag.LINF.value,
        )

    def _prop14_conditions_hold(self, n: int, values: dict[int, Fraction], ratio: Fraction) -> bool:
        target = sum(values.values())
        caps = {index: math.floor(target / value) for index, value in values.items()}
        if any(caps[index] > SylvesterSequence.term(n - index) for index in values):
            return False

        indices = sorted(values)
        for position, first in enumerate(indices):
            for second in indices[position + 1 :]:
                for first_count in range(caps[first] + 2):
                    for second_count in range(caps[second] + 2):
                        miss = abs(target - first_count * values[first] - second_count * values[second])
                        if miss <= ratio:
                            self.log.trace(f"{first_count}*a_{first} + {second_count}*a_{second} misses b by only {miss}")
                            return False
        return True

    def gen_prop15(self, n: int) -> InstanceSpec:
        """
        The 2×n instance with a_1 = (n-1)e_1, a_2 = (n-1)e_2 and a_i = (n-1)·z_i + (1, q) for i >= 3, where
        q = ⌊√(n-1)⌋ and z_i = (2^(n-2)+1)·(1, 1) + 2^(i-2)·(1, -1). Every k in 2..n-1 leaves an error of q/(n-1) on the
        target a_1 + ... + a_n.
        """
        if n < 3:
            raise BadInputError(f"n has to be at least 3, got {n}")
        q = math.isqrt(n - 1)
        columns = [(n - 1, 0), (0, n - 1)]
        for index in range(3, n + 1):
            base, offset = 2 ** (n - 2) + 1, 2 ** (index - 2)
            columns.append(((n - 1) * (base + offset) + 1, (n - 1) * (base - offset) + q))
        matrix = IntMatrix.from_columns(columns)
        return InstanceSpec(
            family=InstanceFamily.PROP15,
            parameters={"n": n},
            matrix=matrix,
            basis_indices=(0, 1),
            target=matrix.apply((1,) * n),
            witness=(1,) * n,
            predicted=Fraction(q, n - 1),
            predicted_relation=Relation.AT_LEAST,
            predicted_scale=NormTag.PNORM.value,
        )

    def gen_example3(self, l: int) -> InstanceSpec:  # noqa: E741
        """
        A basis for which a single extra column cannot approximate b = a_3 + a_4 better than 2^(l-2), since a_3 and a_4
        lie outside the cone of a_1 = e_1 and a_2 = e_2.

        Raises:
            BadLError: If l < 3.
        """
        if l < 3:
            raise BadLError(f"l has to be at least 3, got {l}")
        half, quarter = 2 ** (l - 1), 2 ** (l - 2)
        matrix = IntMatrix.from_rows([[1, 0, half, half + quarter], [0, 1, -half, -(2**l)]])
        return InstanceSpec(
            family=InstanceFamily.EXAMPLE3_BAD_BASIS,
            parameters={"l": l, "k": 3},
            matrix=matrix,
            basis_indices=(0, 1),
            target=matrix.apply((0, 0, 1, 1)),
            witness=(0, 0, 1, 1),
            predicted=Fraction(quarter),
            predicted_relation=Relation.AT_LEAST,
            predicted_scale=NormTag.PNORM.value,
        )

    def gen_random(self, family: InstanceFamily, m: int, n: int, entry_bound: int, seed: int) -> InstanceSpec:
        """
        A seeded random instance. RandomLattice draws entries from [-entry_bound, entry_bound] until the matrix has full
        row rank. RandomSimplicial draws an invertible basis B and then columns B·w/gcd(B·w) for non-zero w with entries
        in [0, entry_bound], so every column lies in the cone of B.

        Raises:
            RankRetryExhaustedError: If no full rank matrix or invertible basis is found.
        """
        if m < 1 or n < m or entry_bound < 1:
            raise BadInputError(f"Expected 1 <= m <= n and a positive entry bound, got m = {m}, n = {n}, bound = {entry_bound}")
        generator = random.Random(seed)
        parameters = {"m": m, "n": n, "entry_bound": entry_bound, "seed": seed}

        def draw(rows: int, cols: int) -> IntMatrix:
            return IntMatrix.from_rows(
                [[generator.randint(-entry_bound, entry_bound) for _ in range(cols)] for _ in range(rows)]
            )

        if family == InstanceFamily.RANDOM_LATTICE:
            for _ in range(RANK_RETRIES):
                matrix = draw(m, n)
                if ExactLinearAlgebra.rank(matrix) == m:
                    return InstanceSpec(family=family, parameters=parameters, matrix=matrix)
            raise RankRetryExhaustedError(f"No full rank {m}x{n} matrix in {RANK_RETRIES} draws")

        if family == InstanceFamily.RANDOM_SIMPLICIAL:
            for _ in range(RANK_RETRIES):
                basis = draw(m, m)
                if ExactLinearAlgebra.determinant(basis) != 0:
                    break
            else:
                raise RankRetryExhaustedError(f"No invertible {m}x{m} basis in {RANK_RETRIES} draws")

            columns = basis.columns()
            while len(columns) < n:
                weights = [generator.randint(0, entry_bound) for _ in range(m)]
                if not any(weights):
                    continue
                column = basis.apply(weights)
                divisor = math.gcd(*column)
                columns.append(tuple(value // divisor for value in column))
            return InstanceSpec(
                family=family,
                parameters=parameters,
                matrix=IntMatrix.from_columns(columns),
                basis_indices=tuple(range(m)),
            )

        raise BadInputError(f"{family.value} is not a random family")
