from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from exact_linalg import HnfResult, IntMatrix, IntVector
from sympy import integer_nthroot


class NormTag(str, Enum):
    LINF = "linf"
    PNORM = "pnorm"


class Verdict(str, Enum):
    OK = "OK"
    VIOLATION = "VIOLATION"
    SKIPPED_BUDGET = "SKIPPED-budget"


class Relation(str, Enum):
    AT_MOST = "<="
    AT_LEAST = ">="
    EQUAL = "="


class InstanceFamily(str, Enum):
    EXAMPLE1 = "Example1"
    EXAMPLE2 = "Example2"
    EXAMPLE3_BAD_BASIS = "Example3BadBasis"
    PROP13 = "Prop13"
    PROP14 = "Prop14"
    PROP15 = "Prop15"
    RANDOM_LATTICE = "RandomLattice"
    RANDOM_SIMPLICIAL = "RandomSimplicial"


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class RootBound:
    """
    An exact non-negative real of the form Σ coefficient_i · radicand_i^(1/root) with non-negative rational coefficients
    and radicands.

    Comparisons against rationals are decided with integer arithmetic only: a single term is compared exactly by raising
    both sides to the power root, sums are bracketed between rational lower and upper bounds of growing precision.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]
    root: int = 1

    MAXIMUM_PRECISION_BITS = 1024

    def __post_init__(self):
        if self.root < 1:
            raise ValueError(f"The root index must be positive, got {self.root}")
        for coefficient, radicand in self.terms:
            if coefficient < 0 or radicand < 0:
                raise ValueError(f"Negative coefficient or radicand in {self.terms}")

    @staticmethod
    def rational(value: Fraction | int) -> RootBound:
        return RootBound(((Fraction(value), Fraction(1)),), 1)

    def __str__(self):
        if self.is_rational():
            return format_rational(self.exact_value())
        return " + ".join(
            f"{format_rational(coefficient)}*({format_rational(radicand)})^(1/{self.root})"
            for coefficient, radicand in self.terms
            if coefficient != 0 and radicand != 0
        )

    def is_rational(self) -> bool:
        return all(self._exact_root(radicand) is not None for _, radicand in self.terms)

    def exact_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return sum((coefficient * self._exact_root(radicand) for coefficient, radicand in self.terms), Fraction(0))

    def _exact_root(self, radicand: Fraction) -> Optional[Fraction]:
        numerator_root, numerator_exact = integer_nthroot(radicand.numerator, self.root)
        denominator_root, denominator_exact = integer_nthroot(radicand.denominator, self.root)
        if numerator_exact and denominator_exact:
            return Fraction(int(numerator_root), int(denominator_root))
        return None

    def _bracket(self, precision_bits: int) -> tuple[Fraction, Fraction]:
        scale = 1 << precision_bits
        lower, upper = Fraction(0), Fraction(0)
        for coefficient, radicand in self.terms:
            exact = self._exact_root(radicand)
            if exact is not None:
                lower += coefficient * exact
                upper += coefficient * exact
                continue
            # floor((p/q)^(1/r) * scale) = floor((p * q^(r-1) * scale^r)^(1/r)) / q
            scaled = radicand.numerator * radicand.denominator ** (self.root - 1) * scale**self.root
            floor_root = int(integer_nthroot(scaled, self.root)[0])
            lower += coefficient * Fraction(floor_root, radicand.denominator * scale)
            upper += coefficient * Fraction(floor_root + 1, radicand.denominator * scale)
        return lower, upper

    def compare(self, value: Fraction | int) -> int:
        """
        Returns -1 if value < self, 1 if value > self and 0 if they are equal. Sums of several irrational terms that
        cannot be separated from value at MAXIMUM_PRECISION_BITS are reported as 1, so an unresolved comparison never
        lets admits() certify a value.
        """
        value = Fraction(value)
        if value < 0:
            return -1
        terms = [(coefficient, radicand) for coefficient, radicand in self.terms if coefficient != 0 and radicand != 0]
        if len(terms) == 0:
            return 1 if value > 0 else 0
        if len(terms) == 1:
            coefficient, radicand = terms[0]
            left = (value / coefficient) ** self.root
            return (left > radicand) - (left < radicand)

        precision_bits = 64
        while precision_bits <= self.MAXIMUM_PRECISION_BITS:
            lower, upper = self._bracket(precision_bits)
            if value < lower:
                return -1
            if value > upper:
                return 1
            if lower == upper:
                return 0
            precision_bits *= 2
        logging.getLogger(RootBound.__name__).warning(
            f"Could not separate {format_rational(value)} from {self} within {self.MAXIMUM_PRECISION_BITS} bits"
        )
        return 1

    def admits(self, value: Fraction | int) -> bool:
        """True iff value <= self."""
        return self.compare(value) <= 0


@dataclass
class RoundingResult:
    x: IntVector
    error: Fraction
    residual: tuple[Fraction, ...]
    hnf: HnfResult


@dataclass
class SparseSolution:
    x: IntVector
    error: Fraction
    norm_tag: NormTag
    certified_bound: Optional[RootBound] = None
    column_indices: Optional[tuple[int, ...]] = None

    @property
    def support(self) -> frozenset[int]:
        return frozenset(index for index, value in enumerate(self.x) if value != 0)

    def __repr__(self):
        return f"x={self.x}, error={format_rational(self.error)} ({self.norm_tag.value}), support={sorted(self.support)}"


@dataclass
class SparseBasisChain:
    column_indices: list[int]
    dets: list[int]
    certified_bound: Fraction
    exact_from_step: Optional[int] = None

    def __repr__(self):
        return f"columns={self.column_indices}, dets={self.dets}, bound={format_rational(self.certified_bound)}"


@dataclass
class SemigroupRepresentation:
    """
    Coefficients of a target in a simplicial semigroup, split into the basis part and the non-basis part.
    """

    basis_coefficients: list[int]
    coefficients: list[int]

    @property
    def non_basis_support(self) -> list[int]:
        return [index for index, value in enumerate(self.coefficients) if value != 0]


@dataclass
class OracleReport:
    value: Fraction
    witness_b: Optional[IntVector]
    witness_support: Optional[tuple[int, ...]]
    enumeration_stats: dict[str, int] = field(default_factory=dict)
    norm_tag: NormTag = NormTag.LINF
    lower_bound_only: bool = False

    def __repr__(self):
        return (
            f"value={format_rational(self.value)} at b={self.witness_b} using support {self.witness_support} "
            f"({self.enumeration_stats})"
        )


@dataclass
class InstanceSpec:
    family: InstanceFamily
    parameters: dict[str, int | list[int]]
    matrix: IntMatrix
    basis_indices: Optional[tuple[int, ...]] = None
    target: Optional[IntVector] = None
    witness: Optional[IntVector] = None
    predicted: Optional[Fraction] = None
    predicted_relation: Optional[Relation] = None
    predicted_scale: Optional[str] = None

    @property
    def instance_id(self) -> str:
        parameters = ",".join(
            f"{key}={'-'.join(map(str, value)) if isinstance(value, list) else value}"
            for key, value in sorted(self.parameters.items())
        )
        return f"{self.family.value}[{parameters}]"


@dataclass
class BoundReportRow:
    instance: str
    m: int
    n: int
    k: int
    alg_error: Optional[Fraction]
    bound: Optional[RootBound]
    oracle: Optional[Fraction]
    verdict: Verdict

    def as_csv_row(self) -> list[str]:
        return [
            self.instance,
            str(self.m),
            str(self.n),
            str(self.k),
            "" if self.alg_error is None else format_rational(self.alg_error),
            "" if self.bound is None else str(self.bound),
            "" if self.oracle is None else format_rational(self.oracle),
            self.verdict.value,
        ]
