from fractions import Fraction

import hypothesis.strategies as st
import pytest
from approximation_classes import InstanceFamily, NormTag, RootBound, SemigroupRepresentation
from exact_linalg import ExactLinearAlgebra, IntMatrix, infinity_norm
from exceptions import BadInputError, BadKError, NotSimplicialError, NotSpanningError, NoWitnessError, SingularMatrixError
from hypothesis import assume, given, settings
from instances import InstanceGenerator
from semigroup_approx import SemigroupApproximator, SemigroupInstance, SylvesterSequence


@pytest.fixture
def approximator():
    return SemigroupApproximator()


@st.composite
def knapsack_instances(draw, min_size=1, max_size=8, max_value=100, max_witness_sum=5):
    values = sorted(draw(st.lists(st.integers(min_value=1, max_value=max_value), min_size=min_size, max_size=max_size)))
    witness = [0] * len(values)
    for _ in range(draw(st.integers(min_value=0, max_value=max_witness_sum))):
        witness[draw(st.integers(min_value=0, max_value=len(values) - 1))] += 1
    return values, witness


def test_instance_coordinates_and_mu():
    instance = SemigroupInstance.build(IntMatrix.from_columns([(2, 0), (0, 2), (1, 3)]), (0, 1))
    assert instance.basis_determinant == 4
    assert instance.coordinates[2] == (Fraction(1, 2), Fraction(3, 2))
    assert instance.mu == Fraction(3, 2)
    assert instance.simplicial
    assert instance.non_basis_indices == [2]


def test_instance_outside_the_cone_is_not_simplicial():
    spec = InstanceGenerator().gen_example3(3)
    instance = SemigroupInstance.build(spec.matrix, spec.basis_indices)
    assert not instance.simplicial
    with pytest.raises(NotSimplicialError):
        instance.require_simplicial()


def test_instance_rejects_bad_bases():
    matrix = IntMatrix.from_columns([(1, 1), (2, 2), (0, 1)])
    with pytest.raises(SingularMatrixError):
        SemigroupInstance.build(matrix, (0, 1))
    with pytest.raises(BadInputError):
        SemigroupInstance.build(matrix, (0, 0))
    with pytest.raises(BadInputError):
        SemigroupInstance.build(matrix, (0, 3))


def test_sylvester_sequence():
    assert [SylvesterSequence.term(index) for index in range(5)] == [1, 2, 6, 42, 1806]
    assert SylvesterSequence.phi(1) == Fraction(1, 2)
    assert SylvesterSequence.phi(2) == Fraction(2, 3)
    assert SylvesterSequence.phi(3) == Fraction(29, 42)
    assert SylvesterSequence.k2_ratio(3) == Fraction(1, 4)
    assert SylvesterSequence.k2_ratio(4) == Fraction(2, 7)
    assert SylvesterSequence.k2_ratio(5) == Fraction(29, 100)


def test_reduce_to_s_one_row(approximator):
    instance = SemigroupInstance.from_vector((4, 9))
    reduced, credit = approximator.reduce_to_S(instance, (0, 5))
    assert reduced == [0, 1]
    assert credit == [9]


def test_reduce_to_s_keeps_the_represented_vector(approximator):
    instance = SemigroupInstance.build(IntMatrix.from_columns([(2, 0), (0, 2)] + [(1, 1)] * 6), (0, 1))
    coefficients = (0, 0) + (1,) * 6
    reduced, credit = approximator.reduce_to_S(instance, coefficients)

    assert sum(reduced) <= instance.basis_determinant
    assert all(0 <= value <= original for value, original in zip(reduced, coefficients))
    assert credit == [1, 1]
    restored = tuple(
        value + instance.basis.apply(credit)[row] for row, value in enumerate(instance.matrix.apply(reduced))
    )
    assert restored == instance.matrix.apply(coefficients)


def test_reduce_to_s_rejects_basis_coefficients(approximator):
    with pytest.raises(BadInputError):
        approximator.reduce_to_S(SemigroupInstance.from_vector((4, 9)), (1, 5))


def test_reduce_support_once_merges_exactly(approximator):
    instance = SemigroupInstance.from_vector((4, 9, 10, 11))
    representation = instance.split((0, 1, 1, 1))
    merged, increment = approximator.reduce_support_once(instance, representation)

    assert len(merged.non_basis_support) < 3
    assert increment == 0
    assert instance.matrix.apply(instance.assemble(merged)) == (30,)


def test_sparsity_bound_for_one_row():
    instance = SemigroupInstance.from_vector((3, 5, 7, 11))
    bound = SemigroupApproximator.sparsity_bound(instance, 2)
    assert bound.exact_value() == Fraction(3, 8)
    assert SemigroupApproximator.sparsity_bound(instance, 4).exact_value() == 0


def test_support_reduction_increment_is_an_mth_root():
    instance = SemigroupInstance.build(IntMatrix.from_columns([(2, 0), (0, 2), (1, 3)]), (0, 1))
    bound = SemigroupApproximator.support_reduction_increment(instance, 1)
    # ((3/2 * 4) / 2)^(1/2) = sqrt(3)
    assert bound.admits(Fraction(173, 100))
    assert not bound.admits(Fraction(174, 100))


def test_root_bound_separates_sums_of_roots():
    # sqrt(2) + sqrt(3) = 3.14626...
    bound = RootBound(((Fraction(1), Fraction(2)), (Fraction(1), Fraction(3))), 2)
    assert bound.admits(Fraction(314, 100))
    assert not bound.admits(Fraction(315, 100))
    assert bound.compare(Fraction(314626, 100000)) == -1
    assert bound.compare(Fraction(314627, 100000)) == 1


def test_root_bound_does_not_admit_unresolved_values(monkeypatch):
    bound = RootBound(((Fraction(1), Fraction(2)), (Fraction(1), Fraction(3))), 2)
    monkeypatch.setattr(RootBound, "MAXIMUM_PRECISION_BITS", 32)
    assert bound.compare(3) == 1
    assert not bound.admits(3)
    assert RootBound.rational(Fraction(1, 2)).admits(Fraction(1, 2))


def test_basis_rounding_is_within_one_half(approximator):
    instance = SemigroupInstance.build(IntMatrix.from_columns([(2, 0), (0, 2), (1, 3)]), (0, 1))
    solution = approximator.basis_rounding(instance, (1, 3))
    assert solution.norm_tag == NormTag.PNORM
    assert solution.error == Fraction(1, 2)


def test_find_witness(approximator):
    instance = SemigroupInstance.from_vector((4, 9))
    witness = approximator.find_witness(instance, (17,))
    assert instance.matrix.apply(witness) == (17,)
    assert all(value >= 0 for value in witness)
    with pytest.raises(NoWitnessError):
        approximator.find_witness(instance, (5,))


def test_approximate_semigroup_needs_a_witness_or_target(approximator):
    with pytest.raises(BadInputError):
        approximator.approximate_semigroup(SemigroupInstance.from_vector((4, 9)), 1)


def test_approximate_semigroup_checks_the_witness(approximator):
    with pytest.raises(BadInputError):
        approximator.approximate_semigroup(SemigroupInstance.from_vector((4, 9)), 1, witness=(1, 1), target=(12,))


def test_approximate_semigroup_rejects_bad_k(approximator):
    with pytest.raises(BadKError):
        approximator.approximate_semigroup(SemigroupInstance.from_vector((4, 9)), 3, witness=(1, 1))


def test_prop13_instance_is_approximated_within_one(approximator):
    spec = InstanceGenerator().gen_prop13(2, 3)
    solution = approximator.approximate_knapsack(spec.matrix.entries[0], spec.witness, 2)
    assert solution.certified_bound.exact_value() == 1
    assert solution.error == 1


@given(knapsack_instances())
@settings(max_examples=100, deadline=None)
def test_knapsack_error_within_the_certified_bound(instance):
    values, witness = instance
    approximator = SemigroupApproximator()
    target = sum(value * count for value, count in zip(values, witness))
    n = len(values)
    for k in range(1, n + 1):
        solution = approximator.approximate_knapsack(values, witness, k)
        bound = (Fraction(1, 2 ** (k - 1)) - Fraction(1, 2 ** (n - 1))) * values[0]

        assert all(value >= 0 for value in solution.x)
        assert len([index for index in solution.support if index != 0]) <= k - 1
        assert solution.error == abs(sum(value * count for value, count in zip(values, solution.x)) - target)
        assert solution.error <= bound


@given(knapsack_instances(min_size=6))
@settings(max_examples=60, deadline=None)
def test_knapsack_is_exact_from_the_exact_threshold_on(instance):
    values, witness = instance
    approximator = SemigroupApproximator()
    threshold = SemigroupApproximator.exact_threshold(SemigroupInstance.from_vector(values))
    assume(len(values) >= threshold)
    assert approximator.approximate_knapsack(values, witness, len(values) - 1).error == 0


def test_exact_threshold():
    assert SemigroupApproximator.exact_threshold(SemigroupInstance.from_vector((3, 5, 7, 11))) == 3
    unit = SemigroupInstance.build(IntMatrix.from_columns([(1, 0), (0, 1), (1, 1)]), (0, 1))
    assert SemigroupApproximator.exact_threshold(unit) == 3


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_general_m_error_within_the_recursive_bound(seed):
    spec = InstanceGenerator().gen_random(InstanceFamily.RANDOM_SIMPLICIAL, 2, 5, 2, seed)
    instance = SemigroupInstance.build(spec.matrix, spec.basis_indices)
    assume(instance.mu * instance.basis_determinant <= 20)
    witness = [(seed >> (2 * index)) % 3 for index in range(instance.n)]
    target = instance.matrix.apply(witness)

    approximator = SemigroupApproximator()
    for k in range(instance.m, instance.n + 1):
        solution = approximator.approximate_semigroup(instance, k, witness=witness)
        assert all(value >= 0 for value in solution.x)
        assert len([index for index in solution.support if index not in instance.basis_indices]) <= k - instance.m
        assert solution.error == instance.error_of(solution.x, target)
        assert solution.certified_bound.admits(solution.error)
        assert solution.error <= Fraction(1, 2)


@given(knapsack_instances(min_size=3, max_size=5, max_witness_sum=6))
@settings(max_examples=100, deadline=None)
def test_two_columns_within_the_sylvester_bound(instance):
    values, witness = instance
    target = sum(value * count for value, count in zip(values, witness))
    solution = SemigroupApproximator().approximate_k2(values, target, witness)

    assert solution.error <= SylvesterSequence.k2_ratio(len(values)) * values[0]
    assert len(solution.support) <= 2
    assert all(value >= 0 for value in solution.x)
    assert solution.error == abs(sum(value * count for value, count in zip(values, solution.x)) - target)


def test_two_columns_on_the_n4_hard_instance(approximator):
    spec = InstanceGenerator().gen_prop14(4)
    solution = approximator.approximate_k2(spec.matrix.entries[0], spec.target[0], spec.witness)
    assert solution.error == 4
    assert solution.certified_bound.exact_value() == 4


def test_two_columns_rejects_bad_input(approximator):
    with pytest.raises(BadInputError):
        approximator.approximate_k2((5, 3), 8)
    with pytest.raises(BadInputError):
        approximator.approximate_k2((3,), 6)
    with pytest.raises(BadInputError):
        approximator.approximate_k2((3, 5), 8, witness=(1, 2))


def test_spanning_one_row(approximator):
    solution = approximator.approximate_spanning(IntMatrix.from_rows([[1, -1]]), (-5,), 2)
    assert solution.x == (0, 5)
    assert solution.error == 0


def test_spanning_lifts_negative_coefficients(approximator):
    matrix = IntMatrix.from_columns([(1, 0), (0, 1), (-1, -1)])
    solution = approximator.approximate_spanning(matrix, (-1, -1), 4)
    assert all(value >= 0 for value in solution.x)
    assert matrix.apply(solution.x) == (-1, -1)
    assert solution.error == 0


@given(
    st.lists(st.integers(min_value=-4, max_value=4), min_size=2, max_size=2),
    st.integers(min_value=4, max_value=5),
)
@settings(max_examples=60, deadline=None)
def test_spanning_error_within_the_bound(target, k):
    matrix = IntMatrix.from_columns([(1, 0), (0, 2), (-3, -1), (2, -3)])
    approximator = SemigroupApproximator()
    assume(ExactLinearAlgebra.in_lattice(matrix, target))
    solution = approximator.approximate_spanning(matrix, tuple(target), k)

    assert all(value >= 0 for value in solution.x)
    assert solution.error == infinity_norm(value - wanted for value, wanted in zip(matrix.apply(solution.x), target))
    assert solution.certified_bound.admits(solution.error)


MERGE_INSTANCES = [
    SemigroupInstance.from_vector((3, 5, 7, 11, 13)),
    SemigroupInstance.build(IntMatrix.from_columns([(2, 0), (0, 2), (1, 3), (3, 1), (1, 1), (2, 2), (3, 2)]), (0, 1)),
    SemigroupInstance.build(
        IntMatrix.from_columns(
            [(2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1), (2, 1, 0)]
        ),
        (0, 1, 2),
    ),
]


@pytest.mark.parametrize("instance", MERGE_INSTANCES, ids=["m=1", "m=2", "m=3"])
@given(data=st.data())
@settings(max_examples=30, deadline=None)
def test_merging_stays_within_the_step_and_sparsity_bounds(instance, data):
    approximator = SemigroupApproximator()
    witness = data.draw(st.lists(st.integers(min_value=0, max_value=3), min_size=instance.n, max_size=instance.n))
    k = data.draw(st.integers(min_value=instance.m, max_value=instance.n))
    target = instance.matrix.apply(witness)

    representation = instance.split(witness)
    total_increment = Fraction(0)
    while len(representation.non_basis_support) > k - instance.m:
        coefficients, credit = approximator.reduce_to_S(instance, representation.coefficients)
        representation = SemigroupRepresentation(
            basis_coefficients=[value + extra for value, extra in zip(representation.basis_coefficients, credit)],
            coefficients=coefficients,
        )
        support_size = len(representation.non_basis_support)
        if support_size <= k - instance.m:
            break
        representation, increment = approximator.reduce_support_once(instance, representation)

        assert len(representation.non_basis_support) < support_size
        assert SemigroupApproximator.support_reduction_increment(instance, support_size).admits(increment)
        total_increment += increment

    x = instance.assemble(representation)
    assert all(value >= 0 for value in x)
    assert len(representation.non_basis_support) <= k - instance.m
    assert instance.error_of(x, target) <= total_increment
    assert SemigroupApproximator.sparsity_bound(instance, k).admits(instance.error_of(x, target))


def test_exact_threshold_two_rows():
    # basis diag(1, 2), every other column has B-coordinates in [0, 1], so μ = 1 and μ·|det B|^3 = 8 < 2^(6-2)
    instance = SemigroupInstance.build(IntMatrix.from_columns([(1, 0), (0, 2), (1, 2), (1, 1), (0, 1), (1, 0)]), (0, 1))
    assert instance.mu == 1
    assert instance.basis_determinant == 2
    assert SemigroupApproximator.exact_threshold(instance) == 6 == instance.n


@given(st.lists(st.integers(min_value=0, max_value=4), min_size=6, max_size=6))
@settings(max_examples=60, deadline=None)
def test_two_rows_from_the_exact_threshold_on_merging_is_exact(witness):
    instance = SemigroupInstance.build(IntMatrix.from_columns([(1, 0), (0, 2), (1, 2), (1, 1), (0, 1), (1, 0)]), (0, 1))
    solution = SemigroupApproximator().approximate_semigroup(instance, instance.n - 1, witness=witness)
    assert solution.error == 0
    assert len([index for index in solution.support if index not in instance.basis_indices]) <= instance.n - 1 - instance.m


def positively_spans_the_plane(columns):
    """No closed half-plane through the origin contains every column."""
    nonzero = [column for column in columns if column != (0, 0)]
    if len(nonzero) == 0:
        return False
    for column in nonzero:
        for sign in (1, -1):
            if all(sign * (column[0] * other[1] - column[1] * other[0]) >= 0 for other in nonzero):
                return False
    return True


@given(
    st.lists(
        st.tuples(st.integers(min_value=-5, max_value=5), st.integers(min_value=-5, max_value=5)), min_size=6, max_size=6
    ),
    st.lists(st.integers(min_value=-3, max_value=3), min_size=6, max_size=6),
    st.integers(min_value=4, max_value=6),
)
@settings(max_examples=60, deadline=None)
def test_spanning_random_matrices(columns, coefficients, k):
    assume((0, 0) not in columns and positively_spans_the_plane(columns))
    matrix = IntMatrix.from_columns(columns)
    target = matrix.apply(coefficients)
    solution = SemigroupApproximator().approximate_spanning(matrix, target, k)

    assert all(value >= 0 for value in solution.x)
    assert len(solution.support) <= k
    assert solution.error == infinity_norm(value - wanted for value, wanted in zip(matrix.apply(solution.x), target))
    assert solution.certified_bound.admits(solution.error)


def test_spanning_requires_a_positive_spanning_set(approximator):
    with pytest.raises(NotSpanningError):
        approximator.approximate_spanning(IntMatrix.from_rows([[1, 2]]), (3,), 2)
    with pytest.raises(BadKError):
        approximator.approximate_spanning(IntMatrix.from_rows([[1, -1]]), (3,), 1)


def test_semigroup_representation_split_and_assemble():
    instance = SemigroupInstance.from_vector((4, 9, 10))
    representation = instance.split((2, 1, 3))
    assert representation == SemigroupRepresentation(basis_coefficients=[2], coefficients=[0, 1, 3])
    assert representation.non_basis_support == [1, 2]
    assert instance.assemble(representation) == (2, 1, 3)
    with pytest.raises(BadInputError):
        instance.split((1, -1, 0))
