"""Typed errors raised by the approximation library. The command line interface maps them to exit codes."""


class SparseApproximationError(Exception):
    exit_code = 1


class ValidationError(SparseApproximationError, ValueError):
    exit_code = 2


class InfeasibilityError(SparseApproximationError, RuntimeError):
    exit_code = 4


class RankDeficientError(ValidationError):
    pass


class NotSquareError(ValidationError):
    pass


class SingularMatrixError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class BadKError(ValidationError):
    pass


class BadInputError(ValidationError):
    pass


class BadLError(ValidationError):
    pass


class NotPrimeError(ValidationError):
    pass


class NotSpanningError(ValidationError):
    pass


class NotSimplicialError(ValidationError):
    pass


class NotInLatticeError(InfeasibilityError):
    pass


class NoWitnessError(InfeasibilityError):
    pass


class BudgetExceededError(SparseApproximationError, RuntimeError):
    exit_code = 3

    def __init__(self, what: str, count: int, budget: int):
        super().__init__(f"Refusing to enumerate {count} {what}, the budget is {budget}")
        self.what = what
        self.count = count
        self.budget = budget


class TauSearchFailedError(SparseApproximationError, RuntimeError):
    exit_code = 3


class RankRetryExhaustedError(SparseApproximationError, RuntimeError):
    exit_code = 3


class InternalPigeonholeViolation(SparseApproximationError, AssertionError):
    """Raised when an enumeration that is guaranteed to succeed by a counting argument does not. Always a bug."""


class SelfCheckError(SparseApproximationError, AssertionError):
    """Raised when a result recomputed from scratch disagrees with the reported one."""
