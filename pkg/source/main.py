import argparse
import csv
import io
import signal
import sys
from fractions import Fraction
from types import FrameType
from typing import Optional

from approximation_classes import BoundReportRow, InstanceFamily, NormTag, SparseSolution, Verdict, format_rational
from bound_verifier import CSV_HEADER, BoundVerifier
from exact_linalg import infinity_norm
from exceptions import BadInputError, SelfCheckError, SparseApproximationError
from instances import InstanceGenerator
from lattice_approx import LatticeApproximator
from logger import LoggerMixin
from oracle import Oracle
from semigroup_approx import SemigroupApproximator, SemigroupInstance
from serialization import Serialization

FAMILY_NAMES = {
    "example1": InstanceFamily.EXAMPLE1,
    "example2": InstanceFamily.EXAMPLE2,
    "example3": InstanceFamily.EXAMPLE3_BAD_BASIS,
    "prop13": InstanceFamily.PROP13,
    "prop14": InstanceFamily.PROP14,
    "prop15": InstanceFamily.PROP15,
    "random-lattice": InstanceFamily.RANDOM_LATTICE,
    "random-simplicial": InstanceFamily.RANDOM_SIMPLICIAL,
}
SWEEP_NAMES = sorted(FAMILY_NAMES) + ["antichain"]


class CommandLineInterface(LoggerMixin):
    """
    Entry point of the command line. Every command prints a JSON or CSV document to standard output (or to --out) and
    returns the exit code: 0 on success, 1 on a violated bound or an unexpected error, 2 on invalid input, 3 when an
    enumeration exceeds its budget and 4 when the target is not representable.
    """

    def __init__(self):
        super().__init__()

        self.parser = self._build_parser()

    @staticmethod
    def _build_parser() -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog="sparse-approximation",
            description="Sparse integer approximation over lattices and semigroups with certified bounds",
        )
        parser.add_argument("--budget", type=int, default=None, help="Enumeration budget (default SPARSEAPPROX_BUDGET)")
        parser.add_argument("--out", default=None, help="Write the result to this file instead of standard output")
        commands = parser.add_subparsers(dest="command", required=True)

        approximate = commands.add_parser("approximate", help="Approximate a target with a sparse solution")
        approximate.add_argument("--instance", required=True, help="Path of an instance JSON file")
        approximate.add_argument("--k", type=int, default=None, help="Sparsity (defaults to 2 for the k2 mode)")
        approximate.add_argument("--mode", choices=["lattice", "semigroup", "spanning", "k2"], default="lattice")
        approximate.add_argument("--b", default=None, help="Target as comma separated integers")
        approximate.add_argument("--witness", default=None, help="Non-negative coefficients representing the target")

        verify = commands.add_parser("verify", help="Check certified bounds against the oracles on instance sweeps")
        verify.add_argument("--family", action="append", choices=SWEEP_NAMES + ["all"], default=[])
        verify.add_argument("--m", type=int, nargs="+", default=None)
        verify.add_argument("--n", type=int, nargs="+", default=None)
        verify.add_argument("--k", type=int, nargs="+", default=None)
        verify.add_argument("--l", type=int, nargs="+", default=None)
        verify.add_argument("--primes", default="2,3,5")
        verify.add_argument("--count", type=int, default=10)
        verify.add_argument("--seed", type=int, default=0)
        verify.add_argument("--entry-bound", type=int, default=None)
        verify.add_argument("--max-s", type=int, default=6)
        verify.add_argument("--format", choices=["csv", "json"], default="csv")

        generate = commands.add_parser("generate", help="Write a named or random instance as JSON")
        generate.add_argument("--family", required=True, choices=sorted(FAMILY_NAMES))
        generate.add_argument("--m", type=int, default=None)
        generate.add_argument("--n", type=int, default=None)
        generate.add_argument("--k", type=int, default=None)
        generate.add_argument("--l", type=int, default=None)
        generate.add_argument("--primes", default=None)
        generate.add_argument("--tau", type=int, default=None)
        generate.add_argument("--tail-scale", type=int, default=1)
        generate.add_argument("--entry-bound", type=int, default=3)
        generate.add_argument("--seed", type=int, default=0)

        oracle = commands.add_parser("oracle", help="Compute the exact worst case (or per target) error")
        oracle.add_argument("--instance", required=True)
        oracle.add_argument("--k", type=int, required=True)
        oracle.add_argument("--kind", choices=["lattice", "semigroup"], default="lattice")
        oracle.add_argument("--b", default=None, help="Only evaluate this target")
        oracle.add_argument("--free-basis", action="store_true", help="Allow any k columns instead of basis + k-m")

        antichain = commands.add_parser("antichain", help="Largest antichains of the grids {0..s}^m")
        antichain.add_argument("--m", type=int, nargs="+", default=[1, 2, 3])
        antichain.add_argument("--max-s", type=int, default=6)
        return parser

    def run(self, argv: Optional[list[str]] = None) -> int:
        arguments = self.parser.parse_args(argv)
        try:
            document, exit_code = getattr(self, f"command_{arguments.command}")(arguments)
        except SparseApproximationError as error:
            self.log.error(f"{type(error).__name__}: {error}")
            return error.exit_code
        except Exception as error:
            self.log.critical(f"Unexpected error: {error}", exc_info=True)
            return 1

        self._emit(document, arguments.out)
        return exit_code

    @staticmethod
    def _emit(document: str, out: Optional[str]) -> None:
        if out is None:
            sys.stdout.write(document)
            return
        with open(out, "w", encoding="utf-8") as file:
            file.write(document)

    def command_approximate(self, arguments: argparse.Namespace) -> tuple[str, int]:
        spec = Serialization.load_instance(arguments.instance)
        matrix = spec.matrix
        target = Serialization.parse_vector(arguments.b) if arguments.b is not None else spec.target
        witness = Serialization.parse_vector(arguments.witness) if arguments.witness is not None else spec.witness
        if arguments.b is not None and arguments.witness is None:
            witness = None
        mode, k = arguments.mode, arguments.k

        if mode == "k2":
            if k not in (None, 2):
                raise BadInputError(f"The k2 mode always uses two columns, got k = {k}")
            k = 2
        elif k is None:
            raise BadInputError(f"The {mode} mode needs --k")
        if target is None and (witness is None or mode in ("lattice", "spanning")):
            raise BadInputError("No target given and the instance file has none")

        if mode == "lattice":
            solution = LatticeApproximator(delta_budget=arguments.budget).approximate_lattice(matrix, target, k)
        elif mode == "spanning":
            solution = SemigroupApproximator(arguments.budget).approximate_spanning(matrix, target, k)
        elif mode == "semigroup":
            basis_indices = spec.basis_indices if spec.basis_indices is not None else tuple(range(matrix.rows))
            instance = SemigroupInstance.build(matrix, basis_indices)
            solution = SemigroupApproximator(arguments.budget).approximate_semigroup(instance, k, witness, target)
            target = matrix.apply(witness) if target is None else target
        else:
            if matrix.rows != 1:
                raise BadInputError(f"The k2 mode needs a one-row instance, got {matrix.rows} rows")
            if target is None:
                target = matrix.apply(witness)
            solution = SemigroupApproximator(arguments.budget).approximate_k2(matrix.entries[0], target[0], witness)

        self._self_check(spec, mode, solution, target, k)
        return Serialization.dumps(Serialization.solution_to_json(solution)), 0

    @staticmethod
    def _self_check(spec, mode: str, solution: SparseSolution, target, k: int) -> None:
        """Recomputes the error of the solution from scratch and checks sparsity and sign constraints."""
        matrix = spec.matrix
        if solution.norm_tag == NormTag.PNORM:
            basis_indices = spec.basis_indices if spec.basis_indices is not None else tuple(range(matrix.rows))
            recomputed = SemigroupInstance.build(matrix, basis_indices).error_of(solution.x, target)
        else:
            recomputed = Fraction(infinity_norm(value - wanted for value, wanted in zip(matrix.apply(solution.x), target)))
        if recomputed != solution.error:
            raise SelfCheckError(f"Reported error {solution.error}, recomputed {recomputed}")
        if len(solution.support) > k:
            raise SelfCheckError(f"The support {sorted(solution.support)} has more than {k} columns")
        if mode != "lattice" and any(value < 0 for value in solution.x):
            raise SelfCheckError(f"Negative coefficient in {solution.x}")

    def command_verify(self, arguments: argparse.Namespace) -> tuple[str, int]:
        families = SWEEP_NAMES if "all" in arguments.family else sorted(set(arguments.family))
        verifier = BoundVerifier(arguments.budget)
        rows: list[BoundReportRow] = []
        for family in families:
            self.log.info(f"Sweeping {family}")
            rows += self._sweep(verifier, family, arguments)

        rows = verifier.sort_rows(rows)
        if arguments.format == "json":
            document = Serialization.dumps([dict(zip(CSV_HEADER, row.as_csv_row())) for row in rows])
        else:
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            writer.writerows(row.as_csv_row() for row in rows)
            document = buffer.getvalue()

        violations = sum(1 for row in rows if row.verdict == Verdict.VIOLATION)
        if violations:
            self.log.error(f"{violations} of {len(rows)} rows violate their bound")
        return document, 1 if violations else 0

    @staticmethod
    def _sweep(verifier: BoundVerifier, family: str, arguments: argparse.Namespace) -> list[BoundReportRow]:
        m, n, k, l = arguments.m, arguments.n, arguments.k, arguments.l  # noqa: E741
        if family == "example1":
            return verifier.rows_example1(m or [1, 2, 3])
        if family == "example2":
            return verifier.rows_example2(Serialization.parse_vector(arguments.primes), m or [1, 2])
        if family == "prop13":
            return verifier.rows_prop13(k or [1, 2, 3], n[0] if n else None)
        if family == "prop14":
            return verifier.rows_prop14(n or [3, 4, 5])
        if family == "prop15":
            return verifier.rows_prop15(n or [5, 6, 7, 8, 9])
        if family == "example3":
            return verifier.rows_example3(l or [3, 4])
        if family == "random-lattice":
            bound = arguments.entry_bound or 9
            return verifier.rows_random_lattice(arguments.count, (m or [2])[0], (n or [4])[0], bound, arguments.seed)
        if family == "random-simplicial":
            bound = arguments.entry_bound or 2
            return verifier.rows_random_simplicial(arguments.count, (m or [2])[0], (n or [4])[0], bound, arguments.seed)
        return verifier.rows_antichain(m or [1, 2, 3], arguments.max_s)

    def command_generate(self, arguments: argparse.Namespace) -> tuple[str, int]:
        generator = InstanceGenerator()
        family = FAMILY_NAMES[arguments.family]

        def required(name: str) -> int:
            value = getattr(arguments, name)
            if value is None:
                raise BadInputError(f"The family {arguments.family} needs --{name}")
            return value

        if family == InstanceFamily.EXAMPLE1:
            spec = generator.gen_example1(required("m"))
        elif family == InstanceFamily.EXAMPLE2:
            spec = generator.gen_example2(Serialization.parse_vector(required("primes")), required("m"), arguments.k)
        elif family == InstanceFamily.EXAMPLE3_BAD_BASIS:
            spec = generator.gen_example3(required("l"))
        elif family == InstanceFamily.PROP13:
            spec = generator.gen_prop13(required("k"), required("n"), arguments.tail_scale)
        elif family == InstanceFamily.PROP14:
            spec = generator.gen_prop14(required("n"), arguments.tau)
        elif family == InstanceFamily.PROP15:
            spec = generator.gen_prop15(required("n"))
        else:
            spec = generator.gen_random(family, required("m"), required("n"), arguments.entry_bound, arguments.seed)

        self.log.info(f"Generated {spec.instance_id}")
        return Serialization.dumps(Serialization.instance_to_json(spec)), 0

    def command_oracle(self, arguments: argparse.Namespace) -> tuple[str, int]:
        spec = Serialization.load_instance(arguments.instance)
        oracle = Oracle(arguments.budget)
        k = arguments.k
        target = Serialization.parse_vector(arguments.b) if arguments.b is not None else None

        if arguments.kind == "lattice":
            if target is None:
                document = Serialization.oracle_report_to_json(oracle.lattice_app(spec.matrix, k))
            else:
                value, support = oracle.lattice_target_error(spec.matrix, target, k)
                document = {
                    "value": None if value is None else format_rational(value),
                    "support": None if support is None else list(support),
                }
            return Serialization.dumps(document), 0

        basis_indices = spec.basis_indices if spec.basis_indices is not None else tuple(range(spec.matrix.rows))
        instance = SemigroupInstance.build(spec.matrix, basis_indices)
        basis_fixed = not arguments.free_basis
        if target is None:
            document = Serialization.oracle_report_to_json(oracle.semigroup_app(instance, k, basis_fixed))
        else:
            value, x, capped = oracle.semigroup_target_error(instance, target, k, basis_fixed)
            document = {
                "value": format_rational(value),
                "x": Serialization.vector_to_json(x),
                "capped": capped,
                "norm": NormTag.PNORM.value,
            }
        return Serialization.dumps(document), 0

    def command_antichain(self, arguments: argparse.Namespace) -> tuple[str, int]:
        oracle = Oracle(arguments.budget)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["m", "s", "max_antichain"])
        for m in arguments.m:
            for s in range(arguments.max_s + 1):
                writer.writerow([m, s, oracle.max_antichain(m, s)])
        return buffer.getvalue(), 0


def handle_stop_signal(signal_number: int, _frame: Optional[FrameType]) -> None:
    """
    Logs the signals SIGINT and SIGTERM and then exits with a non-zero code, since the interrupted document is incomplete.

    Args:
        signal_number: The number representing the signal received.
        _frame: The current stack frame when the signal was received.
    """
    LoggerMixin().log.info(f"Received {signal.Signals(signal_number).name}. Exiting now...")
    sys.exit(1)


def main(argv: Optional[list[str]] = None) -> int:
    return CommandLineInterface().run(argv)


if __name__ == "__main__":
    for signal_to_catch in [signal.SIGINT, signal.SIGTERM]:
        signal.signal(signal_to_catch, handle_stop_signal)

    sys.exit(main())
