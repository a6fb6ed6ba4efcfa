import json
from fractions import Fraction
from typing import Any, Optional

from approximation_classes import (
    InstanceFamily,
    InstanceSpec,
    OracleReport,
    Relation,
    RootBound,
    SparseSolution,
    format_rational,
)
from exact_linalg import IntMatrix, IntVector
from exceptions import BadInputError


class Serialization:
    """
    Converts matrices, instances, solutions and oracle reports from and to JSON documents. Integers are written as
    decimal strings and rationals as "p/q" strings, so arbitrary precision survives a round trip through any JSON reader.
    """

    @staticmethod
    def matrix_to_json(matrix: IntMatrix) -> dict[str, Any]:
        return {
            "rows": matrix.rows,
            "cols": matrix.cols,
            "entries": [[str(entry) for entry in row] for row in matrix.entries],
        }

    @staticmethod
    def matrix_from_json(document: dict[str, Any]) -> IntMatrix:
        try:
            rows, cols, entries = int(document["rows"]), int(document["cols"]), document["entries"]
        except (KeyError, TypeError, ValueError) as error:
            raise BadInputError(f"Malformed matrix document: {error}")
        if len(entries) != rows or any(len(row) != cols for row in entries):
            raise BadInputError(f"The matrix document does not have the announced shape {rows}x{cols}")
        return IntMatrix.from_rows([Serialization.parse_integer(entry) for entry in row] for row in entries)

    @staticmethod
    def parse_integer(value: str | int) -> int:
        if isinstance(value, bool):
            raise BadInputError(f"Expected an integer, got {value!r}")
        try:
            return int(value)
        except (TypeError, ValueError):
            raise BadInputError(f"Expected an integer, got {value!r}")

    @staticmethod
    def parse_rational(value: str | int) -> Fraction:
        try:
            return Fraction(value)
        except (TypeError, ValueError, ZeroDivisionError):
            raise BadInputError(f"Expected a rational like 3 or -7/2, got {value!r}")

    @staticmethod
    def parse_vector(text: str) -> IntVector:
        """Parses a comma separated list of integers as given on the command line, e.g. "1,-2,3"."""
        text = text.strip()
        if text == "":
            raise BadInputError("Expected a comma separated list of integers, got an empty string")
        return tuple(Serialization.parse_integer(part.strip()) for part in text.split(","))

    @staticmethod
    def vector_to_json(vector: Optional[IntVector]) -> Optional[list[str]]:
        if vector is None:
            return None
        return [str(value) for value in vector]

    @staticmethod
    def vector_from_json(document: Optional[list]) -> Optional[IntVector]:
        if document is None:
            return None
        return tuple(Serialization.parse_integer(value) for value in document)

    @staticmethod
    def instance_to_json(instance: InstanceSpec) -> dict[str, Any]:
        return {
            "family": instance.family.value,
            "parameters": instance.parameters,
            "matrix": Serialization.matrix_to_json(instance.matrix),
            "basis_indices": None if instance.basis_indices is None else list(instance.basis_indices),
            "target": Serialization.vector_to_json(instance.target),
            "witness": Serialization.vector_to_json(instance.witness),
            "predicted": None if instance.predicted is None else format_rational(instance.predicted),
            "predicted_relation": None if instance.predicted_relation is None else instance.predicted_relation.value,
            "predicted_scale": instance.predicted_scale,
        }

    @staticmethod
    def instance_from_json(document: dict[str, Any]) -> InstanceSpec:
        try:
            family = InstanceFamily(document["family"])
            relation = document.get("predicted_relation")
            predicted = document.get("predicted")
            basis_indices = document.get("basis_indices")
            return InstanceSpec(
                family=family,
                parameters=dict(document.get("parameters", {})),
                matrix=Serialization.matrix_from_json(document["matrix"]),
                basis_indices=None if basis_indices is None else tuple(int(index) for index in basis_indices),
                target=Serialization.vector_from_json(document.get("target")),
                witness=Serialization.vector_from_json(document.get("witness")),
                predicted=None if predicted is None else Serialization.parse_rational(predicted),
                predicted_relation=None if relation is None else Relation(relation),
                predicted_scale=document.get("predicted_scale"),
            )
        except (KeyError, TypeError, ValueError) as error:
            if isinstance(error, BadInputError):
                raise
            raise BadInputError(f"Malformed instance document: {error}")

    @staticmethod
    def solution_to_json(solution: SparseSolution) -> dict[str, Any]:
        return {
            "x": Serialization.vector_to_json(solution.x),
            "support": sorted(solution.support),
            "error": format_rational(solution.error),
            "certified_bound": Serialization.bound_to_json(solution.certified_bound),
            "norm": solution.norm_tag.value,
        }

    @staticmethod
    def bound_to_json(bound: Optional[RootBound]) -> Optional[str]:
        if bound is None:
            return None
        return str(bound)

    @staticmethod
    def oracle_report_to_json(report: OracleReport) -> dict[str, Any]:
        return {
            "value": format_rational(report.value),
            "witness_b": Serialization.vector_to_json(report.witness_b),
            "witness_support": None if report.witness_support is None else list(report.witness_support),
            "enumeration_stats": report.enumeration_stats,
            "norm": report.norm_tag.value,
            "lower_bound_only": report.lower_bound_only,
        }

    @staticmethod
    def dumps(document: Any) -> str:
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def load_instance(path: str) -> InstanceSpec:
        try:
            with open(path, encoding="utf-8") as file:
                document = json.load(file)
        except (OSError, json.JSONDecodeError) as error:
            raise BadInputError(f"Could not read the instance file {path}: {error}")
        return Serialization.instance_from_json(document)

    @staticmethod
    def write_instance(instance: InstanceSpec, path: str) -> None:
        with open(path, "w", encoding="utf-8") as file:
            file.write(Serialization.dumps(Serialization.instance_to_json(instance)))
