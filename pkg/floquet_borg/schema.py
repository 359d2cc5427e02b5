"""
JSON documents for operators and gauge results.

Complex numbers are always written as ``[re, im]`` pairs, matrices row-major. Documents are
first checked structurally against the JSON schema generated from :class:`OperatorDocument`,
then validated by pydantic and converted into operator models.
"""

from functools import cache

import numpy as np
from jsonschema import Draft202012Validator
from pydantic import BaseModel, Field, model_validator
from typing_extensions import Any, Self

from floquet_borg.operator import BlockJacobiOperator, GaugeResult, GeneralBlockJacobi, PeriodicJacobi
from floquet_borg.utils import canonical_json

ComplexPair = tuple[float, float]
Matrix = list[list[ComplexPair]]


def matrix_to_pairs(matrix: np.ndarray) -> Matrix:
    """Row-major ``[re, im]`` pairs of a complex matrix."""
    return [[(float(value.real), float(value.imag)) for value in row] for row in np.asarray(matrix, dtype=complex)]


def pairs_to_array(blocks: list[Matrix]) -> np.ndarray:
    """Stack ``[re, im]`` matrices into a complex array of shape ``(len(blocks), m, m)``."""
    pairs = np.array(blocks, dtype=float)
    return pairs[..., 0] + 1j * pairs[..., 1]


class OperatorDocument(BaseModel):
    """
    One period of coefficients as stored on disk.

    ``general`` selects :class:`GeneralBlockJacobi` (invertible ``a_n``) instead of
    :class:`BlockJacobiOperator` (positive-definite ``a_n``).
    """

    p: int = Field(ge=1)
    m: int = Field(ge=1)
    a: list[Matrix]
    b: list[Matrix]
    general: bool = False

    @model_validator(mode="after")
    def _check_dimensions(self) -> Self:
        for name, blocks in (("a", self.a), ("b", self.b)):
            if len(blocks) != self.p:
                raise ValueError(f"'{name}' holds {len(blocks)} blocks, expected p = {self.p}.")
            for site, block in enumerate(blocks, start=1):
                if len(block) != self.m or any(len(row) != self.m for row in block):
                    raise ValueError(f"{name}_{site} is not {self.m} x {self.m}.")
        return self

    @classmethod
    def from_operator(cls, J: PeriodicJacobi) -> "OperatorDocument":
        """
        Describe an operator; a non-zero shift is folded into the diagonal blocks.

        Args:
            J (PeriodicJacobi): The operator.

        Returns:
            OperatorDocument: The document.
        """
        return cls(
            p=J.p,
            m=J.m,
            a=[matrix_to_pairs(block) for block in J.a],
            b=[matrix_to_pairs(block) for block in J.b],
            general=isinstance(J, GeneralBlockJacobi),
        )

    def to_operator(self) -> PeriodicJacobi:
        """
        Build the operator model; coefficient invariants are left to :func:`floquet_borg.operator.validate`.

        Returns:
            PeriodicJacobi: A :class:`GeneralBlockJacobi` if ``general`` is set, else a :class:`BlockJacobiOperator`.
        """
        model = GeneralBlockJacobi if self.general else BlockJacobiOperator
        return model(a=pairs_to_array(self.a), b=pairs_to_array(self.b))

    def dumps(self) -> str:
        """Canonical text: sorted keys, shortest round-trip floats, trailing newline."""
        return canonical_json(self.model_dump(mode="json"))


class GaugeDocument(BaseModel):
    """Output of the gauge normalization: operator, unitary window and residuals."""

    operator: OperatorDocument
    unitaries: list[Matrix]
    periodic: bool
    residual_a: float
    residual_b: float

    @classmethod
    def from_result(cls, result: GaugeResult, general: GeneralBlockJacobi, tol: float) -> "GaugeDocument":
        residual_a, residual_b = result.factorization_residuals(general)
        return cls(
            operator=OperatorDocument.from_operator(result.normalized),
            unitaries=[matrix_to_pairs(u) for u in result.unitaries],
            periodic=result.is_periodic(tol),
            residual_a=residual_a,
            residual_b=residual_b,
        )

    def dumps(self) -> str:
        return canonical_json(self.model_dump(mode="json"))


@cache
def operator_schema() -> dict[str, Any]:
    """The JSON schema of :class:`OperatorDocument`."""
    return OperatorDocument.model_json_schema()


def schema_errors(raw: Any) -> list[str]:
    """
    Structural violations of a parsed JSON document, one message per violation.

    Args:
        raw (Any): The parsed document.

    Returns:
        list[str]: ``"<path>: <message>"`` entries in document order; empty when the document conforms.
    """
    validator = Draft202012Validator(operator_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda error: [str(part) for part in error.absolute_path])
    return [f"{'/'.join(str(part) for part in error.absolute_path) or '<root>'}: {error.message}" for error in errors]
