from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from floquet_borg.operator import BlockJacobiOperator, PeriodicJacobi, free_operator
from floquet_borg.schema import OperatorDocument


@pytest.fixture
def free_3_2() -> BlockJacobiOperator:
    """Fixture that provides the free operator with period 3 and block size 2."""
    return free_operator(3, 2)


@pytest.fixture
def perturbed_3_2() -> BlockJacobiOperator:
    """Fixture that provides free(3, 2) with b_1 = diag(1/10, 0)."""
    b = np.zeros((3, 2, 2))
    b[0] = np.diag([0.1, 0.0])
    return BlockJacobiOperator(a=np.broadcast_to(np.eye(2), (3, 2, 2)), b=b)


@pytest.fixture
def scaled_3_1() -> BlockJacobiOperator:
    """Fixture that provides the scalar operator a = (2, 1/2, 1), b = 0, whose coupling constant is one."""
    return BlockJacobiOperator(a=np.array([2.0, 0.5, 1.0]).reshape(3, 1, 1), b=np.zeros((3, 1, 1)))


@pytest.fixture
def gapped_2_1() -> BlockJacobiOperator:
    """Fixture that provides the two-band operator p = 2, m = 1, a = (1, 1), b = (1/2, -1/2)."""
    return BlockJacobiOperator(a=np.ones((2, 1, 1)), b=np.array([0.5, -0.5]).reshape(2, 1, 1))


@pytest.fixture
def write_operator(tmp_path: Path) -> Callable[..., Path]:
    """Fixture that writes an operator document into a temporary file and returns its path."""

    def _write(J: PeriodicJacobi, name: str = "operator.json") -> Path:
        path = tmp_path / name
        path.write_text(OperatorDocument.from_operator(J).dumps(), encoding="utf-8")
        return path

    return _write
