"""
Periodic block Jacobi operators.

An operator of period ``p`` and block size ``m`` acts on vector sequences by

    (J y)_n = a_n y_{n+1} + b_n y_n + a_{n-1}^* y_{n-1}

with p-periodic ``m x m`` coefficients. Coefficients are stored 0-based: ``J.a[0]`` is the
first off-diagonal block of the period, ``J.a[p - 1]`` the one that wraps around.
"""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Any, Self

from floquet_borg import linalg
from floquet_borg.errors import InvalidDimension
from floquet_borg.settings import TOL_GAUGE, TOL_HERM, TOL_SING

logger = logging.getLogger(__name__)


class _PeriodicCoefficients(BaseModel):
    """
    Shared storage for one period of block coefficients.

    Both coefficient arrays have shape ``(p, m, m)``, are complex and read-only.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, populate_by_name=True)

    a: np.ndarray
    diagonal: np.ndarray = Field(alias="b")

    @field_validator("a", "diagonal", mode="before")
    @classmethod
    def _as_frozen_array(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=complex)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        for name, array in (("a", self.a), ("b", self.diagonal)):
            if array.ndim != 3 or array.shape[1] != array.shape[2]:
                raise ValueError(f"'{name}' must have shape (p, m, m), got {array.shape}.")
            if array.shape[0] < 1 or array.shape[1] < 1:
                raise ValueError(f"'{name}' must hold at least one non-empty block.")
            if not np.all(np.isfinite(array)):
                raise ValueError(f"'{name}' contains NaN or Inf entries.")

        if self.a.shape != self.diagonal.shape:
            raise ValueError(f"'a' and 'b' shapes differ: {self.a.shape} != {self.diagonal.shape}.")

        return self

    @property
    def p(self) -> int:
        """Period."""
        return self.a.shape[0]

    @property
    def m(self) -> int:
        """Block size."""
        return self.a.shape[1]

    @property
    def b(self) -> np.ndarray:
        """Diagonal blocks, shape ``(p, m, m)``."""
        return self.diagonal

    def adjoint_a(self) -> np.ndarray:
        """Adjoints of the off-diagonal blocks, shape ``(p, m, m)``."""
        return np.conj(np.swapaxes(self.a, 1, 2))

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)  # type: ignore[attr-defined]


class BlockJacobiOperator(_PeriodicCoefficients):
    """
    Self-adjoint periodic block Jacobi operator with positive-definite ``a_n`` and Hermitian ``b_n``.

    Construction only checks shapes and finiteness; use :func:`validate` for the spectral
    invariants. Scalar energy shifts are kept apart from the stored diagonal as the sequence
    ``shifts`` of applied values; an exact opposite of the last one cancels it, so shifting back
    and forth restores the coefficients bit for bit.
    """

    shifts: tuple[float, ...] = ()

    @property
    def shift(self) -> float:
        """Total energy shift."""
        return math.fsum(self.shifts)

    @property
    def b(self) -> np.ndarray:
        if not self.shifts:
            return self.diagonal
        shifted = self.diagonal - self.shift * np.eye(self.m)
        shifted.setflags(write=False)
        return shifted


class GeneralBlockJacobi(_PeriodicCoefficients):
    """Periodic block Jacobi operator whose off-diagonal blocks are merely invertible."""


PeriodicJacobi = BlockJacobiOperator | GeneralBlockJacobi


class ValidationFailure(BaseModel):
    """A single violated coefficient invariant."""

    kind: Literal["NotHermitian", "NotPositiveDefinite", "Singular"]
    coefficient: Literal["a", "b"]
    site: int = Field(description="1-based site index inside the period")
    value: float
    message: str


class ValidationReport(BaseModel):
    """Residuals of every coefficient check; ``passed`` iff ``failures`` is empty."""

    passed: bool
    hermiticity_residuals_a: list[float] = Field(default_factory=list)
    hermiticity_residuals_b: list[float] = Field(default_factory=list)
    min_eigenvalues_a: list[float] | None = None
    min_singular_values_a: list[float] | None = None
    failures: list[ValidationFailure] = Field(default_factory=list)


class GaugeResult(BaseModel):
    """
    Positive-coefficient normalization of a general operator on one period.

    ``unitaries`` holds the window ``u_0 .. u_p`` with ``u_0 = I`` such that
    ``ã_n = u_n a_n u_{n+1}^*`` and ``b̃_n = u_n b_n u_n^*``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    normalized: BlockJacobiOperator
    unitaries: np.ndarray

    @property
    def holonomy(self) -> np.ndarray:
        """The closing unitary ``u_p`` of the window."""
        return self.unitaries[-1]

    def is_periodic(self, tol: float = TOL_GAUGE) -> bool:
        """
        Whether the holonomy is a scalar phase, i.e. the normalized coefficients repeat with period p.

        Args:
            tol (float): Admissible deviation from a scalar multiple of the identity.

        Returns:
            bool: True if the normalized operator is unitarily equivalent to the input.
        """
        holonomy = self.holonomy
        phase = np.trace(holonomy) / holonomy.shape[0]
        return bool(np.linalg.norm(holonomy - phase * np.eye(holonomy.shape[0])) <= tol)

    def twisted(self) -> GeneralBlockJacobi:
        """
        The normalized coefficients closed with the holonomy twist.

        The last off-diagonal block becomes ``a_p u_p^*``; the result is unitarily equivalent to the
        input operator at every Floquet parameter.
        """
        a = np.array(self.normalized.a)
        a[-1] = a[-1] @ self.holonomy.conj().T
        return GeneralBlockJacobi(a=a, b=self.normalized.b)

    def factorization_residuals(self, general: GeneralBlockJacobi) -> tuple[float, float]:
        """
        Largest relative residuals of ``ã_n = u_n a_n u_{n+1}^*`` and ``b̃_n = u_n b_n u_n^*``.

        Args:
            general (GeneralBlockJacobi): The operator that was normalized.

        Returns:
            tuple[float, float]: The off-diagonal and diagonal residuals.
        """
        u = self.unitaries
        a_residual = b_residual = 0.0
        for n in range(general.p):
            a_rebuilt = u[n] @ self.normalized.a[n] @ u[n + 1].conj().T
            b_rebuilt = u[n] @ self.normalized.b[n] @ u[n].conj().T
            a_scale = max(1.0, float(np.linalg.norm(general.a[n])))
            b_scale = max(1.0, float(np.linalg.norm(general.b[n])))
            a_residual = max(a_residual, float(np.linalg.norm(general.a[n] - a_rebuilt)) / a_scale)
            b_residual = max(b_residual, float(np.linalg.norm(general.b[n] - b_rebuilt)) / b_scale)

        return a_residual, b_residual


def _check_dimensions(**counts: int) -> None:
    for name, count in counts.items():
        if count < 1:
            raise InvalidDimension(f"{name} must be at least 1, got {count}.")


def free_operator(p: int, m: int) -> BlockJacobiOperator:
    """
    The unperturbed operator with ``a_n = I_m`` and ``b_n = 0``.

    Args:
        p (int): Period.
        m (int): Block size.

    Returns:
        BlockJacobiOperator: The free operator, whose spectrum is ``[-2, 2]``.
    """
    _check_dimensions(p=p, m=m)
    return BlockJacobiOperator(a=np.broadcast_to(np.eye(m), (p, m, m)), b=np.zeros((p, m, m)))


def coupling_constant(J: PeriodicJacobi) -> float:
    """
    The coupling constant ``c = det(a_1 ... a_p)``.

    Args:
        J (PeriodicJacobi): The operator.

    Returns:
        float: The real part of the determinant; positive for a valid operator.
    """
    return float(np.prod([linalg.det(block) for block in J.a]).real)


def distance_from_free(J: PeriodicJacobi) -> float:
    """Coefficient distance ``Σ ‖a_n − I‖_F + ‖b_n‖_F`` from the free operator."""
    identity = np.eye(J.m)
    return float(sum(np.linalg.norm(a - identity) + np.linalg.norm(b) for a, b in zip(J.a, J.b)))


def norm_bound(J: PeriodicJacobi) -> float:
    """Upper bound ``max ‖b_n‖ + 2 max ‖a_n‖`` (spectral norms) of the operator norm."""
    return float(max(np.linalg.norm(b, 2) for b in J.b) + 2 * max(np.linalg.norm(a, 2) for a in J.a))


def validate(J: PeriodicJacobi, tol_herm: float = TOL_HERM, tol_sing: float = TOL_SING) -> ValidationReport:
    """
    Check the coefficient invariants of an operator without raising.

    For a :class:`BlockJacobiOperator` every ``a_n`` must be Hermitian positive definite; for a
    :class:`GeneralBlockJacobi` every ``a_n`` must be invertible. Every ``b_n`` must be Hermitian.

    Args:
        J (PeriodicJacobi): The operator to check.
        tol_herm (float): Admissible relative asymmetry.
        tol_sing (float): Relative floor for smallest eigenvalues and singular values.

    Returns:
        ValidationReport: Residuals and the list of failures.
    """
    failures: list[ValidationFailure] = []
    herm_b = [linalg.hermitian_residual(block) for block in J.b]
    herm_a = [linalg.hermitian_residual(block) for block in J.a]

    for site, residual in enumerate(herm_b, start=1):
        if residual > tol_herm:
            failures.append(
                ValidationFailure(
                    kind="NotHermitian",
                    coefficient="b",
                    site=site,
                    value=residual,
                    message=f"b_{site} is not Hermitian (relative asymmetry {residual:.3e}).",
                )
            )

    report = ValidationReport(passed=True, hermiticity_residuals_a=herm_a, hermiticity_residuals_b=herm_b)

    if isinstance(J, GeneralBlockJacobi):
        min_singular = [float(np.linalg.svd(block, compute_uv=False)[-1]) for block in J.a]
        for site, (block, sigma) in enumerate(zip(J.a, min_singular), start=1):
            if sigma <= tol_sing * max(float(np.linalg.norm(block, 2)), np.finfo(float).tiny):
                failures.append(
                    ValidationFailure(
                        kind="Singular",
                        coefficient="a",
                        site=site,
                        value=sigma,
                        message=f"a_{site} is singular (smallest singular value {sigma:.3e}).",
                    )
                )
        report.min_singular_values_a = min_singular
    else:
        min_eigenvalues = [float(np.linalg.eigvalsh((block + block.conj().T) / 2)[0]) for block in J.a]
        for site, (residual, low) in enumerate(zip(herm_a, min_eigenvalues), start=1):
            if residual > tol_herm:
                failures.append(
                    ValidationFailure(
                        kind="NotHermitian",
                        coefficient="a",
                        site=site,
                        value=residual,
                        message=f"a_{site} is not Hermitian (relative asymmetry {residual:.3e}).",
                    )
                )
            if low <= tol_sing * max(1.0, float(np.linalg.norm(J.a[site - 1], 2))):
                failures.append(
                    ValidationFailure(
                        kind="NotPositiveDefinite",
                        coefficient="a",
                        site=site,
                        value=low,
                        message=f"a_{site} is not positive definite (smallest eigenvalue {low:.3e}).",
                    )
                )
        report.min_eigenvalues_a = min_eigenvalues

    report.failures = failures
    report.passed = not failures
    return report


def period_extend(J: BlockJacobiOperator, k: int) -> BlockJacobiOperator:
    """
    View a p-periodic operator as pk-periodic.

    Args:
        J (BlockJacobiOperator): The operator.
        k (int): Extension factor.

    Returns:
        BlockJacobiOperator: The same operator with period ``p * k``; its coupling constant is ``c^k``.
    """
    _check_dimensions(k=k)
    return BlockJacobiOperator(a=np.tile(J.a, (k, 1, 1)), b=np.tile(J.diagonal, (k, 1, 1)), shifts=J.shifts)


def shift_operator(J: BlockJacobiOperator, s: float) -> BlockJacobiOperator:
    """
    The operator ``J − s``: every ``b_n`` becomes ``b_n − s I_m``.

    Args:
        J (BlockJacobiOperator): The operator.
        s (float): Energy shift.

    Returns:
        BlockJacobiOperator: The shifted operator; all Floquet eigenvalues move by ``−s``.
    """
    s = float(s)
    if s == 0.0:
        return J
    if J.shifts and J.shifts[-1] == -s:
        return J.model_copy(update={"shifts": J.shifts[:-1]})
    return J.model_copy(update={"shifts": (*J.shifts, s)})


def center_trace(J: BlockJacobiOperator) -> BlockJacobiOperator:
    """Shift by ``Σ Tr b_n / (pm)`` so that the diagonal blocks have zero total trace."""
    return shift_operator(J, total_trace(J) / (J.p * J.m))


def unit_coupling(J: BlockJacobiOperator) -> BlockJacobiOperator:
    """Scale every ``a_n`` by ``c^{-1/(pm)}`` so that the coupling constant becomes one."""
    factor = coupling_constant(J) ** (-1.0 / (J.p * J.m))
    return BlockJacobiOperator(a=J.a * factor, b=J.diagonal, shifts=J.shifts)


def _random_hermitian(rng: np.random.Generator, m: int, real: bool) -> np.ndarray:
    x = rng.standard_normal((m, m))
    if not real:
        x = x + 1j * rng.standard_normal((m, m))
    return (x + x.conj().T) / 2


def _random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def _positive_block(rng: np.random.Generator, m: int, spread: float, real: bool) -> np.ndarray:
    block = np.eye(m) + spread * _random_hermitian(rng, m, real)
    low = np.linalg.eigvalsh(block)[0]
    if low <= 0.0:
        block = block + (abs(low) + 0.1) * np.eye(m)
    return block


def random_operator(p: int, m: int, seed: int, spread: float, real: bool = False) -> BlockJacobiOperator:
    """
    A reproducible random perturbation of the free operator.

    ``a_n = I + spread · H_n`` (shifted up by ``(|λ_min| + 0.1) I`` when not positive definite) and
    ``b_n = spread · H'_n`` with Gaussian Hermitian ``H_n, H'_n``.

    Args:
        p (int): Period.
        m (int): Block size.
        seed (int): Seed of the generator.
        spread (float): Perturbation size; ``0`` gives the free operator.
        real (bool): Draw real symmetric instead of complex Hermitian blocks.

    Returns:
        BlockJacobiOperator: A valid operator.
    """
    _check_dimensions(p=p, m=m)
    rng = np.random.default_rng(seed)
    a = [_positive_block(rng, m, spread, real) for _ in range(p)]
    b = [spread * _random_hermitian(rng, m, real) for _ in range(p)]
    return BlockJacobiOperator(a=a, b=b)


def random_general_operator(p: int, m: int, seed: int, spread: float) -> GeneralBlockJacobi:
    """
    A reproducible random operator with invertible, non-Hermitian off-diagonal blocks.

    ``ã_n = q_n (I + spread · H_n)`` with Haar-like unitary ``q_n``; ``b̃_n = spread · H'_n``.
    """
    _check_dimensions(p=p, m=m)
    rng = np.random.default_rng(seed)
    a = [_random_unitary(rng, m) @ _positive_block(rng, m, spread, real=False) for _ in range(p)]
    b = [spread * _random_hermitian(rng, m, real=False) for _ in range(p)]
    return GeneralBlockJacobi(a=a, b=b)


def gauge_normalize(G: GeneralBlockJacobi, tol_sing: float = TOL_SING) -> GaugeResult:
    """
    Turn invertible off-diagonal blocks into positive-definite ones by a diagonal unitary gauge.

    Marching left to right from ``u_0 = I``, the left polar decomposition
    ``u_n^* ã_n = a_n u_{n+1}^*`` defines ``a_n > 0`` and ``u_{n+1}``; the diagonal blocks become
    ``b_n = u_n^* b̃_n u_n``.

    Args:
        G (GeneralBlockJacobi): The operator to normalize.
        tol_sing (float): Relative floor for the smallest singular value of each ``ã_n``.

    Returns:
        GaugeResult: The normalized coefficients and the unitary window ``u_0 .. u_p``.
    """
    unitaries = [np.eye(G.m, dtype=complex)]
    a, b = [], []
    for n in range(G.p):
        u = unitaries[n]
        h, q = linalg.polar_left(u.conj().T @ G.a[n], tol_sing=tol_sing)
        diagonal = u.conj().T @ G.b[n] @ u
        a.append(h)
        b.append((diagonal + diagonal.conj().T) / 2)
        unitaries.append(q.conj().T)

    result = GaugeResult(normalized=BlockJacobiOperator(a=a, b=b), unitaries=np.array(unitaries))
    logger.debug("Gauge window closed; periodic holonomy: %s", result.is_periodic())
    return result


def total_trace(J: PeriodicJacobi) -> float:
    """``Σ Tr b_n`` over one period."""
    return float(np.trace(J.b, axis1=1, axis2=2).sum().real)
