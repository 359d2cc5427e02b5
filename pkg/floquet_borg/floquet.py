"""
Floquet matrices ``K_p(τ)`` and their spectral moments.

For quasi-periodic sequences ``y_{n+p} = τ y_n`` the operator reduces to the ``pm x pm`` block
matrix with ``b_n`` on the diagonal, ``a_n`` above and ``a_n^*`` below it, and the wrap-around
corners ``τ a_p`` (bottom-left) and ``τ^{-1} a_p^*`` (top-right). For ``|τ| = 1`` it is Hermitian.
"""

import cmath
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from floquet_borg import linalg
from floquet_borg.errors import OffCircle, ZeroTau
from floquet_borg.operator import BlockJacobiOperator, PeriodicJacobi, coupling_constant, period_extend, total_trace
from floquet_borg.settings import TOL_UNIT_TAU

logger = logging.getLogger(__name__)

MIN_MOMENT_PERIOD = 3


class FloquetMatrix(BaseModel):
    """The matrix ``K_p(τ)`` at one Floquet parameter."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tau: complex
    matrix: np.ndarray

    def hermitian_residual(self) -> float:
        """Relative asymmetry ``‖K − K*‖ / ‖K‖``; vanishes on the unit circle."""
        return linalg.hermitian_residual(self.matrix)


class MomentReport(BaseModel):
    """First and second spectral moments of ``K_p(τ)`` next to their coefficient-side values."""

    tau: tuple[float, float]
    s1: float
    s2: float
    rhs1: float
    rhs2: float
    certificate: float
    extension: int = 1


def _check_nonzero(tau: complex) -> complex:
    tau = complex(tau)
    if tau == 0:
        raise ZeroTau("The Floquet parameter must be non-zero.")
    return tau


def check_unit(tau: complex, tol: float = TOL_UNIT_TAU) -> complex:
    """
    Ensure ``|τ| = 1`` within ``tol``.

    Args:
        tau (complex): Floquet parameter.
        tol (float): Admissible deviation of the modulus from one.

    Returns:
        complex: ``tau`` as a Python complex.
    """
    tau = complex(tau)
    if abs(abs(tau) - 1.0) > tol:
        raise OffCircle(f"|tau| = {abs(tau):.15g} is not on the unit circle.")
    return tau


def build_floquet(J: PeriodicJacobi, tau: complex) -> FloquetMatrix:
    """
    Assemble ``K_p(τ)``.

    For ``p = 1`` the corners fold onto the diagonal (``b_1 + τ a_1 + τ^{-1} a_1^*``); for ``p = 2``
    they add to the off-diagonal blocks (``a_1 + τ^{-1} a_2^*`` above, ``a_1^* + τ a_2`` below).

    Args:
        J (PeriodicJacobi): The operator.
        tau (complex): Non-zero Floquet parameter.

    Returns:
        FloquetMatrix: The assembled matrix.
    """
    tau = _check_nonzero(tau)
    p, m = J.p, J.m
    a, a_adj = J.a, J.adjoint_a()

    blocks = np.zeros((p, p, m, m), dtype=complex)
    for n in range(p):
        blocks[n, n] += J.b[n]
    for n in range(p - 1):
        blocks[n, n + 1] += a[n]
        blocks[n + 1, n] += a_adj[n]
    blocks[p - 1, 0] += tau * a[p - 1]
    blocks[0, p - 1] += a_adj[p - 1] / tau

    matrix = blocks.transpose(0, 2, 1, 3).reshape(p * m, p * m)
    return FloquetMatrix(tau=tau, matrix=matrix)


def floquet_eigenvalues(J: PeriodicJacobi, tau: complex) -> np.ndarray:
    """
    Ascending eigenvalues ``λ_1(τ) ≤ ... ≤ λ_pm(τ)`` of ``K_p(τ)`` for ``|τ| = 1``.

    Args:
        J (PeriodicJacobi): The operator.
        tau (complex): Unit-modulus Floquet parameter.

    Returns:
        np.ndarray: ``pm`` real eigenvalues.
    """
    tau = check_unit(tau)
    return linalg.herm_eig(build_floquet(J, tau).matrix).values


def floquet_eigenvalues_at_angles(J: PeriodicJacobi, angles: np.ndarray) -> np.ndarray:
    """
    Eigenvalues of ``K_p(e^{ix})`` for many quasi-momenta at once.

    Args:
        J (PeriodicJacobi): The operator.
        angles (np.ndarray): Quasi-momenta ``x``.

    Returns:
        np.ndarray: Array of shape ``(len(angles), pm)``, each row ascending.
    """
    stack = np.stack([build_floquet(J, cmath.exp(1j * x)).matrix for x in np.asarray(angles, dtype=float)])
    return linalg.herm_eigvals_batch(stack)


def free_floquet_eigenvalues(p: int, m: int, kappa: float) -> np.ndarray:
    """
    The free-operator spectrum ``2 cos((κ + 2π(s − 1)) / p)``, ``s = 1..p``, each value ``m`` times.

    Args:
        p (int): Period.
        m (int): Block size.
        kappa (float): Quasi-momentum, ``τ = e^{iκ}``.

    Returns:
        np.ndarray: The ``pm`` values in ascending order.
    """
    values = 2 * np.cos((kappa + 2 * np.pi * np.arange(p)) / p)
    return np.sort(np.repeat(values, m))


def _second_moment_rhs(J: PeriodicJacobi) -> float:
    # Σ Tr(b_n² + 2 a_n a_n^*) for Hermitian b_n
    return float(np.sum(np.abs(J.b) ** 2) + 2 * np.sum(np.abs(J.a) ** 2))


def moment_report(J: BlockJacobiOperator, tau: complex) -> MomentReport:
    """
    Spectral moments ``Σ λ_n`` and ``Σ λ_n²`` of ``K_p(τ)`` with the trace-formula right-hand sides.

    Below period three the corner blocks overlap and both moments depend on τ; the operator is
    then viewed with period ``3p`` and both moments are divided by three.
    The certificate ``S2 − 2pm c^{2/(pm)}`` is non-negative for every valid operator.

    Args:
        J (BlockJacobiOperator): The operator.
        tau (complex): Unit-modulus Floquet parameter.

    Returns:
        MomentReport: Moments, right-hand sides and certificate.
    """
    tau = check_unit(tau)
    extension = 1 if J.p >= MIN_MOMENT_PERIOD else MIN_MOMENT_PERIOD
    extended = period_extend(J, extension) if extension > 1 else J
    eigenvalues = floquet_eigenvalues(extended, tau)
    s1 = float(np.sum(eigenvalues)) / extension
    s2 = float(np.sum(eigenvalues**2)) / extension

    pm = J.p * J.m
    certificate = s2 - 2 * pm * coupling_constant(J) ** (2.0 / pm)
    logger.debug("Moments at tau=%s: S1=%.15g S2=%.15g (extension %d)", tau, s1, s2, extension)

    return MomentReport(
        tau=(tau.real, tau.imag),
        s1=s1,
        s2=s2,
        rhs1=total_trace(J),
        rhs2=_second_moment_rhs(J),
        certificate=certificate,
        extension=extension,
    )


def verify_trace_identities(J: BlockJacobiOperator, tau: complex) -> tuple[float, float]:
    """
    Residuals ``(|S1 − Σ Tr b_n|, |S2 − Σ Tr(b_n² + 2a_n²)|)`` of the trace formulas.

    Both identities are checked under the small-period extension rule of :func:`moment_report`.

    Args:
        J (BlockJacobiOperator): The operator.
        tau (complex): Unit-modulus Floquet parameter.

    Returns:
        tuple[float, float]: The two absolute residuals.
    """
    report = moment_report(J, tau)
    return abs(report.s1 - report.rhs1), abs(report.s2 - report.rhs2)
