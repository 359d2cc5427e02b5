"""
Fundamental solutions, the monodromy matrix and its multipliers.

Solutions of ``a_n y_{n+1} + b_n y_n + a_{n-1}^* y_{n-1} = z y_n`` are propagated over one
period from the two initial pairs ``(ϑ_0, ϑ_1) = (I, 0)`` and ``(φ_0, φ_1) = (0, I)``. The
``2m x 2m`` monodromy matrix maps ``(y_0, y_1)`` to ``(y_p, y_{p+1})``; ``z`` lies in the
spectrum exactly when one of its eigenvalues (multipliers) is unimodular.
"""


import numpy as np
from pydantic import BaseModel, ConfigDict

from floquet_borg import linalg
from floquet_borg.errors import ZeroTau
from floquet_borg.floquet import build_floquet
from floquet_borg.linalg import GeneralEigResult
from floquet_borg.operator import BlockJacobiOperator, coupling_constant, period_extend
from floquet_borg.settings import TOL_CIRCLE
from floquet_borg.utils import max_matched_deviation


class FundamentalPair(BaseModel):
    """The solutions ``ϑ_n(z), φ_n(z)`` for ``n = 0 .. p + 1``, each of shape ``(p + 2, m, m)``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z: complex
    theta: np.ndarray
    phi: np.ndarray

    def recursion_residual(self, J: BlockJacobiOperator) -> float:
        """Largest relative residual of the three-term recursion over ``n = 1 .. p``."""
        a, a_adj, b = J.a, J.adjoint_a(), J.b
        worst = 0.0
        for y in (self.theta, self.phi):
            for n in range(1, J.p + 1):
                lhs = a[n - 1] @ y[n + 1] + b[n - 1] @ y[n] + a_adj[(n - 2) % J.p] @ y[n - 1]
                scale = max(1.0, float(np.linalg.norm(y[n + 1])), abs(self.z) * float(np.linalg.norm(y[n])))
                worst = max(worst, float(np.linalg.norm(lhs - self.z * y[n])) / scale)
        return worst


class MonodromyMatrix(BaseModel):
    """``M_p(z) = [[ϑ_p, φ_p], [ϑ_{p+1}, φ_{p+1}]]`` with its multipliers."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z: complex
    matrix: np.ndarray
    multipliers: GeneralEigResult

    def det_residual(self) -> float:
        """``|det M_p(z) − 1|``."""
        return abs(linalg.det(self.matrix) - 1.0)


def fundamental_solutions(J: BlockJacobiOperator, z: complex) -> FundamentalPair:
    """
    Propagate both fundamental solutions across one period.

    ``y_{n+1} = a_n^{-1}((z − b_n) y_n − a_{n−1}^* y_{n−1})`` for ``n = 1 .. p`` with
    ``a_0 = a_p``.

    Args:
        J (BlockJacobiOperator): The operator.
        z (complex): Spectral parameter.

    Returns:
        FundamentalPair: ``ϑ_0 .. ϑ_{p+1}`` and ``φ_0 .. φ_{p+1}``.
    """
    z = complex(z)
    p, m = J.p, J.m
    a, a_adj, b = J.a, J.adjoint_a(), J.b

    # both solutions side by side: columns [ϑ | φ]
    y = np.zeros((p + 2, m, 2 * m), dtype=complex)
    y[0, :, :m] = np.eye(m)
    y[1, :, m:] = np.eye(m)
    for n in range(1, p + 1):
        rhs = (z * np.eye(m) - b[n - 1]) @ y[n] - a_adj[(n - 2) % p] @ y[n - 1]
        y[n + 1] = linalg.solve(a[n - 1], rhs)

    return FundamentalPair(z=z, theta=y[:, :, :m], phi=y[:, :, m:])


def monodromy_matrix(J: BlockJacobiOperator, z: complex) -> MonodromyMatrix:
    """
    The monodromy matrix ``M_p(z)`` and its multipliers ``τ_1(z) .. τ_2m(z)``.

    Args:
        J (BlockJacobiOperator): The operator.
        z (complex): Spectral parameter.

    Returns:
        MonodromyMatrix: The matrix and its eigenvalues.
    """
    pair = fundamental_solutions(J, z)
    p = J.p
    matrix = np.block([[pair.theta[p], pair.phi[p]], [pair.theta[p + 1], pair.phi[p + 1]]])
    return MonodromyMatrix(z=pair.z, matrix=matrix, multipliers=linalg.gen_eig(matrix))


def multipliers(J: BlockJacobiOperator, z: complex) -> np.ndarray:
    """Shorthand for the multiplier multiset of ``M_p(z)``."""
    return monodromy_matrix(J, z).multipliers.values


def char_det(J: BlockJacobiOperator, z: complex, tau: complex) -> complex:
    """
    The characteristic function ``D_p(z, τ) = det(M_p(z) − τ I_2m)``.

    Args:
        J (BlockJacobiOperator): The operator.
        z (complex): Spectral parameter.
        tau (complex): Non-zero multiplier candidate.

    Returns:
        complex: The determinant.
    """
    if complex(tau) == 0:
        raise ZeroTau("The multiplier candidate tau must be non-zero.")
    monodromy = monodromy_matrix(J, z).matrix
    return linalg.det(monodromy - complex(tau) * np.eye(monodromy.shape[0]))


def floquet_char_det(J: BlockJacobiOperator, z: complex, tau: complex) -> complex:
    """
    The Floquet side ``c^{-1} (−τ)^m det(z − K_p(τ))`` of the characteristic function.

    Under the recursion with ``a_n^{-1}`` at every step the coupling constant enters inversely;
    both forms agree for ``c = 1``.
    """
    tau = complex(tau)
    floquet = build_floquet(J, tau).matrix
    return (-tau) ** J.m * linalg.det(complex(z) * np.eye(floquet.shape[0]) - floquet) / coupling_constant(J)


def verify_det_identity(J: BlockJacobiOperator, z: complex, tau: complex) -> float:
    """
    Relative residual ``|D_p(z, τ) − c^{-1}(−τ)^m det(z − K_p(τ))| / max(1, |D_p|)``.

    Args:
        J (BlockJacobiOperator): The operator.
        z (complex): Spectral parameter.
        tau (complex): Non-zero Floquet parameter, not necessarily unimodular.

    Returns:
        float: The relative residual.
    """
    monodromy_side = char_det(J, z, tau)
    return abs(monodromy_side - floquet_char_det(J, z, tau)) / max(1.0, abs(monodromy_side))


def spectral_membership(J: BlockJacobiOperator, z: float, tol_circle: float = TOL_CIRCLE) -> tuple[bool, float]:
    """
    Decide ``z ∈ σ(J)`` from the multipliers.

    Args:
        J (BlockJacobiOperator): The operator.
        z (float): Real spectral parameter.
        tol_circle (float): Admissible deviation of a multiplier modulus from one.

    Returns:
        tuple[bool, float]: Membership and ``min_j ||τ_j(z)| − 1|``.
    """
    distance = float(np.min(np.abs(np.abs(multipliers(J, float(z))) - 1.0)))
    return distance <= tol_circle, distance


def multiplier_power_check(J: BlockJacobiOperator, k: int, z: complex) -> float:
    """
    Matched-pair deviation between the multipliers of the ``k``-fold extension and ``τ_j(z)^k``.

    Args:
        J (BlockJacobiOperator): The operator.
        k (int): Extension factor.
        z (complex): Spectral parameter.

    Returns:
        float: Largest relative matched deviation.
    """
    powers = multipliers(J, z) ** k
    return max_matched_deviation(multipliers(period_extend(J, k), z), powers, relative=True)


def has_real_coefficients(J: BlockJacobiOperator) -> bool:
    """Whether every coefficient block is real."""
    return not (np.any(J.a.imag) or np.any(J.b.imag))


def pairing_residual(J: BlockJacobiOperator, z: float) -> float:
    """
    Deviation of the multiplier set from its reflection in the unit circle.

    Real coefficients pair ``τ`` with ``1/τ``; Hermitian complex coefficients pair ``τ`` with
    ``1/τ̄``. Both follow from the symplectic structure of ``M_p(z)`` at real ``z``.

    Args:
        J (BlockJacobiOperator): The operator.
        z (float): Real spectral parameter.

    Returns:
        float: Largest relative matched deviation.
    """
    values = multipliers(J, float(z))
    images = 1 / values if has_real_coefficients(J) else 1 / values.conj()
    return max_matched_deviation(values, images, relative=True)


def conjugation_residual(J: BlockJacobiOperator, z: float) -> float:
    """Deviation of the multiplier set from its complex conjugate (closed for real coefficients)."""
    values = multipliers(J, float(z))
    return max_matched_deviation(values, values.conj(), relative=True)
