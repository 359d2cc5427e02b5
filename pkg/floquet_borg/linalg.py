"""
Dense complex-matrix kernels shared by every other module.

All functions are pure: they copy nothing they do not need, never mutate their inputs and
raise the errors of :mod:`floquet_borg.errors` when their numerical contract cannot be met.
The heavy lifting is delegated to LAPACK through :mod:`scipy.linalg`.
"""

import warnings

import numpy as np
import scipy.linalg as la
from pydantic import BaseModel, ConfigDict

from floquet_borg.errors import NoConvergence, NonFinite, NotHermitian, NotPositiveDefinite, Singular
from floquet_borg.settings import TOL_HERM, TOL_SING


class HermEigResult(BaseModel):
    """Ascending real spectrum of a Hermitian matrix with orthonormal eigenvectors (columns)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    vectors: np.ndarray

    def residual(self, a: np.ndarray) -> float:
        """Largest ``‖A v_i − λ_i v_i‖`` relative to ``max(‖A‖_2, 1)``."""
        a = np.asarray(a, dtype=complex)
        defect = a @ self.vectors - self.vectors * self.values
        return float(np.max(np.linalg.norm(defect, axis=0))) / max(float(np.linalg.norm(a, 2)), 1.0)


class GeneralEigResult(BaseModel):
    """Unordered complex eigenvalue multiset of a square matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray


def _as_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {a.shape}.")
    if not np.all(np.isfinite(a)):
        raise NonFinite("Matrix contains NaN or Inf entries.")
    return a


def hermitian_residual(a: np.ndarray) -> float:
    """
    Relative distance of a matrix from its adjoint, ``‖A − A*‖ / ‖A‖`` (Frobenius).

    Args:
        a (np.ndarray): Square matrix.

    Returns:
        float: The relative residual, ``0.0`` for the zero matrix.
    """
    a = np.asarray(a, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - a.conj().T) / scale)


def herm_eig(a: np.ndarray, tol_herm: float = TOL_HERM) -> HermEigResult:
    """
    Full eigendecomposition of a Hermitian matrix.

    Args:
        a (np.ndarray): Square Hermitian matrix.
        tol_herm (float): Admissible relative asymmetry.

    Returns:
        HermEigResult: Eigenvalues ascending, eigenvectors as orthonormal columns.
    """
    a = _as_square(a)
    residual = hermitian_residual(a)
    if residual > tol_herm:
        raise NotHermitian(f"Matrix is not Hermitian: relative asymmetry {residual:.3e} > {tol_herm:.1e}.")

    values, vectors = la.eigh((a + a.conj().T) / 2, check_finite=False)
    return HermEigResult(values=values, vectors=vectors)


def herm_eigvals_batch(stack: np.ndarray) -> np.ndarray:
    """
    Eigenvalues of a stack of Hermitian matrices, each row ascending.

    Args:
        stack (np.ndarray): Array of shape ``(k, n, n)``; only the lower triangles are read.

    Returns:
        np.ndarray: Array of shape ``(k, n)``.
    """
    stack = np.asarray(stack, dtype=complex)
    if not np.all(np.isfinite(stack)):
        raise NonFinite("Matrix stack contains NaN or Inf entries.")
    return np.linalg.eigvalsh(stack)


def gen_eig(a: np.ndarray) -> GeneralEigResult:
    """
    Eigenvalues of a general square matrix, with multiplicity.

    Args:
        a (np.ndarray): Square matrix.

    Returns:
        GeneralEigResult: The complex eigenvalue multiset.
    """
    a = _as_square(a)
    try:
        values = la.eigvals(a, check_finite=False)
    except la.LinAlgError as e:
        raise NoConvergence(f"Eigenvalue iteration did not converge: {e}") from e

    return GeneralEigResult(values=values)


def sqrt_pd(a: np.ndarray, tol_sing: float = TOL_SING, tol_herm: float = TOL_HERM) -> np.ndarray:
    """
    Positive-definite square root of a positive-definite matrix.

    Args:
        a (np.ndarray): Hermitian positive-definite matrix.
        tol_sing (float): Relative floor for the smallest eigenvalue.
        tol_herm (float): Admissible relative asymmetry.

    Returns:
        np.ndarray: The unique positive-definite ``S`` with ``S @ S == a``.
    """
    eig = herm_eig(a, tol_herm=tol_herm)
    scale = max(float(np.max(np.abs(eig.values))), np.finfo(float).tiny)
    if eig.values[0] <= tol_sing * scale:
        raise NotPositiveDefinite(f"Smallest eigenvalue {eig.values[0]:.3e} is not positive.")

    root = (eig.vectors * np.sqrt(eig.values)) @ eig.vectors.conj().T
    return (root + root.conj().T) / 2


def polar_left(a: np.ndarray, tol_sing: float = TOL_SING) -> tuple[np.ndarray, np.ndarray]:
    """
    Left polar decomposition ``a = h @ q`` of an invertible matrix.

    Args:
        a (np.ndarray): Invertible square matrix.
        tol_sing (float): Relative floor for the smallest singular value.

    Returns:
        tuple[np.ndarray, np.ndarray]: ``h = (a a*)^{1/2}`` positive definite and ``q`` unitary.
    """
    a = _as_square(a)
    singular_values = la.svdvals(a, check_finite=False)
    if singular_values[0] == 0.0 or singular_values[-1] <= tol_sing * singular_values[0]:
        raise Singular(f"Matrix is singular: smallest singular value {singular_values[-1]:.3e}.")

    q, h = la.polar(a, side="left")
    return (h + h.conj().T) / 2, q


def det(a: np.ndarray) -> complex:
    """
    Determinant through an LU factorization.

    Args:
        a (np.ndarray): Square matrix.

    Returns:
        complex: The determinant.
    """
    a = _as_square(a)
    return complex(la.det(a, check_finite=False))


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Solve ``a @ x = b``.

    Args:
        a (np.ndarray): Square coefficient matrix.
        b (np.ndarray): Right-hand side (vector or matrix).

    Returns:
        np.ndarray: The solution ``x``.
    """
    a = _as_square(a)
    with warnings.catch_warnings():
        warnings.simplefilter("error", la.LinAlgWarning)
        try:
            return la.solve(a, b, check_finite=False)
        except (la.LinAlgError, la.LinAlgWarning) as e:
            raise Singular(f"Linear system is singular or ill-conditioned: {e}") from e
