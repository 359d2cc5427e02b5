"""
Residual suite over the identities that tie the spectral side of an operator to its coefficients.

The spectral side (Floquet eigenvalues, monodromy) and the coefficient side (traces, coupling
constant, Floquet determinant) are computed from two operators that coincide unless a
corruption is requested; a corrupted spectral side must breach the identities.
"""

import cmath
import logging

import numpy as np
from pydantic import BaseModel, Field, computed_field

from floquet_borg import linalg
from floquet_borg.detectors import multiplier_degeneracy_check
from floquet_borg.floquet import build_floquet, floquet_eigenvalues, moment_report
from floquet_borg.monodromy import char_det, floquet_char_det, monodromy_matrix, pairing_residual
from floquet_borg.operator import BlockJacobiOperator
from floquet_borg.settings import Tolerances

logger = logging.getLogger(__name__)

DEFAULT_TAUS = (1.0, 1j, -1.0, cmath.exp(1j * np.pi / 5))
DET_Z_RADIUS = 3.0


class ResidualRow(BaseModel):
    """One identity evaluated at one parameter."""

    identity: str
    parameter: str
    residual: float
    threshold: float

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold


class VerificationReport(BaseModel):
    """All residual rows; ``passed`` iff every row is within its threshold."""

    rows: list[ResidualRow] = Field(default_factory=list)
    corrupt_scale: float | None = None

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def breaches(self) -> list[ResidualRow]:
        return [row for row in self.rows if not row.passed]


def corrupt(J: BlockJacobiOperator, scale: float) -> BlockJacobiOperator:
    """A copy of ``J`` with ``a_1`` multiplied by ``scale``; no validation is applied."""
    a = np.array(J.a)
    a[0] = a[0] * scale
    return BlockJacobiOperator(a=a, b=J.diagonal, shifts=J.shifts)


def _label(value: complex) -> str:
    return f"{value.real:.6g}{value.imag:+.6g}j"


def run_verification(
    J: BlockJacobiOperator,
    taus: list[complex] | None = None,
    z_samples: int = 8,
    seed: int = 0,
    tolerances: Tolerances | None = None,
    corrupt_scale: float | None = None,
) -> VerificationReport:
    """
    Evaluate the trace identities, the moment bound, the Floquet eigensystem, the determinant identity
    and the monodromy structure.

    Args:
        J (BlockJacobiOperator): A validated operator.
        taus (list[complex] | None): Unit-modulus Floquet parameters for the trace identities.
        z_samples (int): Number of random points for the determinant and monodromy rows.
        seed (int): Seed of the random points.
        tolerances (Tolerances | None): Thresholds; defaults to the environment settings.
        corrupt_scale (float | None): Scale ``a_1`` of the spectral side by this factor.

    Returns:
        VerificationReport: One row per identity and parameter.
    """
    tolerances = tolerances or Tolerances()
    taus = list(DEFAULT_TAUS) if taus is None else taus
    spectral = corrupt(J, corrupt_scale) if corrupt_scale is not None else J
    rng = np.random.default_rng(seed)
    report = VerificationReport(corrupt_scale=corrupt_scale)

    for tau in taus:
        label = _label(complex(tau))
        spectral_moments = moment_report(spectral, tau)
        coefficient_moments = moment_report(J, tau)
        floquet_matrix = build_floquet(spectral, tau).matrix
        degeneracy = multiplier_degeneracy_check(spectral, tau, tol=tolerances.gen, cluster_tol=tolerances.cluster)
        report.rows += [
            ResidualRow(
                identity="trace_first_moment",
                parameter=label,
                residual=abs(spectral_moments.s1 - coefficient_moments.rhs1) / max(1.0, abs(coefficient_moments.rhs1)),
                threshold=tolerances.identity,
            ),
            ResidualRow(
                identity="trace_second_moment",
                parameter=label,
                residual=abs(spectral_moments.s2 - coefficient_moments.rhs2) / max(1.0, coefficient_moments.rhs2),
                threshold=tolerances.identity,
            ),
            ResidualRow(
                identity="moment_bound",
                parameter=label,
                residual=max(0.0, -spectral_moments.certificate),
                threshold=tolerances.identity,
            ),
            ResidualRow(
                identity="eigen_residual",
                parameter=label,
                residual=linalg.herm_eig(floquet_matrix).residual(floquet_matrix),
                threshold=tolerances.eig,
            ),
            ResidualRow(
                identity="cluster_multipliers",
                parameter=label,
                residual=max((c.deviation for c in degeneracy.clusters if c.deviation is not None), default=0.0),
                threshold=tolerances.gen,
            ),
        ]

    for _ in range(z_samples):
        z = DET_Z_RADIUS * np.sqrt(rng.uniform()) * cmath.exp(2j * np.pi * rng.uniform())
        tau = 2.0 ** rng.uniform(-1, 1) * cmath.exp(2j * np.pi * rng.uniform())
        monodromy_side = char_det(spectral, z, tau)
        report.rows.append(
            ResidualRow(
                identity="determinant",
                parameter=f"z={_label(z)} tau={_label(tau)}",
                residual=abs(monodromy_side - floquet_char_det(J, z, tau)) / max(1.0, abs(monodromy_side)),
                threshold=tolerances.det,
            )
        )

    for _ in range(z_samples):
        # real points inside the spectrum keep the monodromy well conditioned
        x = 2 * np.pi * rng.uniform()
        z = float(rng.choice(floquet_eigenvalues(spectral, cmath.exp(1j * x))))
        report.rows += [
            ResidualRow(
                identity="monodromy_determinant",
                parameter=f"z={z:.6g}",
                residual=monodromy_matrix(spectral, z).det_residual(),
                threshold=tolerances.identity,
            ),
            ResidualRow(
                identity="multiplier_pairing",
                parameter=f"z={z:.6g}",
                residual=pairing_residual(spectral, z),
                threshold=tolerances.gen,
            ),
        ]

    logger.debug("Verification: %d rows, %d breach(es)", len(report.rows), len(report.breaches()))
    return report
