"""
Borg-type detectors: executable checks that particular spectral data force ``J = J⁰``.

Each detector returns a :class:`DetectionVerdict` carrying the criterion certificate next to
the direct coefficient distance from the free operator, so both directions of the underlying
equivalence can be tested independently.
"""

import cmath
import logging
import math

import numpy as np
from pydantic import BaseModel, Field

from floquet_borg.bands import band_structure, is_single_symmetric_band
from floquet_borg.errors import CouplingNotOne, DegenerateAngles, HypothesisNotMet, IndexOutOfRange, InvalidDimension
from floquet_borg.floquet import check_unit, floquet_eigenvalues, free_floquet_eigenvalues, moment_report
from floquet_borg.monodromy import char_det, multipliers
from floquet_borg.operator import BlockJacobiOperator, coupling_constant, distance_from_free, period_extend
from floquet_borg.settings import TOL_CLUSTER, TOL_DETECT, TOL_GEN, TOL_UNIT_TAU
from floquet_borg.utils import cluster_sorted, max_matched_deviation

logger = logging.getLogger(__name__)


class DetectionVerdict(BaseModel):
    """Outcome of a detector; ``verdict`` implies ``certificate <= tol``."""

    verdict: bool
    certificate: float
    direct_residual: float
    details: list[float] = Field(default_factory=list)


class ClusterCheck(BaseModel):
    """One eigenvalue cluster of ``K_p(τ)`` and, when checked, the deviation of its multipliers."""

    value: float
    multiplicity: int
    checked: bool
    deviation: float | None = None


class DegeneracyReport(BaseModel):
    """Multiplier structure at the degenerate Floquet eigenvalues for one ``τ``."""

    tau: tuple[float, float]
    passed: bool
    clusters: list[ClusterCheck]

    @property
    def checked_count(self) -> int:
        return sum(cluster.checked for cluster in self.clusters)


class BandBoundReport(BaseModel):
    """Maximum of ``|D_pk(z, τ)|`` on ``[λ_−(τ), λ_+(τ)]`` against both candidate constants."""

    k: int
    tau: tuple[float, float]
    max_abs: float
    argmax: float
    bound_2m: float
    bound_22m: float
    exceeds_2m: bool
    within_22m: bool


def _require_unit_coupling(J: BlockJacobiOperator, tol: float) -> None:
    c = coupling_constant(J)
    if abs(c - 1.0) > tol:
        raise CouplingNotOne(f"The coupling constant is {c:.15g}, expected 1 within {tol:.1e}.")


def detect_free_by_moment(J: BlockJacobiOperator, tau: complex, tol: float = TOL_DETECT) -> DetectionVerdict:
    """
    Decide ``J = J⁰`` from the second spectral moment at one unit ``τ``.

    Args:
        J (BlockJacobiOperator): The operator, with coupling constant one.
        tau (complex): Unit-modulus Floquet parameter.
        tol (float): Detection tolerance.

    Returns:
        DetectionVerdict: ``certificate = S2 − 2pm``.
    """
    _require_unit_coupling(J, tol)
    report = moment_report(J, tau)
    target = 2 * J.p * J.m
    certificate = report.s2 - target

    return DetectionVerdict(
        verdict=abs(certificate) <= tol,
        certificate=certificate,
        direct_residual=distance_from_free(J),
        details=[report.s2, float(target)],
    )


def _eigen_formula_verdict(J: BlockJacobiOperator, kappa: float, tol: float) -> DetectionVerdict:
    values = floquet_eigenvalues(J, cmath.exp(1j * kappa))
    deviations = np.abs(values - free_floquet_eigenvalues(J.p, J.m, kappa))
    certificate = float(np.max(deviations))

    return DetectionVerdict(
        verdict=certificate <= tol,
        certificate=certificate,
        direct_residual=distance_from_free(J),
        details=deviations.tolist(),
    )


def detect_free_by_eigen_formula(J: BlockJacobiOperator, kappa1: float, tol: float = TOL_DETECT) -> DetectionVerdict:
    """
    Decide ``J = J⁰`` from the full Floquet spectrum at ``τ = e^{iκ₁}``.

    Every eigenvalue must match ``2 cos((κ₁ + 2π(s − 1)) / p)``, each target taken ``m`` times.

    Args:
        J (BlockJacobiOperator): The operator, with coupling constant one.
        kappa1 (float): Quasi-momentum.
        tol (float): Detection tolerance.

    Returns:
        DetectionVerdict: ``certificate`` is the largest matched-pair deviation; ``details`` lists all of them.
    """
    _require_unit_coupling(J, tol)
    return _eigen_formula_verdict(J, kappa1, tol)


def _solve_coupling(J: BlockJacobiOperator, z: float, kappa1: float, kappa2: float) -> float:
    # D_p(z*, e^{iκ₁}) = c^{-1} (−1)^m e^{imκ₁} 2^m (cos κ₂ − cos κ₁)^m
    m = J.m
    model = (-1) ** m * cmath.exp(1j * m * kappa1) * (2 * (math.cos(kappa2) - math.cos(kappa1))) ** m
    return float((model / char_det(J, z, cmath.exp(1j * kappa1))).real)


def detect_free_two_point(
    J: BlockJacobiOperator,
    kappa1: float,
    kappa2: float,
    n1: int,
    tol: float = TOL_DETECT,
) -> DetectionVerdict:
    """
    Decide ``J = J⁰`` from the spectrum at ``e^{iκ₁}`` and ``m`` eigenvalues at ``e^{iκ₂}``, without assuming ``c = 1``.

    The checks run in order and the first failing one decides:

    1. the full eigenvalue formula at ``κ₁``;
    2. ``m`` eigenvalues of ``K_p(e^{iκ₂})`` equal ``z* = 2 cos((κ₂ + 2πn₁) / p)``;
    3. when ``e^{2iκ₂} = 1``, the cluster at ``z*`` has ``2m`` members and ``z* ≠ ±2``;
    4. the coupling constant solved from the characteristic function at ``(z*, e^{iκ₁})`` is one.

    Args:
        J (BlockJacobiOperator): The operator.
        kappa1 (float): First quasi-momentum.
        kappa2 (float): Second quasi-momentum, ``cos κ₂ ≠ cos κ₁``.
        n1 (int): Branch index in ``1 .. p``.
        tol (float): Detection tolerance.

    Returns:
        DetectionVerdict: ``details`` holds the certificates of the stages that ran.
    """
    if abs(math.cos(kappa1) - math.cos(kappa2)) <= tol:
        raise DegenerateAngles(f"cos({kappa1}) and cos({kappa2}) coincide within {tol:.1e}.")
    if not 1 <= n1 <= J.p:
        raise IndexOutOfRange(f"n1 must lie in 1..{J.p}, got {n1}.")

    direct = distance_from_free(J)
    details: list[float] = []

    def _fail(certificate: float, stage: str) -> DetectionVerdict:
        logger.debug("Two-point detection failed at %s (certificate %.3e)", stage, certificate)
        return DetectionVerdict(verdict=False, certificate=certificate, direct_residual=direct, details=details)

    formula = _eigen_formula_verdict(J, kappa1, tol)
    details.append(formula.certificate)
    if not formula.verdict:
        return _fail(formula.certificate, "the first quasi-momentum")

    z_star = 2 * math.cos((kappa2 + 2 * math.pi * n1) / J.p)
    distances = np.sort(np.abs(floquet_eigenvalues(J, cmath.exp(1j * kappa2)) - z_star))
    matched = float(distances[J.m - 1])
    details.append(matched)
    if matched > tol:
        return _fail(matched, "the second quasi-momentum")

    if abs(math.sin(kappa2)) <= tol:
        # e^{2iκ₂} = 1: the matched value needs a full 2m cluster away from the band edges
        doubled = float(distances[2 * J.m - 1]) if distances.size >= 2 * J.m else math.inf
        edge_margin = tol - (2.0 - abs(z_star))
        details.append(doubled)
        if doubled > tol or edge_margin >= 0:
            return _fail(max(doubled, edge_margin), "the doubled cluster")

    coupling_deviation = abs(_solve_coupling(J, z_star, kappa1, kappa2) - 1.0)
    details.append(coupling_deviation)
    if coupling_deviation > tol:
        return _fail(coupling_deviation, "the coupling constant")

    verdict = _eigen_formula_verdict(J, kappa1, tol)
    return verdict.model_copy(update={"certificate": max(details), "details": details})


def detect_borg_interval(
    J: BlockJacobiOperator,
    tol: float = TOL_DETECT,
    samples: int = 64,
    band_samples: int = 512,
) -> DetectionVerdict:
    """
    Decide ``J = J⁰`` from a single symmetric band on which every multiplier is unimodular.

    Args:
        J (BlockJacobiOperator): The operator, with coupling constant one.
        tol (float): Detection tolerance.
        samples (int): Interior points of the spectral hull at which the multipliers are checked.
        band_samples (int): Resolution of the band computation.

    Returns:
        DetectionVerdict: ``certificate`` combines the band asymmetry with the worst circle deviation;
        ``details`` lists the circle deviation per sample point.
    """
    _require_unit_coupling(J, tol)
    structure = band_structure(J, samples=band_samples)
    low, high = structure.hull
    asymmetry = abs(low + high)

    points = low + (high - low) * (np.arange(samples) + 0.5) / samples
    deviations = [float(np.max(np.abs(np.abs(multipliers(J, float(z))) - 1.0))) for z in points]
    certificate = max(asymmetry, max(deviations, default=0.0))
    verdict = is_single_symmetric_band(structure, tol) and certificate <= tol
    logger.debug("Borg interval check: %d band(s), asymmetry %.3e, certificate %.3e", structure.N, asymmetry, certificate)

    return DetectionVerdict(
        verdict=verdict,
        certificate=certificate,
        direct_residual=distance_from_free(J),
        details=deviations,
    )


def multiplier_degeneracy_check(
    J: BlockJacobiOperator,
    tau: complex,
    tol: float = TOL_GEN,
    cluster_tol: float = TOL_CLUSTER,
) -> DegeneracyReport:
    """
    Check the multipliers at the degenerate eigenvalues of ``K_p(τ)``.

    Away from ``τ = ±1`` a cluster of exactly ``m`` eigenvalues must carry the multipliers ``τ`` and
    ``τ^{-1}``, ``m`` times each. At ``τ = ±1`` a cluster of ``2m`` eigenvalues must carry ``2m`` copies
    of ``τ``. Other clusters are reported unchecked.

    Args:
        J (BlockJacobiOperator): The operator.
        tau (complex): Unit-modulus Floquet parameter.
        tol (float): Admissible matched deviation of the multipliers.
        cluster_tol (float): Cluster width relative to the spectral diameter.

    Returns:
        DegeneracyReport: Per-cluster results; ``passed`` iff every checked cluster is within ``tol``.
    """
    tau = check_unit(tau)
    values = floquet_eigenvalues(J, tau)
    width = cluster_tol * max(float(values[-1] - values[0]), 1.0)
    real_tau = abs(tau.imag) <= TOL_UNIT_TAU
    m = J.m

    if real_tau:
        size, expected = 2 * m, np.full(2 * m, tau)
    else:
        size, expected = m, np.concatenate([np.full(m, tau), np.full(m, tau.conjugate())])

    clusters = []
    for indices in cluster_sorted(values, width):
        value = float(np.mean(values[indices]))
        if len(indices) != size:
            clusters.append(ClusterCheck(value=value, multiplicity=len(indices), checked=False))
            continue
        deviation = max_matched_deviation(multipliers(J, value), expected)
        clusters.append(ClusterCheck(value=value, multiplicity=len(indices), checked=True, deviation=deviation))

    passed = all(cluster.deviation <= tol for cluster in clusters if cluster.deviation is not None)
    return DegeneracyReport(tau=(tau.real, tau.imag), passed=passed, clusters=clusters)


def dpk_band_bound(
    J: BlockJacobiOperator,
    k: int,
    tau: complex,
    samples: int = 512,
    tol: float = TOL_DETECT,
) -> BandBoundReport:
    """
    Sweep ``|D_pk(z, τ)| = |∏ (z − λ_{n,pk}(τ))|`` over ``[λ_−(τ), λ_+(τ)]`` of the ``k``-fold extension.

    The guaranteed constant is ``2^{2m}``; ``2^m`` holds at ``τ = ±i`` but is exceeded elsewhere,
    which the report flags.

    Args:
        J (BlockJacobiOperator): An operator passing :func:`detect_borg_interval`.
        k (int): Extension factor.
        tau (complex): Unit-modulus Floquet parameter.
        samples (int): Number of evaluation points, endpoints included.
        tol (float): Tolerance of the hypothesis check and of both bound comparisons.

    Returns:
        BandBoundReport: The maximum, its location and the comparison with both constants.
    """
    if k < 1:
        raise InvalidDimension(f"k must be at least 1, got {k}.")
    tau = check_unit(tau)

    try:
        hypothesis = detect_borg_interval(J, tol=tol)
    except CouplingNotOne as e:
        raise HypothesisNotMet(str(e)) from e
    if not hypothesis.verdict:
        raise HypothesisNotMet(f"Not a single symmetric band with unimodular multipliers ({hypothesis.certificate:.3e}).")

    eigenvalues = floquet_eigenvalues(period_extend(J, k), tau)
    z = np.linspace(eigenvalues[0], eigenvalues[-1], samples)
    magnitudes = np.prod(np.abs(z[:, np.newaxis] - eigenvalues[np.newaxis, :]), axis=1)
    index = int(np.argmax(magnitudes))
    max_abs = float(magnitudes[index])
    bound_2m, bound_22m = 2.0**J.m, 4.0**J.m

    return BandBoundReport(
        k=k,
        tau=(tau.real, tau.imag),
        max_abs=max_abs,
        argmax=float(z[index]),
        bound_2m=bound_2m,
        bound_22m=bound_22m,
        exceeds_2m=max_abs > bound_2m + tol,
        within_22m=max_abs <= bound_22m + tol,
    )
