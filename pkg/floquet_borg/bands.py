"""
Band and gap structure of ``σ(J)`` from a sweep of ``K_p(e^{ix})`` over the unit circle.

The sorted eigenvalue branches ``x ↦ λ_i(e^{ix})`` are continuous, so each branch sweeps a
closed interval. Overlapping branch ranges are merged into bands.
"""

import csv
import io
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field
from scipy.optimize import minimize_scalar

from floquet_borg import linalg
from floquet_borg.errors import InvalidResolution
from floquet_borg.floquet import build_floquet, floquet_eigenvalues_at_angles
from floquet_borg.operator import PeriodicJacobi, norm_bound
from floquet_borg.settings import TOL_MERGE

logger = logging.getLogger(__name__)

MIN_SAMPLES = 16
REFINE_ITERATIONS = 20


class BandStructure(BaseModel):
    """Sorted disjoint bands ``[λ_{n−1}^+, λ_n^−]`` and the open gaps between them."""

    bands: list[tuple[float, float]]
    gaps: list[tuple[float, float]]
    sample_count: int

    @computed_field  # type: ignore[prop-decorator]
    @property
    def N(self) -> int:
        """Number of bands."""
        return len(self.bands)

    @property
    def hull(self) -> tuple[float, float]:
        """The smallest interval containing the spectrum."""
        return self.bands[0][0], self.bands[-1][1]

    def contains(self, z: float, tol: float = 0.0) -> bool:
        """Whether ``z`` lies in some band, with the bands widened by ``tol``."""
        return any(low - tol <= z <= high + tol for low, high in self.bands)


class BranchSweep(BaseModel):
    """Eigenvalue branches sampled at the quasi-momenta ``x_k = 2πk / samples``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    angles: np.ndarray
    eigenvalues: np.ndarray

    def to_csv(self) -> str:
        """One row per sample: ``x, λ_1 .. λ_pm``; LF line endings."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["x", *(f"lambda_{i}" for i in range(1, self.eigenvalues.shape[1] + 1))])
        for x, row in zip(self.angles, self.eigenvalues):
            writer.writerow([repr(float(x)), *(repr(float(value)) for value in row)])
        return buffer.getvalue()


def sweep_branches(J: PeriodicJacobi, samples: int) -> BranchSweep:
    """
    Sample every Floquet eigenvalue branch on a uniform grid of the circle.

    Args:
        J (PeriodicJacobi): The operator.
        samples (int): Number of grid points, at least 16.

    Returns:
        BranchSweep: Angles and the ``(samples, pm)`` eigenvalue table.
    """
    if samples < MIN_SAMPLES:
        raise InvalidResolution(f"At least {MIN_SAMPLES} samples are required, got {samples}.")

    angles = 2 * np.pi * np.arange(samples) / samples
    return BranchSweep(angles=angles, eigenvalues=floquet_eigenvalues_at_angles(J, angles))


def _refine_extremum(J: PeriodicJacobi, branch: int, low: float, high: float, sign: float) -> float:
    def objective(x: float) -> float:
        matrix = build_floquet(J, complex(math.cos(x), math.sin(x))).matrix
        return sign * float(linalg.herm_eigvals_batch(matrix[np.newaxis])[0, branch])

    result = minimize_scalar(
        objective, bounds=(low, high), method="bounded", options={"maxiter": REFINE_ITERATIONS, "xatol": 1e-12}
    )
    return sign * float(result.fun)


def _branch_ranges(J: PeriodicJacobi, sweep: BranchSweep, refine: bool) -> list[tuple[float, float]]:
    step = sweep.angles[1] - sweep.angles[0]
    ranges = []
    for branch in range(sweep.eigenvalues.shape[1]):
        values = sweep.eigenvalues[:, branch]
        k_low, k_high = int(np.argmin(values)), int(np.argmax(values))
        low, high = float(values[k_low]), float(values[k_high])

        if refine:
            x_low, x_high = sweep.angles[k_low], sweep.angles[k_high]
            low = min(low, _refine_extremum(J, branch, x_low - step, x_low + step, 1.0))
            high = max(high, _refine_extremum(J, branch, x_high - step, x_high + step, -1.0))

        ranges.append((low, high))

    return ranges


def merge_ranges(ranges: list[tuple[float, float]], tol: float) -> list[tuple[float, float]]:
    """
    Union of closed intervals; intervals closer than ``tol`` are joined.

    Args:
        ranges (list[tuple[float, float]]): Intervals ``(low, high)``.
        tol (float): Merge tolerance.

    Returns:
        list[tuple[float, float]]: Sorted disjoint intervals.
    """
    merged: list[tuple[float, float]] = []
    for low, high in sorted(ranges):
        if merged and low <= merged[-1][1] + tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], high))
        else:
            merged.append((low, high))
    return merged


def band_structure(
    J: PeriodicJacobi,
    samples: int = 512,
    merge_tol: float = TOL_MERGE,
    refine: bool = True,
) -> BandStructure:
    """
    Compute the bands of ``σ(J)``.

    Branch extrema found on the grid are refined by a bounded scalar search over the two
    neighbouring grid cells; refinement only ever widens a branch range.

    Args:
        J (PeriodicJacobi): The operator (general operators use their twisted Floquet matrices).
        samples (int): Grid resolution, at least 16.
        merge_tol (float): Merge tolerance, scaled by the operator norm bound.
        refine (bool): Refine branch extrema after the grid scan.

    Returns:
        BandStructure: Bands, gaps and the resolution used.
    """
    sweep = sweep_branches(J, samples)
    ranges = _branch_ranges(J, sweep, refine)
    bands = merge_ranges(ranges, merge_tol * max(1.0, norm_bound(J)))
    gaps = [(left[1], right[0]) for left, right in zip(bands, bands[1:])]
    logger.debug("Band structure from %d samples: %d band(s)", samples, len(bands))

    return BandStructure(bands=bands, gaps=gaps, sample_count=samples)


def spectrum_equal(first: BandStructure, second: BandStructure, tol: float) -> bool:
    """
    Whether two band structures have the same bands up to ``tol`` on every endpoint.

    Args:
        first (BandStructure): First band structure.
        second (BandStructure): Second band structure.
        tol (float): Endpoint tolerance.

    Returns:
        bool: True iff the band counts match and all endpoints agree.
    """
    if first.N != second.N:
        return False
    endpoints = np.array(first.bands) - np.array(second.bands)
    return bool(np.max(np.abs(endpoints)) <= tol)


def is_single_symmetric_band(structure: BandStructure, tol: float) -> bool:
    """
    Whether the spectrum is one band ``[−x, x]``.

    Args:
        structure (BandStructure): The band structure.
        tol (float): Tolerance on ``|left + right|``.

    Returns:
        bool: True iff ``N = 1`` and the band is symmetric about zero.
    """
    if structure.N != 1:
        return False
    low, high = structure.bands[0]
    return abs(low + high) <= tol
