"""
Chebyshev polynomials and the max-norm constrained sum-of-squares problem.

Among sorted configurations ``x_1 ≤ ... ≤ x_s`` with ``Σ x_n = 0`` whose monic polynomial
``∏ (z − x_n)`` stays below ``r`` in modulus on ``[x_1, x_s]``, the sum of squares is at most
``2s (r/2)^{2/s}``. The bound is attained by the zeros of the rescaled Chebyshev polynomial
``r T_s(z r^{−1/s} 2^{(1−s)/s})``.
"""

import logging
import math
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from floquet_borg.errors import InvalidProblem

logger = logging.getLogger(__name__)

HULL_SAMPLES = 1000
ZERO_SUM_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9
INITIAL_STEP = 0.1
MIN_STEP = 1e-12
STEP_GROWTH = 1.5


class ExtremalProblem(BaseModel):
    """Parameters of the constraint set: ``s`` points, modulus bound ``r``."""

    s: int = Field(ge=2)
    r: float = Field(ge=0.0)


class ExtremalConfig(BaseModel):
    """A sorted zero-sum configuration with its objective and constraint value."""

    x: list[float]
    sum_squares: float
    max_abs: float


class OracleResult(BaseModel):
    """Best configuration found by the randomized search."""

    best: float
    x: list[float]
    evaluations: int
    starts: int


def _problem(s: int, r: float) -> ExtremalProblem:
    try:
        return ExtremalProblem(s=s, r=r)
    except ValidationError as e:
        raise InvalidProblem(f"Invalid extremal problem (s={s}, r={r}): need s >= 2 and r >= 0.") from e


def cheb_eval(s: int, z: float) -> float:
    """
    Evaluate ``T_s(z)``.

    Args:
        s (int): Degree, non-negative.
        z (float): Argument.

    Returns:
        float: ``cos(s arccos z)`` on ``[−1, 1]``, the three-term recurrence outside it.
    """
    if s < 0:
        raise InvalidProblem(f"Chebyshev degree must be non-negative, got {s}.")
    if abs(z) <= 1.0:
        return math.cos(s * math.acos(z))

    previous, current = 1.0, z
    if s == 0:
        return previous
    for _ in range(s - 1):
        previous, current = current, 2 * z * current - previous
    return current


def cheb_coefficients(s: int) -> list[int]:
    """
    Exact coefficients of ``T_s`` in ascending powers of ``z`` from the closed-form sum.

    ``T_s(z) = ½ Σ_k (−1)^k s/(s−k) C(s−k, k) (2z)^{s−2k}`` for ``k = 0 .. ⌊s/2⌋``.

    Args:
        s (int): Degree, non-negative.

    Returns:
        list[int]: ``s + 1`` integer coefficients, the last one ``2^{s−1}`` for ``s ≥ 1``.
    """
    if s < 0:
        raise InvalidProblem(f"Chebyshev degree must be non-negative, got {s}.")
    if s == 0:
        return [1]

    coefficients = [Fraction(0)] * (s + 1)
    for k in range(s // 2 + 1):
        term = Fraction((-1) ** k * s, s - k) * math.comb(s - k, k) * Fraction(2) ** (s - 2 * k) / 2
        coefficients[s - 2 * k] = term

    return [int(value) for value in coefficients]


def cheb_coefficients_recurrence(s: int) -> list[int]:
    """Coefficients of ``T_s`` (ascending) from ``T_{k+1} = 2z T_k − T_{k−1}``."""
    if s < 0:
        raise InvalidProblem(f"Chebyshev degree must be non-negative, got {s}.")

    previous, current = [1], [0, 1]
    if s == 0:
        return previous
    for _ in range(s - 1):
        shifted = [0, *(2 * value for value in current)]
        padded = previous + [0] * (len(shifted) - len(previous))
        previous, current = current, [a - b for a, b in zip(shifted, padded)]
    return current


def chebyshev_zeros(s: int) -> np.ndarray:
    """The ``s`` zeros ``cos(π(2j − 1) / (2s))`` of ``T_s``, ascending."""
    if s < 1:
        raise InvalidProblem(f"T_s has zeros only for s >= 1, got {s}.")
    return np.sort(np.cos(np.pi * (2 * np.arange(1, s + 1) - 1) / (2 * s)))


def viete_moments(s: int) -> tuple[Fraction, Fraction]:
    """
    Exact power sums ``ξ = Σ z_j`` and ``η = Σ z_j²`` over the zeros of ``T_s`` by Viète's formulas.

    Args:
        s (int): Degree, at least one.

    Returns:
        tuple[Fraction, Fraction]: ``(ξ, η)``; equal to ``(0, s/2)`` for ``s ≥ 2``.
    """
    if s < 1:
        raise InvalidProblem(f"T_s has zeros only for s >= 1, got {s}.")

    coefficients = cheb_coefficients(s)
    leading = Fraction(coefficients[s])
    xi = -coefficients[s - 1] / leading
    second = coefficients[s - 2] if s >= 2 else 0
    return xi, xi**2 - 2 * second / leading


def extremal_value(s: int, r: float) -> float:
    """
    The supremum ``2s (r/2)^{2/s}`` of ``Σ x_n²`` over the constraint set.

    Args:
        s (int): Number of points, at least two.
        r (float): Modulus bound, non-negative.

    Returns:
        float: The closed-form supremum; zero for ``r = 0``.
    """
    problem = _problem(s, r)
    return 2 * problem.s * (problem.r / 2) ** (2 / problem.s)


def _monic_abs(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.abs(np.prod(z[:, np.newaxis] - x[np.newaxis, :], axis=1))


def critical_points(x: np.ndarray) -> np.ndarray:
    """
    Critical points of ``∏ (z − x_n)`` inside ``[x_1, x_s]``.

    They are the roots of the derivative, found as companion-matrix eigenvalues. All roots
    are real for a real-rooted polynomial, so only the real parts are kept.

    Args:
        x (np.ndarray): Sorted roots.

    Returns:
        np.ndarray: Ascending critical points clipped to the hull.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return np.empty(0)
    roots = np.roots(np.polyder(np.poly(x)))
    return np.sort(np.clip(roots.real, x[0], x[-1]))


def max_abs_on_hull(x: np.ndarray, samples: int = HULL_SAMPLES) -> float:
    """
    ``max |∏ (z − x_n)|`` over ``[x_1, x_s]``.

    Evaluated at the critical points and the endpoints, cross-checked on a uniform grid.

    Args:
        x (np.ndarray): Sorted configuration.
        samples (int): Grid size of the cross-check.

    Returns:
        float: The maximum modulus.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0 or x[0] == x[-1]:
        return 0.0

    candidates = np.concatenate([critical_points(x), np.linspace(x[0], x[-1], samples)])
    return float(np.max(_monic_abs(x, candidates)))


def extremal_config(s: int, r: float) -> ExtremalConfig:
    """
    The extremal configuration ``x_n = 2 (r/2)^{1/s} cos(π(2(s − n) + 1) / (2s))``.

    The points are symmetrized about zero so that their sum vanishes up to rounding.

    Args:
        s (int): Number of points, at least two.
        r (float): Modulus bound; ``r = 0`` gives the all-zero configuration.

    Returns:
        ExtremalConfig: Points, sum of squares and the attained maximum modulus.
    """
    problem = _problem(s, r)
    n = np.arange(1, problem.s + 1)
    x = 2 * (problem.r / 2) ** (1 / problem.s) * np.cos(np.pi * (2 * (problem.s - n) + 1) / (2 * problem.s))
    x = (x - x[::-1]) / 2

    return ExtremalConfig(x=x.tolist(), sum_squares=float(np.sum(x**2)), max_abs=max_abs_on_hull(x))


def membership(x: list[float] | np.ndarray, r: float, tol: float = MEMBERSHIP_TOL) -> tuple[bool, float]:
    """
    Check whether a configuration belongs to the constraint set for bound ``r``.

    Args:
        x (list[float] | np.ndarray): Candidate configuration.
        r (float): Modulus bound.
        tol (float): Admissible slack above ``r``.

    Returns:
        tuple[bool, float]: Membership and the slack ``max |p| − r``.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise InvalidProblem("A configuration needs at least one point.")

    ordered = bool(np.all(np.diff(x) >= 0))
    scale = max(1.0, float(np.max(np.abs(x))))
    balanced = abs(float(np.sum(x))) <= ZERO_SUM_TOL * scale
    slack = max_abs_on_hull(x) - r

    return ordered and balanced and slack <= tol, slack


def _objective(x: np.ndarray, r: float) -> float:
    # sum of squares after dilating x onto the boundary max |p| = r
    peak = max_abs_on_hull(x)
    if peak == 0.0:
        return 0.0
    return float(np.sum(x**2)) * (r / peak) ** (2 / x.size)


def _normalized(x: np.ndarray) -> np.ndarray:
    x = np.sort(x - np.mean(x))
    return x / max(float(np.max(np.abs(x))), np.finfo(float).tiny)


def _direction(rng: np.random.Generator, s: int) -> np.ndarray:
    # unit vector in the zero-sum hyperplane
    d = rng.standard_normal(s)
    d -= np.mean(d)
    return d / max(float(np.linalg.norm(d)), np.finfo(float).tiny)


def _refine(rng: np.random.Generator, x: np.ndarray, r: float, budget: int) -> tuple[float, np.ndarray, int]:
    best = _objective(x, r)
    evaluations, step, failures = 1, INITIAL_STEP, 0
    s = x.size

    while evaluations < budget and step > MIN_STEP:
        candidate = _normalized(x + step * _direction(rng, s))
        value = _objective(candidate, r)
        evaluations += 1

        if value > best:
            best, x, failures = value, candidate, 0
            step = min(STEP_GROWTH * step, INITIAL_STEP)
            continue
        failures += 1
        if failures > 4 * s:
            step, failures = step / 2, 0

    return best, x, evaluations


def oracle_max_sum_squares(s: int, r: float, budget: int = 10_000, seed: int = 0) -> OracleResult:
    """
    Randomized multi-start search for the largest ``Σ x_n²`` over the constraint set.

    Every start is a random shape drawn from its own spawned stream. Each is refined by steps
    along random zero-sum directions, growing the step after a success and halving it after a
    run of failures. Candidates are always evaluated after dilation onto the boundary
    ``max |p| = r`` (dilating by ``t`` scales the maximum by ``t^s``).

    Args:
        s (int): Number of points, at least two.
        r (float): Modulus bound.
        budget (int): Total number of objective evaluations.
        seed (int): Seed; each start draws from its own spawned stream.

    Returns:
        OracleResult: The best objective, its configuration and the work spent.
    """
    problem = _problem(s, r)
    if budget < 1:
        raise InvalidProblem(f"The oracle budget must be positive, got {budget}.")
    if problem.r == 0.0:
        return OracleResult(best=0.0, x=[0.0] * problem.s, evaluations=0, starts=0)

    starts = max(2, min(8, budget // 1_000))
    per_start = max(1, budget // starts)
    best, best_x, evaluations = -math.inf, np.zeros(problem.s), 0

    for child in np.random.SeedSequence(seed).spawn(starts):
        rng = np.random.default_rng(child)
        value, x, spent = _refine(rng, _normalized(rng.standard_normal(problem.s)), problem.r, per_start)
        evaluations += spent
        if value > best:
            best, best_x = value, x

    scale = (problem.r / max_abs_on_hull(best_x)) ** (1 / problem.s)
    logger.debug("Oracle s=%d r=%g: best %.12g after %d evaluations", problem.s, problem.r, best, evaluations)
    return OracleResult(best=best, x=(scale * best_x).tolist(), evaluations=evaluations, starts=starts)
