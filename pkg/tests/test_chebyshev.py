import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from pytest_mock import MockerFixture

from floquet_borg import chebyshev
from floquet_borg.errors import InvalidProblem


@pytest.mark.parametrize(
    "s, z, expected",
    [
        (3, 0.5, -1.0),
        (0, 0.3, 1.0),
        (1, -0.7, -0.7),
        (2, 0.0, -1.0),
        (4, 2.0, 97.0),
        (3, -1.5, -9.0),
    ],
)
def test_cheb_eval__known_values(s: int, z: float, expected: float) -> None:
    """Test T_s at points inside and outside [-1, 1]."""
    assert chebyshev.cheb_eval(s, z) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("s", range(0, 12))
def test_cheb_eval__at_one__equals_one(s: int) -> None:
    """Test that T_s(1) = 1."""
    assert chebyshev.cheb_eval(s, 1.0) == pytest.approx(1.0)


def test_cheb_eval__negative_degree__raises_invalid_problem() -> None:
    """Test that negative degrees are rejected."""
    with pytest.raises(InvalidProblem):
        chebyshev.cheb_eval(-1, 0.5)


@pytest.mark.parametrize(
    "s, expected",
    [
        (0, [1]),
        (1, [0, 1]),
        (2, [-1, 0, 2]),
        (3, [0, -3, 0, 4]),
        (4, [1, 0, -8, 0, 8]),
        (5, [0, 5, 0, -20, 0, 16]),
    ],
)
def test_cheb_coefficients__small_degrees(s: int, expected: list[int]) -> None:
    """Test the exact ascending coefficients of T_0 .. T_5."""
    assert chebyshev.cheb_coefficients(s) == expected


@pytest.mark.parametrize("s", range(0, 16))
def test_cheb_coefficients__closed_form__matches_recurrence(s: int) -> None:
    """Test that the explicit sum agrees with the three-term recurrence."""
    assert chebyshev.cheb_coefficients(s) == chebyshev.cheb_coefficients_recurrence(s)


@pytest.mark.parametrize("s", range(1, 16))
def test_cheb_coefficients__leading_term__power_of_two(s: int) -> None:
    """Test that the leading coefficient is 2^{s-1}."""
    assert chebyshev.cheb_coefficients(s)[-1] == 2 ** (s - 1)


@pytest.mark.parametrize("s", range(2, 16))
def test_viete_moments__zeros_of_t_s__zero_mean_and_half_s(s: int) -> None:
    """Test that the zeros of T_s sum to zero and their squares sum to s/2."""
    xi, eta = chebyshev.viete_moments(s)

    assert xi == 0
    assert eta == Fraction(s, 2)
    assert float(np.sum(chebyshev.chebyshev_zeros(s) ** 2)) == pytest.approx(s / 2)


def test_viete_moments__degree_one__single_zero_at_origin() -> None:
    """Test that T_1 has its only zero at the origin."""
    assert chebyshev.viete_moments(1) == (0, 0)


def test_chebyshev_zeros__ascending_and_roots() -> None:
    """Test that the zeros come out ascending and annihilate T_s."""
    zeros = chebyshev.chebyshev_zeros(6)

    assert np.all(np.diff(zeros) > 0)
    assert max(abs(chebyshev.cheb_eval(6, float(z))) for z in zeros) <= 1e-12


@pytest.mark.parametrize(
    "s, r, expected",
    [(2, 2.0, 4.0), (3, 2.0, 6.0), (4, 2.0, 8.0), (2, 8.0, 16.0), (4, 0.5, 8 * 0.25**0.5), (5, 0.0, 0.0)],
)
def test_extremal_value__examples(s: int, r: float, expected: float) -> None:
    """Test 2s (r/2)^{2/s} on a few parameter pairs."""
    assert chebyshev.extremal_value(s, r) == pytest.approx(expected)


@pytest.mark.parametrize("s", range(2, 8))
@pytest.mark.parametrize("r", [0.1, 0.5, 3.0, 40.0])
def test_extremal_value__scaling_law(s: int, r: float) -> None:
    """Test that the value at r is the value at 2 scaled by (r/2)^{2/s}."""
    expected = chebyshev.extremal_value(s, 2.0) * (r / 2) ** (2 / s)

    assert chebyshev.extremal_value(s, r) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("s, r", [(1, 1.0), (0, 1.0), (3, -0.5)])
def test_extremal_value__invalid_parameters__raises_invalid_problem(s: int, r: float) -> None:
    """Test that s < 2 and negative r are rejected."""
    with pytest.raises(InvalidProblem):
        chebyshev.extremal_value(s, r)


def test_extremal_config__two_points__plus_minus_sqrt_two() -> None:
    """Test the configuration (-sqrt 2, sqrt 2) for s = 2, r = 2."""
    config = chebyshev.extremal_config(2, 2.0)

    assert config.x == pytest.approx([-math.sqrt(2), math.sqrt(2)])
    assert config.sum_squares == pytest.approx(4.0)
    assert config.max_abs == pytest.approx(2.0)


def test_extremal_config__three_points__symmetric_around_zero() -> None:
    """Test the configuration (-sqrt 3, 0, sqrt 3) for s = 3, r = 2."""
    config = chebyshev.extremal_config(3, 2.0)

    assert config.x == pytest.approx([-math.sqrt(3), 0.0, math.sqrt(3)], abs=1e-12)
    assert config.sum_squares == pytest.approx(6.0)
    assert config.max_abs == pytest.approx(2.0)


def test_extremal_config__zero_bound__all_zero() -> None:
    """Test that r = 0 collapses every point to the origin."""
    config = chebyshev.extremal_config(4, 0.0)

    assert config.x == [0.0] * 4
    assert config.max_abs == 0.0


@pytest.mark.parametrize("s", range(2, 6))
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_extremal_config__grid__member_attaining_bound(s: int, r: float) -> None:
    """Test that the extremal configuration is admissible and reaches the closed-form value."""
    config = chebyshev.extremal_config(s, r)

    accepted, slack = chebyshev.membership(config.x, r)

    assert accepted
    assert abs(slack) <= 1e-9
    assert config.sum_squares == pytest.approx(chebyshev.extremal_value(s, r), rel=1e-12)


@pytest.mark.parametrize("s", range(3, 8))
def test_critical_points__extremal_config__equioscillation(s: int) -> None:
    """Test that the polynomial reaches modulus r at each of its s - 1 critical points."""
    r = 1.5
    x = np.array(chebyshev.extremal_config(s, r).x)

    points = chebyshev.critical_points(x)
    values = np.abs(np.prod(points[:, np.newaxis] - x[np.newaxis, :], axis=1))

    assert points.size == s - 1
    np.testing.assert_allclose(values, r, rtol=1e-9)


@pytest.mark.parametrize(
    "x, r, expected",
    [
        ([-1.0, 0.0, 1.0], 1.0, True),
        ([1.0, 0.0, -1.0], 1.0, False),
        ([0.0, 1.0], 1.0, False),
        ([-2.0, 2.0], 3.0, False),
        ([-2.0, 2.0], 4.0, True),
    ],
)
def test_membership__examples(x: list[float], r: float, expected: bool) -> None:
    """Test ordering, zero sum and the modulus bound."""
    assert chebyshev.membership(x, r)[0] is expected


def test_membership__symmetric_triple__slack() -> None:
    """Test the slack 2/(3 sqrt 3) - 1 of (-1, 0, 1) for r = 1."""
    assert chebyshev.membership([-1.0, 0.0, 1.0], 1.0)[1] == pytest.approx(2 / (3 * math.sqrt(3)) - 1)


def test_membership__empty__raises_invalid_problem() -> None:
    """Test that an empty configuration is rejected."""
    with pytest.raises(InvalidProblem):
        chebyshev.membership([], 1.0)


@seed(11)
@settings(max_examples=200, deadline=None)
@given(raw=arrays(np.float64, st.integers(min_value=2, max_value=7), elements=st.floats(min_value=-3, max_value=3)))
def test_extremal_value__random_configuration__never_exceeded(raw: np.ndarray) -> None:
    """Test that any zero-sum configuration has sum of squares at most the bound at its own max modulus."""
    x = np.sort(raw - np.mean(raw))
    r = chebyshev.max_abs_on_hull(x)

    assert float(np.sum(x**2)) <= chebyshev.extremal_value(x.size, r) * (1 + 1e-9) + 1e-12


@pytest.mark.parametrize("s", range(2, 6))
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_oracle_max_sum_squares__small_problems__close_to_closed_form(s: int, r: float) -> None:
    """Test that the search neither beats the closed form nor falls more than 1e-3 short of it."""
    expected = chebyshev.extremal_value(s, r)

    result = chebyshev.oracle_max_sum_squares(s, r, budget=10_000, seed=0)

    assert result.best <= expected + 1e-9
    assert result.best >= expected - 1e-3
    assert chebyshev.membership(result.x, r, tol=1e-8)[0]
    assert result.evaluations <= 10_000


def test_oracle_max_sum_squares__search__never_consults_closed_form(mocker: MockerFixture) -> None:
    """Test that the search starts from random shapes only, without the Chebyshev zeros or configuration."""
    zeros = mocker.spy(chebyshev, "chebyshev_zeros")
    config = mocker.spy(chebyshev, "extremal_config")
    value = mocker.spy(chebyshev, "extremal_value")

    result = chebyshev.oracle_max_sum_squares(4, 1.0, budget=3_000, seed=2)

    assert result.best <= chebyshev.extremal_value(4, 1.0) + 1e-9
    assert zeros.call_count == config.call_count == 0
    assert value.call_count == 1


def test_oracle_max_sum_squares__zero_bound__zero() -> None:
    """Test that r = 0 admits only the zero configuration."""
    result = chebyshev.oracle_max_sum_squares(3, 0.0)

    assert result.best == 0.0
    assert result.x == [0.0, 0.0, 0.0]


def test_oracle_max_sum_squares__same_seed__deterministic() -> None:
    """Test that the search is reproducible for a fixed seed."""
    first = chebyshev.oracle_max_sum_squares(4, 1.0, budget=2_000, seed=3)
    second = chebyshev.oracle_max_sum_squares(4, 1.0, budget=2_000, seed=3)

    assert first == second


@pytest.mark.parametrize("s, r, budget", [(1, 1.0, 100), (3, -1.0, 100), (3, 1.0, 0)])
def test_oracle_max_sum_squares__invalid_input__raises_invalid_problem(s: int, r: float, budget: int) -> None:
    """Test that bad parameters and an empty budget are rejected."""
    with pytest.raises(InvalidProblem):
        chebyshev.oracle_max_sum_squares(s, r, budget=budget)
