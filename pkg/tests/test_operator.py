import numpy as np
import pytest
from pydantic import ValidationError

from floquet_borg import operator
from floquet_borg.errors import InvalidDimension, Singular
from floquet_borg.operator import BlockJacobiOperator, GeneralBlockJacobi


def test_free_operator__shape_and_coupling__identity_blocks() -> None:
    """Test that the free operator has identity off-diagonal and zero diagonal blocks."""
    J = operator.free_operator(3, 2)

    assert (J.p, J.m) == (3, 2)
    np.testing.assert_array_equal(J.a, np.broadcast_to(np.eye(2), (3, 2, 2)))
    np.testing.assert_array_equal(J.b, 0)
    assert operator.coupling_constant(J) == 1.0
    assert operator.distance_from_free(J) == 0.0


@pytest.mark.parametrize("p, m", [(0, 1), (1, 0), (-2, 3)])
def test_free_operator__non_positive_dimension__raises_invalid_dimension(p: int, m: int) -> None:
    """Test that periods and block sizes below one are rejected."""
    with pytest.raises(InvalidDimension):
        operator.free_operator(p, m)


def test_operator__coefficients_are_read_only() -> None:
    """Test that the stored coefficient arrays cannot be mutated."""
    J = operator.free_operator(2, 2)

    with pytest.raises(ValueError):
        J.a[0, 0, 0] = 5.0


@pytest.mark.parametrize(
    "a, b",
    [
        (np.ones((2, 2, 2)), np.ones((3, 2, 2))),
        (np.ones((2, 2, 3)), np.ones((2, 2, 3))),
        (np.full((1, 1, 1), np.nan), np.zeros((1, 1, 1))),
        (np.zeros((0, 1, 1)), np.zeros((0, 1, 1))),
    ],
)
def test_operator__inconsistent_coefficients__raises_validation_error(a: np.ndarray, b: np.ndarray) -> None:
    """Test that shape mismatches, non-square blocks, non-finite entries and empty periods are rejected."""
    with pytest.raises(ValidationError):
        BlockJacobiOperator(a=a, b=b)


def test_validate__free_operator__passes(free_3_2: BlockJacobiOperator) -> None:
    """Test that the free operator satisfies every invariant."""
    report = operator.validate(free_3_2)

    assert report.passed
    assert report.failures == []
    assert report.min_eigenvalues_a == pytest.approx([1.0, 1.0, 1.0])


def test_validate__non_hermitian_b__reports_site() -> None:
    """Test that a non-Hermitian diagonal block is reported with its 1-based site."""
    b = np.zeros((2, 2, 2), dtype=complex)
    b[1] = [[0.0, 1.0], [0.0, 0.0]]
    J = BlockJacobiOperator(a=np.broadcast_to(np.eye(2), (2, 2, 2)), b=b)

    report = operator.validate(J)

    assert not report.passed
    assert [(f.kind, f.coefficient, f.site) for f in report.failures] == [("NotHermitian", "b", 2)]


def test_validate__indefinite_a__reports_not_positive_definite() -> None:
    """Test that an off-diagonal block with a negative eigenvalue is reported."""
    a = np.broadcast_to(np.eye(2), (2, 2, 2)).copy()
    a[0] = np.diag([1.0, -1.0])
    J = BlockJacobiOperator(a=a, b=np.zeros((2, 2, 2)))

    report = operator.validate(J)

    assert [(f.kind, f.site) for f in report.failures] == [("NotPositiveDefinite", 1)]


def test_validate__general_singular_a__reports_singular() -> None:
    """Test that a general operator only needs invertible blocks and fails on a singular one."""
    a = np.array([[[0.0, 1.0], [-1.0, 0.0]], [[1.0, 1.0], [1.0, 1.0]]])
    G = GeneralBlockJacobi(a=a, b=np.zeros((2, 2, 2)))

    report = operator.validate(G)

    assert [(f.kind, f.site) for f in report.failures] == [("Singular", 2)]
    assert report.min_singular_values_a is not None


def test_coupling_constant__scaled_blocks__product_of_determinants(scaled_3_1: BlockJacobiOperator) -> None:
    """Test that c = det(a_1 a_2 a_3) = 2 * 1/2 * 1."""
    assert operator.coupling_constant(scaled_3_1) == pytest.approx(1.0)


def test_period_extend__coupling__raised_to_power_k() -> None:
    """Test that the k-fold extension has coupling constant c^k and repeated coefficients."""
    J = operator.random_operator(3, 2, seed=4, spread=0.3)

    extended = operator.period_extend(J, 3)

    assert extended.p == 9
    np.testing.assert_array_equal(extended.a[3:6], J.a)
    assert operator.coupling_constant(extended) == pytest.approx(operator.coupling_constant(J) ** 3, rel=1e-12)


def test_period_extend__zero_factor__raises_invalid_dimension(free_3_2: BlockJacobiOperator) -> None:
    """Test that the extension factor must be positive."""
    with pytest.raises(InvalidDimension):
        operator.period_extend(free_3_2, 0)


def test_shift_operator__shift_and_back__restores_operator_exactly() -> None:
    """Test that shifting by s and then by -s gives back identical coefficients."""
    J = operator.random_operator(4, 2, seed=5, spread=0.5)

    restored = operator.shift_operator(operator.shift_operator(J, 0.123456789), -0.123456789)

    assert restored == J
    np.testing.assert_array_equal(restored.b, J.b)


@pytest.mark.parametrize("first, second", [(0.1, 0.2), (1e-3, 0.7), (-2.5, 0.123456789)])
def test_shift_operator__preshifted_operator__round_trip_bitwise(first: float, second: float) -> None:
    """Test that shifting an already shifted operator by s and back restores its diagonal bit for bit."""
    J = operator.shift_operator(operator.free_operator(2, 1), first)

    restored = operator.shift_operator(operator.shift_operator(J, second), -second)

    assert restored.shift == first
    assert restored.shifts == J.shifts
    assert np.array_equal(restored.b, J.b)


def test_shift_operator__zero__same_operator(free_3_2: BlockJacobiOperator) -> None:
    """Test that a zero shift leaves the operator untouched."""
    assert operator.shift_operator(free_3_2, 0.0) is free_3_2


def test_shift_operator__free__diagonal_moves(free_3_2: BlockJacobiOperator) -> None:
    """Test that every diagonal block becomes -s I."""
    shifted = operator.shift_operator(free_3_2, 1.0)

    np.testing.assert_array_equal(shifted.b, np.broadcast_to(-np.eye(2), (3, 2, 2)))


def test_center_trace__random_operator__zero_total_trace() -> None:
    """Test that centering removes the total trace of the diagonal blocks."""
    J = operator.random_operator(3, 3, seed=6, spread=1.0)

    assert operator.total_trace(operator.center_trace(J)) == pytest.approx(0.0, abs=1e-12)


def test_unit_coupling__random_operator__coupling_one() -> None:
    """Test that rescaling makes the coupling constant one and keeps a valid operator."""
    J = operator.unit_coupling(operator.random_operator(4, 2, seed=7, spread=0.4))

    assert operator.coupling_constant(J) == pytest.approx(1.0, abs=1e-12)
    assert operator.validate(J).passed


def test_random_operator__same_seed__identical() -> None:
    """Test that random operators are reproducible."""
    assert operator.random_operator(3, 2, seed=11, spread=0.3) == operator.random_operator(3, 2, seed=11, spread=0.3)
    assert operator.random_operator(3, 2, seed=11, spread=0.3) != operator.random_operator(3, 2, seed=12, spread=0.3)


def test_random_operator__zero_spread__equals_free() -> None:
    """Test that a zero perturbation gives the free operator."""
    assert operator.random_operator(3, 2, seed=1, spread=0.0) == operator.free_operator(3, 2)


@pytest.mark.parametrize("seed", range(10))
def test_random_operator__any_seed__valid(seed: int) -> None:
    """Test that large perturbations still give positive-definite off-diagonal blocks."""
    assert operator.validate(operator.random_operator(3, 3, seed=seed, spread=2.0)).passed


def test_random_operator__real_flag__real_coefficients() -> None:
    """Test that real operators have no imaginary parts."""
    J = operator.random_operator(3, 2, seed=3, spread=0.5, real=True)

    assert not np.any(J.a.imag)
    assert not np.any(J.b.imag)


def test_gauge_normalize__minus_identity__free_operator() -> None:
    """Test that a = -I normalizes to the free operator with alternating signs in the window."""
    G = GeneralBlockJacobi(a=np.broadcast_to(-np.eye(2), (3, 2, 2)), b=np.zeros((3, 2, 2)))

    result = operator.gauge_normalize(G)

    np.testing.assert_allclose(result.normalized.a, operator.free_operator(3, 2).a, atol=1e-12)
    np.testing.assert_allclose(result.normalized.b, 0.0, atol=1e-12)
    np.testing.assert_allclose(result.unitaries[1], -np.eye(2), atol=1e-12)
    assert max(result.factorization_residuals(G)) <= 1e-10
    assert result.is_periodic()


def test_gauge_normalize__positive_input__identity_window() -> None:
    """Test that already positive blocks leave every unitary at the identity."""
    J = operator.random_operator(3, 2, seed=8, spread=0.3)
    G = GeneralBlockJacobi(a=J.a, b=J.b)

    result = operator.gauge_normalize(G)

    np.testing.assert_allclose(result.unitaries, np.broadcast_to(np.eye(2), (4, 2, 2)), atol=1e-10)
    np.testing.assert_allclose(result.normalized.a, J.a, atol=1e-10)


def test_gauge_normalize__singular_block__raises_singular() -> None:
    """Test that a zero off-diagonal block cannot be normalized."""
    a = np.broadcast_to(np.eye(2), (2, 2, 2)).copy()
    a[0] = 0.0
    G = GeneralBlockJacobi(a=a, b=np.zeros((2, 2, 2)))

    with pytest.raises(Singular):
        operator.gauge_normalize(G)


@pytest.mark.parametrize("seed", range(20))
def test_gauge_normalize__random_general__factorization_holds(seed: int) -> None:
    """Test the factorization a~_n = u_n a_n u_{n+1}^*, b~_n = u_n b_n u_n^* with positive a_n."""
    rng = np.random.default_rng(seed)
    G = operator.random_general_operator(int(rng.integers(1, 5)), int(rng.integers(1, 4)), seed=seed, spread=0.5)

    result = operator.gauge_normalize(G)

    assert max(result.factorization_residuals(G)) <= 1e-9
    assert operator.validate(result.normalized).passed
    for u in result.unitaries:
        np.testing.assert_allclose(u @ u.conj().T, np.eye(G.m), atol=1e-10)


def test_gauge_result__scalar_block__holonomy_is_phase() -> None:
    """Test that for m = 1 the closing unitary is a phase, so the gauge is periodic."""
    G = operator.random_general_operator(4, 1, seed=3, spread=0.4)

    result = operator.gauge_normalize(G)

    assert abs(abs(result.holonomy[0, 0]) - 1.0) <= 1e-12
    assert result.is_periodic()
