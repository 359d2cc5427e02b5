import json
from pathlib import Path

import numpy as np
import pytest
from pytest_mock import MockerFixture

from floquet_borg import utils


@pytest.mark.parametrize(
    "values, expected",
    [
        ([3.0, 1.0, 2.0], [1, 2, 0]),
        ([1 + 1j, 1 - 1j, 0j], [2, 1, 0]),
    ],
)
def test_lexicographic_order__real_then_imaginary(values: list, expected: list[int]) -> None:
    """Test ordering by real part first and imaginary part second."""
    assert utils.lexicographic_order(np.array(values)).tolist() == expected


def test_match_multisets__permuted_input__zero_distances() -> None:
    """Test that a permutation of the same multiset matches exactly."""
    distances = utils.match_multisets(np.array([1j, -1j, 1j]), np.array([1j, 1j, -1j]))

    np.testing.assert_array_equal(distances, 0.0)


def test_match_multisets__nearest_unused_partner() -> None:
    """Test that each value takes the nearest partner not yet used."""
    distances = utils.match_multisets(np.array([0.0, 0.1]), np.array([0.05, 1.0]))

    np.testing.assert_allclose(distances, [0.05, 0.9])


def test_match_multisets__size_mismatch__raises_value_error() -> None:
    """Test that multisets must have equal sizes."""
    with pytest.raises(ValueError):
        utils.match_multisets(np.zeros(2), np.zeros(3))


@pytest.mark.parametrize(
    "relative, expected",
    [(False, 1.0), (True, 0.1)],
)
def test_max_matched_deviation__relative_scaling(relative: bool, expected: float) -> None:
    """Test that relative deviations are scaled by max(1, |value|)."""
    assert utils.max_matched_deviation(np.array([10.0]), np.array([11.0]), relative=relative) == pytest.approx(expected)


def test_max_matched_deviation__empty__zero() -> None:
    """Test that empty multisets have no deviation."""
    assert utils.max_matched_deviation(np.array([]), np.array([])) == 0.0


@pytest.mark.parametrize(
    "values, tol, expected",
    [
        ([0.0, 1e-9, 1.0, 1.0, 2.0], 1e-7, [[0, 1], [2, 3], [4]]),
        ([0.0, 0.5, 1.0], 0.6, [[0, 1, 2]]),
        ([], 1.0, []),
    ],
)
def test_cluster_sorted__gaps_split_clusters(values: list[float], tol: float, expected: list[list[int]]) -> None:
    """Test that consecutive gaps above tol start a new cluster."""
    assert utils.cluster_sorted(values, tol) == expected


def test_canonical_json__sorted_keys_shortest_floats() -> None:
    """Test sorted keys, repr-style floats and the trailing newline."""
    text = utils.canonical_json({"b": 0.1, "a": [1, 2.5]})

    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert "0.1" in text and "0.1000" not in text
    assert json.loads(text) == {"a": [1, 2.5], "b": 0.1}


def test_canonical_json__nan__raises_value_error() -> None:
    """Test that non-finite floats are refused."""
    with pytest.raises(ValueError):
        utils.canonical_json({"x": float("nan")})


def test_atomic_write_text__nested_path__writes_and_leaves_no_temp_files(tmp_path: Path) -> None:
    """Test that parents are created and only the destination remains."""
    target = tmp_path / "out" / "bands.json"

    utils.atomic_write_text(target, "first\n")
    utils.atomic_write_text(target, "second\n")

    assert target.read_bytes() == b"second\n"
    assert [path.name for path in target.parent.iterdir()] == ["bands.json"]


def test_atomic_write_text__failed_write__keeps_previous_content(tmp_path: Path, mocker: MockerFixture) -> None:
    """Test that a failing rename leaves the old file and no temporary sibling."""
    target = tmp_path / "op.json"
    target.write_text("old\n")
    mocker.patch("floquet_borg.utils.os.replace", side_effect=OSError("disk full"))

    with pytest.raises(OSError):
        utils.atomic_write_text(target, "new\n")

    assert target.read_text() == "old\n"
    assert [path.name for path in tmp_path.iterdir()] == ["op.json"]
