import json
import os
import tempfile
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from typing_extensions import Any


def lexicographic_order(values: np.ndarray) -> np.ndarray:
    """
    Return the permutation sorting complex values by (real, imaginary) part.

    Args:
        values (np.ndarray): One-dimensional array of real or complex values.

    Returns:
        np.ndarray: Index array such that ``values[order]`` is sorted lexicographically.
    """
    values = np.asarray(values)
    return np.lexsort((values.imag, values.real))


def match_multisets(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """
    Greedily pair two multisets of equal size and return the pair distances.

    Both inputs are sorted lexicographically by (real, imaginary) part. Each value of
    ``first`` in that order is paired with the nearest not yet used value of ``second``.

    Args:
        first (np.ndarray): First multiset (real or complex).
        second (np.ndarray): Second multiset, same length as ``first``.

    Returns:
        np.ndarray: Distances ``|first_i - second_j|`` of the matched pairs, in the sorted order of ``first``.
    """
    first = np.asarray(first).ravel()
    second = np.asarray(second).ravel()
    if first.shape != second.shape:
        raise ValueError(f"Cannot match multisets of sizes {first.size} and {second.size}.")

    first = first[lexicographic_order(first)]
    second = second[lexicographic_order(second)]

    used = np.zeros(second.size, dtype=bool)
    distances = np.empty(first.size)
    for i, value in enumerate(first):
        gaps = np.abs(second - value)
        gaps[used] = np.inf
        j = int(np.argmin(gaps))
        used[j] = True
        distances[i] = gaps[j]

    return distances


def max_matched_deviation(first: np.ndarray, second: np.ndarray, relative: bool = False) -> float:
    """
    Largest matched-pair distance between two multisets.

    Args:
        first (np.ndarray): First multiset.
        second (np.ndarray): Second multiset.
        relative (bool): Scale each distance by ``max(1, |first_i|)``.

    Returns:
        float: The worst matched deviation, ``0.0`` for empty inputs.
    """
    first = np.asarray(first).ravel()
    if first.size == 0:
        return 0.0

    distances = match_multisets(first, second)
    if relative:
        scale = np.maximum(1.0, np.abs(first[lexicographic_order(first)]))
        distances = distances / scale

    return float(np.max(distances))


def cluster_sorted(values: Sequence[float] | np.ndarray, tol: float) -> list[list[int]]:
    """
    Group ascending real values whose consecutive gaps do not exceed ``tol``.

    Args:
        values (Sequence[float] | np.ndarray): Values sorted non-decreasing.
        tol (float): Maximal gap inside one cluster.

    Returns:
        list[list[int]]: Index groups, in ascending order of value.
    """
    clusters: list[list[int]] = []
    previous = None
    for index, value in enumerate(values):
        if previous is None or value - previous > tol:
            clusters.append([index])
        else:
            clusters[-1].append(index)
        previous = value

    return clusters


def canonical_json(data: Any) -> str:
    """
    Serialize data with sorted keys and shortest round-trip floats.

    Args:
        data (Any): JSON-compatible data.

    Returns:
        str: The canonical text, terminated by a newline.
    """
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write_text(path: str | Path, text: str) -> Path:
    """
    Write text to a file through a temporary sibling and an atomic rename.

    Args:
        path (str | Path): Destination path.
        text (str): Content, written as UTF-8 with LF line endings.

    Returns:
        Path: The destination path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise

    return path
