"""Readers and writers for the delimited artifact exchange formats.

The trainer consumes files exported by the feature-engineering pipeline
and emits score files in the blender's contract; these parsers are the
whole coupling surface between the two packages.  Formats, one header
line then whitespace-delimited rows:

* feature matrix  ``u v <column names>``, ``NaN`` for missing values
* labeled split   ``u v label`` with labels 0/1
* vertex table    ``vertex <column names>``, rows in vertex-index order
* adjacency       ``u v weight`` with weights in (0, 1]
* score file      ``u v score`` with scores in [0, 1]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ArtifactFormatError(ValueError):
    """Raised when an exchange file violates its header or row contract."""


@dataclass(frozen=True)
class PairTable:
    """Vertex pairs with one feature row each, as read from disk."""

    pairs: np.ndarray  # (n, 2) int64
    values: np.ndarray  # (n, k) float64, NaN where missing
    column_names: tuple[str, ...]

    @property
    def num_rows(self) -> int:
        return self.values.shape[0]


def _load_body(fh, path, width: int) -> np.ndarray:
    try:
        data = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise ArtifactFormatError(f"{path}: {exc}") from None
    if data.size == 0:
        return np.empty((0, width))
    if data.shape[1] != width:
        raise ArtifactFormatError(f"{path}: row width does not match header")
    return data


def read_feature_matrix(path) -> PairTable:
    """Parse a ``u v <feature names>`` pair-feature export."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) < 3 or header[:2] != ["u", "v"]:
            raise ArtifactFormatError(f"{path}: expected header 'u v <feature names>'")
        data = _load_body(fh, path, len(header))
    return PairTable(data[:, :2].astype(np.int64), data[:, 2:], tuple(header[2:]))


def read_split(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a ``u v label`` split; returns ``(pairs, labels)`` arrays."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if header != ["u", "v", "label"]:
            raise ArtifactFormatError(f"{path}: expected header 'u v label'")
        data = _load_body(fh, path, 3).astype(np.int64)
    labels = data[:, 2]
    if labels.size and not np.isin(labels, (0, 1)).all():
        raise ArtifactFormatError(f"{path}: labels must be 0 or 1")
    return data[:, :2], labels


def read_vertex_table(path) -> tuple[np.ndarray, tuple[str, ...]]:
    """Parse a ``vertex <names>`` table; returns ``(values, column_names)``.

    Rows must cover vertex indices 0..V-1 in order so that row i is the
    feature vector of vertex i.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) < 2 or header[0] != "vertex":
            raise ArtifactFormatError(f"{path}: expected header 'vertex <names>'")
        data = _load_body(fh, path, len(header))
    index = data[:, 0]
    if not np.array_equal(index, np.arange(index.size)):
        raise ArtifactFormatError(f"{path}: vertex column must be 0..V-1 in order")
    return data[:, 1:], tuple(header[1:])


def read_adjacency(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a ``u v weight`` adjacency export; returns ``(pairs, weights)``."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if header != ["u", "v", "weight"]:
            raise ArtifactFormatError(f"{path}: expected header 'u v weight'")
        data = _load_body(fh, path, 3)
    pairs = data[:, :2].astype(np.int64)
    weights = data[:, 2]
    if weights.size and not ((weights > 0) & (weights <= 1)).all():
        raise ArtifactFormatError(f"{path}: weights must lie in (0, 1]")
    if (pairs[:, 0] == pairs[:, 1]).any():
        raise ArtifactFormatError(f"{path}: self-pair in adjacency")
    return pairs, weights


def write_score_file(path, pairs: np.ndarray, scores: np.ndarray) -> None:
    """Write ``u v score`` rows with 12 significant digits (blend contract)."""
    pairs = np.asarray(pairs, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or scores.shape != (pairs.shape[0],):
        raise ValueError("pairs must be (n, 2) with one score per pair")
    if scores.size and not ((scores >= 0) & (scores <= 1)).all():
        raise ValueError("scores must lie in [0, 1]")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("u v score\n")
        for (u, v), score in zip(pairs, scores):
            fh.write(f"{u} {v} {score:.12g}\n")
