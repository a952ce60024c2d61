"""Power-transform score blending across model score files.

Each input file scores the same set of vertex pairs; the blend is the
weighted average of per-model scores raised to a fixed exponent, with
weights normalized to sum 1.  Pairs are aligned by canonical (min, max)
key, so row order may differ between files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import ScoredPairs

_MAX_VERTEX = 2**31 - 1


class ScoreFileFormatError(ValueError):
    """Raised when a score file violates the `u v score` contract."""


@dataclass(frozen=True)
class BlendSpec:
    inputs: tuple[tuple[str, float], ...]
    power: float = 3.0

    def __init__(self, inputs, power: float = 3.0):
        inputs = tuple((str(path), float(weight)) for path, weight in inputs)
        if not inputs:
            raise ValueError("blend needs at least one input")
        if any(weight < 0 for _, weight in inputs):
            raise ValueError("blend weights must be nonnegative")
        if sum(weight for _, weight in inputs) <= 0:
            raise ValueError("blend weights must sum to a positive value")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "power", float(power))


def _canonical_keys(pairs: np.ndarray, path) -> np.ndarray:
    lo = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    hi = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    keys = (lo << 32) | hi
    order = np.argsort(keys, kind="stable")
    dup = np.flatnonzero(keys[order][1:] == keys[order][:-1])
    if dup.size:
        u, v = pairs[order[dup[0]]]
        raise ScoreFileFormatError(f"{path}: duplicate pair ({u}, {v})")
    return keys


def read_score_file(path) -> ScoredPairs:
    """Parse a `u v score` file; scores must lie in [0, 1]."""
    pairs: list[tuple[int, int]] = []
    scores: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if header.split() != ["u", "v", "score"]:
            raise ScoreFileFormatError(f"{path}: expected header 'u v score'")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ScoreFileFormatError(
                    f"{path}:{lineno}: expected 'u v score', got {line.strip()!r}"
                )
            try:
                u, v = int(parts[0]), int(parts[1])
                score = float(parts[2])
            except ValueError:
                raise ScoreFileFormatError(
                    f"{path}:{lineno}: expected 'u v score', got {line.strip()!r}"
                ) from None
            if u == v:
                raise ScoreFileFormatError(f"{path}:{lineno}: self-pair ({u}, {v})")
            if u < 0 or v < 0 or u > _MAX_VERTEX or v > _MAX_VERTEX:
                raise ScoreFileFormatError(f"{path}:{lineno}: vertex index out of range")
            if not 0.0 <= score <= 1.0:
                raise ScoreFileFormatError(
                    f"{path}:{lineno}: score {parts[2]} outside [0, 1]"
                )
            pairs.append((u, v))
            scores.append(score)
    if not pairs:
        raise ScoreFileFormatError(f"{path}: no score rows")
    return ScoredPairs(
        pairs=np.asarray(pairs, dtype=np.int64),
        scores=np.asarray(scores, dtype=np.float64),
    )


def write_score_file(path, pairs: np.ndarray, scores: np.ndarray) -> None:
    """Write `u v score` rows with 12 significant digits."""
    pairs = np.asarray(pairs, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or scores.shape != (pairs.shape[0],):
        raise ValueError("pairs must be (n, 2) with one score per pair")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("u v score\n")
        for (u, v), score in zip(pairs, scores):
            fh.write(f"{u} {v} {score:.12g}\n")


def _first_divergent(ref_keys: np.ndarray, keys: np.ndarray) -> tuple[int, int]:
    ref_sorted = np.sort(ref_keys)
    other_sorted = np.sort(keys)
    n = min(ref_sorted.size, other_sorted.size)
    mismatch = np.flatnonzero(ref_sorted[:n] != other_sorted[:n])
    if mismatch.size:
        key = max(ref_sorted[mismatch[0]], other_sorted[mismatch[0]])
    elif ref_sorted.size > n:
        key = ref_sorted[n]
    else:
        key = other_sorted[n]
    return int(key >> 32), int(key & 0xFFFFFFFF)


def blend(spec: BlendSpec) -> ScoredPairs:
    """Weighted average of per-model scores each raised to ``spec.power``.

    All inputs must cover the same pair set; the result keeps the first
    input's pairs and row order.
    """
    total_weight = sum(weight for _, weight in spec.inputs)
    first_path = spec.inputs[0][0]
    reference = read_score_file(first_path)
    ref_keys = _canonical_keys(reference.pairs, first_path)
    ref_order = np.argsort(ref_keys, kind="stable")

    blended = np.zeros(reference.pairs.shape[0])
    for path, weight in spec.inputs:
        scored = reference if path == first_path else read_score_file(path)
        keys = ref_keys if scored is reference else _canonical_keys(scored.pairs, path)
        if scored is not reference:
            if keys.size != ref_keys.size or np.any(
                np.sort(keys) != np.sort(ref_keys)
            ):
                u, v = _first_divergent(ref_keys, keys)
                raise ScoreFileFormatError(
                    f"{path}: pair set differs from {first_path}: "
                    f"first divergent pair ({u}, {v})"
                )
        # place this file's scores into the reference row order
        aligned = np.empty_like(blended)
        aligned[ref_order] = scored.scores[np.argsort(keys, kind="stable")]
        blended += (weight / total_weight) * aligned**spec.power
    return ScoredPairs(pairs=reference.pairs.copy(), scores=blended)
