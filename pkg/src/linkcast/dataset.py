"""Training/validation/test candidate-pair construction.

A split keeps every positive pair (unconnected at t1, connected by t2) and
fills the remainder of the target size with negatives drawn uniformly
without replacement from the pairs still unconnected at t2.  Sampling uses
a single seeded stream, so a fixed seed reproduces the split byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import TemporalGraph

# Below this many total vertex pairs the unconnected complement is
# enumerated outright and sampled exactly; above it, rejection sampling
# against the connected-pair set avoids materializing ~1e9 candidates.
_EXACT_ENUMERATION_LIMIT = 4_000_000

_REJECTION_BATCH = 65_536


@dataclass(frozen=True)
class SplitSpec:
    """Split dates, target size, and sampling seed."""

    t1_day: int
    t2_day: int
    target_size: int
    seed: int = 0

    def __post_init__(self):
        if self.t1_day >= self.t2_day:
            raise ValueError("t1_day must precede t2_day")
        if self.target_size < 0:
            raise ValueError("target_size must be nonnegative")

    def to_mapping(self) -> dict[str, int]:
        return {
            "t1_day": self.t1_day,
            "t2_day": self.t2_day,
            "target_size": self.target_size,
            "seed": self.seed,
        }


@dataclass
class LabeledPairs:
    """Candidate pairs with binary labels (edge formed by t2 or not)."""

    pairs: np.ndarray  # (n, 2) int64
    labels: np.ndarray  # (n,) int64 in {0, 1}

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.shape[0] != self.pairs.shape[0]:
            raise ValueError("pairs and labels must have equal length")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")

    def __len__(self) -> int:
        return self.labels.size

    @property
    def num_positives(self) -> int:
        return int(self.labels.sum())

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("u v label\n")
            for (a, b), y in zip(self.pairs.tolist(), self.labels.tolist()):
                fh.write(f"{a} {b} {y}\n")

    @classmethod
    def load(cls, path) -> "LabeledPairs":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().split()
            if header != ["u", "v", "label"]:
                raise ValueError(f"{path}: expected header 'u v label'")
            data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
        if data.size == 0:
            return cls(np.empty((0, 2), np.int64), np.empty(0, np.int64))
        return cls(data[:, :2], data[:, 2])


def _pair_first_days(graph: TemporalGraph, t2_day: int):
    """Canonical pair keys with events at day <= t2 and their first day."""
    u, v, day = graph.event_arrays
    hi = np.searchsorted(day, t2_day, side="right")
    uu, vv, dd = u[:hi], v[:hi], day[:hi]
    n = graph.num_vertices
    keys = np.minimum(uu, vv) * np.int64(n) + np.maximum(uu, vv)
    order = np.argsort(keys, kind="stable")  # stable keeps day order per key
    k, d = keys[order], dd[order]
    if k.size == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    first = np.concatenate([[True], k[1:] != k[:-1]])
    return k[first], d[first]


def count_new_pairs(graph: TemporalGraph, t1_day: int, t2_day: int) -> int:
    """Number of pairs whose first event falls in ``(t1_day, t2_day]``."""
    if t1_day >= t2_day:
        raise ValueError("t1_day must precede t2_day")
    keys, first_day = _pair_first_days(graph, t2_day)
    return int(np.count_nonzero(first_day > t1_day))


def build_split(
    graph: TemporalGraph, spec: SplitSpec, method: str = "auto"
) -> LabeledPairs:
    """Build a labeled candidate set of exactly ``spec.target_size`` pairs.

    Positives (every pair whose first event falls in (t1, t2]) come first
    in ascending (u, v) order; negatives follow in draw order.  ``method``
    picks the negative sampler: "exact" enumerates the unconnected
    complement, "rejection" samples against the connected-pair set, "auto"
    chooses by graph size.  Both are uniform without replacement.
    """
    if method not in ("auto", "exact", "rejection"):
        raise ValueError(f"unknown sampling method {method!r}")
    n = graph.num_vertices
    keys_t2, first_day = _pair_first_days(graph, spec.t2_day)
    positive_keys = keys_t2[first_day > spec.t1_day]

    num_pos = positive_keys.size
    if spec.target_size < num_pos:
        raise ValueError(
            f"target_size={spec.target_size} is below the positive count {num_pos}"
        )
    total_pairs = n * (n - 1) // 2
    available_neg = total_pairs - keys_t2.size
    if spec.target_size > num_pos + available_neg:
        raise ValueError(
            f"target_size={spec.target_size} exceeds the "
            f"{num_pos + available_neg} candidate pairs"
        )

    needed = spec.target_size - num_pos
    rng = np.random.default_rng(spec.seed)
    if method == "exact" or (method == "auto" and total_pairs <= _EXACT_ENUMERATION_LIMIT):
        negative_keys = _sample_negatives_exact(n, keys_t2, needed, rng)
    else:
        negative_keys = _sample_negatives_rejection(n, keys_t2, needed, rng)

    keys = np.concatenate([positive_keys, negative_keys])
    pairs = np.column_stack([keys // n, keys % n])
    labels = np.concatenate(
        [np.ones(num_pos, np.int64), np.zeros(needed, np.int64)]
    )
    return LabeledPairs(pairs, labels)


def _sample_negatives_exact(n, connected_keys, needed, rng) -> np.ndarray:
    if needed == 0:
        return np.empty(0, np.int64)
    a, b = np.triu_indices(n, k=1)
    all_keys = a.astype(np.int64) * n + b
    candidates = np.setdiff1d(all_keys, connected_keys, assume_unique=True)
    return rng.choice(candidates, size=needed, replace=False)


def _sample_negatives_rejection(n, connected_keys, needed, rng) -> np.ndarray:
    connected = set(connected_keys.tolist())
    chosen: list[int] = []
    seen: set[int] = set()
    while len(chosen) < needed:
        a = rng.integers(0, n, size=_REJECTION_BATCH)
        b = rng.integers(0, n, size=_REJECTION_BATCH)
        keys = np.minimum(a, b) * np.int64(n) + np.maximum(a, b)
        for key, same in zip(keys.tolist(), (a == b).tolist()):
            if same or key in connected or key in seen:
                continue
            seen.add(key)
            chosen.append(key)
            if len(chosen) == needed:
                break
    return np.asarray(chosen, dtype=np.int64)


def augment_swap(dataset: LabeledPairs) -> LabeledPairs:
    """Double the set by re-emitting every pair in swapped order.

    Feature builders honor pair order, so the swapped copy exchanges
    u-features and v-features.
    """
    pairs = np.concatenate([dataset.pairs, dataset.pairs[:, ::-1]])
    labels = np.concatenate([dataset.labels, dataset.labels])
    return LabeledPairs(pairs, labels)


def save_split_metadata(spec: SplitSpec, path) -> None:
    """Sidecar key-value record of the split parameters."""
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in spec.to_mapping().items():
            fh.write(f"{key} = {value}\n")


def load_split_metadata(path) -> SplitSpec:
    fields: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = text.partition("=")
            fields[key.strip()] = int(value.strip())
    unknown = set(fields) - {"t1_day", "t2_day", "target_size", "seed"}
    if unknown:
        raise ValueError(f"{path}: unknown metadata keys {sorted(unknown)}")
    return SplitSpec(**fields)
