"""Vertex centralities, pairwise proximities, and the feature catalog.

The catalog has exactly 41 columns in a frozen order: per-vertex degree
ranks (current, 1/2/3-year lookbacks, since-2000 window, and lookback
differences), raw PageRank levels and differences, ordinal vertex ids, and
pairwise Jaccard levels and differences.  Degree-based columns are
rank-transformed over the whole vertex population so they stay comparable
across dataset splits; PageRank columns are left raw because they are
already normalized to sum 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.stats import rankdata

from .dates import SINCE_2000_DAY, years_before
from .graph import Snapshot, TemporalGraph, snapshot

# Column names and order are frozen: exported files and trained models match
# columns by exact name, so the historical misspellings (pangrank_*) are
# intentional and load-bearing.
FEATURE_COLUMNS: tuple[str, ...] = (
    "rank_num_neighbors_diff_2_year_u",
    "rank_num_neighbors_diff_2_year_v",
    "rank_num_neighbors_diff_1_year_v",
    "rank_num_neighbors_diff_1_year_u",
    "rank_num_neighbors_diff_3_year_u",
    "jaccard_index",
    "rank_num_neighbors_diff_3_year_v",
    "jaccard_index_2000",
    "pagerank_score_v",
    "pangrank_score_u",
    "v",
    "u",
    "jaccard_index_1_year",
    "jaccard_index_diff_3_year",
    "jaccard_index_diff_2_year",
    "pagerank_score_diff_2_year_v",
    "pagerank_score_diff_2_year_u",
    "rank_num_neighbors_v",
    "rank_num_neighbors_u",
    "rank_num_neighbors_2000_v",
    "rank_num_neighbors_1_year_v",
    "rank_num_neighbors_2_year_v",
    "rank_num_neighbors_1_year_u",
    "rank_num_neighbors_3_year_u",
    "rank_num_neighbors_2_year_u",
    "rank_num_neighbors_3_year_v",
    "rank_num_neighbors_2000_u",
    "jaccard_index_diff_1_year",
    "pagerank_score_diff_1_year_v",
    "pagerank_score_diff_1_year_u",
    "jaccard_index_3_year",
    "pagerank_score_diff_3_year_u",
    "pagerank_score_diff_3_year_v",
    "pangrank_score_2_year_u",
    "pagerank_score_1_year_v",
    "pangrank_score_1_year_u",
    "jaccard_index_2_year",
    "pagerank_score_2_year_v",
    "pagerank_score_3_year_v",
    "pangrank_scores_3_year_u",
    "jaccard_index_diff_2000",
)

_PAGERANK_LEVEL_COLS = {
    ("u", 0): "pangrank_score_u",
    ("u", 1): "pangrank_score_1_year_u",
    ("u", 2): "pangrank_score_2_year_u",
    ("u", 3): "pangrank_scores_3_year_u",
    ("v", 0): "pagerank_score_v",
    ("v", 1): "pagerank_score_1_year_v",
    ("v", 2): "pagerank_score_2_year_v",
    ("v", 3): "pagerank_score_3_year_v",
}

#: Per-vertex feature table columns (companion export for model inputs that
#: need one row per vertex rather than per pair).
VERTEX_FEATURE_COLUMNS: tuple[str, ...] = (
    "rank_num_neighbors",
    "rank_num_neighbors_1_year",
    "rank_num_neighbors_2_year",
    "rank_num_neighbors_3_year",
    "rank_num_neighbors_2000",
    "rank_num_neighbors_diff_1_year",
    "rank_num_neighbors_diff_2_year",
    "rank_num_neighbors_diff_3_year",
    "pagerank_score",
    "pagerank_score_1_year",
    "pagerank_score_2_year",
    "pagerank_score_3_year",
    "pagerank_score_diff_1_year",
    "pagerank_score_diff_2_year",
    "pagerank_score_diff_3_year",
)

MISSING_TOKEN = "NaN"


def pagerank(
    snap: Snapshot,
    damping: float = 0.85,
    tolerance: float = 1e-8,
    max_iterations: int = 100,
) -> np.ndarray:
    """PageRank by power iteration on the undirected snapshot.

    Each undirected edge acts as two directed edges; degree-0 vertices
    spread their mass uniformly.  Iteration stops when the L1 change drops
    to ``tolerance`` or after ``max_iterations``.  Scores sum to 1.
    """
    if not 0 <= damping < 1:
        raise ValueError("damping must lie in [0, 1)")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    n = snap.num_vertices
    if n == 0:
        return np.empty(0, dtype=np.float64)
    indptr, indices = snap.csr_arrays()
    deg = np.diff(indptr).astype(np.float64)
    x = np.full(n, 1.0 / n)
    if indices.size == 0:
        return x  # uniform vector is the exact fixed point
    adjacency = sparse.csr_matrix(
        (np.ones(indices.size), indices, indptr), shape=(n, n)
    )
    dangling = deg == 0.0
    inv_deg = np.zeros(n)
    np.divide(1.0, deg, out=inv_deg, where=~dangling)
    base = (1.0 - damping) / n
    for _ in range(max_iterations):
        spread = adjacency.dot(x * inv_deg)  # symmetric, so A == A.T
        dangling_mass = float(x[dangling].sum())
        x_new = damping * (spread + dangling_mass / n) + base
        delta = float(np.abs(x_new - x).sum())
        x = x_new
        if delta <= tolerance:
            break
    return x


def common_neighbors(snap: Snapshot, u: int, v: int) -> int:
    """``|neighbors(u) & neighbors(v)|``; equals the (u, v) entry of the
    squared binary adjacency."""
    nu = snap.neighbors(u)
    nv = snap.neighbors(v)
    return int(np.intersect1d(nu, nv, assume_unique=True).size)


def jaccard(snap: Snapshot, u: int, v: int) -> float:
    """Jaccard index of the two neighborhoods; NaN when both are empty."""
    nu = snap.neighbors(u)
    nv = snap.neighbors(v)
    inter = np.intersect1d(nu, nv, assume_unique=True).size
    union = nu.size + nv.size - inter
    if union == 0:
        return float("nan")
    return inter / union


def rank_transform(values) -> np.ndarray:
    """Ascending ranks starting at 1; ties get the mean of their rank span."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("rank_transform needs a nonempty 1-d array")
    if np.isnan(values).any():
        raise ValueError("rank_transform does not accept missing values")
    return rankdata(values, method="average")


@dataclass
class FeatureMatrix:
    """Per-pair rows of the 41 catalog columns; NaN marks missing values."""

    pairs: np.ndarray  # (n, 2) int64, row order preserved from the input
    values: np.ndarray  # (n, 41) float64
    column_names: tuple[str, ...] = field(default=FEATURE_COLUMNS)

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.column_names = tuple(self.column_names)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.column_names):
            raise ValueError("values shape does not match column_names")
        if self.values.shape[0] != self.pairs.shape[0]:
            raise ValueError("pairs and values row counts differ")

    @property
    def num_rows(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_names.index(name)]

    def save(self, path) -> None:
        """Write delimited text: header ``u v <column names>``, NaN token
        for missing, shortest round-trip decimal for every value."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("u v " + " ".join(self.column_names) + "\n")
            for (a, b), row in zip(self.pairs.tolist(), self.values.tolist()):
                fh.write(f"{a} {b} " + " ".join(_fmt(x) for x in row) + "\n")

    @classmethod
    def load(cls, path) -> "FeatureMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) < 3 or header[:2] != ["u", "v"]:
                raise ValueError(f"{path}: expected header 'u v <feature names>'")
            data = np.loadtxt(fh, dtype=np.float64, ndmin=2)
        names = tuple(header[2:])
        if data.size == 0:
            return cls(np.empty((0, 2), np.int64), np.empty((0, len(names))), names)
        if data.shape[1] != len(names) + 2:
            raise ValueError(f"{path}: row width does not match header")
        return cls(data[:, :2].astype(np.int64), data[:, 2:], names)


def _fmt(x: float) -> str:
    return MISSING_TOKEN if np.isnan(x) else repr(x)


class _SnapshotStats:
    """Degree ranks, rank differences, and PageRank at t1 and lookbacks."""

    def __init__(self, graph, t1_day, damping, tolerance, max_iterations):
        if years_before(t1_day, 3) < 0:
            raise ValueError(f"t1_day={t1_day} is too early for the 3-year lookback")
        if t1_day < SINCE_2000_DAY:
            raise ValueError(f"t1_day={t1_day} precedes the since-2000 window start")
        self.snaps = {0: snapshot(graph, 0, t1_day)}
        for k in (1, 2, 3):
            self.snaps[k] = snapshot(graph, 0, years_before(t1_day, k))
        self.snap_2000 = snapshot(graph, SINCE_2000_DAY, t1_day)

        deg = {k: s.degree.astype(np.float64) for k, s in self.snaps.items()}
        self.rank_deg = {k: rank_transform(d) for k, d in deg.items()}
        self.rank_deg_2000 = rank_transform(self.snap_2000.degree.astype(np.float64))
        self.rank_deg_diff = {
            k: rank_transform(deg[0] - deg[k]) for k in (1, 2, 3)
        }
        self.pr = {
            k: pagerank(s, damping, tolerance, max_iterations)
            for k, s in self.snaps.items()
        }

    def vertex_table(self) -> np.ndarray:
        cols = [
            self.rank_deg[0],
            self.rank_deg[1],
            self.rank_deg[2],
            self.rank_deg[3],
            self.rank_deg_2000,
            self.rank_deg_diff[1],
            self.rank_deg_diff[2],
            self.rank_deg_diff[3],
            self.pr[0],
            self.pr[1],
            self.pr[2],
            self.pr[3],
            self.pr[0] - self.pr[1],
            self.pr[0] - self.pr[2],
            self.pr[0] - self.pr[3],
        ]
        return np.column_stack(cols)


def _pair_jaccard(snap: Snapshot, pairs: np.ndarray) -> np.ndarray:
    sets = snap.neighbor_sets()
    out = np.empty(pairs.shape[0], dtype=np.float64)
    for i, (a, b) in enumerate(pairs.tolist()):
        sa = sets[a]
        sb = sets[b]
        inter = len(sa & sb)
        union = len(sa) + len(sb) - inter
        out[i] = inter / union if union else np.nan
    return out


def build_feature_matrix(
    graph: TemporalGraph,
    pairs,
    t1_day: int,
    *,
    damping: float = 0.85,
    tolerance: float = 1e-8,
    max_iterations: int = 100,
) -> FeatureMatrix:
    """Compute all 41 catalog columns for the given pairs as of ``t1_day``.

    Pair order matters: the first element fills the u-columns and the
    second the v-columns, so swapped duplicates get mirrored features.
    Rank transforms run over the full vertex population, then rows are
    picked out per pair.  Differences touching a missing Jaccard stay
    missing.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= graph.num_vertices):
        raise IndexError("pair vertex index out of range")
    stats = _SnapshotStats(graph, t1_day, damping, tolerance, max_iterations)

    jac = {k: _pair_jaccard(s, pairs) for k, s in stats.snaps.items()}
    jac_2000 = _pair_jaccard(stats.snap_2000, pairs)

    cols: dict[str, np.ndarray] = {
        "jaccard_index": jac[0],
        "jaccard_index_1_year": jac[1],
        "jaccard_index_2_year": jac[2],
        "jaccard_index_3_year": jac[3],
        "jaccard_index_2000": jac_2000,
        "jaccard_index_diff_1_year": jac[0] - jac[1],
        "jaccard_index_diff_2_year": jac[0] - jac[2],
        "jaccard_index_diff_3_year": jac[0] - jac[3],
        "jaccard_index_diff_2000": jac[0] - jac_2000,
    }
    for side, idx in (("u", pairs[:, 0]), ("v", pairs[:, 1])):
        cols[f"rank_num_neighbors_{side}"] = stats.rank_deg[0][idx]
        cols[f"rank_num_neighbors_2000_{side}"] = stats.rank_deg_2000[idx]
        cols[_PAGERANK_LEVEL_COLS[side, 0]] = stats.pr[0][idx]
        for k in (1, 2, 3):
            cols[f"rank_num_neighbors_{k}_year_{side}"] = stats.rank_deg[k][idx]
            cols[f"rank_num_neighbors_diff_{k}_year_{side}"] = stats.rank_deg_diff[k][idx]
            cols[_PAGERANK_LEVEL_COLS[side, k]] = stats.pr[k][idx]
            cols[f"pagerank_score_diff_{k}_year_{side}"] = (
                stats.pr[0][idx] - stats.pr[k][idx]
            )
        cols[side] = idx.astype(np.float64)

    values = (
        np.column_stack([cols[name] for name in FEATURE_COLUMNS])
        if pairs.size
        else np.empty((0, len(FEATURE_COLUMNS)))
    )
    return FeatureMatrix(pairs, values)


def build_vertex_features(
    graph: TemporalGraph,
    t1_day: int,
    *,
    damping: float = 0.85,
    tolerance: float = 1e-8,
    max_iterations: int = 100,
) -> np.ndarray:
    """Per-vertex table of the 15 :data:`VERTEX_FEATURE_COLUMNS`."""
    stats = _SnapshotStats(graph, t1_day, damping, tolerance, max_iterations)
    return stats.vertex_table()


def save_vertex_features(values: np.ndarray, path) -> None:
    """Write the per-vertex table: header ``vertex <names>``, one row per
    vertex in index order."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != len(VERTEX_FEATURE_COLUMNS):
        raise ValueError("vertex table shape does not match VERTEX_FEATURE_COLUMNS")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("vertex " + " ".join(VERTEX_FEATURE_COLUMNS) + "\n")
        for i, row in enumerate(values.tolist()):
            fh.write(f"{i} " + " ".join(_fmt(x) for x in row) + "\n")
