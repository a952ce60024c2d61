"""Temporal graph storage, time-window snapshots, and decayed adjacency.

A :class:`TemporalGraph` is an immutable log of timestamped undirected
edge events over a fixed vertex set.  All derived structures (snapshots,
decayed adjacencies) are built by filtering that log; nothing is ever
mutated after construction, so instances are safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EdgeListFormatError(ValueError):
    """Raised when an edge-list file fails to parse or validate."""


@dataclass(frozen=True)
class EdgeEvent:
    """One undirected edge event: vertices ``u != v`` at day ``day >= 0``."""

    u: int
    v: int
    day: int


class TemporalGraph:
    """Immutable log of timestamped undirected edge events.

    Events are kept sorted ascending by day (stable: ties preserve input
    order).  Repeated events for the same pair are retained; deduplication
    happens in :class:`Snapshot`, while :func:`decayed_adjacency` needs the
    full history to find the most recent event per pair.
    """

    __slots__ = ("num_vertices", "_u", "_v", "_day")

    def __init__(self, num_vertices: int, u, v, day):
        u = np.ascontiguousarray(u, dtype=np.int64)
        v = np.ascontiguousarray(v, dtype=np.int64)
        day = np.ascontiguousarray(day, dtype=np.int64)
        if not (u.shape == v.shape == day.shape) or u.ndim != 1:
            raise ValueError("u, v, day must be 1-d arrays of equal length")
        if num_vertices < 0:
            raise ValueError("num_vertices must be nonnegative")
        if u.size:
            if (u == v).any():
                raise ValueError("self-loop events are not allowed")
            if day.min() < 0:
                raise ValueError("event days must be nonnegative")
            hi = max(u.max(), v.max())
            if hi >= num_vertices:
                raise ValueError(
                    f"vertex index {hi} out of range for {num_vertices} vertices"
                )
        order = np.argsort(day, kind="stable")
        self.num_vertices = int(num_vertices)
        self._u = u[order]
        self._v = v[order]
        self._day = day[order]

    @classmethod
    def from_events(
        cls, events, num_vertices: int | None = None
    ) -> "TemporalGraph":
        """Build from an iterable of ``(u, v, day)`` triples or EdgeEvents."""
        rows = [
            (e.u, e.v, e.day) if isinstance(e, EdgeEvent) else tuple(e)
            for e in events
        ]
        if rows:
            arr = np.asarray(rows, dtype=np.int64)
            u, v, day = arr[:, 0], arr[:, 1], arr[:, 2]
        else:
            u = v = day = np.empty(0, dtype=np.int64)
        if num_vertices is None:
            num_vertices = int(max(u.max(), v.max())) + 1 if rows else 0
        return cls(num_vertices, u, v, day)

    @property
    def num_events(self) -> int:
        return self._u.size

    @property
    def event_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Read-only ``(u, v, day)`` arrays sorted ascending by day."""
        return self._u, self._v, self._day

    def events(self):
        """Iterate events as :class:`EdgeEvent` in day order."""
        for u, v, d in zip(self._u, self._v, self._day):
            yield EdgeEvent(int(u), int(v), int(d))

    def last_day(self) -> int:
        return int(self._day[-1]) if self._day.size else 0

    def __repr__(self) -> str:
        return (
            f"TemporalGraph(num_vertices={self.num_vertices}, "
            f"num_events={self.num_events})"
        )


class Snapshot:
    """Adjacency of the graph restricted to events in a day window.

    Contains exactly the pairs with at least one event whose day ``d``
    satisfies ``from_day <= d <= as_of_day``, symmetric and deduplicated.
    Neighbor lists are sorted ascending.
    """

    __slots__ = ("num_vertices", "from_day", "as_of_day", "_indptr", "_indices", "_sets")

    def __init__(self, num_vertices: int, from_day: int, as_of_day: int, pairs: np.ndarray):
        self.num_vertices = int(num_vertices)
        self.from_day = int(from_day)
        self.as_of_day = int(as_of_day)
        n = self.num_vertices
        if pairs.size:
            src = np.concatenate([pairs[:, 0], pairs[:, 1]])
            dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
            order = np.lexsort((dst, src))
            src, dst = src[order], dst[order]
            self._indptr = np.concatenate(
                [[0], np.cumsum(np.bincount(src, minlength=n))]
            ).astype(np.int64)
            self._indices = dst
        else:
            self._indptr = np.zeros(n + 1, dtype=np.int64)
            self._indices = np.empty(0, dtype=np.int64)
        self._sets = None

    def neighbors(self, x: int) -> np.ndarray:
        """Sorted neighbor indices of vertex ``x``."""
        if not 0 <= x < self.num_vertices:
            raise IndexError(f"vertex {x} out of range")
        return self._indices[self._indptr[x] : self._indptr[x + 1]]

    @property
    def degree(self) -> np.ndarray:
        """Per-vertex neighbor count."""
        return np.diff(self._indptr)

    @property
    def num_edges(self) -> int:
        return self._indices.size // 2

    def csr_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` of the symmetric adjacency in CSR layout."""
        return self._indptr, self._indices

    def neighbor_sets(self) -> list[set]:
        """Per-vertex neighbor sets, built lazily and cached."""
        if self._sets is None:
            indptr, indices = self._indptr, self._indices
            self._sets = [
                set(indices[indptr[x] : indptr[x + 1]].tolist())
                for x in range(self.num_vertices)
            ]
        return self._sets

    def __repr__(self) -> str:
        return (
            f"Snapshot(num_vertices={self.num_vertices}, window=[{self.from_day}, "
            f"{self.as_of_day}], num_edges={self.num_edges})"
        )


class DecayedAdjacency:
    """Sparse symmetric edge weights ``exp(-decay_rate * age_days)``.

    ``age_days`` is measured from the most recent event of the pair at or
    before ``as_of_day``; pairs without such an event are absent (implicit
    weight 0).  All stored weights lie in (0, 1].
    """

    __slots__ = ("num_vertices", "as_of_day", "decay_rate", "pairs", "weights", "_keys")

    def __init__(self, num_vertices, as_of_day, decay_rate, pairs, weights):
        self.num_vertices = int(num_vertices)
        self.as_of_day = int(as_of_day)
        self.decay_rate = float(decay_rate)
        self.pairs = pairs  # (m, 2) canonical u < v, sorted by key
        self.weights = weights
        self._keys = pairs[:, 0] * np.int64(self.num_vertices) + pairs[:, 1]

    @property
    def num_edges(self) -> int:
        return self.weights.size

    def weight(self, u: int, v: int) -> float:
        """Weight of pair ``(u, v)`` in either order; 0.0 when absent."""
        if u == v:
            return 0.0
        a, b = (u, v) if u < v else (v, u)
        key = a * self.num_vertices + b
        i = np.searchsorted(self._keys, key)
        if i < self._keys.size and self._keys[i] == key:
            return float(self.weights[i])
        return 0.0

    def save(self, path) -> None:
        """Write the delimited ``u v weight`` export with a header row."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("u v weight\n")
            for (a, b), w in zip(self.pairs.tolist(), self.weights.tolist()):
                fh.write(f"{a} {b} {w!r}\n")

    def __repr__(self) -> str:
        return (
            f"DecayedAdjacency(num_vertices={self.num_vertices}, "
            f"as_of_day={self.as_of_day}, rate={self.decay_rate}, "
            f"num_edges={self.num_edges})"
        )


def snapshot(graph: TemporalGraph, from_day: int, as_of_day: int) -> Snapshot:
    """Adjacency view over events with ``from_day <= day <= as_of_day``."""
    if not 0 <= from_day <= as_of_day:
        raise ValueError(
            f"invalid window: need 0 <= from_day <= as_of_day, got "
            f"[{from_day}, {as_of_day}]"
        )
    u, v, day = graph.event_arrays
    lo = np.searchsorted(day, from_day, side="left")
    hi = np.searchsorted(day, as_of_day, side="right")
    uu, vv = u[lo:hi], v[lo:hi]
    n = graph.num_vertices
    a = np.minimum(uu, vv)
    b = np.maximum(uu, vv)
    keys = np.unique(a * np.int64(n) + b)
    pairs = np.column_stack([keys // n, keys % n]) if keys.size else np.empty((0, 2), np.int64)
    return Snapshot(n, from_day, as_of_day, pairs)


def decayed_adjacency(
    graph: TemporalGraph, as_of_day: int, decay_rate: float
) -> DecayedAdjacency:
    """Exponentially decayed weighted adjacency at ``as_of_day``.

    Each pair with at least one event at day <= ``as_of_day`` gets weight
    ``exp(-decay_rate * (as_of_day - latest_such_day))``; rate 0 yields the
    binary adjacency (all weights exactly 1).
    """
    if decay_rate < 0:
        raise ValueError("decay_rate must be nonnegative")
    u, v, day = graph.event_arrays
    hi = np.searchsorted(day, as_of_day, side="right")
    uu, vv, dd = u[:hi], v[:hi], day[:hi]
    n = graph.num_vertices
    a = np.minimum(uu, vv)
    b = np.maximum(uu, vv)
    keys = a * np.int64(n) + b
    order = np.argsort(keys, kind="stable")  # stable keeps day order per key
    k, d = keys[order], dd[order]
    if k.size:
        last = np.flatnonzero(np.concatenate([k[1:] != k[:-1], [True]]))
        uniq, latest = k[last], d[last]
    else:
        uniq = latest = np.empty(0, dtype=np.int64)
    pairs = np.column_stack([uniq // n, uniq % n]) if uniq.size else np.empty((0, 2), np.int64)
    ages = as_of_day - latest
    weights = np.exp(-decay_rate * ages.astype(np.float64))
    return DecayedAdjacency(n, as_of_day, decay_rate, pairs, weights)


def load_edge_list(path, num_vertices: int | None = None) -> TemporalGraph:
    """Load a whitespace-separated ``u v day`` edge-list file.

    Lines beginning with ``#`` and blank lines are ignored.  When
    ``num_vertices`` is not given it is inferred as 1 + max vertex index.
    Parse and validation failures report the offending line number.
    """
    us: list[int] = []
    vs: list[int] = []
    days: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 3:
                raise EdgeListFormatError(
                    f"{path}:{lineno}: expected 3 fields 'u v day', got {len(parts)}"
                )
            try:
                u, v, d = (int(p) for p in parts)
            except ValueError:
                raise EdgeListFormatError(
                    f"{path}:{lineno}: fields must be integers: {text!r}"
                ) from None
            if u == v:
                raise EdgeListFormatError(f"{path}:{lineno}: self-loop ({u}, {v})")
            if d < 0:
                raise EdgeListFormatError(f"{path}:{lineno}: negative day {d}")
            if u < 0 or v < 0:
                raise EdgeListFormatError(f"{path}:{lineno}: negative vertex index")
            us.append(u)
            vs.append(v)
            days.append(d)
    inferred = (max(max(us), max(vs)) + 1) if us else 0
    if num_vertices is None:
        num_vertices = inferred
    elif num_vertices < inferred:
        raise EdgeListFormatError(
            f"{path}: declared num_vertices={num_vertices} < 1 + max index {inferred - 1}"
        )
    return TemporalGraph(
        num_vertices,
        np.asarray(us, dtype=np.int64),
        np.asarray(vs, dtype=np.int64),
        np.asarray(days, dtype=np.int64),
    )


def save_edge_list(graph: TemporalGraph, path) -> None:
    """Write a ``u v day`` edge-list file (one event per line, day order)."""
    u, v, day = graph.event_arrays
    with open(path, "w", encoding="utf-8") as fh:
        for a, b, d in zip(u.tolist(), v.tolist(), day.tolist()):
            fh.write(f"{a} {b} {d}\n")


def load_decayed_adjacency(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``u v weight`` export; returns ``(pairs, weights)`` arrays."""
    pairs: list[tuple[int, int]] = []
    weights: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if header != ["u", "v", "weight"]:
            raise EdgeListFormatError(f"{path}: expected header 'u v weight'")
        for lineno, line in enumerate(fh, start=2):
            text = line.strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 3:
                raise EdgeListFormatError(f"{path}:{lineno}: expected 'u v weight'")
            pairs.append((int(parts[0]), int(parts[1])))
            weights.append(float(parts[2]))
    return (
        np.asarray(pairs, dtype=np.int64).reshape(-1, 2),
        np.asarray(weights, dtype=np.float64),
    )
