"""Synthetic temporal graphs via preferential attachment.

Endpoints are drawn with probability proportional to (degree + 1) raised
to an attachment exponent, so degree and common-neighbor statistics carry
signal for link prediction.  Weights refresh once per day; within a day
all draws see the same degree state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import TemporalGraph


@dataclass(frozen=True)
class SynthConfig:
    num_vertices: int = 2000
    num_days: int = 8766
    edges_per_day: int = 12
    attachment_exponent: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.num_vertices < 2:
            raise ValueError("num_vertices must be >= 2")
        if self.num_days < 1:
            raise ValueError("num_days must be >= 1")
        if self.edges_per_day < 1:
            raise ValueError("edges_per_day must be >= 1")
        if self.attachment_exponent < 0:
            raise ValueError("attachment_exponent must be nonnegative")


def generate(config: SynthConfig | None = None) -> TemporalGraph:
    """Generate events on days 0 .. num_days-1, deterministically per seed."""
    config = config or SynthConfig()
    config.validate()
    rng = np.random.default_rng(config.seed)
    n = config.num_vertices
    k = config.edges_per_day
    degree = np.zeros(n, dtype=np.int64)
    us = np.empty(config.num_days * k, dtype=np.int64)
    vs = np.empty_like(us)
    days = np.repeat(np.arange(config.num_days, dtype=np.int64), k)

    out = 0
    for _ in range(config.num_days):
        weights = (degree + 1).astype(np.float64) ** config.attachment_exponent
        cumulative = np.cumsum(weights)
        total = cumulative[-1]
        draws = np.searchsorted(cumulative, rng.random(2 * k) * total, side="right")
        u, v = draws[:k].copy(), draws[k:].copy()
        loops = np.flatnonzero(u == v)
        while loops.size:
            v[loops] = np.searchsorted(
                cumulative, rng.random(loops.size) * total, side="right"
            )
            loops = loops[u[loops] == v[loops]]
        us[out : out + k] = u
        vs[out : out + k] = v
        out += k
        np.add.at(degree, u, 1)
        np.add.at(degree, v, 1)

    return TemporalGraph(num_vertices=n, u=us, v=vs, day=days)
