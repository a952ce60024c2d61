"""Pair-scoring network: weighted-mean graph convolution blocks feeding a
densely connected multilayer perceptron.

Vertex inputs are the engineered per-vertex features concatenated with a
trainable embedding, projected to the hidden width.  Each block applies
a mean-aggregation convolution over the (weighted) adjacency, batch
normalization, rectification, and a skip connection adding the block
input, so a block whose convolution is zeroed passes its input through
unchanged.  A pair (u, v) is scored by the MLP over
``[h(u), h(v), pair_features]``; "densely connected" means every layer
consumes the concatenation of the MLP input and all previous layer
outputs.  Two reduced variants support ablations: ``mlp`` scores pair
features alone and ``mlp_embedding`` adds the embeddings but no graph
blocks.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

VARIANTS = ("gnn", "mlp", "mlp_embedding")


def build_adjacency(
    pairs: np.ndarray,
    weights: np.ndarray,
    num_vertices: int,
    mode: str = "decayed",
) -> torch.Tensor:
    """Row-normalized sparse adjacency from a ``(pairs, weights)`` export.

    Each undirected pair contributes both directions; ``binary`` mode
    replaces the stored weights with 1.0 and is otherwise the identical
    code path, so it coincides with a zero-rate decayed export.  Rows of
    isolated vertices stay empty and aggregate to the zero vector.
    """
    if mode not in ("decayed", "binary"):
        raise ValueError(f"unknown adjacency mode {mode!r}")
    pairs = np.asarray(pairs, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("adjacency pairs must be (m, 2)")
    if pairs.size and pairs.max() >= num_vertices:
        raise ValueError("adjacency vertex index out of range")
    weights = np.ones(pairs.shape[0]) if mode == "binary" else np.asarray(weights, dtype=np.float64)
    if weights.shape != (pairs.shape[0],):
        raise ValueError("adjacency needs one weight per pair")
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    vals = np.concatenate([weights, weights])
    degree = np.zeros(num_vertices)
    np.add.at(degree, rows, vals)
    normalized = vals / degree[rows]  # row-stochastic where degree > 0
    adj = torch.sparse_coo_tensor(
        torch.from_numpy(np.stack([rows, cols])),
        torch.from_numpy(normalized).to(torch.float32),
        size=(num_vertices, num_vertices),
        check_invariants=True,
    )
    return adj.coalesce()


def aggregate_neighbors(adj: torch.Tensor, h: torch.Tensor) -> torch.Tensor:
    """Weighted mean of neighbor vectors; identical neighbor vectors under
    any positive weights aggregate back to that vector."""
    return torch.sparse.mm(adj, h)


class WeightedMeanConv(nn.Module):
    """Linear map of the vertex plus a linear map of its neighbor mean."""

    def __init__(self, dim: int):
        super().__init__()
        self.self_map = nn.Linear(dim, dim)
        self.neighbor_map = nn.Linear(dim, dim)

    def forward(self, h: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        return self.self_map(h) + self.neighbor_map(aggregate_neighbors(adj, h))

    def zero_(self) -> None:
        """Zero all parameters (identity-path testing hook)."""
        for p in self.parameters():
            nn.init.zeros_(p)


class ConvBlock(nn.Module):
    """Convolution, batch normalization, rectification, then skip add."""

    def __init__(self, dim: int):
        super().__init__()
        self.conv = WeightedMeanConv(dim)
        self.norm = nn.BatchNorm1d(dim)

    def forward(self, h: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        return h + torch.relu(self.norm(self.conv(h, adj)))


class DenseMLP(nn.Module):
    """Densely connected MLP: layer i maps the concatenation of the input
    and all previous outputs to the hidden width; a final head maps the
    full concatenation to one logit."""

    def __init__(self, in_dim: int, hidden_dim: int, num_layers: int, dropout: float):
        super().__init__()
        self.layers = nn.ModuleList(
            nn.Linear(in_dim + i * hidden_dim, hidden_dim) for i in range(num_layers)
        )
        self.head = nn.Linear(in_dim + num_layers * hidden_dim, 1)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        outputs = [x]
        for layer in self.layers:
            stacked = torch.cat(outputs, dim=1)
            outputs.append(self.dropout(torch.relu(layer(stacked))))
        return self.head(torch.cat(outputs, dim=1)).squeeze(1)


class PairScorer(nn.Module):
    """Full model over one graph: encode vertices, score vertex pairs."""

    def __init__(self, num_vertices: int, vertex_dim: int, pair_dim: int, config):
        super().__init__()
        if config.variant not in VARIANTS:
            raise ValueError(f"unknown variant {config.variant!r}")
        self.variant = config.variant
        self.num_vertices = num_vertices
        self.vertex_dim = vertex_dim
        self.pair_dim = pair_dim
        if self.variant != "mlp":
            self.embedding = nn.Embedding(num_vertices, config.embedding_dim)
        if self.variant == "gnn":
            self.input_map = nn.Linear(vertex_dim + config.embedding_dim, config.hidden_dim)
            self.blocks = nn.ModuleList(
                ConvBlock(config.hidden_dim) for _ in range(config.num_blocks)
            )
            mlp_in = 2 * config.hidden_dim + pair_dim
        elif self.variant == "mlp_embedding":
            mlp_in = 2 * config.embedding_dim + pair_dim
        else:
            mlp_in = pair_dim
        self.mlp = DenseMLP(mlp_in, config.hidden_dim, config.mlp_layers, config.dropout)

    def encode(self, vertex_features: torch.Tensor, adj: torch.Tensor) -> torch.Tensor:
        """Per-vertex hidden states; only the ``gnn`` variant defines them."""
        if self.variant != "gnn":
            raise ValueError(f"variant {self.variant!r} has no graph encoder")
        if vertex_features.shape != (self.num_vertices, self.vertex_dim):
            raise ValueError(
                f"expected vertex features {(self.num_vertices, self.vertex_dim)},"
                f" got {tuple(vertex_features.shape)}"
            )
        h = self.input_map(torch.cat([vertex_features, self.embedding.weight], dim=1))
        for block in self.blocks:
            h = block(h, adj)
        return h

    def forward(
        self,
        pairs: torch.Tensor,
        pair_features: torch.Tensor,
        vertex_features: torch.Tensor | None = None,
        adj: torch.Tensor | None = None,
    ) -> torch.Tensor:
        """Logits for each (u, v) row of ``pairs``."""
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError("pairs must be (n, 2)")
        if pair_features.shape != (pairs.shape[0], self.pair_dim):
            raise ValueError(
                f"expected pair features {(pairs.shape[0], self.pair_dim)},"
                f" got {tuple(pair_features.shape)}"
            )
        if self.variant == "gnn":
            if vertex_features is None or adj is None:
                raise ValueError("gnn variant needs vertex features and adjacency")
            h = self.encode(vertex_features, adj)
            x = torch.cat([h[pairs[:, 0]], h[pairs[:, 1]], pair_features], dim=1)
        elif self.variant == "mlp_embedding":
            x = torch.cat(
                [self.embedding(pairs[:, 0]), self.embedding(pairs[:, 1]), pair_features],
                dim=1,
            )
        else:
            x = pair_features
        return self.mlp(x)

    def score(self, *args, **kwargs) -> torch.Tensor:
        """Sigmoid pair scores, strictly inside (0, 1) for finite logits."""
        return torch.sigmoid(self.forward(*args, **kwargs))
