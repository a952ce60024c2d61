"""Training loop, artifact loading, and the ablation suite.

``train_gnn`` consumes the exported artifacts (pair features, labeled
splits, per-vertex table, adjacency), standardizes all feature inputs
with statistics fitted on the training matrix, optimizes the scorer
with adaptive-moment estimation under binary cross entropy, and emits
validation scores in the blend score-file contract.

Runs are deterministic for a fixed seed, platform, and thread count;
floating-point reduction order can differ across platforms or BLAS
builds, so byte-identical outputs are only guaranteed when those are
held fixed (see README).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import torch
from torch import nn

from .io import (
    read_adjacency,
    read_feature_matrix,
    read_split,
    read_vertex_table,
    write_score_file,
)
from .model import VARIANTS, PairScorer, build_adjacency
from .standardize import fit_transform


@dataclass(frozen=True)
class GNNConfig:
    """Hyperparameters; defaults follow the reference configuration."""

    num_blocks: int = 3
    embedding_dim: int = 64
    hidden_dim: int = 64
    mlp_layers: int = 5
    dropout: float = 0.2
    batch_size: int = 512
    learning_rate: float = 1e-4
    weight_decay: float = 1e-3
    epochs: int = 30
    adjacency_mode: str = "decayed"
    seed: int = 0
    variant: str = "gnn"  # ablation axis: gnn | mlp | mlp_embedding

    def __post_init__(self):
        for name in ("num_blocks", "embedding_dim", "hidden_dim", "mlp_layers",
                     "batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be nonnegative")
        if self.adjacency_mode not in ("decayed", "binary"):
            raise ValueError(f"unknown adjacency_mode {self.adjacency_mode!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")


@dataclass(frozen=True)
class TrainingData:
    """All artifacts loaded into arrays; pair feature values keep NaN."""

    train_pairs: np.ndarray
    train_values: np.ndarray
    train_labels: np.ndarray
    valid_pairs: np.ndarray
    valid_values: np.ndarray
    valid_labels: np.ndarray
    vertex_values: np.ndarray
    adjacency_pairs: np.ndarray
    adjacency_weights: np.ndarray

    @property
    def num_vertices(self) -> int:
        return self.vertex_values.shape[0]


def load_artifacts(
    train_features,
    train_split,
    valid_features,
    valid_split,
    vertex_features,
    adjacency,
) -> TrainingData:
    """Read and cross-validate the six artifact files.

    Feature rows must line up one-to-one with their split's pairs, and
    every vertex index must fall inside the vertex table.
    """
    train = read_feature_matrix(train_features)
    valid = read_feature_matrix(valid_features)
    if train.column_names != valid.column_names:
        raise ValueError("train and valid feature columns differ")
    train_pairs, train_labels = read_split(train_split)
    valid_pairs, valid_labels = read_split(valid_split)
    for name, table, pairs in (
        ("train", train, train_pairs),
        ("valid", valid, valid_pairs),
    ):
        if not np.array_equal(table.pairs, pairs):
            raise ValueError(f"{name} feature rows do not match the split pairs")
    vertex_values, _ = read_vertex_table(vertex_features)
    adjacency_pairs, adjacency_weights = read_adjacency(adjacency)
    num_vertices = vertex_values.shape[0]
    for name, idx in (
        ("train split", train_pairs),
        ("valid split", valid_pairs),
        ("adjacency", adjacency_pairs),
    ):
        if idx.size and idx.max() >= num_vertices:
            raise ValueError(f"{name} vertex index exceeds the vertex table")
    return TrainingData(
        train_pairs, train.values, train_labels,
        valid_pairs, valid.values, valid_labels,
        vertex_values, adjacency_pairs, adjacency_weights,
    )


def rank_auc(labels: np.ndarray, scores: np.ndarray) -> float:
    """Tie-aware AUC via average ranks (ties count one half)."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    positives = labels == 1
    n_pos = int(positives.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    order = np.argsort(scores, kind="mergesort")
    ordered = scores[order]
    new_group = np.concatenate([[True], ordered[1:] != ordered[:-1]])
    group = np.cumsum(new_group) - 1
    counts = np.bincount(group)
    ends = np.cumsum(counts)
    average = ends - (counts - 1) / 2.0  # mean of ranks start..end, 1-based
    ranks = np.empty(labels.size)
    ranks[order] = average[group]
    return float((ranks[positives].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


@dataclass(frozen=True)
class TrainResult:
    """Per-epoch mean training loss plus validation scores and their AUC."""

    epoch_losses: tuple[float, ...]
    valid_auc: float
    valid_scores: np.ndarray


def train_gnn(
    data: TrainingData, config: GNNConfig, scores_out=None
) -> tuple[PairScorer, TrainResult]:
    """Train one configuration and score the validation pairs.

    Writes the validation scores to ``scores_out`` (blend score-file
    format, validation row order preserved) when a path is given.
    """
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    train_values, pair_scaler = fit_transform(data.train_values)
    valid_values = pair_scaler.transform(data.valid_values)
    vertex_values, _ = fit_transform(data.vertex_values)

    needs_graph = config.variant == "gnn"
    adj = build_adjacency(
        data.adjacency_pairs, data.adjacency_weights,
        data.num_vertices, config.adjacency_mode,
    ) if needs_graph else None
    vertex_input = torch.from_numpy(vertex_values).to(torch.float32) if needs_graph else None

    model = PairScorer(data.num_vertices, vertex_values.shape[1], train_values.shape[1], config)
    x_train = torch.from_numpy(train_values).to(torch.float32)
    x_valid = torch.from_numpy(valid_values).to(torch.float32)
    p_train = torch.from_numpy(data.train_pairs)
    p_valid = torch.from_numpy(data.valid_pairs)
    y_train = torch.from_numpy(data.train_labels).to(torch.float32)

    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    loss_fn = nn.BCEWithLogitsLoss()
    n = y_train.numel()
    losses = []
    model.train()
    for _ in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            rows = torch.from_numpy(order[start : start + config.batch_size])
            optimizer.zero_grad()
            logits = model(p_train[rows], x_train[rows], vertex_input, adj)
            loss = loss_fn(logits, y_train[rows])
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * rows.numel()
        losses.append(total / n)

    model.eval()
    with torch.no_grad():
        scores = model.score(p_valid, x_valid, vertex_input, adj).double().numpy()
    result = TrainResult(tuple(losses), rank_auc(data.valid_labels, scores), scores)
    if scores_out is not None:
        write_score_file(scores_out, data.valid_pairs, scores)
    return model, result


@dataclass(frozen=True)
class AblationRow:
    name: str
    auc: float = float("nan")  # NaN when the run failed
    error: str = ""


def default_suite(base: GNNConfig = GNNConfig()) -> tuple[tuple[str, GNNConfig], ...]:
    """Reference ablation axes: feature-only MLP, embedding MLP, binary
    adjacency, and decayed adjacency with 1 to 5 blocks."""
    rows = [
        ("mlp", replace(base, variant="mlp")),
        ("mlp_embedding", replace(base, variant="mlp_embedding")),
        ("gnn_binary_3_blocks", replace(base, variant="gnn", adjacency_mode="binary", num_blocks=3)),
    ]
    rows += [
        (f"gnn_decayed_{k}_block{'s' if k > 1 else ''}",
         replace(base, variant="gnn", adjacency_mode="decayed", num_blocks=k))
        for k in range(1, 6)
    ]
    return tuple(rows)


def run_ablation(
    data: TrainingData,
    suite: list[tuple[str, GNNConfig]],
    scores_dir=None,
) -> list[AblationRow]:
    """Train every suite entry; a failing run is recorded as an error row
    and the suite continues."""
    if not suite:
        raise ValueError("ablation suite must be nonempty")
    rows = []
    for name, config in suite:
        out = None if scores_dir is None else f"{scores_dir}/{name}.tsv"
        try:
            _, result = train_gnn(data, config, scores_out=out)
            rows.append(AblationRow(name, result.valid_auc))
        except Exception as exc:  # record and continue per contract
            rows.append(AblationRow(name, error=f"{type(exc).__name__}: {exc}"))
    return rows


def format_ablation_table(rows: list[AblationRow]) -> str:
    width = max(len(row.name) for row in rows)
    lines = [
        f"{row.name:<{width}}  "
        + (f"AUC {row.auc:.8f}" if not row.error else f"FAILED {row.error}")
        for row in rows
    ]
    return "\n".join(lines)


def write_ablation_report(path, rows: list[AblationRow]) -> None:
    """Tab-separated ``model auc error`` table; auc blank on failure."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("model\tauc\terror\n")
        for row in rows:
            auc = "" if row.error else f"{row.auc:.8f}"
            error = " ".join(row.error.split())  # keep the row one line
            fh.write(f"{row.name}\t{auc}\t{error}\n")
