"""Time-aware graph neural network trainer for link prediction.

Consumes the feature-engineering pipeline's exports (pair feature
matrices, labeled splits, a per-vertex feature table, and a decayed
adjacency), trains a pair scorer built from weighted-mean graph
convolution blocks and a densely connected MLP, and emits validation
scores in the blender's score-file format.  An ablation suite covers
the reduced variants (feature-only MLP, embedding MLP, binary
adjacency, varying block depth).
"""

from .io import (
    ArtifactFormatError,
    PairTable,
    read_adjacency,
    read_feature_matrix,
    read_split,
    read_vertex_table,
    write_score_file,
)
from .model import (
    VARIANTS,
    ConvBlock,
    DenseMLP,
    PairScorer,
    WeightedMeanConv,
    aggregate_neighbors,
    build_adjacency,
)
from .standardize import Standardizer, fit_transform
from .training import (
    AblationRow,
    GNNConfig,
    TrainingData,
    TrainResult,
    default_suite,
    format_ablation_table,
    load_artifacts,
    rank_auc,
    run_ablation,
    train_gnn,
    write_ablation_report,
)

__version__ = "0.1.0"

__all__ = [
    "ArtifactFormatError",
    "PairTable",
    "read_adjacency",
    "read_feature_matrix",
    "read_split",
    "read_vertex_table",
    "write_score_file",
    "VARIANTS",
    "ConvBlock",
    "DenseMLP",
    "PairScorer",
    "WeightedMeanConv",
    "aggregate_neighbors",
    "build_adjacency",
    "Standardizer",
    "fit_transform",
    "AblationRow",
    "GNNConfig",
    "TrainingData",
    "TrainResult",
    "default_suite",
    "format_ablation_table",
    "load_artifacts",
    "rank_auc",
    "run_ablation",
    "train_gnn",
    "write_ablation_report",
]
