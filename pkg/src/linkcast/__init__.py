"""Temporal link prediction on evolving semantic networks.

Pipeline: ingest timestamped edge events, slice the graph at feature and
label cutoffs, compute per-pair degree/PageRank/Jaccard features across
time windows, train histogram gradient-boosted trees, and blend model
scores by a power-transformed weighted average.  Tie-aware AUC evaluates
everything.
"""

from .blend import BlendSpec, ScoreFileFormatError, blend, read_score_file, write_score_file
from .dataset import (
    LabeledPairs,
    SplitSpec,
    augment_swap,
    build_split,
    count_new_pairs,
    load_split_metadata,
    save_split_metadata,
)
from .dates import EPOCH, SINCE_2000_DAY, date_of, day_of, parse_day, years_before
from .features import (
    FEATURE_COLUMNS,
    VERTEX_FEATURE_COLUMNS,
    FeatureMatrix,
    build_feature_matrix,
    build_vertex_features,
    common_neighbors,
    jaccard,
    pagerank,
    rank_transform,
    save_vertex_features,
)
from .gbdt import (
    GBDTConfig,
    GBDTModel,
    ModelFormatError,
    RegressionTree,
    load_model,
    predict,
    save_model,
    train,
)
from .graph import (
    DecayedAdjacency,
    EdgeEvent,
    EdgeListFormatError,
    Snapshot,
    TemporalGraph,
    decayed_adjacency,
    load_decayed_adjacency,
    load_edge_list,
    save_edge_list,
    snapshot,
)
from .metrics import ScoredPairs, auc, logloss
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "BlendSpec",
    "DecayedAdjacency",
    "EPOCH",
    "EdgeEvent",
    "EdgeListFormatError",
    "FEATURE_COLUMNS",
    "FeatureMatrix",
    "GBDTConfig",
    "GBDTModel",
    "LabeledPairs",
    "ModelFormatError",
    "RegressionTree",
    "SINCE_2000_DAY",
    "ScoreFileFormatError",
    "ScoredPairs",
    "Snapshot",
    "SplitSpec",
    "SynthConfig",
    "TemporalGraph",
    "VERTEX_FEATURE_COLUMNS",
    "auc",
    "augment_swap",
    "blend",
    "build_feature_matrix",
    "build_split",
    "build_vertex_features",
    "common_neighbors",
    "count_new_pairs",
    "date_of",
    "day_of",
    "decayed_adjacency",
    "generate",
    "jaccard",
    "load_decayed_adjacency",
    "load_edge_list",
    "load_model",
    "load_split_metadata",
    "logloss",
    "pagerank",
    "parse_day",
    "predict",
    "rank_transform",
    "read_score_file",
    "save_edge_list",
    "save_model",
    "save_split_metadata",
    "save_vertex_features",
    "snapshot",
    "train",
    "write_score_file",
    "years_before",
]
