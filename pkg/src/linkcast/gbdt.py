"""Histogram-based gradient-boosted decision trees with logistic loss.

Trees are grown leaf-wise (best split gain first) on quantile-binned
features, with per-tree row/column subsampling, native missing-value
routing, validation-AUC early stopping, and total-gain feature importance.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.special import expit

from .features import FeatureMatrix
from .metrics import auc as _auc, logloss as _logloss

MODEL_FORMAT = "linkcast-gbdt"
MODEL_VERSION = 1

# Splits must clear this gain floor.  In exact arithmetic a node whose rows
# all share one gradient/hessian value has zero gain everywhere; float
# round-off can surface as ~1e-14 phantom gains, which must not create
# internal nodes.  This constant is part of the split-acceptance contract
# and is honored by the exhaustive-search test oracle as well.
MIN_SPLIT_GAIN = 1e-10

_PRED_EPS = 1e-15


class ModelFormatError(ValueError):
    """Raised when a serialized model fails to load."""


@dataclass(frozen=True)
class GBDTConfig:
    max_leaves: int = 16
    max_depth: int = 4
    row_fraction: float = 0.8
    column_fraction: float = 0.9
    learning_rate: float = 0.01
    max_rounds: int = 10_000
    early_stop_rounds: int = 100
    min_samples_per_leaf: int = 20
    l2_leaf_penalty: float = 0.0
    histogram_bins: int = 255
    seed: int = 0

    def validate(self) -> None:
        if self.max_leaves < 2:
            raise ValueError("max_leaves must be >= 2")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0 < self.row_fraction <= 1 or not 0 < self.column_fraction <= 1:
            raise ValueError("row_fraction and column_fraction must lie in (0, 1]")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_rounds < 0 or self.early_stop_rounds < 0:
            raise ValueError("round counts must be nonnegative")
        if self.min_samples_per_leaf < 1:
            raise ValueError("min_samples_per_leaf must be >= 1")
        if self.l2_leaf_penalty < 0:
            raise ValueError("l2_leaf_penalty must be nonnegative")
        if self.histogram_bins < 2:
            raise ValueError("histogram_bins must be >= 2")


@dataclass
class RegressionTree:
    """Flat node arrays; ``feature == -1`` marks a leaf."""

    feature: np.ndarray  # int32, split column (original index) or -1
    threshold: np.ndarray  # float64, split value (x <= threshold goes left)
    missing_left: np.ndarray  # bool, default direction for missing values
    left: np.ndarray  # int32 child ids
    right: np.ndarray
    value: np.ndarray  # float64 leaf values (already learning-rate scaled)
    gain: np.ndarray  # float64 split gains (0 at leaves)

    @property
    def num_nodes(self) -> int:
        return self.feature.size

    @property
    def num_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def depth(self) -> int:
        depths = np.zeros(self.num_nodes, dtype=np.int64)
        for i in range(self.num_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[i] + 1
                depths[self.right[i]] = depths[i] + 1
        return int(depths.max()) if self.num_nodes else 0

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Leaf value per row; missing entries follow stored directions."""
        idx = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feats = self.feature[idx]
            rows = np.flatnonzero(feats >= 0)
            if rows.size == 0:
                break
            node = idx[rows]
            x = X[rows, feats[rows]]
            miss = np.isnan(x)
            goleft = np.where(miss, self.missing_left[node], x <= self.threshold[node])
            idx[rows] = np.where(goleft, self.left[node], self.right[node])
        return self.value[idx]


def _bin_edges(values: np.ndarray, max_bins: int) -> np.ndarray:
    """Quantile bin boundaries for one column's finite values.

    When the column has at most ``max_bins`` distinct values every value
    gets its own bin, with boundaries at midpoints of consecutive distinct
    values; otherwise boundaries come from evenly spaced quantiles.
    """
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return np.empty(0, dtype=np.float64)
    distinct = np.unique(finite)
    if distinct.size <= max_bins:
        return (distinct[:-1] + distinct[1:]) / 2.0
    qs = np.linspace(0.0, 1.0, max_bins + 1)[1:-1]
    return np.unique(np.quantile(finite, qs))


class _Binner:
    """Per-column quantile binning with a dedicated trailing missing bin."""

    def __init__(self, X: np.ndarray, max_bins: int):
        self.edges = [_bin_edges(X[:, j], max_bins) for j in range(X.shape[1])]
        # finite bins per column = len(edges)+1; missing bin sits after them
        self.missing_bin = np.asarray([e.size + 1 for e in self.edges], np.int64)
        self.stride = int(self.missing_bin.max() + 1) if self.edges else 1

    def transform(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape, dtype=np.int64)
        for j, edges in enumerate(self.edges):
            col = X[:, j]
            miss = np.isnan(col)
            out[:, j] = np.where(
                miss, self.missing_bin[j], np.searchsorted(edges, col, side="left")
            )
        return out


@dataclass
class _Candidate:
    gain: float
    col: int
    boundary_bin: int
    threshold: float
    missing_left: bool


class _TreeGrower:
    def __init__(self, binned, binner, g, h, rows, cols, config):
        self.binned = binned
        self.binner = binner
        self.g = g
        self.h = h
        self.cols = cols
        self.cfg = config
        self.lam = config.l2_leaf_penalty
        # node arrays, grown as splits happen
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.missing_left: list[bool] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.gain: list[float] = []
        self.node_g: list[float] = []
        self.node_h: list[float] = []
        self.depth: list[int] = []
        self._rows: dict[int, np.ndarray] = {}
        self._root_rows = rows

    def _new_node(self, rows: np.ndarray, depth: int) -> int:
        node = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.missing_left.append(True)
        self.left.append(-1)
        self.right.append(-1)
        self.gain.append(0.0)
        self.node_g.append(float(self.g[rows].sum()))
        self.node_h.append(float(self.h[rows].sum()))
        self.depth.append(depth)
        self._rows[node] = rows
        return node

    def _histograms(self, rows: np.ndarray):
        c = self.cols.size
        stride = self.binner.stride
        flat = (self.binned[rows][:, self.cols] + np.arange(c) * stride).ravel()
        minlength = c * stride
        cnt = np.bincount(flat, minlength=minlength).astype(np.float64)
        sg = np.bincount(flat, weights=np.repeat(self.g[rows], c), minlength=minlength)
        sh = np.bincount(flat, weights=np.repeat(self.h[rows], c), minlength=minlength)
        return sg, sh, cnt

    def _best_split(self, rows: np.ndarray) -> _Candidate | None:
        lam = self.lam
        min_c = self.cfg.min_samples_per_leaf
        sg, sh, cnt = self._histograms(rows)
        stride = self.binner.stride
        best: _Candidate | None = None
        for pos, j in enumerate(self.cols):
            edges = self.binner.edges[j]
            if edges.size == 0:
                continue  # constant or all-missing column: nothing to split
            nfin = edges.size + 1
            base = pos * stride
            cg = np.cumsum(sg[base : base + nfin])[:-1]
            ch = np.cumsum(sh[base : base + nfin])[:-1]
            cc = np.cumsum(cnt[base : base + nfin])[:-1]
            gf = float(sg[base : base + nfin].sum())
            hf = float(sh[base : base + nfin].sum())
            cf = float(cnt[base : base + nfin].sum())
            mg = sg[base + nfin]
            mh = sh[base + nfin]
            mc = cnt[base + nfin]
            total_g, total_h = gf + mg, hf + mh
            parent = total_g * total_g / (total_h + lam) if total_h + lam > 0 else 0.0

            def side(gsum, hsum):
                denom = hsum + lam
                return np.where(denom > 0, gsum * gsum / np.where(denom > 0, denom, 1.0), 0.0)

            gain_ml = side(cg + mg, ch + mh) + side(gf - cg, hf - ch) - parent
            gain_mr = side(cg, ch) + side(gf - cg + mg, hf - ch + mh) - parent
            ok_ml = (cc + mc >= min_c) & (cf - cc >= min_c)
            ok_mr = (cc >= min_c) & (cf - cc + mc >= min_c)
            gain_ml = np.where(ok_ml, gain_ml, -np.inf)
            gain_mr = np.where(ok_mr, gain_mr, -np.inf)
            use_left = gain_ml >= gain_mr
            gains = np.where(use_left, gain_ml, gain_mr)
            b = int(np.argmax(gains))  # ties resolve to the lowest boundary
            if gains[b] > MIN_SPLIT_GAIN and (best is None or gains[b] > best.gain):
                best = _Candidate(
                    gain=float(gains[b]),
                    col=int(j),
                    boundary_bin=b,
                    threshold=float(edges[b]),
                    missing_left=bool(use_left[b]),
                )
        return best

    def grow(self) -> RegressionTree:
        root = self._new_node(self._root_rows, depth=0)
        frontier: list[tuple[float, int, _Candidate]] = []
        self._push(frontier, root)
        num_leaves = 1
        while frontier and num_leaves < self.cfg.max_leaves:
            _, node, cand = heapq.heappop(frontier)
            rows = self._rows.pop(node)
            xb = self.binned[rows, cand.col]
            miss_bin = self.binner.missing_bin[cand.col]
            goleft = (xb <= cand.boundary_bin) | (
                (xb == miss_bin) & cand.missing_left
            )
            lnode = self._new_node(rows[goleft], self.depth[node] + 1)
            rnode = self._new_node(rows[~goleft], self.depth[node] + 1)
            self.feature[node] = cand.col
            self.threshold[node] = cand.threshold
            self.missing_left[node] = cand.missing_left
            self.left[node] = lnode
            self.right[node] = rnode
            self.gain[node] = cand.gain
            num_leaves += 1
            self._push(frontier, lnode)
            self._push(frontier, rnode)

        lr = self.cfg.learning_rate
        values = np.zeros(len(self.feature))
        for node in range(len(self.feature)):
            if self.feature[node] < 0:
                denom = self.node_h[node] + self.lam
                values[node] = -lr * self.node_g[node] / denom if denom > 0 else 0.0
        return RegressionTree(
            feature=np.asarray(self.feature, np.int32),
            threshold=np.asarray(self.threshold, np.float64),
            missing_left=np.asarray(self.missing_left, bool),
            left=np.asarray(self.left, np.int32),
            right=np.asarray(self.right, np.int32),
            value=values,
            gain=np.asarray(self.gain, np.float64),
        )

    def _push(self, frontier, node: int) -> None:
        if self.depth[node] >= self.cfg.max_depth:
            return
        rows = self._rows[node]
        if rows.size < 2 * self.cfg.min_samples_per_leaf:
            return
        cand = self._best_split(rows)
        if cand is not None:
            # ties on gain pop in node-creation order
            heapq.heappush(frontier, (-cand.gain, node, cand))


@dataclass
class GBDTModel:
    """Trained ensemble: init log-odds, trees up to the best round, and
    per-column total split gain."""

    column_names: tuple[str, ...]
    config: GBDTConfig
    init_score: float
    trees: list[RegressionTree]
    feature_importance: np.ndarray
    best_round: int
    train_logloss: list[float] = field(default_factory=list)
    valid_auc: list[float] | None = None

    def predict(self, features) -> np.ndarray:
        return predict(self, features)


def _as_values(features, expect_names=None):
    if isinstance(features, FeatureMatrix):
        values, names = features.values, features.column_names
    else:
        values = np.asarray(features, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("feature array must be 2-d")
        names = (
            expect_names
            if expect_names is not None
            else tuple(f"f{j}" for j in range(values.shape[1]))
        )
    if expect_names is not None and tuple(names) != tuple(expect_names):
        raise ValueError("feature columns do not match the training columns")
    if values.shape[1] != len(names):
        raise ValueError("feature width does not match the column count")
    return values, tuple(names)


def train(
    features,
    labels,
    valid_features=None,
    valid_labels=None,
    config: GBDTConfig | None = None,
) -> GBDTModel:
    """Boost regression trees on logistic loss.

    Per round: gradients/hessians from the sigmoid of the current scores,
    one tree grown on a row/column subsample, scores updated everywhere.
    With validation data the model is kept at the round with the best
    validation AUC and training stops after ``early_stop_rounds`` rounds
    without improvement.
    """
    config = config or GBDTConfig()
    config.validate()
    X, names = _as_values(features)
    y = np.asarray(labels, dtype=np.float64)
    if y.ndim != 1 or y.size != X.shape[0]:
        raise ValueError("labels must align with feature rows")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("labels must be 0 or 1")
    pos = float(y.sum())
    neg = float(y.size - pos)
    if pos == 0 or neg == 0:
        raise ValueError("training labels must contain both classes")

    has_valid = valid_features is not None
    if has_valid:
        Xv, _ = _as_values(valid_features, expect_names=names)
        yv = np.asarray(valid_labels, dtype=np.float64)
        if yv.ndim != 1 or yv.size != Xv.shape[0]:
            raise ValueError("validation labels must align with validation rows")

    n, m = X.shape
    rng = np.random.default_rng(config.seed)
    binner = _Binner(X, config.histogram_bins)
    binned = binner.transform(X)

    init_score = math.log(pos / neg)
    scores = np.full(n, init_score)
    scores_v = np.full(Xv.shape[0], init_score) if has_valid else None

    trees: list[RegressionTree] = []
    history_ll: list[float] = []
    history_auc: list[float] = []
    best_auc = -np.inf
    best_round = 0

    n_rows = n if config.row_fraction >= 1.0 else max(1, int(config.row_fraction * n))
    n_cols = m if config.column_fraction >= 1.0 else min(m, max(1, math.ceil(config.column_fraction * m)))

    for round_idx in range(config.max_rounds):
        p = expit(scores)
        g = p - y
        h = p * (1.0 - p)
        rows = (
            np.arange(n)
            if n_rows == n
            else np.sort(rng.permutation(n)[:n_rows])
        )
        cols = (
            np.arange(m)
            if n_cols == m
            else np.sort(rng.permutation(m)[:n_cols])
        )
        tree = _TreeGrower(binned, binner, g, h, rows, cols, config).grow()
        trees.append(tree)
        scores = scores + tree.predict(X)
        history_ll.append(_logloss(expit(scores), y))

        if has_valid:
            scores_v = scores_v + tree.predict(Xv)
            round_auc = _auc(scores_v, yv)  # AUC is rank-based; raw margins suffice
            history_auc.append(round_auc)
            if round_auc > best_auc:
                best_auc = round_auc
                best_round = round_idx + 1
            elif (
                config.early_stop_rounds > 0
                and round_idx + 1 - best_round >= config.early_stop_rounds
            ):
                break

    if not has_valid:
        best_round = len(trees)
    kept = trees[:best_round]

    importance = np.zeros(m)
    for tree in kept:
        internal = tree.feature >= 0
        np.add.at(importance, tree.feature[internal], tree.gain[internal])

    return GBDTModel(
        column_names=names,
        config=config,
        init_score=init_score,
        trees=kept,
        feature_importance=importance,
        best_round=best_round,
        train_logloss=history_ll,
        valid_auc=history_auc if has_valid else None,
    )


def predict(model: GBDTModel, features) -> np.ndarray:
    """Probabilities ``sigmoid(init + sum of retained tree outputs)``,
    clamped to the open interval (0, 1)."""
    X, _ = _as_values(features, expect_names=model.column_names)
    scores = np.full(X.shape[0], model.init_score)
    for tree in model.trees:
        scores += tree.predict(X)
    return np.clip(expit(scores), _PRED_EPS, 1.0 - _PRED_EPS)


def save_model(model: GBDTModel, path) -> None:
    """Serialize to a versioned JSON container; floats keep full precision,
    so a load reproduces predictions bit for bit."""
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": asdict(model.config),
        "column_names": list(model.column_names),
        "init_score": model.init_score,
        "best_round": model.best_round,
        "feature_importance": model.feature_importance.tolist(),
        "train_logloss": model.train_logloss,
        "valid_auc": model.valid_auc,
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "missing_left": t.missing_left.astype(int).tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
                "gain": t.gain.tolist(),
            }
            for t in model.trees
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_model(path) -> GBDTModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: truncated or corrupt model file: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a {MODEL_FORMAT} model file")
    version = payload.get("version")
    if version != MODEL_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported model version {version!r} (expected {MODEL_VERSION})"
        )
    try:
        trees = [
            RegressionTree(
                feature=np.asarray(t["feature"], np.int32),
                threshold=np.asarray(t["threshold"], np.float64),
                missing_left=np.asarray(t["missing_left"], bool),
                left=np.asarray(t["left"], np.int32),
                right=np.asarray(t["right"], np.int32),
                value=np.asarray(t["value"], np.float64),
                gain=np.asarray(t["gain"], np.float64),
            )
            for t in payload["trees"]
        ]
        return GBDTModel(
            column_names=tuple(payload["column_names"]),
            config=GBDTConfig(**payload["config"]),
            init_score=float(payload["init_score"]),
            trees=trees,
            feature_importance=np.asarray(payload["feature_importance"], np.float64),
            best_round=int(payload["best_round"]),
            train_logloss=list(payload["train_logloss"]),
            valid_auc=payload["valid_auc"],
        )
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"{path}: truncated or corrupt model file: {exc}") from None
