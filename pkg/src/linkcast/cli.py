"""Command-line pipeline driver.

Configuration is a flat key-value namespace: built-in defaults, overlaid
by an optional config file (``--config`` or the LINKCAST_CONFIG env var,
lines of ``key = value`` with ``#`` comments), overlaid by command-line
flags.  Every subcommand is deterministic for fixed inputs and seeds and
never mutates its inputs.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import dataset, features, gbdt, metrics, report, synth
from .blend import BlendSpec, blend, read_score_file, write_score_file
from .dates import parse_day
from .graph import decayed_adjacency, load_edge_list, save_edge_list

# Single source of truth for config keys, their defaults, and their types.
# "workers" is accepted for interface compatibility; all reductions are
# order-fixed, so outputs never depend on it.
DEFAULTS: dict[str, object] = {
    "edges": "edges.tsv",
    "num_vertices": 0,  # 0 = infer from the edge list
    "seed": 0,
    "workers": 1,
    # ingest
    "raw_edges": "",
    "adjacency_out": "",
    "as_of": "",  # day index or ISO date; empty = last event day
    "decay_rate": 0.0001,
    # split
    "t1": "2011-12-31",
    "t2": "2014-12-31",
    "target_size": 0,  # 0 = one negative per positive
    "augment_swap": False,
    "sampling": "auto",
    "split_out": "split.tsv",
    # features
    "split": "split.tsv",
    "features_out": "features.tsv",
    "vertex_out": "",  # empty = skip the per-vertex table
    "damping": 0.85,
    "pagerank_tolerance": 1e-8,
    "pagerank_iterations": 100,
    # train
    "train_features": "features.tsv",
    "train_split": "split.tsv",
    "valid_features": "",
    "valid_split": "",
    "model_out": "model.json",
    "max_leaves": 16,
    "max_depth": 4,
    "row_fraction": 0.8,
    "column_fraction": 0.9,
    "learning_rate": 0.01,
    "max_rounds": 10_000,
    "early_stop_rounds": 100,
    "min_samples_per_leaf": 20,
    "l2_leaf_penalty": 0.0,
    "histogram_bins": 255,
    # predict
    "model": "model.json",
    "features": "features.tsv",
    "scores_out": "scores.tsv",
    # blend
    "blend_inputs": "",  # comma-separated path[:weight] entries
    "power": 3.0,
    "blend_out": "blend.tsv",
    # eval
    "scores": "scores.tsv",
    # synth
    "synth_vertices": 2000,
    "synth_days": 8766,
    "synth_edges_per_day": 12,
    "synth_exponent": 1.0,
    # report
    "report_scores": "",
    "report_split": "",
    "report_dir": "report",
}

_TRUE_WORDS = frozenset(("1", "true", "yes", "on"))
_FALSE_WORDS = frozenset(("0", "false", "no", "off"))


class ConfigError(ValueError):
    """Raised for malformed config files or invalid key values."""


def _coerce(key: str, raw: str, where: str):
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            word = raw.strip().lower()
            if word in _TRUE_WORDS:
                return True
            if word in _FALSE_WORDS:
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(
            f"{where}: bad value {raw!r} for key {key!r} "
            f"(expected {type(default).__name__})"
        ) from None


def load_config_file(path) -> dict:
    """Parse ``key = value`` lines; unknown keys are rejected."""
    out: dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = _coerce(key, value.strip(), f"{path}:{lineno}")
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    path = args.config or os.environ.get("LINKCAST_CONFIG")
    if path:
        cfg.update(load_config_file(path))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _load_graph(cfg, path_key="edges"):
    path = cfg[path_key]
    if not path:
        raise ConfigError(f"missing required path for {path_key!r}")
    return load_edge_list(path, num_vertices=cfg["num_vertices"] or None)


def _pack_pairs(pairs: np.ndarray) -> np.ndarray:
    lo = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    hi = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int64)
    return (lo << 32) | hi


def _labels_for(scored: metrics.ScoredPairs, split: dataset.LabeledPairs) -> np.ndarray:
    """Labels from the split aligned to the scored pairs by canonical key."""
    split_keys = _pack_pairs(split.pairs)
    order = np.argsort(split_keys, kind="stable")
    score_keys = _pack_pairs(scored.pairs)
    pos = np.searchsorted(split_keys[order], score_keys)
    bad = (pos >= split_keys.size) | (split_keys[order][np.minimum(pos, split_keys.size - 1)] != score_keys)
    if score_keys.size != split_keys.size or bad.any():
        idx = int(np.flatnonzero(bad)[0]) if bad.any() else 0
        u, v = scored.pairs[idx]
        raise ValueError(
            f"scored pairs do not match the split pairs (first divergence at ({u}, {v}))"
        )
    return split.labels[order][pos]


def cmd_ingest(cfg) -> int:
    if not cfg["raw_edges"]:
        raise ConfigError("ingest needs raw_edges (--in)")
    graph = load_edge_list(cfg["raw_edges"], num_vertices=cfg["num_vertices"] or None)
    save_edge_list(graph, cfg["edges"])
    print(
        f"wrote {cfg['edges']}: {graph.num_events} events, "
        f"{graph.num_vertices} vertices"
    )
    if cfg["adjacency_out"]:
        as_of = parse_day(cfg["as_of"]) if cfg["as_of"] else graph.last_day()
        adjacency = decayed_adjacency(graph, as_of_day=as_of, decay_rate=cfg["decay_rate"])
        adjacency.save(cfg["adjacency_out"])
        print(
            f"wrote {cfg['adjacency_out']}: {adjacency.pairs.shape[0]} pairs "
            f"as of day {as_of}"
        )
    return 0


def cmd_split(cfg) -> int:
    graph = _load_graph(cfg)
    t1, t2 = parse_day(cfg["t1"]), parse_day(cfg["t2"])
    target = cfg["target_size"] or 2 * dataset.count_new_pairs(graph, t1, t2)
    spec = dataset.SplitSpec(t1_day=t1, t2_day=t2, target_size=target, seed=cfg["seed"])
    labeled = dataset.build_split(graph, spec, method=cfg["sampling"])
    if cfg["augment_swap"]:
        labeled = dataset.augment_swap(labeled)
    labeled.save(cfg["split_out"])
    dataset.save_split_metadata(spec, cfg["split_out"] + ".meta")
    positives = labeled.num_positives
    print(
        f"wrote {cfg['split_out']}: {len(labeled)} pairs "
        f"({positives} positive, {len(labeled) - positives} negative)"
    )
    return 0


def cmd_features(cfg) -> int:
    graph = _load_graph(cfg)
    split = dataset.LabeledPairs.load(cfg["split"])
    t1 = parse_day(cfg["t1"])
    kwargs = dict(
        damping=cfg["damping"],
        tolerance=cfg["pagerank_tolerance"],
        max_iterations=cfg["pagerank_iterations"],
    )
    matrix = features.build_feature_matrix(graph, split.pairs, t1, **kwargs)
    matrix.save(cfg["features_out"])
    print(
        f"wrote {cfg['features_out']}: {matrix.num_rows} rows, "
        f"{len(matrix.column_names)} columns"
    )
    if cfg["vertex_out"]:
        table = features.build_vertex_features(graph, t1, **kwargs)
        features.save_vertex_features(table, cfg["vertex_out"])
        print(f"wrote {cfg['vertex_out']}: {table.shape[0]} vertices")
    return 0


def _load_training_pair(features_path, split_path):
    matrix = features.FeatureMatrix.load(features_path)
    split = dataset.LabeledPairs.load(split_path)
    if not np.array_equal(matrix.pairs, split.pairs):
        raise ValueError(
            f"{features_path} rows do not line up with {split_path} pairs"
        )
    return matrix, split.labels


def cmd_train(cfg) -> int:
    matrix, labels = _load_training_pair(cfg["train_features"], cfg["train_split"])
    valid_matrix = valid_labels = None
    if cfg["valid_features"] or cfg["valid_split"]:
        if not (cfg["valid_features"] and cfg["valid_split"]):
            raise ConfigError("valid_features and valid_split must be given together")
        valid_matrix, valid_labels = _load_training_pair(
            cfg["valid_features"], cfg["valid_split"]
        )
    config = gbdt.GBDTConfig(
        max_leaves=cfg["max_leaves"],
        max_depth=cfg["max_depth"],
        row_fraction=cfg["row_fraction"],
        column_fraction=cfg["column_fraction"],
        learning_rate=cfg["learning_rate"],
        max_rounds=cfg["max_rounds"],
        early_stop_rounds=cfg["early_stop_rounds"],
        min_samples_per_leaf=cfg["min_samples_per_leaf"],
        l2_leaf_penalty=cfg["l2_leaf_penalty"],
        histogram_bins=cfg["histogram_bins"],
        seed=cfg["seed"],
    )
    model = gbdt.train(matrix, labels, valid_matrix, valid_labels, config)
    gbdt.save_model(model, cfg["model_out"])
    print(
        f"wrote {cfg['model_out']}: {len(model.trees)} trees, "
        f"best round {model.best_round}"
    )
    if model.valid_auc:
        print(f"VALID_AUC {model.valid_auc[model.best_round - 1]:.8f}")
    return 0


def cmd_predict(cfg) -> int:
    model = gbdt.load_model(cfg["model"])
    matrix = features.FeatureMatrix.load(cfg["features"])
    scores = gbdt.predict(model, matrix)
    write_score_file(cfg["scores_out"], matrix.pairs, scores)
    print(f"wrote {cfg['scores_out']}: {scores.size} scores")
    return 0


def _parse_blend_inputs(text: str):
    entries = [entry.strip() for entry in text.split(",") if entry.strip()]
    if not entries:
        raise ConfigError(
            "blend needs blend_inputs, e.g. 'gbdt.tsv:1,gnn.tsv:1'"
        )
    inputs = []
    for entry in entries:
        path, sep, weight = entry.rpartition(":")
        if sep:
            try:
                inputs.append((path, float(weight)))
                continue
            except ValueError:
                pass
        inputs.append((entry, 1.0))
    return inputs


def cmd_blend(cfg) -> int:
    spec = BlendSpec(_parse_blend_inputs(cfg["blend_inputs"]), power=cfg["power"])
    scored = blend(spec)
    write_score_file(cfg["blend_out"], scored.pairs, scored.scores)
    print(f"wrote {cfg['blend_out']}: {scored.scores.size} scores")
    return 0


def cmd_eval(cfg) -> int:
    scored = read_score_file(cfg["scores"])
    split = dataset.LabeledPairs.load(cfg["split"])
    labels = _labels_for(scored, split)
    print(f"AUC {metrics.auc(scored.scores, labels):.8f}")
    print(f"LOGLOSS {metrics.logloss(scored.scores, labels):.8f}")
    return 0


def cmd_synth(cfg) -> int:
    config = synth.SynthConfig(
        num_vertices=cfg["synth_vertices"],
        num_days=cfg["synth_days"],
        edges_per_day=cfg["synth_edges_per_day"],
        attachment_exponent=cfg["synth_exponent"],
        seed=cfg["seed"],
    )
    graph = synth.generate(config)
    save_edge_list(graph, cfg["edges"])
    print(
        f"wrote {cfg['edges']}: {graph.num_events} events, "
        f"{graph.num_vertices} vertices, {config.num_days} days"
    )
    return 0


def cmd_report(cfg) -> int:
    model = gbdt.load_model(cfg["model"])
    scored = labels = None
    if cfg["report_scores"]:
        scored = read_score_file(cfg["report_scores"])
        if cfg["report_split"]:
            labels = _labels_for(scored, dataset.LabeledPairs.load(cfg["report_split"]))
    written = report.generate_report(model, cfg["report_dir"], scored, labels)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value config file (or $LINKCAST_CONFIG)")
    shared.add_argument("--workers", type=int, dest="workers",
                        help="worker count (outputs are independent of it)")

    parser = argparse.ArgumentParser(
        prog="linkcast",
        description="Temporal link prediction: features, boosting, blending.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[shared], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, "validate an edge list; optional decayed adjacency")
    p.add_argument("--in", dest="raw_edges", help="raw edge-list file")
    p.add_argument("--out", dest="edges", help="normalized edge-list output")
    p.add_argument("--num-vertices", dest="num_vertices", type=int)
    p.add_argument("--adjacency-out", dest="adjacency_out")
    p.add_argument("--as-of", dest="as_of", help="day index or ISO date")
    p.add_argument("--decay-rate", dest="decay_rate", type=float)

    p = add("split", cmd_split, "build a labeled positive/negative pair set")
    p.add_argument("--edges", dest="edges")
    p.add_argument("--num-vertices", dest="num_vertices", type=int)
    p.add_argument("--t1", dest="t1", help="feature cutoff (day index or ISO date)")
    p.add_argument("--t2", dest="t2", help="label cutoff (day index or ISO date)")
    p.add_argument("--target-size", dest="target_size", type=int,
                   help="total pairs; 0 = one negative per positive")
    p.add_argument("--sampling", dest="sampling", choices=("auto", "exact", "rejection"))
    p.add_argument("--augment-swap", dest="augment_swap",
                   action=argparse.BooleanOptionalAction)
    p.add_argument("--seed", dest="seed", type=int)
    p.add_argument("--out", dest="split_out")

    p = add("features", cmd_features, "compute the 41-column feature matrix")
    p.add_argument("--edges", dest="edges")
    p.add_argument("--num-vertices", dest="num_vertices", type=int)
    p.add_argument("--split", dest="split")
    p.add_argument("--t1", dest="t1")
    p.add_argument("--out", dest="features_out")
    p.add_argument("--vertex-out", dest="vertex_out",
                   help="also write the 15-column per-vertex table")
    p.add_argument("--damping", dest="damping", type=float)
    p.add_argument("--pagerank-tolerance", dest="pagerank_tolerance", type=float)
    p.add_argument("--pagerank-iterations", dest="pagerank_iterations", type=int)

    p = add("train", cmd_train, "train the boosted-tree model")
    p.add_argument("--train-features", dest="train_features")
    p.add_argument("--train-split", dest="train_split")
    p.add_argument("--valid-features", dest="valid_features")
    p.add_argument("--valid-split", dest="valid_split")
    p.add_argument("--out", dest="model_out")
    p.add_argument("--max-leaves", dest="max_leaves", type=int)
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--row-fraction", dest="row_fraction", type=float)
    p.add_argument("--column-fraction", dest="column_fraction", type=float)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--max-rounds", dest="max_rounds", type=int)
    p.add_argument("--early-stop-rounds", dest="early_stop_rounds", type=int)
    p.add_argument("--min-samples-per-leaf", dest="min_samples_per_leaf", type=int)
    p.add_argument("--l2-leaf-penalty", dest="l2_leaf_penalty", type=float)
    p.add_argument("--histogram-bins", dest="histogram_bins", type=int)
    p.add_argument("--seed", dest="seed", type=int)

    p = add("predict", cmd_predict, "score pairs with a trained model")
    p.add_argument("--model", dest="model")
    p.add_argument("--features", dest="features")
    p.add_argument("--out", dest="scores_out")

    p = add("blend", cmd_blend, "power-blend score files")
    p.add_argument("--inputs", dest="blend_inputs",
                   help="comma-separated path[:weight] entries")
    p.add_argument("--power", dest="power", type=float)
    p.add_argument("--out", dest="blend_out")

    p = add("eval", cmd_eval, "AUC and logloss of a score file against a split")
    p.add_argument("--scores", dest="scores")
    p.add_argument("--split", dest="split")

    p = add("synth", cmd_synth, "generate a preferential-attachment edge list")
    p.add_argument("--vertices", dest="synth_vertices", type=int)
    p.add_argument("--days", dest="synth_days", type=int)
    p.add_argument("--edges-per-day", dest="synth_edges_per_day", type=int)
    p.add_argument("--exponent", dest="synth_exponent", type=float)
    p.add_argument("--seed", dest="seed", type=int)
    p.add_argument("--out", dest="edges")

    p = add("report", cmd_report, "render model diagnostics (figures + tables)")
    p.add_argument("--model", dest="model")
    p.add_argument("--scores", dest="report_scores")
    p.add_argument("--split", dest="report_split")
    p.add_argument("--out", dest="report_dir")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(cfg)
    except (ValueError, OSError) as exc:
        print(f"linkcast: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
