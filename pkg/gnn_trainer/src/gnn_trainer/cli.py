"""Command-line entry point for training and ablations.

Configuration is a flat key-value namespace mirroring ``GNNConfig``
plus artifact paths: built-in defaults, overlaid by an optional config
file (``--config`` or the GNN_TRAINER_CONFIG env var, lines of
``key = value`` with ``#`` comments), overlaid by command-line flags.
"""

from __future__ import annotations

import argparse
import os
import sys

from .training import (
    GNNConfig,
    default_suite,
    format_ablation_table,
    load_artifacts,
    run_ablation,
    train_gnn,
    write_ablation_report,
)

# Single source of truth for config keys, their defaults, and their types.
DEFAULTS: dict[str, object] = {
    # artifact paths (exports of the feature-engineering pipeline)
    "train_features": "train_features.tsv",
    "train_split": "train_split.tsv",
    "valid_features": "valid_features.tsv",
    "valid_split": "valid_split.tsv",
    "vertex_features": "vertex_features.tsv",
    "adjacency": "adjacency.tsv",
    # outputs
    "scores_out": "gnn_scores.tsv",
    "report_out": "ablation.tsv",
    "scores_dir": "",  # ablate: empty = do not write per-run score files
    # hyperparameters (GNNConfig)
    "num_blocks": 3,
    "embedding_dim": 64,
    "hidden_dim": 64,
    "mlp_layers": 5,
    "dropout": 0.2,
    "batch_size": 512,
    "learning_rate": 1e-4,
    "weight_decay": 1e-3,
    "epochs": 30,
    "adjacency_mode": "decayed",
    "seed": 0,
    "variant": "gnn",
}

_CONFIG_KEYS = (
    "num_blocks", "embedding_dim", "hidden_dim", "mlp_layers", "dropout",
    "batch_size", "learning_rate", "weight_decay", "epochs",
    "adjacency_mode", "seed", "variant",
)


class ConfigError(ValueError):
    """Raised for unknown keys, bad values, or malformed config lines."""


def _coerce(key: str, raw: str, where: str):
    default = DEFAULTS[key]
    try:
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
    path = args.config or os.environ.get("GNN_TRAINER_CONFIG")
    if path:
        cfg.update(load_config_file(path))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _gnn_config(cfg: dict) -> GNNConfig:
    return GNNConfig(**{key: cfg[key] for key in _CONFIG_KEYS})


def _load_data(cfg: dict):
    return load_artifacts(
        cfg["train_features"], cfg["train_split"],
        cfg["valid_features"], cfg["valid_split"],
        cfg["vertex_features"], cfg["adjacency"],
    )


def cmd_train(cfg: dict) -> int:
    data = _load_data(cfg)
    _, result = train_gnn(data, _gnn_config(cfg), scores_out=cfg["scores_out"] or None)
    for epoch, loss in enumerate(result.epoch_losses, start=1):
        print(f"EPOCH {epoch} LOSS {loss:.8f}")
    print(f"VALID_AUC {result.valid_auc:.8f}")
    return 0


def cmd_ablate(cfg: dict) -> int:
    data = _load_data(cfg)
    rows = run_ablation(data, list(default_suite(_gnn_config(cfg))),
                        scores_dir=cfg["scores_dir"] or None)
    print(format_ablation_table(rows))
    if cfg["report_out"]:
        write_ablation_report(cfg["report_out"], rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnn-trainer",
        description="Graph neural network trainer over exported link-prediction artifacts.",
    )
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value config file (or $GNN_TRAINER_CONFIG)")
    for key in ("train_features", "train_split", "valid_features", "valid_split",
                "vertex_features", "adjacency"):
        shared.add_argument(f"--{key.replace('_', '-')}", dest=key)
    for key in ("num_blocks", "embedding_dim", "hidden_dim", "mlp_layers",
                "batch_size", "epochs", "seed"):
        shared.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
    for key in ("dropout", "learning_rate", "weight_decay"):
        shared.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)
    shared.add_argument("--adjacency-mode", dest="adjacency_mode",
                        choices=("decayed", "binary"))
    shared.add_argument("--variant", dest="variant",
                        choices=("gnn", "mlp", "mlp_embedding"))

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("train", parents=[shared],
                       help="train one configuration and write validation scores")
    p.add_argument("--scores-out", dest="scores_out")
    p.set_defaults(func=cmd_train)
    p = sub.add_parser("ablate", parents=[shared],
                       help="run the reference ablation suite")
    p.add_argument("--report-out", dest="report_out")
    p.add_argument("--scores-dir", dest="scores_dir")
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(cfg)
    except (ValueError, OSError) as exc:
        print(f"gnn-trainer: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
