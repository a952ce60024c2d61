"""Command-line interface: config layering, training, and ablation runs."""

import pytest

from gnn_trainer.cli import ConfigError, load_config_file, main

FAST = ["--num-blocks", "1", "--embedding-dim", "8", "--hidden-dim", "8",
        "--epochs", "2", "--batch-size", "256", "--seed", "4"]


def data_flags(artifacts):
    return [
        "--train-features", str(artifacts.train_features),
        "--train-split", str(artifacts.train_split),
        "--valid-features", str(artifacts.valid_features),
        "--valid-split", str(artifacts.valid_split),
        "--vertex-features", str(artifacts.vertex),
        "--adjacency", str(artifacts.adjacency),
    ]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_config_file_parsing(tmp_path):
    path = tmp_path / "gnn.cfg"
    path.write_text("# comment\nepochs = 5\ndropout = 0.1\nvariant = mlp\n")
    assert load_config_file(path) == {"epochs": 5, "dropout": 0.1, "variant": "mlp"}
    path.write_text("unknown_key = 1\n")
    with pytest.raises(ConfigError, match="gnn.cfg:1: unknown config key"):
        load_config_file(path)
    path.write_text("epochs five\n")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        load_config_file(path)
    path.write_text("epochs = five\n")
    with pytest.raises(ConfigError, match="bad value 'five'"):
        load_config_file(path)


def test_train_command_writes_scores(capsys, artifacts, tmp_path):
    scores = tmp_path / "scores.tsv"
    code, out, _ = run(
        capsys, "train", *data_flags(artifacts), *FAST, "--scores-out", str(scores)
    )
    assert code == 0
    assert out.count("EPOCH ") == 2
    auc_line = [line for line in out.splitlines() if line.startswith("VALID_AUC ")]
    assert len(auc_line) == 1
    assert 0.0 <= float(auc_line[0].split()[1]) <= 1.0
    assert scores.read_text().startswith("u v score\n")


def test_flag_overrides_config_file(capsys, artifacts, tmp_path, monkeypatch):
    cfg = tmp_path / "gnn.cfg"
    cfg.write_text("epochs = 3\nnum_blocks = 1\nembedding_dim = 8\nhidden_dim = 8\n"
                   "batch_size = 256\nvariant = mlp\n")
    monkeypatch.setenv("GNN_TRAINER_CONFIG", str(cfg))
    scores = tmp_path / "scores.tsv"
    code, out, _ = run(
        capsys, "train", *data_flags(artifacts),
        "--epochs", "1", "--scores-out", str(scores),
    )
    assert code == 0
    assert out.count("EPOCH ") == 1  # flag beats the env-var config file


def test_ablate_command(capsys, artifacts, tmp_path):
    report = tmp_path / "ablation.tsv"
    code, out, _ = run(
        capsys, "ablate", *data_flags(artifacts), *FAST,
        "--epochs", "1", "--report-out", str(report),
        "--scores-dir", str(tmp_path),
    )
    assert code == 0
    lines = report.read_text().splitlines()
    assert lines[0] == "model\tauc\terror"
    assert len(lines) == 9
    assert out.count("AUC ") == 8
    assert (tmp_path / "mlp.tsv").exists()
    assert (tmp_path / "gnn_decayed_5_blocks.tsv").exists()


def test_missing_artifact_fails_cleanly(capsys, artifacts, tmp_path):
    flags = data_flags(artifacts)
    flags[1] = str(tmp_path / "missing.tsv")
    code, _, err = run(capsys, "train", *flags, *FAST)
    assert code == 1
    assert "gnn-trainer: error:" in err


def test_bad_hyperparameter_fails_cleanly(capsys, artifacts):
    code, _, err = run(capsys, "train", *data_flags(artifacts), "--dropout", "1.5")
    assert code == 1
    assert "dropout" in err
