"""Session fixtures: desk-scale artifacts exported by the primary pipeline.

The trainer's only coupling to the feature-engineering package is its
file formats, so these fixtures drive that package's command line in a
subprocess and hand back paths.  One synthetic graph serves every test:
the training split slices it at day 2600 with labels through 2900, the
validation split at 2750 with labels through 2999, and the vertex table
and adjacency exports use the training cutoff.
"""

import subprocess
import sys
from types import SimpleNamespace

import pytest

from gnn_trainer import load_artifacts


def run_pipeline(*args) -> str:
    proc = subprocess.run(
        [sys.executable, "-m", "linkcast", *map(str, args)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("artifacts")
    paths = SimpleNamespace(
        root=root,
        edges=root / "edges.tsv",
        train_split=root / "train_split.tsv",
        valid_split=root / "valid_split.tsv",
        train_features=root / "train_features.tsv",
        valid_features=root / "valid_features.tsv",
        vertex=root / "vertex.tsv",
        adjacency=root / "adjacency.tsv",
        adjacency_rate0=root / "adjacency_rate0.tsv",
    )
    run_pipeline("synth", "--vertices", 150, "--days", 3000, "--edges-per-day", 2,
                 "--seed", 7, "--out", paths.edges)
    run_pipeline("split", "--edges", paths.edges, "--t1", 2600, "--t2", 2900,
                 "--seed", 1, "--out", paths.train_split)
    run_pipeline("split", "--edges", paths.edges, "--t1", 2750, "--t2", 2999,
                 "--seed", 2, "--out", paths.valid_split)
    run_pipeline("features", "--edges", paths.edges, "--split", paths.train_split,
                 "--t1", 2600, "--out", paths.train_features, "--vertex-out", paths.vertex)
    run_pipeline("features", "--edges", paths.edges, "--split", paths.valid_split,
                 "--t1", 2750, "--out", paths.valid_features)
    run_pipeline("ingest", "--in", paths.edges, "--out", root / "normalized.tsv",
                 "--adjacency-out", paths.adjacency, "--as-of", 2600,
                 "--decay-rate", 0.001)
    run_pipeline("ingest", "--in", paths.edges, "--out", root / "normalized.tsv",
                 "--adjacency-out", paths.adjacency_rate0, "--as-of", 2600,
                 "--decay-rate", 0)
    return paths


@pytest.fixture(scope="session")
def data(artifacts):
    return load_artifacts(
        artifacts.train_features, artifacts.train_split,
        artifacts.valid_features, artifacts.valid_split,
        artifacts.vertex, artifacts.adjacency,
    )
