"""Acceptance gate: one test per shipping criterion.

Each test prints a single [PASS] line (visible with -s) naming the
criterion and the measured runtime; the stated runtime bounds are
asserted.  The optional full-dataset check is skipped unless
LINKCAST_COMPETITION_DATA points at the competition edge list.
"""

import os
import time

import numpy as np
import pytest

from linkcast.cli import build_parser, resolve_config
from linkcast.dataset import SplitSpec, build_split
from linkcast.features import (
    FEATURE_COLUMNS,
    build_feature_matrix,
    common_neighbors,
    jaccard,
    pagerank,
)
from linkcast.gbdt import GBDTConfig, predict, train
from linkcast.graph import TemporalGraph, snapshot
from linkcast.metrics import auc
from linkcast.blend import BlendSpec, blend, read_score_file, write_score_file
from linkcast.synth import SynthConfig, generate

from oracles import (
    dense_pagerank,
    exhaustive_first_tree,
    neighbor_sets_from_events,
    pairwise_auc,
    set_common_neighbors,
    set_jaccard,
)
from test_features import recompute_columns
from test_gbdt import assert_same_tree, make_learnable, no_subsample, tiny_dataset


class Stopwatch:
    def __init__(self, limit_s):
        self.limit_s = limit_s
        self.start = time.perf_counter()

    def done(self, name, detail):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.limit_s, f"{name}: {elapsed:.1f}s exceeds {self.limit_s}s"
        print(f"[PASS] {name}: {detail} ({elapsed:.1f}s)")


def random_event_graph(rng, n, m):
    u = rng.integers(0, n, size=2 * m)
    v = rng.integers(0, n, size=2 * m)
    mask = u != v
    uu, vv = u[mask][:m], v[mask][:m]
    days = rng.integers(0, 100, size=uu.size)
    events = list(zip(uu.tolist(), vv.tolist(), days.tolist()))
    return events, TemporalGraph.from_events(events, num_vertices=n)


def test_jaccard_and_common_neighbors_match_oracles():
    watch = Stopwatch(10)
    rng = np.random.default_rng(101)
    checked = 0
    for trial in range(100):
        n = int(rng.integers(5, 201))
        density = rng.uniform(0.2, 4.0)
        events, g = random_event_graph(rng, n, max(1, int(density * n)))
        s = snapshot(g, 0, 200)
        sets = neighbor_sets_from_events(events, n, 0, 200)
        for _ in range(200):
            u, v = int(rng.integers(0, n)), int(rng.integers(0, n))
            if u == v:
                continue
            assert common_neighbors(s, u, v) == set_common_neighbors(sets, u, v)
            expected = set_jaccard(sets, u, v)
            got = jaccard(s, u, v)
            assert (np.isnan(expected) and np.isnan(got)) or got == expected
            checked += 1
        if n <= 50:
            A = np.zeros((n, n))
            for x in range(n):
                A[x, s.neighbors(x)] = 1.0
            A2 = A @ A
            for u in range(n):
                for v in range(u + 1, n):
                    assert common_neighbors(s, u, v) == int(A2[u, v])
    watch.done(
        "jaccard/common-neighbors oracle equivalence",
        f"100 graphs, {checked} sampled pairs, dense A^2 cross-check",
    )


def test_pagerank_matches_dense_oracle():
    watch = Stopwatch(10)
    rng = np.random.default_rng(103)
    worst = 0.0
    for trial in range(30):
        n = int(rng.integers(3, 201))
        events, g = random_event_graph(rng, n, max(1, int(rng.uniform(0.3, 3.0) * n)))
        s = snapshot(g, 0, 200)
        # the stated tolerance compares fixed points, so run the power
        # iteration to convergence rather than the default 100-step cap
        got = pagerank(s, tolerance=1e-12, max_iterations=10_000)
        expected = dense_pagerank(neighbor_sets_from_events(events, n, 0, 200))
        worst = max(worst, float(np.max(np.abs(got - expected))))
        assert np.max(np.abs(got - expected)) <= 1e-8
        assert abs(got.sum() - 1.0) <= 1e-6
    watch.done(
        "pagerank dense-oracle equivalence",
        f"30 graphs <=200 vertices, max abs diff {worst:.2e} <= 1e-8, sums within 1e-6",
    )


def test_auc_matches_pairwise_oracle():
    watch = Stopwatch(30)
    rng = np.random.default_rng(107)
    worst = 0.0
    for trial in range(1000):
        n = int(rng.integers(2, 1001))
        pool = rng.integers(1, 6)  # small score pools force heavy ties
        scores = rng.integers(0, pool + 1, size=n) / pool
        labels = rng.integers(0, 2, size=n)
        labels[0], labels[1 % n] = 1, 0
        diff = abs(auc(scores, labels) - pairwise_auc(scores, labels))
        worst = max(worst, diff)
        assert diff <= 1e-12
    watch.done(
        "auc pairwise-oracle equivalence",
        f"1000 vectors n<=1000 with heavy ties, max diff {worst:.1e} <= 1e-12",
    )


def test_gbdt_first_tree_matches_exhaustive_oracle():
    watch = Stopwatch(60)
    rng = np.random.default_rng(109)
    for trial in range(50):
        X, y = tiny_dataset(rng)
        cfg = no_subsample(
            max_leaves=int(rng.integers(2, 5)),
            max_depth=int(rng.integers(1, 3)),
            min_samples_per_leaf=int(rng.integers(1, 3)),
            l2_leaf_penalty=float(rng.integers(0, 2)),
        )
        model = train(X, y, config=cfg)
        init, ref = exhaustive_first_tree(
            X,
            y,
            learning_rate=cfg.learning_rate,
            max_leaves=cfg.max_leaves,
            max_depth=cfg.max_depth,
            min_samples_per_leaf=cfg.min_samples_per_leaf,
            l2_leaf_penalty=cfg.l2_leaf_penalty,
        )
        assert model.init_score == init
        assert_same_tree(model.trees[0], 0, ref, X, np.arange(len(y)))
    watch.done(
        "gbdt first-tree exhaustive-oracle equivalence",
        "50 tiny datasets, split structure exact, leaf values within 1e-9",
    )


def test_gbdt_training_logloss_and_early_stopping():
    watch = Stopwatch(120)
    rng = np.random.default_rng(113)
    X, y = make_learnable(rng, 10_000)
    cfg = no_subsample(max_rounds=200, max_leaves=16, max_depth=4,
                       min_samples_per_leaf=20)
    model = train(X, y, config=cfg)
    ll = np.asarray(model.train_logloss)
    assert ll.size == 200
    assert (np.diff(ll) <= 1e-12).all()

    Xv, yv = make_learnable(rng, 2_000)
    stopped = train(X, y, Xv, yv, config=no_subsample(
        max_rounds=200, early_stop_rounds=20, max_leaves=16, max_depth=4,
        min_samples_per_leaf=20))
    assert stopped.best_round == int(np.argmax(stopped.valid_auc)) + 1
    assert len(stopped.trees) == stopped.best_round
    watch.done(
        "gbdt monotone training logloss + early stopping",
        f"200 rounds on 10k rows non-increasing; best round {stopped.best_round} restored",
    )


def test_feature_catalog_names_and_recomputation():
    watch = Stopwatch(60)
    graph = generate(SynthConfig(num_vertices=500, num_days=3000,
                                 edges_per_day=4, seed=5))
    t1 = 2600
    rng = np.random.default_rng(127)
    pairs = []
    while len(pairs) < 200:
        u, v = rng.integers(0, 500, size=2)
        if u != v:
            pairs.append((int(u), int(v)))
    matrix = build_feature_matrix(graph, pairs, t1,
                                  tolerance=1e-13, max_iterations=10_000)
    assert matrix.column_names == FEATURE_COLUMNS
    assert matrix.values.shape == (200, 41)

    u_arr, v_arr, d_arr = graph.event_arrays
    events = list(zip(u_arr.tolist(), v_arr.tolist(), d_arr.tolist()))
    ref = recompute_columns(events, 500, t1)

    pr_levels = {
        "pangrank_score_u": (0, 0), "pagerank_score_v": (0, 1),
        "pangrank_score_1_year_u": (1, 0), "pagerank_score_1_year_v": (1, 1),
        "pangrank_score_2_year_u": (2, 0), "pagerank_score_2_year_v": (2, 1),
        "pangrank_scores_3_year_u": (3, 0), "pagerank_score_3_year_v": (3, 1),
    }
    jac_levels = {"jaccard_index": 0, "jaccard_index_1_year": 1,
                  "jaccard_index_2_year": 2, "jaccard_index_3_year": 3}

    def expected_value(name, u, v):
        w = {"u": u, "v": v}
        if name in ("u", "v"):
            return float(w[name])
        if name in pr_levels:
            k, side = pr_levels[name]
            return ref["pagerank"][k][(u, v)[side]]
        if name in jac_levels:
            return set_jaccard(ref["sets"][jac_levels[name]], u, v)
        if name == "jaccard_index_2000":
            return set_jaccard(ref["sets_2000"], u, v)
        if name == "jaccard_index_diff_2000":
            return (set_jaccard(ref["sets"][0], u, v)
                    - set_jaccard(ref["sets_2000"], u, v))
        if name.startswith("jaccard_index_diff_"):
            k = int(name.split("_")[3])
            return (set_jaccard(ref["sets"][0], u, v)
                    - set_jaccard(ref["sets"][k], u, v))
        if name.startswith("pagerank_score_diff_"):
            k = int(name.split("_")[3])
            who = w[name[-1]]
            return ref["pagerank"][0][who] - ref["pagerank"][k][who]
        if name.startswith("rank_num_neighbors_diff_"):
            k = int(name.split("_")[4])
            return ref["rank_deg_diff"][k][w[name[-1]]]
        if name.startswith("rank_num_neighbors_2000"):
            return ref["rank_deg_2000"][w[name[-1]]]
        if name.startswith("rank_num_neighbors") and "year" in name:
            k = int(name.split("_")[3])
            return ref["rank_deg"][k][w[name[-1]]]
        if name.startswith("rank_num_neighbors"):
            return ref["rank_deg"][0][w[name[-1]]]
        raise AssertionError(f"unmapped column {name}")

    exact = [c for c in FEATURE_COLUMNS if c.startswith("rank_") or c in ("u", "v")]
    for name in FEATURE_COLUMNS:
        col = matrix.column(name)
        for i, (u, v) in enumerate(pairs):
            want = expected_value(name, u, v)
            got = col[i]
            if isinstance(want, float) and np.isnan(want):
                assert np.isnan(got), name
            elif name in exact:
                assert got == want, name
            else:
                assert got == pytest.approx(want, abs=1e-10), name
    watch.done(
        "feature catalog names + per-column recomputation",
        "41 columns on a 500-vertex graph: ranks exact, pagerank/jaccard within 1e-10",
    )


def test_blend_identity_and_arithmetic(tmp_path):
    watch = Stopwatch(10)
    rng = np.random.default_rng(131)
    n = 500
    pairs = np.column_stack([np.arange(n), np.arange(n) + n + 1])
    labels = rng.integers(0, 2, size=n)
    labels[0], labels[1] = 1, 0
    scores = rng.random(n)
    single = tmp_path / "single.tsv"
    write_score_file(single, pairs, scores)
    blended = blend(BlendSpec(inputs=((str(single), 1.0),)))
    file_scores = read_score_file(single).scores
    assert auc(blended.scores, labels) == auc(file_scores, labels)

    others = []
    for i in range(3):
        path = tmp_path / f"m{i}.tsv"
        write_score_file(path, pairs, rng.random(n))
        others.append(str(path))
    weights = (0.5, 1.25, 2.25)
    multi = blend(BlendSpec(inputs=tuple(zip(others, weights))))
    direct = sum(
        (w / sum(weights)) * read_score_file(p).scores ** 3
        for p, w in zip(others, weights)
    )
    assert np.max(np.abs(multi.scores - direct)) <= 1e-12
    watch.done(
        "blend identity + arithmetic",
        "single-input power-3 blend leaves AUC exactly unchanged; "
        "3-input blend matches direct arithmetic within 1e-12",
    )


def test_end_to_end_pipeline_auc(tmp_path, capsys):
    watch = Stopwatch(300)
    parser = build_parser()

    def call(*argv):
        args = parser.parse_args([str(a) for a in argv])
        assert args.func(resolve_config(args)) == 0

    edges = tmp_path / "edges.tsv"
    call("synth", "--out", edges, "--seed", 0)  # 2000 vertices, ~105k events
    call("split", "--edges", edges, "--t1", "2011-12-31", "--t2", "2014-12-31",
         "--seed", 1, "--out", tmp_path / "train.split")
    call("split", "--edges", edges, "--t1", "2014-12-31", "--t2", "2017-12-31",
         "--seed", 2, "--out", tmp_path / "valid.split")
    call("features", "--edges", edges, "--split", tmp_path / "train.split",
         "--t1", "2011-12-31", "--out", tmp_path / "train.features")
    call("features", "--edges", edges, "--split", tmp_path / "valid.split",
         "--t1", "2014-12-31", "--out", tmp_path / "valid.features")
    call("train", "--train-features", tmp_path / "train.features",
         "--train-split", tmp_path / "train.split",
         "--valid-features", tmp_path / "valid.features",
         "--valid-split", tmp_path / "valid.split",
         "--out", tmp_path / "model.json",
         "--max-rounds", 300, "--early-stop-rounds", 30,
         "--learning-rate", 0.1)
    call("predict", "--model", tmp_path / "model.json",
         "--features", tmp_path / "valid.features",
         "--out", tmp_path / "scores.tsv")
    capsys.readouterr()
    call("eval", "--scores", tmp_path / "scores.tsv",
         "--split", tmp_path / "valid.split")
    out = capsys.readouterr().out
    value = next(line.split()[1] for line in out.splitlines() if line.startswith("AUC "))
    assert float(value) >= 0.75
    watch.done(
        "end-to-end pipeline sanity",
        f"synth -> split -> features -> train -> predict -> eval, AUC {value} >= 0.75",
    )


@pytest.mark.skipif(
    not os.environ.get("LINKCAST_COMPETITION_DATA"),
    reason="full-scale check needs LINKCAST_COMPETITION_DATA pointing at the "
    "competition edge list (hours-scale; excluded from the default suite)",
)
def test_full_scale_competition_dataset(tmp_path, capsys):
    edges = os.environ["LINKCAST_COMPETITION_DATA"]
    parser = build_parser()

    def call(*argv):
        args = parser.parse_args([str(a) for a in argv])
        assert args.func(resolve_config(args)) == 0
        return capsys.readouterr().out

    out = call("split", "--edges", edges, "--t1", "2011-12-31",
               "--t2", "2014-12-31", "--target-size", 10_000_000,
               "--out", tmp_path / "train.split")
    assert "1275503 positive" in out
    out = call("split", "--edges", edges, "--t1", "2014-12-31",
               "--t2", "2017-12-31", "--target-size", 10_000_000,
               "--out", tmp_path / "valid.split")
    assert "3724986 positive" in out
    call("features", "--edges", edges, "--split", tmp_path / "train.split",
         "--t1", "2011-12-31", "--out", tmp_path / "train.features")
    call("features", "--edges", edges, "--split", tmp_path / "valid.split",
         "--t1", "2014-12-31", "--out", tmp_path / "valid.features")
    call("train", "--train-features", tmp_path / "train.features",
         "--train-split", tmp_path / "train.split",
         "--valid-features", tmp_path / "valid.features",
         "--valid-split", tmp_path / "valid.split",
         "--out", tmp_path / "model.json")
    call("predict", "--model", tmp_path / "model.json",
         "--features", tmp_path / "valid.features",
         "--out", tmp_path / "scores.tsv")
    out = call("eval", "--scores", tmp_path / "scores.tsv",
               "--split", tmp_path / "valid.split")
    value = next(line.split()[1] for line in out.splitlines() if line.startswith("AUC "))
    assert abs(float(value) - 0.9029) <= 0.005
    print(f"[PASS] full-scale competition run: AUC {value} within 0.9029 +/- 0.005")
