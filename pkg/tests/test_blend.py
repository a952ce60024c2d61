"""Score-file parsing and power-transform blending."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linkcast.blend import (
    BlendSpec,
    ScoreFileFormatError,
    blend,
    read_score_file,
    write_score_file,
)
from linkcast.metrics import auc

PAIRS = np.array([[0, 1], [0, 2], [1, 2], [2, 3]])


def score_file(path, pairs, scores):
    write_score_file(path, np.asarray(pairs), np.asarray(scores, dtype=np.float64))
    return str(path)


# --- file format -----------------------------------------------------------------


def test_write_read_round_trip(tmp_path):
    scores = np.array([0.0, 0.123456789012, 1.0, 0.5])
    path = score_file(tmp_path / "a.tsv", PAIRS, scores)
    loaded = read_score_file(path)
    assert np.array_equal(loaded.pairs, PAIRS)
    # 12 significant digits: relative error below 1e-11
    assert loaded.scores == pytest.approx(scores, rel=1e-11, abs=1e-12)


def test_read_skips_blanks_and_comments(tmp_path):
    path = tmp_path / "a.tsv"
    path.write_text("u v score\n\n# comment\n0 1 0.25\n")
    loaded = read_score_file(path)
    assert loaded.pairs.tolist() == [[0, 1]]
    assert loaded.scores.tolist() == [0.25]


@pytest.mark.parametrize(
    "body,match",
    [
        ("x y score\n0 1 0.5\n", "expected header"),
        ("u v score\n0 1\n", "expected 'u v score'"),
        ("u v score\n0 one 0.5\n", "expected 'u v score'"),
        ("u v score\n2 2 0.5\n", "self-pair"),
        ("u v score\n-1 2 0.5\n", "out of range"),
        ("u v score\n0 1 1.5\n", "outside"),
        ("u v score\n0 1 -0.1\n", "outside"),
        ("u v score\n", "no score rows"),
    ],
)
def test_read_rejects_malformed_files(tmp_path, body, match):
    path = tmp_path / "bad.tsv"
    path.write_text(body)
    with pytest.raises(ScoreFileFormatError, match=match):
        read_score_file(path)


def test_error_messages_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("u v score\n0 1 0.5\n3 3 0.5\n")
    with pytest.raises(ScoreFileFormatError, match=r"bad\.tsv:3"):
        read_score_file(path)


def test_write_validates_shapes(tmp_path):
    with pytest.raises(ValueError):
        write_score_file(tmp_path / "x.tsv", np.zeros((2, 3)), np.zeros(2))
    with pytest.raises(ValueError):
        write_score_file(tmp_path / "x.tsv", PAIRS, np.zeros(3))


# --- spec validation ---------------------------------------------------------------


def test_blend_spec_validation():
    with pytest.raises(ValueError, match="at least one"):
        BlendSpec(inputs=())
    with pytest.raises(ValueError, match="nonnegative"):
        BlendSpec(inputs=(("a", -1.0),))
    with pytest.raises(ValueError, match="positive"):
        BlendSpec(inputs=(("a", 0.0), ("b", 0.0)))


# --- blending --------------------------------------------------------------------


def test_fixed_point_at_one(tmp_path):
    a = score_file(tmp_path / "a.tsv", PAIRS, [1.0, 1.0, 1.0, 1.0])
    b = score_file(tmp_path / "b.tsv", PAIRS, [1.0, 1.0, 1.0, 1.0])
    out = blend(BlendSpec(inputs=((a, 0.3), (b, 0.9))))
    assert out.scores.tolist() == [1.0, 1.0, 1.0, 1.0]


def test_single_input_cubes_scores(tmp_path):
    a = score_file(tmp_path / "a.tsv", PAIRS, [0.5, 0.0, 1.0, 0.25])
    out = blend(BlendSpec(inputs=((a, 1.0),)))
    assert out.scores == pytest.approx([0.125, 0.0, 1.0, 0.015625], abs=1e-12)
    assert np.array_equal(out.pairs, PAIRS)


def test_equal_weight_pair_example(tmp_path):
    a = score_file(tmp_path / "a.tsv", [[0, 1]], [0.8])
    b = score_file(tmp_path / "b.tsv", [[0, 1]], [0.2])
    out = blend(BlendSpec(inputs=((a, 1.0), (b, 1.0))))
    assert out.scores[0] == pytest.approx(0.260, abs=1e-12)


def test_weights_are_normalized(tmp_path):
    a = score_file(tmp_path / "a.tsv", [[0, 1]], [0.8])
    b = score_file(tmp_path / "b.tsv", [[0, 1]], [0.2])
    small = blend(BlendSpec(inputs=((a, 0.1), (b, 0.1))))
    large = blend(BlendSpec(inputs=((a, 10.0), (b, 10.0))))
    assert small.scores[0] == pytest.approx(large.scores[0], abs=1e-15)


def test_alignment_by_pair_key_not_row_order(tmp_path):
    scores_a = [0.1, 0.2, 0.3, 0.4]
    a = score_file(tmp_path / "a.tsv", PAIRS, scores_a)
    # same pairs, reversed rows, swapped endpoint order
    rev_pairs = PAIRS[::-1, ::-1]
    scores_b = [0.9, 0.8, 0.7, 0.6]
    b = score_file(tmp_path / "b.tsv", rev_pairs, scores_b)
    out = blend(BlendSpec(inputs=((a, 1.0), (b, 1.0))))
    assert np.array_equal(out.pairs, PAIRS)  # first input's order wins
    expected = 0.5 * np.asarray(scores_a) ** 3 + 0.5 * np.asarray(scores_b[::-1]) ** 3
    assert out.scores == pytest.approx(expected, abs=1e-15)


def test_input_permutation_symmetry(tmp_path):
    rng = np.random.default_rng(3)
    a = score_file(tmp_path / "a.tsv", PAIRS, rng.random(4))
    b = score_file(tmp_path / "b.tsv", PAIRS, rng.random(4))
    ab = blend(BlendSpec(inputs=((a, 0.7), (b, 0.3))))
    ba = blend(BlendSpec(inputs=((b, 0.3), (a, 0.7))))
    order = np.lexsort((ab.pairs[:, 1], ab.pairs[:, 0]))
    order2 = np.lexsort((ba.pairs[:, 1], ba.pairs[:, 0]))
    assert ab.scores[order] == pytest.approx(ba.scores[order2], abs=1e-15)


def test_pair_set_mismatch_names_first_divergent_pair(tmp_path):
    a = score_file(tmp_path / "a.tsv", PAIRS, [0.1, 0.2, 0.3, 0.4])
    other = np.array([[0, 1], [0, 2], [1, 3], [2, 3]])
    b = score_file(tmp_path / "b.tsv", other, [0.1, 0.2, 0.3, 0.4])
    with pytest.raises(ScoreFileFormatError, match=r"\(1, 2\)|\(1, 3\)"):
        blend(BlendSpec(inputs=((a, 1.0), (b, 1.0))))


def test_duplicate_pair_rejected(tmp_path):
    dup = np.array([[0, 1], [1, 0]])
    a = score_file(tmp_path / "a.tsv", dup, [0.1, 0.2])
    with pytest.raises(ScoreFileFormatError, match=r"duplicate pair \(0, 1\)|duplicate pair \(1, 0\)"):
        blend(BlendSpec(inputs=((a, 1.0),)))


def test_single_input_blend_preserves_auc(tmp_path):
    rng = np.random.default_rng(8)
    n = 200
    pairs = np.column_stack([np.arange(n), np.arange(n) + 1 + n])
    scores = rng.random(n)
    labels = rng.integers(0, 2, size=n)
    labels[0], labels[1] = 0, 1  # both classes present
    path = score_file(tmp_path / "a.tsv", pairs, scores)
    out = blend(BlendSpec(inputs=((path, 1.0),)))
    loaded = read_score_file(path)  # compare post-serialization scores
    assert auc(out.scores, labels) == auc(loaded.scores, labels)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=8),
    st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=8),
    st.floats(0.01, 10.0),
    st.floats(0.01, 10.0),
)
def test_blend_stays_in_unit_interval(tmp_path_factory, sa, sb, wa, wb):
    k = min(len(sa), len(sb))
    pairs = np.column_stack([np.arange(k), np.arange(k) + k + 1])
    tmp = tmp_path_factory.mktemp("blend")
    a = score_file(tmp / "a.tsv", pairs, sa[:k])
    b = score_file(tmp / "b.tsv", pairs, sb[:k])
    out = blend(BlendSpec(inputs=((a, wa), (b, wb))))
    assert ((out.scores >= 0.0) & (out.scores <= 1.0)).all()


def test_blend_matches_direct_arithmetic(tmp_path):
    rng = np.random.default_rng(13)
    n = 50
    pairs = np.column_stack([np.arange(n), np.arange(n) + n + 1])
    s = [rng.random(n), rng.random(n), rng.random(n)]
    w = [0.5, 1.5, 2.0]
    paths = [score_file(tmp_path / f"{i}.tsv", pairs, s[i]) for i in range(3)]
    out = blend(BlendSpec(inputs=tuple(zip(paths, w))))
    loaded = [read_score_file(p).scores for p in paths]
    expected = sum((wi / 4.0) * si**3 for wi, si in zip(w, loaded))
    assert out.scores == pytest.approx(expected, abs=1e-12)
