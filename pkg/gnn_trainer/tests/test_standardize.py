"""Fill-then-z-score standardization with stored statistics."""

import numpy as np
import pytest

from gnn_trainer import Standardizer, fit_transform


def test_integer_column_example():
    out, scaler = fit_transform(np.array([[1.0], [2.0], [3.0]]))
    expected = (np.array([1.0, 2.0, 3.0]) - 2.0) / np.sqrt(2.0 / 3.0)
    assert np.allclose(out[:, 0], expected, atol=1e-12)
    assert np.allclose(out[:, 0], [-1.2247, 0.0, 1.2247], atol=1e-4)
    assert scaler.mean[0] == 2.0


def test_all_missing_column_becomes_zero():
    values = np.column_stack([np.full(5, np.nan), np.arange(5.0)])
    out, _ = fit_transform(values)
    assert (out[:, 0] == 0.0).all()


def test_constant_column_becomes_zero():
    values = np.column_stack([np.full(6, 3.5), np.arange(6.0)])
    out, scaler = fit_transform(values)
    assert (out[:, 0] == 0.0).all()
    assert scaler.std[0] == 0.0
    # stored zero std also zeroes *differing* values seen later
    later = scaler.transform(np.array([[9.0, 1.0]]))
    assert later[0, 0] == 0.0


def test_training_moments_within_tolerance():
    rng = np.random.default_rng(5)
    values = rng.normal(3.0, 2.5, size=(200, 8))
    values[rng.random(values.shape) < 0.2] = np.nan
    values[:, 3] = 7.0  # zero variance
    values[:, 6] = np.nan  # all missing
    out, scaler = fit_transform(values)
    assert not np.isnan(out).any()
    assert np.abs(out.mean(axis=0)).max() <= 1e-6
    live = scaler.std != 0.0
    assert np.abs(out[:, live].std(axis=0) - 1.0).max() <= 1e-6
    assert (out[:, ~live] == 0.0).all()


def test_stored_statistics_are_idempotent():
    rng = np.random.default_rng(6)
    values = rng.normal(size=(50, 4))
    values[rng.random(values.shape) < 0.1] = np.nan
    first, scaler = fit_transform(values)
    assert np.array_equal(first, scaler.transform(values))


def test_transform_uses_training_statistics():
    _, scaler = fit_transform(np.array([[1.0], [2.0], [3.0]]))
    std = np.sqrt(2.0 / 3.0)
    out = scaler.transform(np.array([[0.0], [4.0], [np.nan]]))
    # the missing entry becomes 0 first and is then z-scored like any value
    assert np.allclose(out[:, 0], [(0 - 2) / std, (4 - 2) / std, (0 - 2) / std], atol=1e-12)


def test_shape_validation():
    with pytest.raises(ValueError, match="empty"):
        Standardizer.fit(np.empty((0, 3)))
    with pytest.raises(ValueError, match="2-d"):
        Standardizer.fit(np.arange(4.0))
    _, scaler = fit_transform(np.ones((3, 2)) * np.arange(3.0)[:, None])
    with pytest.raises(ValueError, match="expected 2 columns"):
        scaler.transform(np.ones((3, 5)))
