"""Missing-value fill and per-column z-scoring with stored statistics.

Missing entries become 0 first; each column is then centered and scaled
by the mean and population standard deviation of the (filled) training
matrix.  The fitted statistics are reused verbatim on validation and
test inputs so every consumer sees the same affine map.  Zero-variance
columns carry no information and map to all-zeros rather than dividing
by zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Standardizer:
    """Fitted per-column statistics: apply with :meth:`transform`."""

    mean: np.ndarray
    std: np.ndarray  # population std of the filled training column; 0 kept as-is

    @classmethod
    def fit(cls, values: np.ndarray) -> "Standardizer":
        filled = _filled(values)
        if filled.shape[0] == 0:
            raise ValueError("cannot fit a standardizer on an empty matrix")
        return cls(filled.mean(axis=0), filled.std(axis=0))

    def transform(self, values: np.ndarray) -> np.ndarray:
        filled = _filled(values)
        if filled.shape[1] != self.mean.size:
            raise ValueError(
                f"expected {self.mean.size} columns, got {filled.shape[1]}"
            )
        scale = np.where(self.std == 0.0, 1.0, self.std)
        out = (filled - self.mean) / scale
        out[:, self.std == 0.0] = 0.0
        return out


def fit_transform(values: np.ndarray) -> tuple[np.ndarray, Standardizer]:
    scaler = Standardizer.fit(values)
    return scaler.transform(values), scaler


def _filled(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return np.where(np.isnan(values), 0.0, values)
