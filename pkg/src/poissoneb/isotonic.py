"""Weighted isotonic regression by pool-adjacent-violators.

Exact block-merging PAVA: the unique least-squares projection onto
nondecreasing sequences, no tolerance knobs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["WeightedSeries", "pava", "isotonic_fit"]


@dataclass(frozen=True)
class WeightedSeries:
    """Points (x_i, v_i, w_i) with strictly increasing integer x and w > 0."""

    xs: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.int64)
        vs = np.asarray(self.values, dtype=float)
        ws = np.asarray(self.weights, dtype=float)
        if xs.size == 0:
            raise ValueError("empty series")
        if not (xs.size == vs.size == ws.size):
            raise ValueError("xs, values, weights must have equal length")
        if (np.diff(xs) <= 0).any():
            raise ValueError("xs must be strictly increasing")
        if (ws <= 0).any():
            raise ValueError("weights must be positive")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vs)
        object.__setattr__(self, "weights", ws)


def isotonic_fit(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Minimize sum w_i (f_i - v_i)^2 over nondecreasing f.

    Stack-based PAVA: adjacent violating blocks are pooled into their
    weighted mean until the block means are strictly increasing.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.size == 0:
        raise ValueError("empty series")
    means: list[float] = []
    wsum: list[float] = []
    count: list[int] = []
    for v, w in zip(values, weights):
        means.append(float(v))
        wsum.append(float(w))
        count.append(1)
        while len(means) > 1 and means[-2] >= means[-1]:
            m1, w1, c1 = means.pop(), wsum.pop(), count.pop()
            m0, w0, c0 = means.pop(), wsum.pop(), count.pop()
            w01 = w0 + w1
            means.append((m0 * w0 + m1 * w1) / w01)
            wsum.append(w01)
            count.append(c0 + c1)
    return np.repeat(means, count)


def pava(series: WeightedSeries) -> np.ndarray:
    """Weighted isotonic projection of a series; output is nondecreasing."""
    return isotonic_fit(series.values, series.weights)
