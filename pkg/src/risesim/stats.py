"""Empirical CDFs and lower quantiles of attenuation samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CdfCurve:
    values: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.probabilities.shape or self.values.size == 0:
            raise ValueError("CDF needs equal-length, non-empty value and probability arrays")

    def __len__(self):
        return self.values.size

    def at(self, v: float) -> float:
        """Fraction of samples <= v."""
        return np.searchsorted(self.values, v, side="right") / self.values.size


def _samples(data) -> np.ndarray:
    vals = getattr(data, "attenuation_db", data)
    vals = np.asarray(vals, dtype=float).ravel()
    return vals[np.isfinite(vals)]


def cdf(data) -> CdfCurve:
    """Empirical CDF over the reachable cells of a map (or any sample array).

    Unreachable (inf) and excluded (nan) cells are dropped. The i-th sorted
    sample gets probability i/n.
    """
    vals = np.sort(_samples(data), kind="stable")
    n = vals.size
    if n == 0:
        raise ValueError("no reachable cells to build a CDF from")
    return CdfCurve(vals, np.arange(1, n + 1) / n)


def percentile(curve: CdfCurve, q: float) -> float:
    """Smallest sample v with CDF(v) >= q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    i = int(np.searchsorted(curve.probabilities, q, side="left"))
    return float(curve.values[min(i, curve.values.size - 1)])


def median(data) -> float:
    return percentile(data if isinstance(data, CdfCurve) else cdf(data), 0.5)
