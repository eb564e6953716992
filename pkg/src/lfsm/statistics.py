"""Sample statistics of a path: higher-order increments, power variations,
empirical characteristic functions and the power-variation ratio."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError, ShapeError
from .kernel import IncrementSpec
from .simulate import Frequency, SamplePath

__all__ = [
    "IncrementSeries",
    "increments",
    "power_variation",
    "ecf_low",
    "ecf_high",
    "ratio_statistic",
    "NEG_POWER_GUARD",
]

NEG_POWER_GUARD = 1e-30


@dataclass(frozen=True)
class IncrementSeries:
    """``Delta_{i,k}^r X`` for ``i = rk..n`` together with its provenance."""

    values: np.ndarray
    spec: IncrementSpec
    frequency: Frequency
    n: int

    def __post_init__(self):
        if self.values.size != self.n - self.spec.r * self.spec.k + 1:
            raise ShapeError("increment series length must be n - rk + 1")


def _diff(x: np.ndarray, k: int, r: int) -> np.ndarray:
    n = x.size - 1
    if n < r * k:
        raise ShapeError(f"need n >= rk = {r * k}, got n = {n}")
    out = np.zeros(n - r * k + 1)
    for j in range(k + 1):
        lo = r * k - r * j
        out += (-1) ** j * math.comb(k, j) * x[lo:lo + out.size]
    return out


def increments(path: SamplePath, spec: IncrementSpec) -> IncrementSeries:
    """k-th order increments at step r of the observed path."""
    return IncrementSeries(_diff(path.values, spec.k, spec.r), spec, path.frequency, path.n)


def _abs_power_sum(v: np.ndarray, p: float) -> float:
    a = np.abs(v)
    if p < 0.0 and np.any(a < NEG_POWER_GUARD):
        raise DegenerateInputError(
            "zero increments make a negative power variation undefined (constant or degenerate input)"
        )
    return float(np.sum(a**p))


def _check_power(p: float) -> None:
    if p == 0.0 or not -0.5 < p < 1.0:
        raise DomainError(f"power must lie in (-1/2, 0) or (0, 1), got {p}")


def power_variation(series: IncrementSeries, p: float, scale_exponent: float | None = None) -> float:
    """Sample mean of ``|increment|**p``.

    High-frequency increments are first multiplied by ``n**scale_exponent``
    (the plug-in self-similarity index), which must then be supplied.
    """
    _check_power(p)
    mean = _abs_power_sum(series.values, p) / series.values.size
    if series.frequency is Frequency.HIGH:
        if scale_exponent is None:
            raise DomainError("high-frequency power variation needs scale_exponent")
        mean *= float(series.n) ** (p * scale_exponent)
    return mean


def _ecf(v: np.ndarray, t: float) -> float:
    if not t > 0.0:
        raise DomainError("t must be positive")
    return float(np.mean(np.cos(t * v)))


def ecf_low(path: SamplePath, t: float, k: int) -> float:
    """Empirical characteristic function of the unit-step k-th increments."""
    if path.frequency is not Frequency.LOW:
        raise DomainError("ecf_low needs a low-frequency path")
    return _ecf(_diff(path.values, k, 1), t)


def ecf_high(path: SamplePath, t: float, H_plugin: float, k: int) -> float:
    """Empirical characteristic function of ``n**H_plugin`` times the k-th increments."""
    if path.frequency is not Frequency.HIGH:
        raise DomainError("ecf_high needs a high-frequency path")
    return _ecf(_diff(path.values, k, 1) * float(path.n) ** H_plugin, t)


def ratio_statistic(path: SamplePath, p: float, k: int) -> float:
    """``sum_{i>=2k} |Delta^2_{i,k} X|**p / sum_{i>=k} |Delta^1_{i,k} X|**p``.

    Raw sums, as the definition prescribes; the numerator has ``k`` fewer
    terms. The statistic is invariant to rescaling the path, so it is the
    same for high- and low-frequency observations of one realisation.
    """
    _check_power(p)
    if path.n < 2 * k:
        raise ShapeError(f"need n >= 2k = {2 * k}, got n = {path.n}")
    num = _abs_power_sum(_diff(path.values, k, 2), p)
    den = _abs_power_sum(_diff(path.values, k, 1), p)
    if den == 0.0 or not math.isfinite(den):
        raise DegenerateInputError("power-variation denominator is zero or infinite")
    return num / den
