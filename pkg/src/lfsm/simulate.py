"""Synthesis of LFSM sample paths.

Unit increments ``Y_j = X_j - X_{j-1}`` are stable integrals of the kernel
``h_{1,1}(j - s)``. They are approximated by a moving average over a mesh of
width ``1/m`` truncated after ``M`` unit steps:

    Y_j = sigma * sum_{i < m M} c_i Z_{jm - i},     Z i.i.d. standard SaS,

with one weight per mesh cell. The weight is the signed L^alpha mass of the
kernel on its cell, ``c_i = sign * (int_{i/m}^{(i+1)/m} |h_{1,1}|**alpha)**(1/alpha)``,
so the law of Y_j is exact apart from the truncated tail beyond ``M``. The
path is the cumulative sum of Y with ``X_0 = 0``.

Because only every m-th output of the full-mesh convolution is needed, the
noise is laid out as an ``(n + M - 1) x m`` matrix (one column per phase of
the mesh) and each column is convolved with its own polyphase slice of the
weights via FFT along the time axis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import fft

from .errors import DomainError, ResourceError
from .kernel import LfsmParams, _GL_HI, _depth, _h_abs_pow, _h_norm_power, _nodes, _panels_graded, DEFAULT_QUAD
from .stable import SeedSpec, StableLaw, make_rng, sample_sas

__all__ = [
    "Frequency",
    "SamplePath",
    "SimConfig",
    "simulate_low",
    "simulate_high",
    "kernel_cell_weights",
    "truncation_tail_fraction",
    "to_high",
    "write_path_csv",
    "read_path_csv",
]

DEFAULT_MAX_NOISE = 1 << 27  # ~134M noise variables, about 1 GiB of float64


class Frequency(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class SamplePath:
    """Observations of X on a regular grid.

    ``values[i]`` is ``X_i`` (low frequency) or ``X_{i/n}`` (high frequency)
    for ``i = 0..n``; ``values[0]`` is always 0.
    """

    values: np.ndarray
    frequency: Frequency
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise DomainError("a path needs at least two grid points")
        if v[0] != 0.0:
            raise DomainError("values[0] must be 0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "frequency", Frequency(self.frequency))

    @property
    def n(self) -> int:
        return self.values.size - 1


@dataclass(frozen=True)
class SimConfig:
    """Discretisation and seeding of the moving-average synthesis.

    ``mesh_m`` is the number of mesh cells per unit step and
    ``truncation_M`` the kernel memory in unit steps. ``max_noise`` caps the
    number of noise variables ``m (n + M)`` a single path may use.
    """

    mesh_m: int = 256
    truncation_M: int = 600
    seed: SeedSpec = SeedSpec()
    max_noise: int = DEFAULT_MAX_NOISE

    def __post_init__(self):
        if self.mesh_m < 16:
            raise DomainError("mesh_m must be at least 16")
        if self.truncation_M < 64:
            raise DomainError("truncation_M must be at least 64")
        if self.max_noise < 1:
            raise DomainError("max_noise must be positive")


@lru_cache(maxsize=32)
def _cell_weights(alpha: float, H: float, m: int, M: int) -> np.ndarray:
    a = H - 1.0 / alpha
    out = np.empty(m * M)
    # cells inside (0, 1): |h|**alpha = x**(alpha H - 1) integrates exactly
    edges = np.arange(m + 1) / m
    out[:m] = np.diff(edges ** (alpha * H)) / (alpha * H)
    if M > 1:
        # first cell after the knot at 1 is graded toward it (offsets from 1
        # keep x - 1 exact); the remaining cells are smooth on their support
        da, db, dbase = _panels_graded(0.0, 1.0 / m, _depth(min(alpha * a, 0.0), 1e-16))
        keep = dbase == 0.0  # left half, graded toward the knot
        da = np.concatenate([da[keep], [0.5 / m]])
        db = np.concatenate([db[keep], [1.0 / m]])
        x, w = _nodes(da, db, _GL_HI)
        out[m] = float(np.dot(w, _h_abs_pow(x, 1, 1, a, alpha, 1.0)))
        lo = np.arange(m + 1, m * M) / m
        x, w = _nodes(lo, lo + 1.0 / m, _GL_HI)
        vals = _h_abs_pow(x, 1, 1, a, alpha)
        out[m + 1:] = (vals * w).reshape(-1, _GL_HI[0].size).sum(axis=1)
    weights = out ** (1.0 / alpha)
    if a < 0.0:
        # h_{1,1} = x**a - (x-1)**a is negative beyond the knot when a < 0
        weights[m:] = -weights[m:]
    weights.setflags(write=False)
    return weights


def kernel_cell_weights(params: LfsmParams, mesh_m: int, truncation_M: int) -> np.ndarray:
    """Signed per-cell L^alpha masses of ``h_{1,1}`` on ``[0, M)`` (length ``m M``)."""
    return _cell_weights(float(params.alpha), float(params.H), int(mesh_m), int(truncation_M))


def truncation_tail_fraction(params: LfsmParams, mesh_m: int, truncation_M: int) -> float:
    """Fraction of ``||h_{1,1}||_alpha**alpha`` beyond the truncation point."""
    w = kernel_cell_weights(params, mesh_m, truncation_M)
    total = _h_norm_power(1, 1, float(params.alpha), float(params.H), DEFAULT_QUAD)
    kept = float(np.sum(np.abs(w) ** params.alpha))
    return max(0.0, 1.0 - kept / total)


# columns of the noise matrix processed per FFT block; bounds peak memory
_COL_BLOCK = 32


@lru_cache(maxsize=8)
def _cell_weights_fft(alpha: float, H: float, m: int, M: int, nfft: int) -> np.ndarray:
    c = _cell_weights(alpha, H, m, M).reshape(M, m)  # c[l, q] weights cell l*m + q
    out = fft.rfft(c, nfft, axis=0)
    out.setflags(write=False)
    return out


def _unit_increments(params: LfsmParams, n: int, cfg: SimConfig) -> np.ndarray:
    m, M = cfg.mesh_m, cfg.truncation_M
    rows = n + M - 1
    if m * rows > cfg.max_noise:
        raise ResourceError(
            f"simulation needs {m * rows} noise variables, above the cap of {cfg.max_noise}"
        )
    nfft = fft.next_fast_len(rows + M - 1, real=True)
    cf_all = _cell_weights_fft(float(params.alpha), float(params.H), m, M, nfft)
    rng = make_rng(cfg.seed)
    law = StableLaw(params.alpha, params.sigma)
    acc = np.zeros(nfft // 2 + 1, dtype=complex)
    for q0 in range(0, m, _COL_BLOCK):
        q1 = min(m, q0 + _COL_BLOCK)
        z = sample_sas(law, rows * (q1 - q0), rng).reshape(rows, q1 - q0)
        zf = fft.rfft(z, nfft, axis=0)
        acc += np.einsum("ij,ij->i", zf, cf_all[:, q0:q1])
    full = fft.irfft(acc, nfft)
    # 'valid' part: outputs whose window lies entirely inside the noise
    return full[M - 1:M - 1 + n]


def simulate_low(params: LfsmParams, n: int, cfg: SimConfig = SimConfig()) -> SamplePath:
    """Simulate ``X_0, X_1, ..., X_n`` (unit spacing)."""
    if n < 2:
        raise DomainError("n must be at least 2")
    y = _unit_increments(params, int(n), cfg)
    values = np.empty(n + 1)
    values[0] = 0.0
    np.cumsum(y, out=values[1:])
    diag = {
        "mesh_m": cfg.mesh_m,
        "truncation_M": cfg.truncation_M,
        "truncation_tail_fraction": truncation_tail_fraction(params, cfg.mesh_m, cfg.truncation_M),
        "seed": (cfg.seed.master_seed, cfg.seed.stream_index),
    }
    return SamplePath(values, Frequency.LOW, diag)


def to_high(path: SamplePath, H: float) -> SamplePath:
    """Turn a low-frequency path on ``0..n`` into one on ``0, 1/n, ..., 1``.

    By H-self-similarity ``(X_{i/n}) = n**(-H) (X_i)`` in law.
    """
    if path.frequency is not Frequency.LOW:
        raise DomainError("expected a low-frequency path")
    return SamplePath(path.values * float(path.n) ** (-H), Frequency.HIGH, dict(path.diagnostics))


def simulate_high(params: LfsmParams, n: int, cfg: SimConfig = SimConfig()) -> SamplePath:
    """Simulate ``X_0, X_{1/n}, ..., X_1`` via self-similar rescaling."""
    return to_high(simulate_low(params, n, cfg), params.H)


def write_path_csv(path: SamplePath, target) -> Path:
    """Write ``index,value`` rows (one per grid point) to ``target``."""
    target = Path(target)
    with target.open("w", newline="") as fh:
        fh.write("index,value\n")
        # repr of a Python float is the shortest exact round-trip form
        fh.writelines(f"{i},{v!r}\n" for i, v in enumerate(path.values.tolist()))
    return target


def read_path_csv(source, frequency: Frequency | str) -> SamplePath:
    """Read an ``index,value`` CSV.

    The series is shifted so its first value is 0; every statistic here is
    built from increments, so the shift changes nothing downstream.
    """
    data = np.loadtxt(source, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise DomainError("expected two columns: index,value")
    values = data[:, 1]
    if not np.all(np.isfinite(values)):
        raise DomainError("path contains non-finite values")
    if not np.array_equal(data[:, 0], np.arange(values.size)):
        raise DomainError("index column must be 0, 1, ..., n")
    return SamplePath(values - values[0], Frequency(frequency))
