"""Symmetric alpha-stable sampling and the special-function constant a_p."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = ["StableLaw", "SeedSpec", "make_rng", "sample_sas", "a_p", "sas_abs_moment"]


@dataclass(frozen=True)
class StableLaw:
    """SaS law with characteristic function ``exp(-sigma**alpha * |t|**alpha)``."""

    alpha: float
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.sigma > 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one reproducible random stream.

    The pair is fed to :class:`numpy.random.SeedSequence` as entropy plus a
    spawn key, so streams with different ``stream_index`` are statistically
    independent and do not depend on the order in which they are drawn.
    """

    master_seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise DomainError("stream_index must be nonnegative")


def make_rng(seed: SeedSpec) -> np.random.Generator:
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.stream_index,))
    return np.random.Generator(np.random.PCG64(ss))


def _cms(alpha: float, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Chambers-Mallows-Stuck, symmetric case; v ~ U(-pi/2, pi/2), w ~ Exp(1)
    if alpha == 1.0:
        return np.tan(v)
    # sin(av) / cos(v)**(1/a) * (cos((1-a)v) / w)**((1-a)/a), with the two
    # powers merged into one exp/log pass and temporaries reused
    b = (1.0 - alpha) / alpha
    t = np.cos((1.0 - alpha) * v)
    np.divide(t, w, out=t)
    np.log(t, out=t)
    t *= b
    c = np.cos(v)
    np.log(c, out=c)
    c *= 1.0 / alpha
    t -= c
    np.exp(t, out=t)
    np.multiply(v, alpha, out=c)
    np.sin(c, out=c)
    t *= c
    return t


def sample_sas(law: StableLaw, n: int, seed: SeedSpec | np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. SaS variables.

    Parameters
    ----------
    law : StableLaw
        Index and scale of the law.
    n : int
        Number of draws.
    seed : SeedSpec or numpy Generator
        A :class:`SeedSpec` gives bitwise reproducible output; a generator
        is consumed in place (used when several draws share one stream).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rng = make_rng(seed) if isinstance(seed, SeedSpec) else seed
    out = np.empty(n)
    # chunking keeps the CMS temporaries bounded for very long noise vectors
    chunk = 1 << 22
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        v = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, m)
        w = rng.standard_exponential(m)
        out[start:start + m] = _cms(law.alpha, v, w)
    if law.sigma != 1.0:
        out *= law.sigma
    return out


def a_p(p: float) -> float:
    """Normalising constant linking ``|x|**p`` to characteristic functions.

    For ``p`` in (-1, 0) this is the Gamma ratio
    ``sqrt(2 pi) Gamma(-p/2) / (2**(p+1/2) Gamma((p+1)/2))``; for ``p`` in
    (0, 1) it is ``int (1 - cos y) |y|**(-1-p) dy = 2 Gamma(1-p) cos(pi p/2) / p``.
    """
    p = float(p)
    if not (-1.0 < p < 1.0) or p == 0.0:
        raise DomainError(f"a_p needs p in (-1, 0) or (0, 1), got {p}")
    if p < 0.0:
        return math.sqrt(2.0 * math.pi) * math.gamma(-p / 2.0) / (
            2.0 ** (p + 0.5) * math.gamma((p + 1.0) / 2.0)
        )
    return 2.0 * math.gamma(1.0 - p) * math.cos(0.5 * math.pi * p) / p


def sas_abs_moment(p: float, alpha: float, scale: float = 1.0) -> float:
    """``E|Y|**p`` for Y SaS with the given scale, valid for -1 < p < alpha.

    Uses the classical closed form
    ``scale**p 2**p Gamma((1+p)/2) Gamma(1-p/alpha) / (sqrt(pi) Gamma(1-p/2))``.
    """
    if not (-1.0 < p < alpha):
        raise DomainError(f"moment of order {p} is infinite for alpha={alpha}")
    if p == 0.0:
        return 1.0
    return float(
        scale**p
        * 2.0**p
        * special.gamma((1.0 + p) / 2.0)
        * special.gamma(1.0 - p / alpha)
        / (math.sqrt(math.pi) * special.gamma(1.0 - p / 2.0))
    )
