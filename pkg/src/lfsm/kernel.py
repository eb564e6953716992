"""The LFSM increment kernel and the quantities derived from it.

The k-th order increment of X at step r is a stable integral of the kernel

    h_{k,r}(x) = sum_j (-1)**j C(k, j) (x - r j)_+ ** (H - 1/alpha),

so every marginal quantity (scale, absolute moments, characteristic function)
is a function of the L^alpha norm of this kernel. Integrals over the kernel
have algebraic singularities at the knots ``0, r, ..., rk`` whenever
``H < 1/alpha`` and cusps wherever ``|h|**alpha`` crosses zero with
``alpha < 1``; they are computed with composite Gauss-Legendre rules on
panels graded geometrically toward every knot and every zero crossing, plus
an analytic power-law tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .errors import DomainError, QuadratureError
from .stable import a_p

__all__ = [
    "LfsmParams",
    "IncrementSpec",
    "QuadratureConfig",
    "h_kr",
    "h_kr_asymptotic_constant",
    "h_norm_alpha",
    "abs_power_integral",
    "mixed_norm_alpha",
    "m_pk",
    "moment_from_scale",
    "phi_theoretical",
    "U_gh",
    "rho_l",
    "theta_gh_p",
]


@dataclass(frozen=True)
class LfsmParams:
    sigma: float
    alpha: float
    H: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not 0.0 < self.H < 1.0:
            raise DomainError(f"H must lie in (0, 1), got {self.H}")

    @property
    def exponent(self) -> float:
        """Kernel exponent ``H - 1/alpha``."""
        return self.H - 1.0 / self.alpha

    @property
    def is_continuous(self) -> bool:
        return self.exponent > 0.0


@dataclass(frozen=True)
class IncrementSpec:
    k: int = 1
    r: int = 1

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k}")
        if int(self.r) != self.r or self.r < 1:
            raise DomainError(f"r must be a positive integer, got {self.r}")


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    tail_cutoff_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_cutoff_tol"):
            v = getattr(self, name)
            if not 0.0 < v <= 1e-2:
                raise DomainError(f"{name} must lie in (0, 1e-2], got {v}")


DEFAULT_QUAD = QuadratureConfig()

# ---------------------------------------------------------------------------
# kernel evaluation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _diff_moments(k: int, nterms: int) -> np.ndarray:
    # D_m = sum_j (-1)^j C(k,j) j^m, exact integers converted once
    out = []
    for m in range(nterms):
        out.append(float(sum((-1) ** j * math.comb(k, j) * j**m for j in range(k + 1))))
    return np.array(out)


_SERIES_TERMS = 64


def _h_series(x: np.ndarray, k: int, r: int, a: float) -> np.ndarray:
    # x^a * sum_{m>=k} binom(a, m) (-r/x)^m D_m ; valid for x > r k, used for x >= 4 r k
    D = _diff_moments(k, _SERIES_TERMS)
    m = np.arange(k, _SERIES_TERMS)
    coef = special.binom(a, m) * D[k:] * (-float(r)) ** m
    z = 1.0 / x
    # Horner in z, then multiply by z^k
    acc = np.zeros_like(x)
    for c in coef[::-1]:
        acc = acc * z + c
    return x**a * z**k * acc


def _h_parts(x, k: int, r: int, a: float, base=0.0) -> tuple[np.ndarray, np.ndarray]:
    """``h_{k,r}(base + x)`` as ``s * exp(a * lg)`` with ``s`` free of overflow.

    For ``a < 0`` the term of the nearest knot to the left dominates and
    may overflow on its own; it is factored out (``lg`` is the log of the
    distance to that knot) so that ``|h|**power`` can be formed in log space.
    Passing the nearest knot as ``base`` keeps the distances ``x - r j``
    exact right next to a knot.
    """
    x = np.asarray(x, dtype=float)
    base = np.broadcast_to(np.asarray(base, dtype=float), x.shape)
    full = base + x
    s = np.zeros_like(x)
    lg = np.zeros_like(x)
    far = full >= 4.0 * r * k + 4.0
    near = ~far
    if np.any(near):
        xn = x[near]
        bn = base[near]
        u = (bn[None, :] - r * np.arange(k + 1)[:, None]) + xn[None, :]
        pos = u > 0.0
        if a < 0.0:
            umin = np.where(pos, u, np.inf).min(axis=0)
            live = np.isfinite(umin)
            scale = np.where(live, umin, 1.0)
            lg[near] = np.log(scale)
        else:
            scale = np.ones_like(xn)
        ratio = np.zeros_like(u)
        np.divide(u, scale[None, :], out=ratio, where=pos)
        term = np.zeros_like(u)
        np.power(ratio, a, out=term, where=pos)
        coef = np.array([(-1) ** j * math.comb(k, j) for j in range(k + 1)], dtype=float)
        s[near] = coef @ term
    if np.any(far):
        s[far] = _h_series(full[far], k, r, a)
    return s, lg


def _h(x, k: int, r: int, a: float, base=0.0) -> np.ndarray:
    s, lg = _h_parts(x, k, r, a, base)
    return s * np.exp(a * lg)


def _h_abs_pow(x, k: int, r: int, a: float, power: float, base=0.0) -> np.ndarray:
    """``|h_{k,r}(base + x)|**power`` without intermediate overflow."""
    s, lg = _h_parts(x, k, r, a, base)
    return np.abs(s) ** power * np.exp((a * power) * lg)


def _h_sign(x, k: int, r: int, a: float, base=0.0) -> np.ndarray:
    return np.sign(_h_parts(x, k, r, a, base)[0])


def h_kr(x, spec: IncrementSpec, params: LfsmParams):
    """Evaluate the increment kernel ``h_{k,r}`` (vectorised over ``x``).

    Uses ``x_+**a = 0`` for ``x <= 0``. For large ``x`` the alternating
    binomial sum cancels catastrophically, so a convergent expansion in
    ``r/x`` is used there instead.
    """
    out = _h(x, spec.k, spec.r, params.exponent)
    return float(out) if np.ndim(out) == 0 else out


def h_kr_asymptotic_constant(spec: IncrementSpec, params: LfsmParams) -> float:
    """C with ``h_{k,r}(x) ~ C x**(H - 1/alpha - k)`` as x grows."""
    a = params.exponent
    return float(spec.r**spec.k * np.prod([a - i for i in range(spec.k)]))


# ---------------------------------------------------------------------------
# graded quadrature machinery
# ---------------------------------------------------------------------------

_RATIO = 0.25
_GL_HI = np.polynomial.legendre.leggauss(16)
_GL_LO = np.polynomial.legendre.leggauss(10)
_TAIL_LEVELS = 15  # tail panels reach 4**15 ~ 1e9 beyond the last knot


def _depth(order: float, tol: float) -> int:
    # number of geometric levels so an endpoint piece behaving like u**order
    # (order > -1) contributes less than ~tol
    eps = tol ** (1.0 / (1.0 + order))
    eps = max(eps, 1e-280)
    return min(int(math.ceil(math.log(eps) / math.log(_RATIO))), 480)


def _panels_graded(L: float, R: float, depth: int):
    """Panels on [L, R] graded geometrically toward both ends.

    Returns ``(a, b, base)``: panel ``i`` is ``[base_i + a_i, base_i + b_i]``
    where ``base_i`` is the endpoint it is graded toward, so nodes close to
    an endpoint keep full relative precision in their distance to it.
    """
    half = 0.5 * (R - L)
    offs = half * _RATIO ** np.arange(depth + 1)  # half, half/4, ...
    a = np.concatenate([offs[1:], -offs[:-1]])
    b = np.concatenate([offs[:-1], -offs[1:]])
    base = np.concatenate([np.full(depth, L), np.full(depth, R)])
    return a, b, base


def _panels_tail(B: float, levels: int = _TAIL_LEVELS):
    e = 4.0 ** np.arange(levels + 1) - 1.0
    return e[:-1], e[1:], np.full(levels, B)


def _nodes(a: np.ndarray, b: np.ndarray, rule, base=None):
    t, w = rule
    mid = 0.5 * (a + b)
    rad = 0.5 * (b - a)
    x = (mid[:, None] + rad[:, None] * t[None, :]).ravel()
    ww = (rad[:, None] * w[None, :]).ravel()
    if base is None:
        return x, ww
    return x, ww, np.repeat(base, len(t))


def _find_roots(f, L: float, R: float, samples: int = 96) -> list[float]:
    """Sign changes of ``f(x, base)`` strictly inside (L, R), located by Brent's method.

    Each half of the segment is scanned in coordinates relative to its
    endpoint, on a grid that is cosine-spaced in the bulk and geometric
    (down to ~1e-24 of the width) toward the endpoint, so roots sitting
    extremely close to a knot are still bracketed.
    """
    width = R - L
    if width <= 0.0:
        return []
    bulk = 0.5 - 0.5 * np.cos(np.linspace(0.0, 0.5 * np.pi, samples // 2 + 1)[1:])
    geo = 0.5 * _RATIO ** np.arange(2, 41)
    s = np.unique(np.concatenate([geo, bulk]))  # fractions of the width in (0, 0.5]
    roots = []
    for base, sign in ((L, 1.0), (R, -1.0)):
        offs = sign * width * s
        ys = f(offs, base)
        sgn = np.sign(ys)
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            g = lambda z, b=base: float(f(np.array([z]), b)[0])  # noqa: E731
            lo, hi = sorted((offs[i], offs[i + 1]))
            try:
                z = optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
            except ValueError:
                continue
            roots.append(base + z)
    # a root exactly at the midpoint is seen from both sides
    return sorted(set(roots))


@dataclass
class _Grid:
    # node i sits at base[i] + x[i]
    x: np.ndarray
    base: np.ndarray
    w_hi: np.ndarray
    x_lo: np.ndarray
    base_lo: np.ndarray
    w_lo: np.ndarray
    T: float


def _make_grid(breaks, sing_order: float, tol: float, roots=()) -> _Grid:
    """Quadrature grid on [breaks[0], T] with grading at every break and root."""
    pts = sorted(set(float(b) for b in breaks) | set(float(r) for r in roots))
    # one graded unit segment before the geometric tail, so a cusp or root
    # at the last break is resolved like an interior one
    pts.append(pts[-1] + 1.0)
    d_sing = _depth(sing_order, tol)
    a_all, b_all, c_all = [], [], []
    root_set = set(float(r) for r in roots)
    for L, R in zip(pts[:-1], pts[1:]):
        if R - L <= 1e-14 * max(1.0, abs(L)):
            continue
        # grading toward roots only needs to resolve |u|**power cusps
        d = d_sing if not (L in root_set and R in root_set) else _depth(0.0, tol)
        a, b, c = _panels_graded(L, R, d)
        a_all.append(a)
        b_all.append(b)
        c_all.append(c)
    B = pts[-1]
    ta, tb, tc = _panels_tail(B)
    a_all.append(ta)
    b_all.append(tb)
    c_all.append(tc)
    a = np.concatenate(a_all)
    b = np.concatenate(b_all)
    c = np.concatenate(c_all)
    x, w, xb = _nodes(a, b, _GL_HI, c)
    xl, wl, xlb = _nodes(a, b, _GL_LO, c)
    return _Grid(x, xb, w, xl, xlb, wl, B + float(tb[-1]))


def _power_tail(g_T: np.ndarray, g_2T: np.ndarray, T: float, beta: float | None = None) -> np.ndarray:
    """Integral over [T, inf) of a function behaving like a power law.

    The decay exponent is estimated from the values at T and 2T unless it is
    known and passed as ``beta``.
    """
    g_T = np.asarray(g_T, dtype=float)
    g_2T = np.asarray(g_2T, dtype=float)
    out = np.zeros_like(g_T)
    pos = (g_T > 0) & (g_2T > 0)
    if beta is not None:
        out[pos] = g_T[pos] * T / (-beta - 1.0)
        return out
    beta = np.log2(g_2T[pos] / g_T[pos])
    if np.any(beta >= -1.0):
        raise QuadratureError("integrand tail does not decay fast enough to be integrable")
    out[pos] = g_T[pos] * T / (-beta - 1.0)
    return out


def abs_power_integral(f, breaks, power: float, sing_order: float,
                       q: QuadratureConfig = DEFAULT_QUAD, find_roots: bool = True,
                       return_error: bool = False, fpow=None):
    """Integral of ``|f(x)|**power`` over ``[breaks[0], inf)``.

    Parameters
    ----------
    f : callable
        Vectorised signed integrand ``f(x, base=0.0)`` evaluated at
        ``base + x``; its absolute value is raised to ``power``. Grid nodes
        are passed as offsets from the nearest break.
    breaks : sequence of float
        Points where ``f`` may be singular or non-smooth; the first one is the
        lower integration limit. ``f`` must be smooth and of constant sign
        beyond the last break apart from roots found numerically.
    power : float
        Exponent applied to ``|f|``.
    sing_order : float
        Worst local exponent ``s`` with ``|f| ~ u**s`` next to a break.
    fpow : callable, optional
        ``fpow(x, base)`` returning ``|f|**power`` directly, for integrands
        whose signed values overflow although their powers do not. ``f`` is
        then only used to locate sign changes.
    """
    if fpow is None:
        def fpow(x, base=0.0):
            return np.abs(f(x, base)) ** power
    breaks = sorted(float(b) for b in breaks)
    order = power * min(sing_order, 0.0)
    if order <= -1.0:
        raise QuadratureError("integrand singularity is not integrable")
    roots = []
    if find_roots:
        for L, R in zip(breaks[:-1], breaks[1:]):
            roots.extend(_find_roots(f, L, R))
        B = breaks[-1]
        tail_off = np.concatenate([_RATIO ** np.arange(40, 10, -1), np.logspace(-6, 9, 400)])
        ys = np.sign(f(tail_off, B))
        for i in np.nonzero(ys[:-1] * ys[1:] < 0)[0]:
            g = lambda z: float(f(np.array([z]), B)[0])  # noqa: E731
            roots.append(B + optimize.brentq(g, tail_off[i], tail_off[i + 1], xtol=1e-300))
    grid = _make_grid(breaks, order, min(q.abs_tol, q.tail_cutoff_tol) * 1e-2, roots)
    if roots and max(roots) > breaks[-1]:
        # tail panels must start after the last root; rebuild with it as a break
        grid = _make_grid(breaks + [max(roots)], order, min(q.abs_tol, q.tail_cutoff_tol) * 1e-2, roots)
    hi = float(np.dot(grid.w_hi, fpow(grid.x, grid.base)))
    lo = float(np.dot(grid.w_lo, fpow(grid.x_lo, grid.base_lo)))
    tail = float(_power_tail(fpow(np.array([grid.T]), 0.0), fpow(np.array([2.0 * grid.T]), 0.0), grid.T)[0])
    val = hi + tail
    err = abs(hi - lo)
    if not math.isfinite(val) or err > max(q.abs_tol, q.rel_tol * abs(val)):
        raise QuadratureError(f"quadrature did not converge: value {val}, error estimate {err}")
    return (val, err) if return_error else val


# ---------------------------------------------------------------------------
# norms and moments
# ---------------------------------------------------------------------------


def _knots(k: int, r: int, shift: float = 0.0) -> list[float]:
    return [r * j - shift for j in range(k + 1)] + [r * k + 1.0 - shift]


@lru_cache(maxsize=4096)
def _h_norm_power(k: int, r: int, alpha: float, H: float, q: QuadratureConfig) -> float:
    a = H - 1.0 / alpha
    if alpha * (H - k) >= 0.0:
        raise DomainError("kernel is not in L^alpha: need H < k")
    if alpha * H <= 0.0:
        raise DomainError("kernel is not in L^alpha: need H > 0")
    return abs_power_integral(
        lambda x, base=0.0: _h_sign(x, k, r, a, base), _knots(k, r), alpha, a, q,
        fpow=lambda x, base=0.0: _h_abs_pow(x, k, r, a, alpha, base),
    )


def h_norm_alpha(spec: IncrementSpec, params: LfsmParams, q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``||h_{k,r}||_alpha = (int_0^inf |h_{k,r}|**alpha)**(1/alpha)``."""
    return _h_norm_power(spec.k, spec.r, params.alpha, params.H, q) ** (1.0 / params.alpha)


def _h_norm_raw(k: int, r: int, alpha: float, H: float, q: QuadratureConfig = DEFAULT_QUAD) -> float:
    # same as h_norm_alpha but accepts H outside (0, 1) as long as the norm is finite;
    # estimators call this with plug-in values of H
    return _h_norm_power(int(k), int(r), float(alpha), float(H), q) ** (1.0 / alpha)


def moment_from_scale(p: float, alpha: float, scale: float) -> float:
    """``E|Y|**p`` for Y SaS(scale), computed through the a_p representation.

    Valid for ``p`` in (-1, 0) and for ``p`` in (0, min(1, alpha)).
    """
    if p == 0.0 or not -1.0 < p < 1.0:
        raise DomainError(f"power must lie in (-1, 1) without 0, got {p}")
    if p >= alpha:
        raise DomainError(f"moment of order {p} is infinite for alpha={alpha}")
    if p > 0.0:
        # int (1 - exp(-|y|^alpha)) |y|^{-1-p} dy = 2 Gamma(1 - p/alpha) / p
        return scale**p * 2.0 * math.gamma(1.0 - p / alpha) / (p * a_p(p))
    q_ = -p
    return 2.0 * scale ** (-q_) * math.gamma(q_ / alpha) / (alpha * a_p(-q_))


def m_pk(p: float, spec: IncrementSpec, params: LfsmParams, q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Absolute moment ``E|Delta_{rk,k}^r X|**p`` of the unit-step increment.

    Defined for ``p`` in (-1/2, 1/2) without 0; positive powers must also
    satisfy ``p < alpha``.
    """
    if p == 0.0 or not -0.5 < p < 0.5:
        raise DomainError(f"p must lie in (-1/2, 1/2) without 0, got {p}")
    if p >= params.alpha:
        raise DomainError(f"m_pk is infinite for p={p} >= alpha={params.alpha}")
    scale = params.sigma * h_norm_alpha(spec, params, q)
    return moment_from_scale(p, params.alpha, scale)


def phi_theoretical(t: float, spec: IncrementSpec, params: LfsmParams,
                    q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Limit ``exp(-(sigma ||h_k||_alpha t)**alpha)`` of the empirical characteristic function."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    s = params.sigma * h_norm_alpha(spec, params, q)
    return math.exp(-((s * t) ** params.alpha))


# ---------------------------------------------------------------------------
# dependence measures
# ---------------------------------------------------------------------------


def U_gh(u: float, v: float, g_norm: float, h_norm: float, mixed_norm: float, params: LfsmParams) -> float:
    """Dependence measure of two stable integrals.

    ``g_norm`` and ``h_norm`` are the L^alpha norms of the two kernels and
    ``mixed_norm`` is ``||u g + v h||_alpha**alpha`` (already raised to alpha).
    """
    al = params.alpha
    s = params.sigma**al
    return math.exp(-s * mixed_norm) - math.exp(-s * (abs(u) ** al * g_norm**al + abs(v) ** al * h_norm**al))


def mixed_norm_alpha(u: float, v: float, spec: IncrementSpec, params: LfsmParams, lag: float,
                     q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``||u h_{k,r} + v h_{k,r}(. + lag)||_alpha**alpha`` over the real line."""
    k, r, a = spec.k, spec.r, params.exponent
    start = min(0.0, -lag)

    def parts(x, base):
        # u h(x) + v h(x + lag) = inner * exp(top), formed without overflow
        s1, l1 = _h_parts(x, k, r, a, base)
        s2, l2 = _h_parts(x, k, r, a, np.add(base, lag))
        top = np.maximum(a * l1, a * l2)
        inner = u * s1 * np.exp(a * l1 - top) + v * s2 * np.exp(a * l2 - top)
        return inner, top

    def f(x, base=0.0):
        return np.sign(parts(x, base)[0])

    def fpow(x, base=0.0):
        inner, top = parts(x, base)
        return np.abs(inner) ** params.alpha * np.exp(params.alpha * top)

    breaks = sorted(set([start] + [b for b in _knots(k, r) + _knots(k, r, lag) if b >= start]))
    if u == 0.0 and v == 0.0:
        return 0.0
    return abs_power_integral(f, breaks, params.alpha, a, q, fpow=fpow)


def rho_l(l: int, spec: IncrementSpec, params: LfsmParams, q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``int_0^inf |h_{k,r}(x) h_{k,r}(x + l)|**(alpha/2) dx``."""
    if l < 0:
        raise DomainError("lag must be nonnegative")
    k, r, a = spec.k, spec.r, params.exponent
    if l == 0:
        return _h_norm_power(k, r, params.alpha, params.H, q)

    half = params.alpha / 2.0

    def f(x, base=0.0):
        return _h_sign(x, k, r, a, base) * _h_sign(x, k, r, a, np.add(base, l))

    def fpow(x, base=0.0):
        return _h_abs_pow(x, k, r, a, half, base) * _h_abs_pow(x, k, r, a, half, np.add(base, l))

    breaks = sorted(set([b for b in _knots(k, r) + _knots(k, r, l) if b >= 0.0]))
    return abs_power_integral(f, breaks, half, a, q, fpow=fpow)


def theta_gh_p(spec_g: IncrementSpec, lag: int, p: float, params: LfsmParams,
               q: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Covariance of ``|Y_0|**p`` and ``|Y_lag|**p`` for the increment kernel.

    Best-effort evaluation of ``a_p**-2 int_{R^2} |xy|**(-1-p) U(x, y) dx dy``
    with ``g = h_{k,r}`` and ``h = h_{k,r}(. + lag)``. Homogeneity of the
    norms reduces the double integral to one dimension: with ``y = c x`` the
    integral over ``x`` is a Gamma function, leaving

        (2/alpha) a_p**-2 Gamma(-2p/alpha) sigma**(2p)
            * int_{-1}^{1} |c|**(-1-p) [F_gh(c) + F_hg(c)] dc,

    where ``F_gh(c) = ||g + c h||**(2p) - (||g||**alpha + |c|**alpha ||h||**alpha)**(2p/alpha)``
    with norms raised to alpha. The L^alpha norms along ``c`` are evaluated
    on one fixed grid, so cusps of ``|g + c h|**alpha`` that move with ``c``
    are only resolved approximately.
    """
    if p == 0.0 or not -0.5 < p < 0.5:
        raise DomainError(f"p must lie in (-1/2, 1/2) without 0, got {p}")
    if p > 0.0 and p >= params.alpha / 2.0:
        raise DomainError("theta is infinite unless p < alpha/2")
    k, r, al, a = spec_g.k, spec_g.r, params.alpha, params.exponent
    lag = float(lag)
    start = min(0.0, -lag)
    breaks = sorted(set([start] + [b for b in _knots(k, r) + _knots(k, r, lag) if b >= start]))
    roots = []
    for shift in (0.0, lag):
        fn = lambda x, base=0.0, s=shift: _h(x, k, r, a, np.add(base, s))  # noqa: E731
        for L, R in zip(breaks[:-1], breaks[1:]):
            roots.extend(_find_roots(fn, L, R))
    grid = _make_grid(breaks, al * min(a, 0.0), 1e-14, roots)
    G = _h(grid.x, k, r, a, grid.base)
    Hs = _h(grid.x, k, r, a, grid.base + lag)
    T = grid.T
    gT = _h(np.array([T, 2 * T]), k, r, a)
    hT = _h(np.array([T + lag, 2 * T + lag]), k, r, a)

    def norms(cb, co, X, Y, xT, yT):
        # ||X + c Y||**alpha with c = cb + co; X + cb*Y is formed first so a
        # near-cancellation at c = -1 keeps its relative precision
        vals = np.empty(len(cb))
        for b0 in np.unique(cb):
            sel = cb == b0
            base = X + b0 * Y
            v = np.abs(base[None, :] + co[sel, None] * Y[None, :]) ** al
            vals[sel] = v @ grid.w_hi
        comb_T = np.abs((xT[0] + cb * yT[0]) + co * yT[0]) ** al
        comb_2T = np.abs((xT[1] + cb * yT[1]) + co * yT[1]) ** al
        # both kernels decay like x**(a-k), so the exponent is known
        return vals + _power_tail(comb_T, comb_2T, T, beta=al * (a - k))

    zero = np.array([0.0])
    A = float(norms(zero, zero, G, Hs, gT, hT)[0])
    B = float(norms(zero, zero, Hs, G, hT, gT)[0])
    # c-quadrature on [-1, 1]. Near c = 0 the symmetrised bracket behaves like
    # |c|**min(alpha, 1) (the linear term cancels between c and -c), and
    # deeper grading there would only amplify cancellation noise in F. Near
    # c = -1, g + c h may (nearly) vanish, giving |1 + c|**(2p) behaviour.
    d0 = min(_depth(max(-1.0 - p + min(1.0, al), -0.95), 1e-12), 40)
    d1 = _depth(min(2.0 * p, 0.0), 1e-12)
    offs0 = 0.5 * _RATIO ** np.arange(d0 + 1)
    offs1 = 0.5 * _RATIO ** np.arange(d1 + 1)
    pa = np.concatenate([offs0[1:], -offs1[:-1]])
    pb = np.concatenate([offs0[:-1], -offs1[1:]])
    pbase = np.concatenate([np.zeros(d0), np.ones(d1)])
    co_pos, wpos, cb_pos = _nodes(pa, pb, _GL_HI, pbase)
    cb = np.concatenate([cb_pos, -cb_pos])
    co = np.concatenate([co_pos, -co_pos])
    wc = np.concatenate([wpos, wpos])
    absc = np.abs(cb + co)
    e = 2.0 * p / al
    F = (norms(cb, co, G, Hs, gT, hT) ** e - (A + absc ** al * B) ** e
         + norms(cb, co, Hs, G, hT, gT) ** e - (B + absc ** al * A) ** e)
    integral = float(np.dot(wc, absc ** (-1.0 - p) * F))
    const = (2.0 / al) * a_p(p) ** -2 * special.gamma(-2.0 * p / al) * params.sigma ** (2.0 * p)
    val = const * integral
    if not math.isfinite(val):
        raise QuadratureError("theta quadrature produced a non-finite value")
    return val
