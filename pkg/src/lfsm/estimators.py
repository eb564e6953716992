"""Estimators of (sigma, alpha, H) from a single observed path.

Two routes lead from statistics to (sigma, alpha):

* the characteristic-function route (``G_map``): the limit of the empirical
  characteristic function of k-th increments is
  ``exp(-(sigma ||h_k||_alpha t)**alpha)``, so two evaluation points give
  alpha from a log-log slope and then sigma;
* the negative-moment route (``G_bar``): the ratio
  ``m_{-p',k}**p / m_{-p,k}**p'`` depends on alpha only (``phi_pp``) and is
  inverted numerically, after which sigma follows from ``m_{-p,k}``.

H is always estimated from the ratio of power variations at steps 2 and 1.
In the general case the order k is chosen adaptively from a preliminary
estimate of alpha at k = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from scipy import optimize, special

from .errors import DomainError, OutOfRangeError
from .kernel import DEFAULT_QUAD, IncrementSpec, QuadratureConfig, _h_norm_raw
from .simulate import Frequency, SamplePath
from .stable import a_p
from .statistics import ecf_high, ecf_low, increments, power_variation, ratio_statistic

__all__ = [
    "EstimatorConfig",
    "EstimationResult",
    "Regime",
    "Method",
    "estimate_H",
    "G_map",
    "estimate_continuous_low",
    "estimate_continuous_high",
    "prelim_alpha_low",
    "prelim_alpha_high",
    "select_k",
    "estimate_general_low",
    "estimate_general_high",
    "phi_pp",
    "invert_phi_pp",
    "G_bar",
    "decision_rule",
    "estimate",
    "ECF_CLAMP",
    "ALPHA_MAX",
]

ECF_CLAMP = 1e-8
ALPHA_MAX = 2.0 - 1e-6
# plug-in H values outside (0, k) make ||h_k||_alpha infinite; they are moved
# this far inside the interval (with a flag) before the norm is evaluated
_H_MARGIN = 1e-3


class Regime(str, enum.Enum):
    NORMAL = "normal"
    STABLE = "stable"
    UNKNOWN = "unknown"


class Method(str, enum.Enum):
    CONT_LOW = "cont_low"
    CONT_HIGH = "cont_high"
    GEN_LOW = "gen_low"
    GEN_HIGH = "gen_high"

    @property
    def frequency(self) -> Frequency:
        return Frequency.LOW if self in (Method.CONT_LOW, Method.GEN_LOW) else Frequency.HIGH


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning of the estimators.

    ``p`` is the primary power; when left as ``None`` it is 0.4 for the
    continuous-case estimators and -0.4 for the general case. The general
    case always uses negative powers, so only ``|p|`` and ``|p_prime|``
    matter there. ``t3, t4`` (low frequency) or ``p3, p4`` (high frequency)
    enable the regime decision rule, which compares the preliminary alpha
    estimates obtained from two disjoint sets of tuning points.
    """

    p: float | None = None
    p_prime: float = -0.2
    t1: float = 1.0
    t2: float = 2.0
    t3: float | None = None
    t4: float | None = None
    p3: float | None = None
    p4: float | None = None
    k_fixed: int | None = None
    epsilon_rule: float = 0.1
    alpha_floor: float = 0.05
    k_cap: int = 25
    quad: QuadratureConfig = DEFAULT_QUAD

    def __post_init__(self):
        if not 0.0 < self.t1 < self.t2:
            raise DomainError("need 0 < t1 < t2")
        if (self.t3 is None) != (self.t4 is None):
            raise DomainError("t3 and t4 must be given together")
        if self.t3 is not None and not self.t2 < self.t3 < self.t4:
            raise DomainError("need t2 < t3 < t4")
        if (self.p3 is None) != (self.p4 is None):
            raise DomainError("p3 and p4 must be given together")
        for name in ("p", "p_prime", "p3", "p4"):
            v = getattr(self, name)
            if v is not None and (v == 0.0 or not -0.5 < v < 0.5):
                raise DomainError(f"{name} must lie in (-1/2, 1/2) without 0, got {v}")
        if self.p is not None and abs(self.p) == abs(self.p_prime):
            raise DomainError("p and p_prime must differ in magnitude")
        if self.p3 is not None and abs(self.p3) == abs(self.p4):
            raise DomainError("p3 and p4 must differ in magnitude")
        if self.k_fixed is not None and self.k_fixed < 1:
            raise DomainError("k_fixed must be >= 1")
        if not 0.0 < self.epsilon_rule < 1.0:
            raise DomainError("epsilon_rule must lie in (0, 1)")
        if not 0.0 < self.alpha_floor < 1.0:
            raise DomainError("alpha_floor must lie in (0, 1)")
        if self.k_cap < 2:
            raise DomainError("k_cap must be >= 2")

    def power_continuous(self) -> float:
        p = 0.4 if self.p is None else self.p
        if not 0.0 < p < 0.5:
            raise DomainError(f"continuous-case estimators need p in (0, 1/2), got {p}")
        return p

    def power_general(self) -> float:
        """Magnitude of the (negative) primary power."""
        return 0.4 if self.p is None else abs(self.p)


@dataclass(frozen=True)
class EstimationResult:
    sigma_hat: float
    alpha_hat: float
    H_hat: float
    k_used: int
    alpha_prelim: float | None = None
    flags: frozenset = field(default_factory=frozenset)
    decision_value: float | None = None
    regime: Regime = Regime.UNKNOWN

    @property
    def clamped(self) -> bool:
        """True when any clamp fired; the estimate is then diagnostic-grade."""
        return bool(self.flags)

    def as_dict(self) -> dict:
        return {
            "sigma_hat": self.sigma_hat,
            "alpha_hat": self.alpha_hat,
            "H_hat": self.H_hat,
            "k_used": self.k_used,
            "alpha_prelim": self.alpha_prelim,
            "flags": sorted(self.flags),
            "clamped": self.clamped,
            "decision_value": self.decision_value,
            "regime": self.regime.value,
        }


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


def estimate_H(path: SamplePath, p: float, k: int) -> float:
    """``(1/p) log2`` of the power-variation ratio at steps 2 and 1."""
    return math.log2(ratio_statistic(path, p, k)) / p


def _clamp_alpha(alpha: float, floor: float, flags: set, tag: str) -> float:
    if not math.isfinite(alpha) or alpha < floor:
        flags.add(tag)
        return floor
    if alpha > ALPHA_MAX:
        flags.add(tag)
        return ALPHA_MAX
    return alpha


def _clamp_phi(phi: float, flags: set) -> float:
    if phi < ECF_CLAMP:
        flags.add("ecf_clamped")
        return ECF_CLAMP
    if phi > 1.0 - ECF_CLAMP:
        flags.add("ecf_clamped")
        return 1.0 - ECF_CLAMP
    return phi


def _norm_for(alpha: float, H: float, k: int, q: QuadratureConfig, flags: set) -> float:
    lo, hi = _H_MARGIN, k - _H_MARGIN
    if not lo <= H <= hi:
        flags.add("H_clamped_for_norm")
        H = min(max(H, lo), hi)
    return _h_norm_raw(k, 1, alpha, H, q)


def _alpha_from_ecf(phi1: float, phi2: float, t1: float, t2: float) -> float:
    return (math.log(-math.log(phi2)) - math.log(-math.log(phi1))) / (math.log(t2) - math.log(t1))


def _g_map(phi1, phi2, H, t1, t2, k, q, alpha_floor, flags):
    alpha = _clamp_alpha(_alpha_from_ecf(phi1, phi2, t1, t2), alpha_floor, flags, "alpha_clamped")
    norm = _norm_for(alpha, H, k, q, flags)
    sigma = (-math.log(phi1)) ** (1.0 / alpha) / (t1 * norm)
    return sigma, alpha


def G_map(phi1: float, phi2: float, H: float, t1: float, t2: float, k: int,
          q: QuadratureConfig = DEFAULT_QUAD, alpha_floor: float = 0.05) -> tuple[float, float]:
    """Invert the characteristic-function limit at two points.

    ``alpha = (log|log phi2| - log|log phi1|) / (log t2 - log t1)``, clamped
    to ``[alpha_floor, 2 - 1e-6]``; then
    ``sigma = (-log phi1)**(1/alpha) / (t1 ||h_k||_alpha)`` with the norm
    evaluated at ``(alpha, H)``.
    """
    if not (0.0 < phi1 < 1.0 and 0.0 < phi2 < 1.0):
        raise DomainError("characteristic-function values must lie in (0, 1)")
    if not 0.0 < t1 < t2:
        raise DomainError("need 0 < t1 < t2")
    return _g_map(phi1, phi2, H, t1, t2, k, q, alpha_floor, set())


def select_k(alpha_prelim: float, cfg: EstimatorConfig = EstimatorConfig()) -> int:
    """``min(2 + floor(1/alpha_prelim), k_cap)``, or ``cfg.k_fixed`` when set."""
    if cfg.k_fixed is not None:
        return cfg.k_fixed
    if not alpha_prelim > 0.0:
        raise DomainError("alpha_prelim must be positive")
    return int(min(2 + math.floor(1.0 / alpha_prelim), cfg.k_cap))


def decision_rule(alpha_a: float, alpha_b: float, n: int,
                  cfg: EstimatorConfig = EstimatorConfig()) -> tuple[float, Regime]:
    """``d = -log|alpha_a - alpha_b| / log n`` and the regime it indicates.

    The normal regime is declared when ``d > 1/2 - (log n)**(epsilon - 1)``;
    identical inputs give ``d = inf`` and the normal regime.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    diff = abs(alpha_a - alpha_b)
    logn = math.log(n)
    d = math.inf if diff == 0.0 else -math.log(diff) / logn
    threshold = 0.5 - logn ** (-1.0 + cfg.epsilon_rule)
    return d, (Regime.NORMAL if d > threshold else Regime.STABLE)


# ---------------------------------------------------------------------------
# negative-moment route
# ---------------------------------------------------------------------------


def _check_pp(p: float, p_prime: float) -> tuple[float, float]:
    p, pp = abs(p), abs(p_prime)
    if not (0.0 < p < 0.5 and 0.0 < pp < 0.5) or p == pp:
        raise DomainError("need |p|, |p'| in (0, 1/2) with |p| != |p'|")
    return p, pp


def phi_pp(alpha: float, p: float, p_prime: float) -> float:
    """``m_{-p',k}**p / m_{-p,k}**p'`` as a function of alpha alone.

    ``(2/alpha)**(p-p') a_{-p}**p' Gamma(p'/alpha)**p / (a_{-p'}**p Gamma(p/alpha)**p')``;
    the powers enter through their magnitudes.
    """
    p, pp = _check_pp(p, p_prime)
    if not 0.0 < alpha < 2.0:
        raise DomainError("alpha must lie in (0, 2)")
    log_val = ((p - pp) * math.log(2.0 / alpha)
               + pp * math.log(a_p(-p)) + p * special.gammaln(pp / alpha)
               - p * math.log(a_p(-pp)) - pp * special.gammaln(p / alpha))
    return math.exp(log_val)


def invert_phi_pp(target: float, p: float, p_prime: float, tol: float = 1e-10,
                  alpha_floor: float = 0.05) -> float:
    """Solve ``phi_pp(alpha) = target`` on ``[alpha_floor, 2 - 1e-6]``.

    Raises :class:`OutOfRangeError` (carrying the nearer endpoint) when the
    target is outside the range of the map.
    """
    p, pp = _check_pp(p, p_prime)
    lo, hi = alpha_floor, ALPHA_MAX
    f_lo = phi_pp(lo, p, pp) - target
    f_hi = phi_pp(hi, p, pp) - target
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        endpoint = lo if abs(f_lo) < abs(f_hi) else hi
        raise OutOfRangeError(f"target {target} outside the range of phi_pp", endpoint)
    alpha = optimize.brentq(lambda a: phi_pp(a, p, pp) - target, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    if abs(phi_pp(alpha, p, pp) - target) > tol:
        raise OutOfRangeError("phi_pp inversion did not reach the tolerance", alpha)
    return alpha


def _sigma_from_moment(m_p: float, alpha: float, p: float, norm: float) -> float:
    return (alpha * a_p(-p) * m_p / (2.0 * special.gamma(p / alpha))) ** (-1.0 / p) / norm


def _g_bar(m_p, m_pp, H, p, pp, k, q, alpha_floor, flags):
    try:
        alpha = invert_phi_pp(m_pp**p / m_p**pp, p, pp, alpha_floor=alpha_floor)
    except OutOfRangeError as exc:
        flags.add("alpha_clamped")
        alpha = exc.endpoint
    norm = _norm_for(alpha, H, k, q, flags)
    return _sigma_from_moment(m_p, alpha, p, norm), alpha


def G_bar(m_p: float, m_pp: float, H: float, p: float, p_prime: float, k: int,
          q: QuadratureConfig = DEFAULT_QUAD, alpha_floor: float = 0.05) -> tuple[float, float]:
    """Recover ``(sigma, alpha)`` from the negative moments ``m_{-p,k}``, ``m_{-p',k}``.

    alpha solves ``phi_pp(alpha) = m_pp**p / m_p**p'`` and
    ``sigma = (alpha a_{-p} m_p / (2 Gamma(p/alpha)))**(-1/p) / ||h_k||_alpha``.
    """
    if not (m_p > 0.0 and m_pp > 0.0):
        raise DomainError("moments must be positive")
    p, pp = _check_pp(p, p_prime)
    return _g_bar(m_p, m_pp, H, p, pp, k, q, alpha_floor, set())


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def _require(path: SamplePath, freq: Frequency) -> None:
    if path.frequency is not freq:
        raise DomainError(f"this estimator needs a {freq.value}-frequency path")


def _ecf_pair(path: SamplePath, ta: float, tb: float, k: int, H: float | None, flags: set):
    if path.frequency is Frequency.LOW:
        vals = (ecf_low(path, ta, k), ecf_low(path, tb, k))
    else:
        vals = (ecf_high(path, ta, H, k), ecf_high(path, tb, H, k))
    return tuple(_clamp_phi(v, flags) for v in vals)


def _continuous(path: SamplePath, cfg: EstimatorConfig) -> EstimationResult:
    p = cfg.power_continuous()
    k = cfg.k_fixed if cfg.k_fixed is not None else 2
    if k < 2:
        raise DomainError("continuous-case estimators need k >= 2")
    flags: set = set()
    H = estimate_H(path, p, k)
    phi1, phi2 = _ecf_pair(path, cfg.t1, cfg.t2, k, H, flags)
    sigma, alpha = _g_map(phi1, phi2, H, cfg.t1, cfg.t2, k, cfg.quad, cfg.alpha_floor, flags)
    return EstimationResult(sigma, alpha, H, k, flags=frozenset(flags))


def estimate_continuous_low(path: SamplePath, cfg: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """Continuous case (``H > 1/alpha``), low-frequency observations, fixed k (default 2)."""
    _require(path, Frequency.LOW)
    return _continuous(path, cfg)


def estimate_continuous_high(path: SamplePath, cfg: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """Continuous case, high-frequency observations; the ecf uses the plug-in ``n**H_hat``."""
    _require(path, Frequency.HIGH)
    return _continuous(path, cfg)


def _prelim_low(path: SamplePath, ta: float, tb: float, cfg: EstimatorConfig, flags: set) -> float:
    # the slope formula for alpha does not involve H (nor sigma), so the k = 1
    # statistic needs no plug-in index
    phi1, phi2 = _ecf_pair(path, ta, tb, 1, None, flags)
    return _clamp_alpha(_alpha_from_ecf(phi1, phi2, ta, tb), cfg.alpha_floor, flags, "prelim_alpha_clamped")


def prelim_alpha_low(path: SamplePath, cfg: EstimatorConfig = EstimatorConfig()) -> float:
    """Preliminary alpha from the k = 1 characteristic function at ``(t1, t2)``."""
    _require(path, Frequency.LOW)
    return _prelim_low(path, cfg.t1, cfg.t2, cfg, set())


def _prelim_high(path: SamplePath, p: float, pp: float, cfg: EstimatorConfig, flags: set) -> float:
    # the moment ratio m_{-p'}**p / m_{-p}**p' is free of the n**H scaling, so
    # the plug-in index cancels; it is still computed at k = 1 for the record
    H1 = estimate_H(path, -p, 1)
    inc = increments(path, IncrementSpec(1, 1))
    m_p = power_variation(inc, -p, H1)
    m_pp = power_variation(inc, -pp, H1)
    try:
        return invert_phi_pp(m_pp**p / m_p**pp, p, pp, alpha_floor=cfg.alpha_floor)
    except OutOfRangeError as exc:
        flags.add("prelim_alpha_clamped")
        return exc.endpoint


def prelim_alpha_high(path: SamplePath, cfg: EstimatorConfig = EstimatorConfig()) -> float:
    """Preliminary alpha from k = 1 negative power variations at ``(-p, -p')``."""
    _require(path, Frequency.HIGH)
    p, pp = _check_pp(cfg.power_general(), cfg.p_prime)
    return _prelim_high(path, p, pp, cfg, set())


def estimate_general_low(path: SamplePath, cfg: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """General case, low frequency: preliminary alpha -> order k -> (H, sigma, alpha)."""
    _require(path, Frequency.LOW)
    p = cfg.power_general()
    flags: set = set()
    a0 = _prelim_low(path, cfg.t1, cfg.t2, cfg, flags)
    d, regime = None, Regime.UNKNOWN
    if cfg.t3 is not None:
        a1 = _prelim_low(path, cfg.t3, cfg.t4, cfg, flags)
        d, regime = decision_rule(a0, a1, path.n, cfg)
    k = select_k(a0, cfg)
    H = estimate_H(path, -p, k)
    phi1, phi2 = _ecf_pair(path, cfg.t1, cfg.t2, k, None, flags)
    sigma, alpha = _g_map(phi1, phi2, H, cfg.t1, cfg.t2, k, cfg.quad, cfg.alpha_floor, flags)
    return EstimationResult(sigma, alpha, H, k, a0, frozenset(flags), d, regime)


def estimate_general_high(path: SamplePath, cfg: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """General case, high frequency, via negative power variations at ``-p`` and ``-p'``."""
    _require(path, Frequency.HIGH)
    p, pp = _check_pp(cfg.power_general(), cfg.p_prime)
    flags: set = set()
    a0 = _prelim_high(path, p, pp, cfg, flags)
    d, regime = None, Regime.UNKNOWN
    if cfg.p3 is not None:
        p3, p4 = _check_pp(cfg.p3, cfg.p4)
        a1 = _prelim_high(path, p3, p4, cfg, flags)
        d, regime = decision_rule(a0, a1, path.n, cfg)
    k = select_k(a0, cfg)
    H = estimate_H(path, -p, k)
    inc = increments(path, IncrementSpec(k, 1))
    m_p = power_variation(inc, -p, H)
    m_pp = power_variation(inc, -pp, H)
    sigma, alpha = _g_bar(m_p, m_pp, H, p, pp, k, cfg.quad, cfg.alpha_floor, flags)
    return EstimationResult(sigma, alpha, H, k, a0, frozenset(flags), d, regime)


_DISPATCH = {
    Method.CONT_LOW: estimate_continuous_low,
    Method.CONT_HIGH: estimate_continuous_high,
    Method.GEN_LOW: estimate_general_low,
    Method.GEN_HIGH: estimate_general_high,
}


def estimate(path: SamplePath, method: Method | str, cfg: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """Dispatch to one of the four estimators by name."""
    return _DISPATCH[Method(method)](path, cfg)
