"""Monte Carlo replication engine: bias/std tables and densities of
standardised estimates.

Replication ``i`` always draws its path from stream ``i`` of the master
seed, and results are stored by replication index before any reduction, so
reports are bitwise identical for every worker count. Configurations that
only differ in the estimator share their simulated paths.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DomainError, LfsmError, ResourceError
from .estimators import EstimatorConfig, Method, estimate
from .kernel import LfsmParams
from .simulate import Frequency, SimConfig, simulate_low, to_high
from .stable import SeedSpec

__all__ = [
    "McConfig",
    "McEntry",
    "McReport",
    "Replication",
    "PARAMETERS",
    "PRESETS",
    "preset",
    "run_mc",
    "run_many",
    "simulate_and_estimate",
    "summarize",
    "rate_check",
    "write_report",
]

PARAMETERS = ("sigma", "alpha", "H")
DENSITY_BINS = 200
DENSITY_RANGE = (-5.0, 5.0)


@dataclass(frozen=True)
class McConfig:
    params: LfsmParams
    n_values: tuple
    estimator: Method
    reps: int = 5000
    est_cfg: EstimatorConfig = EstimatorConfig()
    sim_cfg: SimConfig = SimConfig()
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "estimator", Method(self.estimator))
        if self.reps < 2:
            raise DomainError("reps must be at least 2")
        if not self.n_values:
            raise DomainError("n_values must not be empty")
        if min(self.n_values) < 8:
            raise DomainError("sample sizes must be at least 8")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")
        # surface power/method mismatches now rather than as failed replications
        if self.estimator in (Method.CONT_LOW, Method.CONT_HIGH):
            self.est_cfg.power_continuous()
        elif self.estimator is Method.GEN_HIGH and abs(self.est_cfg.power_general()) == abs(self.est_cfg.p_prime):
            raise DomainError("p and p_prime must differ in magnitude")


@dataclass(frozen=True)
class Replication:
    """Outcome of one estimation; ``error`` is set when the estimator failed."""

    index: int
    values: tuple | None  # (sigma_hat, alpha_hat, H_hat)
    k_used: int | None = None
    alpha_prelim: float | None = None
    flags: tuple = ()
    error: str | None = None

    @property
    def usable(self) -> bool:
        return self.error is None and not self.flags


@dataclass(frozen=True)
class McEntry:
    n: int
    parameter: str
    truth: float
    bias: float
    std: float
    mc_error: float
    failures: int
    used: int
    density_z: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)


@dataclass
class McReport:
    config: McConfig
    entries: list
    replications: dict  # n -> list[Replication], ordered by index

    def __repr__(self) -> str:
        c = self.config
        return (f"McReport({c.estimator.value}, {c.params}, n={list(c.n_values)}, "
                f"reps={c.reps}, seed={c.master_seed})")

    def entry(self, n: int, parameter: str) -> McEntry:
        for e in self.entries:
            if e.n == n and e.parameter == parameter:
                return e
        raise KeyError((n, parameter))

    def estimates(self, n: int, usable_only: bool = True) -> np.ndarray:
        """``(reps, 3)`` array of estimates, NaN rows for excluded replications."""
        out = np.full((len(self.replications[n]), 3), np.nan)
        for row, rep in enumerate(self.replications[n]):
            if rep.values is not None and (rep.usable or not usable_only):
                out[row] = rep.values
        return out

    def k_used(self, n: int) -> np.ndarray:
        return np.array([-1 if r.k_used is None else r.k_used for r in self.replications[n]])


# ---------------------------------------------------------------------------
# replication work
# ---------------------------------------------------------------------------


def _one(path, method: Method, est_cfg: EstimatorConfig, index: int) -> Replication:
    try:
        r = estimate(path, method, est_cfg)
    except ResourceError:
        raise
    except (LfsmError, ArithmeticError, ValueError) as exc:
        return Replication(index, None, error=f"{type(exc).__name__}: {exc}")
    vals = (r.sigma_hat, r.alpha_hat, r.H_hat)
    if not all(math.isfinite(v) for v in vals):
        return Replication(index, None, r.k_used, r.alpha_prelim, tuple(sorted(r.flags)), "non-finite estimate")
    return Replication(index, vals, r.k_used, r.alpha_prelim, tuple(sorted(r.flags)))


def simulate_and_estimate(params: LfsmParams, n: int, indices, jobs, sim_cfg: SimConfig,
                          master_seed: int) -> list:
    """Simulate replication ``i`` for each index and run every ``(method, est_cfg)`` job on it.

    Returns one list of :class:`Replication` per job, in index order.
    High-frequency methods receive the self-similar rescaling of the same
    low-frequency path.
    """
    out = [[] for _ in jobs]
    for i in indices:
        cfg = replace(sim_cfg, seed=SeedSpec(master_seed, int(i)))
        low = simulate_low(params, n, cfg)
        high = None
        for j, (method, est_cfg) in enumerate(jobs):
            method = Method(method)
            if method.frequency is Frequency.HIGH:
                if high is None:
                    high = to_high(low, params.H)
                path = high
            else:
                path = low
            out[j].append(_one(path, method, est_cfg, int(i)))
    return out


def _work(args):
    return simulate_and_estimate(*args)


def _chunks(reps: int, workers: int):
    # several chunks per worker for load balance; the split never affects results
    size = max(1, math.ceil(reps / (4 * workers)))
    return [range(s, min(reps, s + size)) for s in range(0, reps, size)]


def _fan_out(params, n, jobs, sim_cfg, master_seed, reps, workers) -> list:
    tasks = [(params, n, idx, jobs, sim_cfg, master_seed) for idx in _chunks(reps, workers)]
    if workers == 1:
        parts = [_work(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_work, tasks))
    merged = [[] for _ in jobs]
    for part in parts:
        for j, reps_j in enumerate(part):
            merged[j].extend(reps_j)
    for lst in merged:
        lst.sort(key=lambda r: r.index)
    return merged


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


def _mean_std(x: np.ndarray) -> tuple[float, float]:
    # compensated sums over index-ordered values: independent of any chunking
    m = math.fsum(x.tolist()) / x.size
    if x.size < 2:
        return m, math.nan
    var = math.fsum(((x - m) ** 2).tolist()) / (x.size - 1)
    return m, math.sqrt(var)


def summarize(reps: list, truth: LfsmParams, n: int) -> list:
    """Bias, std, Monte Carlo error, failure count and density per parameter."""
    usable = [r for r in reps if r.usable]
    failures = len(reps) - len(usable)
    vals = np.array([r.values for r in usable]).reshape(-1, 3)
    truths = (truth.sigma, truth.alpha, truth.H)
    edges = np.linspace(*DENSITY_RANGE, DENSITY_BINS + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    entries = []
    for c, name in enumerate(PARAMETERS):
        x = vals[:, c]
        if x.size == 0:
            entries.append(McEntry(n, name, truths[c], math.nan, math.nan, math.nan, failures, 0,
                                   centers, np.zeros(DENSITY_BINS)))
            continue
        mean, std = _mean_std(x)
        if std > 0.0 and math.isfinite(std):
            counts, _ = np.histogram((x - mean) / std, bins=edges)
            dens = counts / (x.size * width)
        else:
            dens = np.zeros(DENSITY_BINS)
        entries.append(McEntry(n, name, truths[c], mean - truths[c], std, std / math.sqrt(x.size),
                               failures, int(x.size), centers, dens))
    return entries


def run_many(configs) -> list:
    """Run several configurations, sharing simulated paths where possible.

    Configurations with the same truth, simulation settings, seed,
    replication count and worker count reuse one set of paths per n.
    """
    configs = list(configs)
    groups = defaultdict(list)
    for pos, cfg in enumerate(configs):
        key = (cfg.params, cfg.sim_cfg, cfg.master_seed, cfg.reps, cfg.workers)
        groups[key].append(pos)
    results = {pos: {} for pos in range(len(configs))}
    for (params, sim_cfg, seed, reps, workers), members in groups.items():
        ns = sorted({n for pos in members for n in configs[pos].n_values})
        for n in ns:
            active = [pos for pos in members if n in configs[pos].n_values]
            jobs = [(configs[pos].estimator, configs[pos].est_cfg) for pos in active]
            merged = _fan_out(params, n, jobs, sim_cfg, seed, reps, workers)
            for pos, lst in zip(active, merged):
                results[pos][n] = lst
    reports = []
    for pos, cfg in enumerate(configs):
        entries = []
        for n in cfg.n_values:
            entries.extend(summarize(results[pos][n], cfg.params, n))
        reports.append(McReport(cfg, entries, {n: results[pos][n] for n in cfg.n_values}))
    return reports


def run_mc(cfg: McConfig) -> McReport:
    """Simulate ``cfg.reps`` paths per sample size, estimate, and aggregate."""
    return run_many([cfg])[0]


def rate_check(report_a: McReport, report_b: McReport, parameter: str,
               n_a: int | None = None, n_b: int | None = None) -> float:
    """Observed ``std(n_b) / std(n_a)`` for one parameter.

    With sqrt(n) asymptotics this is close to ``sqrt(n_a / n_b)``. When a
    report holds a single sample size, its ``n`` may be omitted.
    """
    def pick(rep, n):
        if n is None:
            if len(rep.config.n_values) != 1:
                raise DomainError("report holds several sample sizes; pass n explicitly")
            n = rep.config.n_values[0]
        return rep.entry(n, parameter)

    return pick(report_b, n_b).std / pick(report_a, n_a).std


# ---------------------------------------------------------------------------
# presets and output
# ---------------------------------------------------------------------------

_ALPHA_HIGH = LfsmParams(0.3, 1.8, 0.8)
_ALPHA_LOW = LfsmParams(0.3, 0.8, 0.8)
_CONT = EstimatorConfig(p=0.4, k_fixed=2)
_GEN = EstimatorConfig(p=-0.4, p_prime=-0.2)

# name -> list of (truth, estimator, estimator config)
PRESETS = {
    "table1": [(_ALPHA_HIGH, Method.CONT_LOW, _CONT), (_ALPHA_HIGH, Method.CONT_HIGH, _CONT)],
    "table2": [(_ALPHA_HIGH, Method.GEN_LOW, _GEN)],
    "table3": [(_ALPHA_LOW, Method.GEN_LOW, _GEN)],
    "table4": [(_ALPHA_HIGH, Method.GEN_HIGH, _GEN)],
    "table5": [(_ALPHA_LOW, Method.GEN_HIGH, _GEN)],
}
PRESET_N = (100, 1000, 10000)


def preset(name: str, reps: int = 5000, master_seed: int = 0, workers: int = 1,
           n_values=PRESET_N, sim_cfg: SimConfig = SimConfig()) -> list:
    """The configurations of one of the reference tables."""
    if name not in PRESETS:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return [
        McConfig(params, tuple(n_values), method, reps, est_cfg, sim_cfg, master_seed, workers)
        for params, method, est_cfg in PRESETS[name]
    ]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_report(report: McReport, out_dir, prefix: str | None = None) -> list:
    """Write one table per n and one density file per (n, parameter).

    Tables have columns ``parameter,bias,std,mc_error,failures``; densities
    ``z,density``. Returns the written paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = prefix or report.config.estimator.value
    written = []
    for n in report.config.n_values:
        table = out_dir / f"{prefix}_n{n}.csv"
        with table.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["parameter", "bias", "std", "mc_error", "failures"])
            for name in PARAMETERS:
                e = report.entry(n, name)
                w.writerow([name, _fmt(e.bias), _fmt(e.std), _fmt(e.mc_error), e.failures])
        written.append(table)
        for name in PARAMETERS:
            e = report.entry(n, name)
            dens = out_dir / f"{prefix}_n{n}_{name}_density.csv"
            with dens.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["z", "density"])
                for z, d in zip(e.density_z, e.density):
                    w.writerow([_fmt(z), _fmt(d)])
            written.append(dens)
    return written
