"""Acceptance criteria 1-11.

Monte Carlo paths are shared between criteria: the n = 10^4 runs for
alpha = 1.8 feed criteria 4, 5, 6, 9 and 10, those for alpha = 0.8 feed 5, 6
and 9. Every criterion records one PASS/FAIL line (shown in the terminal
summary) before asserting.
"""

import math

import numpy as np
import pytest
from scipy import stats

from lfsm import (
    EstimatorConfig,
    G_bar,
    G_map,
    IncrementSpec,
    LfsmParams,
    McConfig,
    Method,
    PRESETS,
    SeedSpec,
    SimConfig,
    StableLaw,
    ecf_low,
    increments,
    m_pk,
    phi_theoretical,
    power_variation,
    preset,
    run_many,
    sample_sas,
    select_k,
    simulate_low,
    summarize,
    write_report,
)
from lfsm.statistics import _diff

pytestmark = pytest.mark.slow

SEED = 20240611
P18 = LfsmParams(0.3, 1.8, 0.8)
P08 = LfsmParams(0.3, 0.8, 0.8)
CONT = EstimatorConfig(p=0.4, k_fixed=2)
GEN = EstimatorConfig(p=-0.4, p_prime=-0.2)
N_BIG = 10_000


def _cfg(params, n, method, reps, est):
    return McConfig(params, (n,), method, reps, est, SimConfig(), SEED, 1)


@pytest.fixture(scope="module")
def mc_1e3():
    """cont_low and cont_high at n = 1000, 1000 replications (shared paths)."""
    low, high = run_many([_cfg(P18, 1000, Method.CONT_LOW, 1000, CONT),
                          _cfg(P18, 1000, Method.CONT_HIGH, 1000, CONT)])
    return {"cont_low": low, "cont_high": high}


@pytest.fixture(scope="module")
def mc_1e4_a18():
    """cont_low, gen_low, gen_high on the same 1000 paths at n = 10^4, alpha = 1.8."""
    reps = run_many([_cfg(P18, N_BIG, Method.CONT_LOW, 1000, CONT),
                     _cfg(P18, N_BIG, Method.GEN_LOW, 1000, GEN),
                     _cfg(P18, N_BIG, Method.GEN_HIGH, 1000, GEN)])
    return dict(zip(("cont_low", "gen_low", "gen_high"), reps))


@pytest.fixture(scope="module")
def mc_1e4_a08():
    """gen_low and gen_high on the same 500 paths at n = 10^4, alpha = 0.8."""
    reps = run_many([_cfg(P08, N_BIG, Method.GEN_LOW, 500, GEN),
                     _cfg(P08, N_BIG, Method.GEN_HIGH, 500, GEN)])
    return dict(zip(("gen_low", "gen_high"), reps))


@pytest.fixture(scope="module")
def long_paths():
    """Ten independent n = 10^5 paths per parameter preset (10^6 increments each)."""
    return {
        P.alpha: [simulate_low(P, 100_000, SimConfig(seed=SeedSpec(SEED + 1, s))) for s in range(10)]
        for P in (P18, P08)
    }


def _first(report, count):
    """Summary of the first ``count`` replications (paths 0..count-1)."""
    return {e.parameter: e for e in summarize(report.replications[N_BIG][:count], report.config.params, N_BIG)}


def test_c01_stable_sampler_cf(acceptance_log):
    n = 100_000
    worst = 0.0
    for alpha, sigma in [(1.0, 1.0), (1.8, 0.3), (0.8, 0.3)]:
        x = sample_sas(StableLaw(alpha, sigma), n, SeedSpec(SEED, 0))
        for t in (0.5, 1.0, 2.0):
            err = abs(np.mean(np.cos(t * x)) - math.exp(-((sigma * t) ** alpha)))
            worst = max(worst, err)
    tol = 3 / math.sqrt(n)
    ok = worst <= tol
    acceptance_log(1, ok, f"max |ecf - cf| = {worst:.2e} (tol {tol:.2e})")
    assert ok


def test_c02_simulation_fidelity(long_paths, acceptance_log):
    n = 100_000
    path = long_paths[1.8][0]
    spec = IncrementSpec(2)
    errs = [abs(ecf_low(path, t, 2) - phi_theoretical(t, spec, P18)) for t in (1.0, 2.0)]
    v = power_variation(increments(path, spec), 0.4)
    rel = abs(v - m_pk(0.4, spec, P18)) / m_pk(0.4, spec, P18)
    tol = 3 / math.sqrt(n) + 0.01
    ok = max(errs) <= tol and rel <= 0.01
    acceptance_log(2, ok, f"ecf errors {errs[0]:.2e}, {errs[1]:.2e} (tol {tol:.2e}); V(f_0.4;2) rel err {rel:.2e}")
    assert ok


REFERENCE_N1000 = {  # (bias, std)
    "cont_low": {"sigma": (-0.0008, 0.02), "alpha": (0.012, 0.068), "H": (-0.012, 0.05)},
    "cont_high": {"sigma": (-0.001, 0.12), "alpha": (0.015, 0.07), "H": (-0.009, 0.05)},
}


def test_c03_table1_n1000(mc_1e3, acceptance_log):
    ok, lines = True, []
    for method, ref in REFERENCE_N1000.items():
        rep = mc_1e3[method]
        for par, (b_ref, s_ref) in ref.items():
            e = rep.entry(1000, par)
            z = abs(e.bias - b_ref) / e.mc_error
            s_rel = e.std / s_ref - 1
            good = z <= 3 and abs(s_rel) <= 0.4
            ok &= good
            lines.append(f"{method}.{par}: bias {e.bias:+.4f} ({z:.1f} SE from {b_ref:+.4f}) "
                         f"std {e.std:.4f} ({s_rel:+.0%} vs {s_ref}) fail {e.failures}{'' if good else ' <-'}")
    acceptance_log(3, ok, "; ".join(lines))
    assert ok, "\n".join(lines)


def test_c04_sqrt_n_rate(mc_1e3, mc_1e4_a18, acceptance_log):
    s3 = mc_1e3["cont_low"].entry(1000, "H").std
    s4 = mc_1e4_a18["cont_low"].entry(N_BIG, "H").std
    ratio = s4 / s3
    ok = 0.25 <= ratio <= 0.40
    acceptance_log(4, ok, f"std(H_low) {s3:.4f} -> {s4:.4f}, ratio {ratio:.3f} (target [0.25, 0.40])")
    assert ok


def test_c05_general_low(mc_1e4_a18, mc_1e4_a08, acceptance_log):
    ok, lines = True, []
    for label, rep, (b_ref, s_ref) in [("alpha=1.8", mc_1e4_a18["gen_low"], (0.001, 0.022)),
                                       ("alpha=0.8", mc_1e4_a08["gen_low"], (0.008, 0.27))]:
        e = _first(rep, 500)["alpha"]
        z = abs(e.bias - b_ref) / e.mc_error
        s_rel = e.std / s_ref - 1
        good = abs(s_rel) <= 0.5 and z <= 3
        ok &= good
        lines.append(f"{label}: alpha bias {e.bias:+.4f} ({z:.1f} SE from {b_ref:+.3f}) "
                     f"std {e.std:.4f} ({s_rel:+.0%} vs {s_ref}) excluded {e.failures}/500")
    acceptance_log(5, ok, "; ".join(lines))
    assert ok, "\n".join(lines)


def test_c06_general_high(mc_1e4_a18, mc_1e4_a08, acceptance_log):
    ok, lines = True, []
    for label, rep, a_ref, h_ref in [("alpha=1.8", mc_1e4_a18["gen_high"], 0.26, 0.05),
                                     ("alpha=0.8", mc_1e4_a08["gen_high"], 0.04, 0.06)]:
        s = _first(rep, 500)
        ra, rh = s["alpha"].std / a_ref - 1, s["H"].std / h_ref - 1
        good = abs(ra) <= 0.5 and abs(rh) <= 0.5
        ok &= good
        lines.append(f"{label}: alpha std {s['alpha'].std:.4f} ({ra:+.0%} vs {a_ref}), "
                     f"H std {s['H'].std:.4f} ({rh:+.0%} vs {h_ref}), excluded {s['alpha'].failures}/500")
    acceptance_log(6, ok, "; ".join(lines))
    assert ok, "\n".join(lines)


def test_c07_round_trips(acceptance_log):
    worst = 0.0
    count = 0
    for sigma in (0.3, 1.0):
        for alpha in (0.6, 1.0, 1.4, 1.8):
            for H in (0.2, 0.5, 0.8):
                P = LfsmParams(sigma, alpha, H)
                k = select_k(alpha)
                spec = IncrementSpec(k)
                s1, a1 = G_map(phi_theoretical(1.0, spec, P), phi_theoretical(2.0, spec, P), H, 1.0, 2.0, k)
                s2, a2 = G_bar(m_pk(-0.4, spec, P), m_pk(-0.2, spec, P), H, -0.4, -0.2, k)
                worst = max(worst, abs(s1 - sigma), abs(a1 - alpha), abs(s2 - sigma), abs(a2 - alpha))
                count += 1
    ok = worst <= 1e-6
    acceptance_log(7, ok, f"{count} grid points, max round-trip error {worst:.2e}")
    assert ok


def test_c08_moments(long_paths, acceptance_log):
    ok, lines = True, []
    for P in (P18, P08):
        for k in (2, 3):
            x = np.concatenate([_diff(p.values, k, 1) for p in long_paths[P.alpha]])
            for p in (-0.4, 0.4):
                th = m_pk(p, IncrementSpec(k), P)
                rel = np.mean(np.abs(x) ** p) / th - 1
                ok &= abs(rel) <= 0.02
                lines.append(f"a={P.alpha} k={k} p={p:+.1f}: {rel:+.2%}")
    acceptance_log(8, ok, f"{x.size} increments each; " + ", ".join(lines))
    assert ok


def test_c09_order_selection(mc_1e4_a18, mc_1e4_a08, acceptance_log):
    k18 = mc_1e4_a18["gen_low"].k_used(N_BIG)[:500]
    k08 = mc_1e4_a08["gen_low"].k_used(N_BIG)[:500]
    p2, p3 = np.mean(k18 == 2), np.mean(k08 == 3)
    kh18 = np.mean(mc_1e4_a18["gen_high"].k_used(N_BIG)[:500] == 2)
    kh08 = np.mean(mc_1e4_a08["gen_high"].k_used(N_BIG)[:500] == 3)
    ok = p2 >= 0.95 and p3 >= 0.90
    acceptance_log(9, ok, f"low: P(k=2|a=1.8) {p2:.3f}, P(k=3|a=0.8) {p3:.3f}; "
                          f"high (info): {kh18:.3f}, {kh08:.3f}")
    assert ok


def test_c10_normality(mc_1e4_a18, acceptance_log):
    h = mc_1e4_a18["cont_low"].estimates(N_BIG)[:, 2]
    h = h[np.isfinite(h)]
    z = (h - h.mean()) / h.std(ddof=1)
    d = stats.kstest(z, "norm").statistic
    ok = d <= 0.06 and h.size >= 950
    acceptance_log(10, ok, f"KS distance {d:.4f} over {h.size} standardised H_low (tol 0.06)")
    assert ok


def test_c11_determinism(tmp_path, acceptance_log):
    mismatched, total = [], 0
    for name in sorted(PRESETS):
        outs = []
        for workers in (1, 3):
            files = []
            for i, rep in enumerate(run_many(preset(name, reps=6, master_seed=SEED, workers=workers,
                                                   n_values=(200,)))):
                files += write_report(rep, tmp_path / f"{name}_w{workers}", prefix=f"{name}_{i}")
            outs.append(files)
        for a, b in zip(*outs):
            total += 1
            if a.name != b.name or a.read_bytes() != b.read_bytes():
                mismatched.append(a.name)
    ok = not mismatched
    acceptance_log(11, ok, f"{total} CSVs compared across 1 vs 3 workers, {len(mismatched)} differ")
    assert ok
