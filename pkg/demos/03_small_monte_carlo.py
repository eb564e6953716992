"""A reduced Monte Carlo study: bias/std tables and density files.

The full-size study is one command, e.g. ``lfsm mc --preset table1``; this demo
keeps replications and sample sizes small so it finishes in about a minute.

Run: python3 demos/03_small_monte_carlo.py [output-dir]
"""

import sys
import tempfile
from pathlib import Path

from lfsm import preset, rate_check, run_many, write_report

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="lfsm_mc_"))
configs = preset("table1", reps=200, master_seed=3, n_values=(250, 1000))
for report in run_many(configs):
    method = report.config.estimator.value
    for n in report.config.n_values:
        print(f"{method} n={n}")
        for par in ("sigma", "alpha", "H"):
            e = report.entry(n, par)
            print(f"  {par:5s} bias={e.bias:+.4f} std={e.std:.4f} mc_error={e.mc_error:.4f} excluded={e.failures}")
    print(f"  std(H) ratio n=1000 vs n=250: {rate_check(report, report, 'H', 250, 1000):.3f} (sqrt rate: 0.5)")
    write_report(report, out)
print(f"CSV tables and densities written to {out}")
