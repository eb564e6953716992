"""Closed-form quantities behind the estimators, and their exact inversion.

Run: python3 demos/02_kernel_quantities.py
"""

from lfsm import (
    G_bar,
    G_map,
    IncrementSpec,
    LfsmParams,
    h_norm_alpha,
    m_pk,
    phi_pp,
    phi_theoretical,
    select_k,
    theta_gh_p,
)

for params in (LfsmParams(0.3, 1.8, 0.8), LfsmParams(0.3, 0.8, 0.8)):
    k = select_k(params.alpha)
    spec = IncrementSpec(k)
    print(f"(sigma, alpha, H) = ({params.sigma}, {params.alpha}, {params.H}), order k = {k}")
    print(f"  ||h_k||_alpha          = {h_norm_alpha(spec, params):.6f}")
    print(f"  phi(1), phi(2)         = {phi_theoretical(1, spec, params):.6f}, {phi_theoretical(2, spec, params):.6f}")
    print(f"  m_(-0.4,k), m_(-0.2,k) = {m_pk(-0.4, spec, params):.6f}, {m_pk(-0.2, spec, params):.6f}")
    print(f"  var |Y|^-0.4           = {theta_gh_p(spec, 0, -0.4, params):.6f}")
    print(f"  cov lag 1              = {theta_gh_p(spec, 1, -0.4, params):.6f}")
    s, a = G_map(phi_theoretical(1, spec, params), phi_theoretical(2, spec, params), params.H, 1, 2, k)
    print(f"  ecf route recovers     sigma={s:.10f} alpha={a:.10f}")
    s, a = G_bar(m_pk(-0.4, spec, params), m_pk(-0.2, spec, params), params.H, -0.4, -0.2, k)
    print(f"  moment route recovers  sigma={s:.10f} alpha={a:.10f}")

print("moment-ratio map alpha -> phi_pp(alpha) (increasing):")
for a in (0.25, 0.5, 0.8, 1.2, 1.6, 1.8, 1.99):
    print(f"  {a:4.2f} -> {phi_pp(a, -0.4, -0.2):.6f}")
