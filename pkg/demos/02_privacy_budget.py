# How the per-timestamp budget is split and audited over a sliding window.
# Run with: python demos/02_privacy_budget.py

# %%
import numpy as np

from dpstream.dp import NoiseSource, PrivacySpend, WindowAccountant, laplace_perturb, normsub
from dpstream.pipeline import plan_budget

eps, w = 2.5, 5
for repartition in (True, False):
    p = plan_budget(eps, w, repartition)
    print(f"repartition={repartition}: eps_s={p.eps_s:.4f} edge={p.eps_e:.4f} "
          f"community={p.eps_c:.4f} info={p.eps_i:.4f} (intra {p.eps_i1:.4f}, pairs {p.eps_i2:.4f})")

# %%
# a reusing timestamp frees the community share for the degree release,
# yet every window of w timestamps still totals eps
rng = np.random.default_rng(0)
acct = WindowAccountant(w, eps)
for t in range(1, 31):
    p = plan_budget(eps, w, bool(rng.integers(2)))
    acct.record(PrivacySpend(t, {"edge": p.eps_e, "community": p.eps_c, "info": p.eps_i}))
print("window sums:", np.round(acct.window_sums()[w - 1:], 12))

# %%
# Laplace noise on a degree vector, then NormSub restores non-negativity
# while keeping the total close to the noisy total
ns = NoiseSource(1)
d = np.array([0, 1, 1, 2, 5, 9], dtype=float)
noisy = laplace_perturb(d, 0.245, 2.0, ns)
fixed = normsub(noisy)
print("noisy:", np.round(noisy, 2))
print("normsub:", np.round(fixed, 2), "sum", round(fixed.sum(), 2), "vs", round(noisy.sum(), 2))
