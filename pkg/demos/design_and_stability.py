"""Walk through a filter design and a long one-bit run.

Builds the minimal subordinate filter for a few orders at the one-bit level
sigma = 6, shows how its support grows like 1 + 6 (j-1)^2, and then drives
the greedy quantizer with the largest input it can stably accept.

    python3 demos/design_and_stability.py
"""

import numpy as np

from sigmadelta import design_filter, gamma_from_sigma, h_from_design, run_greedy
from sigmadelta.filters import g_from_h
from sigmadelta.modulator import canonical_state

gamma = gamma_from_sigma(6)
print(f"level gamma = cosh(pi / sqrt 6) = {gamma:.6f}\n")

print(" m  support n_j                          ||h||_1    log ||g||_1")
for m in (1, 2, 3, 5, 8):
    d = design_filter(m, gamma)
    print(f"{m:2d}  {str(d.n.tolist()):36s} {d.h_one_norm:.6f}   {d.log_g1:8.3f}")

d = design_filter(2000, gamma)
print("\nfirst support points at m = 2000:", d.n[:6].tolist())
print("  compare 1 + 6 (j-1)^2:          ", [1 + 6 * j * j for j in range(6)])

# the largest input bound that keeps the state in [-1, 1]
m = 6
d = design_filter(m, gamma)
h = h_from_design(d)
mu = 2 - d.h_one_norm
rng = np.random.default_rng(1)
y = rng.uniform(-mu, mu, 200_000)
tr = run_greedy(h, y, 2)
u = canonical_state(g_from_h(m, h), tr)
print(f"\nm = {m}: input bound {mu:.4f}, 2e5 steps")
print(f"  max |v| = {np.max(np.abs(tr.v)):.6f}   (stability needs <= 1)")
print(f"  max |u| = {np.max(np.abs(u)):.3f}   (||g||_1 = {d.g_one_norm:.3f})")
