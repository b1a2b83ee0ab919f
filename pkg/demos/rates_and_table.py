"""Exponential rates from order optimization and the multi-level table.

    python3 demos/rates_and_table.py
"""

import math

from sigmadelta import gamma_from_sigma
from sigmadelta.rates import efficiency_curve, multilevel_table, optimize_order, rate_constant

gamma = gamma_from_sigma(6)
print("order-optimized bound at sigma = 6, eps = 0.01")
print("   lambda  m_opt  -log2(bound)/lambda")
for lam in (1e2, 1e3, 1e4, 1e5):
    c = optimize_order(lam, gamma, 0.01, 10_000)
    print(f"  {lam:7.0f}  {c.m_opt:5d}  {-c.log2_bound / lam:.5f}")
print(f"  limit r0 / (1 + eps) = {rate_constant(6) / 1.01:.5f}\n")

print("  L   bits  sigma  max input     r0  efficiency")
for r in multilevel_table():
    print(f"{r.L:3d}  {r.bits_per_sample:5.3f}  {r.sigma:5d}  {r.max_input:9.3f}  {r.r0:5.3f}  {r.efficiency:10.3f}")

print("\nefficiency against sigma (m = 2000)")
for p in efficiency_curve([1, 1.5, 2, 3, 4, 5, 6, 6.5, 7], 2000):
    print(f"  sigma {p.sigma:4.1f}: limit {p.limit_factor:.4f} vs pi^2/sigma {math.pi**2 / p.sigma:.4f}, "
          f"efficiency {p.efficiency:.4f}")
