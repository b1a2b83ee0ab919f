"""Reconstruction error against oversampling for orders 1 to 3.

Quantizes a two-tone signal with one bit, reconstructs it with a smooth
low-pass kernel and prints the measured sup error next to the worst-case
bound.  A wide transition band (eps = 0.5) keeps the kernel short so the
script runs in a few seconds.

    python3 demos/error_decay.py
"""

import math

import numpy as np

from sigmadelta import design_filter, h_from_design, run_greedy
from sigmadelta.rates import log2_error_bound
from sigmadelta.reconstruction import design_kernel, eval_signal, sup_error, two_tone

eps = 0.5
kern = design_kernel(0.5, eps)
spec = two_tone(0.3)
window = 16.0
lams = [32, 64, 128, 256]
print(f"kernel: t_max = {kern.t_max:.0f}, ||phi||_1 = {kern.l1_norm:.4f}\n")
print("  m  lambda   sup error     bound")
for m in (1, 2, 3):
    d = design_filter(m, 1.5)
    h = h_from_design(d)
    errs = []
    for lam in lams:
        tau = 1 / lam
        N = math.ceil((window + 2 * kern.t_max + 2) / tau)
        tr = run_greedy(h, eval_signal(spec, np.arange(N) * tau), 2)
        t0 = kern.t_max + 1
        rep = sup_error(spec, tr, tau, kern, (t0, t0 + window))
        bound = 2 ** log2_error_bound(m, lam, d.log_g1, math.log(kern.l1_norm), eps)
        errs.append(rep.measured)
        print(f"  {m}  {lam:6d}  {rep.measured:.3e}  {bound:.3e}")
    slope = np.polyfit(np.log(lams), np.log(errs), 1)[0]
    print(f"     fitted slope {slope:+.2f}\n")
