"""
Fourier coefficients of a Cantor measure
========================================

The quarter Cantor measure is invariant under x -> x/4 and x -> (x + 2)/4.
Its Fourier transform is an infinite product of the digit mask
m(t) = (1 + e^{-4 pi i t}) / 2 at t = k / 4^j. We compare three estimates:
the depth-8 discretization, the product formula and a Monte Carlo average
over random digit expansions.
"""

import numpy as np

from abelkernel import IFS, discretize, fourier_coefficient
from abelkernel.measures import sample_ifs

spec = IFS(4, (0, 2), depth=8)
m = discretize(spec)
x = sample_ifs(spec, 10**6, np.random.default_rng(0))

print(f"{'k':>3} {'discretized':>24} {'product':>24} {'MC':>24} {'SE':>8}")
for k in (1, 2, 6, 8, 10, 14, 24, 32):
    e = np.exp(-2j * np.pi * k * x)
    se = np.sqrt((e.real.var() + e.imag.var()) / x.size)
    d, p, mc = fourier_coefficient(m, k), spec.fourier_product(k), e.mean()
    print(f"{k:3d} {d.real:11.6f}{d.imag:+11.6f}j {p.real:11.6f}{p.imag:+11.6f}j "
          f"{mc.real:11.6f}{mc.imag:+11.6f}j {se:8.1e}")

# %%
# Odd frequencies vanish because the first mask factor m(k/4) is zero there,
# and mu_hat(4k) = mu_hat(k), so the coefficients do not decay along 2 * 4^j.
print([round(float(abs(spec.fourier_product(2 * 4**j))), 6) for j in range(6)])
