"""
Szego kernel and Lebesgue measure
=================================

With C the identity, K_C is the Szego kernel k_w(z) = 1 / (1 - conj(w) z) of
the Hardy space. Its boundary functions on the circle are
k*_w(x) = 1 / (1 - conj(w) e^{2 pi i x}), and Lebesgue measure reproduces the
kernel: <k*_w, k*_z> = k_w(z). We compute the boundary functions as Abel
limits, compare with the closed form, and run the full membership test.
"""

import numpy as np

from abelkernel import (
    Identity,
    Lebesgue,
    boundary_function,
    discretize,
    inner_product_mu,
    kernel_eval,
    membership_test,
    szego_kernel,
)

m = discretize(Lebesgue(1.0), 512)
C = Identity(64)

# %%
# Boundary function at w = 1/2. The truncation at order 64 leaves an error of
# about 2^-64 compared with the untruncated Szego boundary.
K = boundary_function(C, 0.5, m)
exact = 1 / (1 - 0.5 * np.exp(2j * np.pi * m.nodes))
print("max |K*_w - closed form| =", np.max(np.abs(K.values - exact)))

# %%
# Reproduction: <K*_w, K*_z>_mu against K(w, z).
for w, z in [(0.5, 1 / 3), (0.7j, -0.2 + 0.4j), (0.0, 0.8)]:
    Kw, Kz = boundary_function(C, w, m), boundary_function(C, z, m)
    lhs = inner_product_mu(Kw.base, Kz.base)
    print(f"w={w!s:>12} z={z!s:>14}  <K*_w,K*_z>={lhs:.12f}  K(w,z)={kernel_eval(C, w, z).value:.12f}"
          f"  Szego={szego_kernel(w, z):.12f}")

# %%
# Membership test over the default sample of V: 24 geometric vectors and 8
# random combinations.
v = membership_test(C, m)
print(f"membership: {v.status}, max residual {v.max_residual:.2e}")

# %%
# Doubling C breaks the identity C = C M C: the test fails.
print("2C:", membership_test(C.scaled(2.0), m).status)
