"""
A rank-one kernel on three points
=================================

Take phi = sum a_n e_n, a trigonometric polynomial, and the measure mu with
mass 1/3 at 0, 1/3 and 2/3. Put x = conj(a) / ||phi||_mu and C = x x^*. Then
K_C(w, z) = conj(g(w)) g(z) with g(z) = sum a_n z^n / ||phi||, every boundary
function is a multiple of phi, and C M C = ||phi||^2 C = C, so mu represents
K_C. Scaling the measure changes ||phi|| and breaks the identity.
"""

import numpy as np

from abelkernel import (
    Atomic,
    cmc_bounded_check,
    discretize,
    membership_test,
    rank_one_from_coeffs,
    reproduction_check,
    synthesized_function,
)

a = np.array([1.0, 0.5, -0.3 + 0.2j, 0.1, 0.25j])
mu = discretize(Atomic.equal_weights(["0", "1/3", "2/3"]))
C = rank_one_from_coeffs(np.conj(a), mu)
phi = synthesized_function(C.x, mu)
print("||phi||_mu =", phi.norm())

# %%
# Exact finite check of C = C M C and the Abel-limit membership test.
print("|C - C M C|_F =", cmc_bounded_check(C, mu, 8))
v = membership_test(C, mu)
print(f"membership: {v.status}, max residual {v.max_residual:.2e}")
pairs = [(0.3, 0.5j), (-0.6 + 0.1j, 0.2), (0.0, 0.0)]
print(f"reproduction: max residual {reproduction_check(C, mu, pairs).max_residual:.2e}")

# %%
# The same C against the measure with total mass 4: ||phi||^2 = 4, the composed
# operator is 4 C and every sample fails with residual 3 |C v|.
mu4 = discretize(Atomic.equal_weights(["0", "1/3", "2/3"], 4.0))
bad = membership_test(C, mu4)
o = bad.per_sample[0]
print(f"mass 4: {bad.status}; first sample residual {o.residual:.4f} = "
      f"{o.residual / o.diagnostics['norm_Cv_inf']:.4f} x |Cv|")
