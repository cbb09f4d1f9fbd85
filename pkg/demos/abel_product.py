"""
Abel products of a row and a column
===================================

The row B = (1, 1, 1, ...) and the column A = (1, -1, 1, ...)^T cannot be
multiplied in the ordinary sense: B A = 1 - 1 + 1 - ... has no sum. Damping
the middle index by s^n gives B D_s A = 1 / (1 + s), whose limit as s -> 1-
is 1/2. This script shows the damped samples, the Richardson extrapolation
that produces the limit, and what a divergent pairing looks like.
"""

import numpy as np

from abelkernel import RuleMatrix, abel_pairing

B = RuleMatrix.periodic([1.0], (1, None))
A = RuleMatrix.periodic([1.0, -1.0], (None, 1))

# %%
# The damped pairing on the default grid s_k = 1 - 2^-k
res = abel_pairing(B, A, [1.0], [1.0])
print(f"{'s':>14} {'g(s)':>20} {'1/(1+s)':>20} {'extrapolant':>20}")
for s, re, im, ext, err in res.trace():
    print(f"{s:14.10f} {re:20.15f} {1 / (1 + s):20.15f} {ext.real:20.15f}")
print(f"limit {res.value.real:.15f}  est_error {res.est_error:.1e}  status {res.status}")
if res.skipped:
    print("grid points beyond the truncation cap:", res.skipped)

# %%
# Replacing A by the all-ones column gives g(s) = 1 / (1 - s). The pairing is
# reported as divergent with growth exponent close to 1 instead of returning
# a meaningless extrapolant.
ones = RuleMatrix.periodic([1.0], (None, 1))
div = abel_pairing(B, ones, [1.0], [1.0])
print(f"divergent={div.divergent}  growth exponent={div.growth_exponent:.3f}")

# %%
# For finite matrices the Abel product is the ordinary product.
rng = np.random.default_rng(0)
T2, T1 = rng.normal(size=(4, 7)), rng.normal(size=(7, 3))
x, y = rng.normal(size=3), rng.normal(size=4)
print("abel:", abel_pairing(T2, T1, x, y).value.real, " ordinary:", y @ T2 @ T1 @ x)
