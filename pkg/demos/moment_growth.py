"""
Moment matrices and the Bessel bound
====================================

The moment matrix M_N = (mu_hat(n - m)) is the Gram matrix of e_0, ..., e_{N-1}
in L^2(mu). Its largest eigenvalue stays bounded exactly when the
exponentials form a Bessel sequence. Lebesgue measure gives the identity, a
point mass gives the all-ones matrix with lambda_max = N, and the Cantor-type
measure sits in between.
"""

from abelkernel import IFS, Atomic, Lebesgue, bessel_growth, discretize

measures = {
    "Lebesgue": discretize(Lebesgue(1.0), 512),
    "atom at 0": discretize(Atomic(((0, 1.0),))),
    "two atoms": discretize(Atomic(((0, 0.5), (0.5, 0.5)))),
    "Cantor 1/4": discretize(IFS(4, (0, 2), depth=8)),
}

for name, m in measures.items():
    rep = bessel_growth(m, (8, 16, 32, 64, 128))
    lam = ", ".join(f"{v:8.3f}" for v in rep.lambda_max)
    print(f"{name:>11}: lambda_max = [{lam}]  slope {rep.slope:5.2f}  {rep.verdict}")
