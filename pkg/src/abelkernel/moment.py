"""Toeplitz moment matrices M = (mu_hat(n - m))_{mn} and Bessel-type growth diagnostics.

Whether M is a bounded operator on l^2 is an infinite-dimensional question.
:func:`bessel_growth` only looks at how the largest eigenvalue of the
leading N x N truncations behaves as N grows; its verdict is a diagnostic,
not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .measures import DiscretizedMeasure, fourier_coefficients

MAX_DENSE_ORDER = 512


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """Leading N x N block of the moment matrix of a discretized measure.

    ``diagonals[k + N - 1]`` holds mu_hat(k) for k = -(N-1), ..., N-1, and
    entry (m, n) is ``mu_hat(n - m)``.
    """

    measure: DiscretizedMeasure
    order: int
    diagonals: np.ndarray

    def d(self, k: int) -> complex:
        return complex(self.diagonals[k + self.order - 1])

    def entry(self, m: int, n: int) -> complex:
        if not (0 <= m < self.order and 0 <= n < self.order):
            raise IndexError(f"({m}, {n}) outside a {self.order}x{self.order} truncation")
        return self.d(n - m)

    def dense(self) -> np.ndarray:
        N = self.order
        # first column: mu_hat(-m); first row: mu_hat(n)
        col = self.diagonals[N - 1 :: -1]
        row = self.diagonals[N - 1 :]
        return scipy.linalg.toeplitz(col, row)

    def eigvalsh(self) -> np.ndarray:
        if self.order > MAX_DENSE_ORDER:
            raise ValueError(f"dense eigensolve limited to N <= {MAX_DENSE_ORDER}")
        return scipy.linalg.eigvalsh(self.dense())


def moment_matrix(m: DiscretizedMeasure, N: int) -> MomentMatrix:
    if int(N) != N or N < 1:
        raise ValueError(f"order must be a positive integer, got {N}")
    N = int(N)
    ks = np.arange(-(N - 1), N)
    return MomentMatrix(m, N, fourier_coefficients(m, ks))


def psd_floor(M: MomentMatrix) -> float:
    """Smallest eigenvalue of the Hermitian truncation."""
    return float(M.eigvalsh()[0])


@dataclass(frozen=True)
class GrowthReport:
    orders: tuple
    lambda_max: tuple
    slope: float
    verdict: str

    def to_json(self) -> dict:
        return {
            "orders": list(self.orders),
            "lambda_max": list(self.lambda_max),
            "slope": self.slope,
            "verdict": self.verdict,
        }


def bessel_growth(m: DiscretizedMeasure, orders=(8, 16, 32, 64), rtol: float = 1e-3) -> GrowthReport:
    """Track lambda_max(M_N) over increasing truncation orders.

    The verdict is ``"bounded"`` when the relative change of lambda_max over
    the last two orders is below ``rtol`` and ``"growing"`` otherwise.
    ``slope`` is the least-squares slope of log lambda_max against log N.
    """
    orders = [int(N) for N in orders]
    if not orders or any(N < 1 for N in orders):
        raise ValueError("orders must be positive integers")
    if any(b <= a for a, b in zip(orders, orders[1:])):
        raise ValueError("orders must be strictly ascending")
    try:
        lam = [float(moment_matrix(m, N).eigvalsh()[-1]) for N in orders]
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc

    if len(orders) >= 2 and min(lam) > 0:
        slope = float(np.polyfit(np.log(orders), np.log(lam), 1)[0])
    else:
        slope = 0.0
    if len(orders) >= 2:
        a, b = lam[-2], lam[-1]
        stable = abs(b - a) <= rtol * max(abs(b), np.finfo(float).tiny)
    else:
        stable = False
    return GrowthReport(tuple(orders), tuple(lam), slope, "bounded" if stable else "growing")
