"""Weak L^2(mu)-boundary functions K*_w of K_C.

K*_w is the Abel limit of the damped synthesis S_e D_s C^T conj(w)_vec. On a
discretized measure L^2(mu) is finite-dimensional, so the weak limit is
computed node by node. For a discretization of a continuous measure this is
an approximation of the weak limit, not the weak limit itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abel import AbelBatch, SGrid, Synthesis, abel_pairing, synthesis_limit
from .coeff import CoeffMatrix, DiscCombination, check_disc
from .measures import DiscretizedMeasure, MuFunction, inner_product_mu


class BoundaryError(RuntimeError):
    """Raised when some node's Abel limit is divergent or inconclusive."""

    def __init__(self, message: str, diagnostics: AbelBatch):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    base: MuFunction
    w: complex
    diagnostics: AbelBatch

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    @property
    def max_est_error(self) -> float:
        return float(np.max(self.diagnostics.est_error))


def boundary_limit(C: CoeffMatrix, v, m: DiscretizedMeasure, conjugated: bool = False,
                   grid: SGrid | None = None, tol: float = 1e-10) -> tuple[MuFunction, AbelBatch]:
    """L v = (S_e Abel-times C^T) v, or with ``conjugated`` Ltilde v = (S_ebar Abel-times C) v.

    Fails closed: any divergent or inconclusive node raises :class:`BoundaryError`.
    """
    f, batch = synthesis_limit(C, v, m, conjugated, grid, tol)
    if not batch.all_converged:
        raise BoundaryError(
            f"no boundary function: {batch.n_divergent} divergent and "
            f"{batch.n_inconclusive} inconclusive node limits out of {len(batch)}",
            batch,
        )
    return f, batch


def boundary_function(C: CoeffMatrix, w, m: DiscretizedMeasure, tol: float = 1e-10,
                      grid: SGrid | None = None) -> BoundaryFunction:
    """K*_w as values on the nodes of ``m``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    w = check_disc(w)
    v = DiscCombination.geometric(np.conj(w))
    f, batch = boundary_limit(C, v, m, conjugated=False, grid=grid, tol=tol)
    return BoundaryFunction(f, w, batch)


def weak_limit_check(C: CoeffMatrix, w, m: DiscretizedMeasure, tests, tol: float = 1e-10,
                     grid: SGrid | None = None) -> list[float]:
    """Residuals |lim_s <S_e D_s C^T conj(w)_vec, h>_mu - <K*_w, h>_mu| for each test function h.

    The left side is an Abel pairing computed independently of the nodewise
    boundary function on the right.
    """
    K = boundary_function(C, w, m, tol, grid)
    v = DiscCombination.geometric(np.conj(check_disc(w)))
    S = Synthesis(m, conjugated=False)
    Ct = C.transpose()
    out = []
    for h in tests:
        if h.measure is not m:
            raise ValueError("test function lives on a different measure")
        res = abel_pairing(S, Ct, v, h, grid, tol)
        if not res.converged:
            raise BoundaryError(f"pairing limit is {res.status}", None)
        out.append(abs(res.value - inner_product_mu(K.base, h)))
    return out
