"""Numerical tests of mu in M(K_C) and the identities behind it.

The main test checks C = (C Abel-times A_ebar)(S_ebar Abel-times C) on a
finite sample of V, the span of the geometric vectors z_vec. For each sample
v it computes the inner limit f = lim_s S_ebar D_s C v node by node, then the
outer limits u_m = lim_r (C D_r A_ebar f)_m for the first few m, and compares
u with C v. Limits that are divergent or inconclusive make the sample
inconclusive, and an inconclusive sample can never count towards a pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .abel import AbelResult, Analysis, SGrid, abel_pairing, analysis_limit
from .boundary import BoundaryError, boundary_function, boundary_limit
from .coeff import CoeffMatrix, DiscCombination, check_disc
from .kernel import kernel_eval
from .measures import DiscretizedMeasure, MuFunction, inner_product_mu
from .moment import MAX_DENSE_ORDER, moment_matrix

RNG_ALGORITHM = "numpy.random.PCG64"


@dataclass(frozen=True)
class DiscSampleSet:
    """Finite sample of V: single geometric vectors plus a few linear combinations."""

    points: tuple
    combos: tuple = ()

    def __post_init__(self):
        for z in self.points:
            if abs(complex(z)) > 0.95:
                raise ValueError(f"sample point {z} has modulus above 0.95")
        for c in self.combos:
            if c.rho > 0.95:
                raise ValueError("combination point has modulus above 0.95")

    @classmethod
    def default(cls, seed: int = 0, radii=(0.3, 0.6, 0.9), n_angles: int = 8, n_combos: int = 8,
                terms: int = 3) -> "DiscSampleSet":
        """Points on ``radii`` x ``n_angles`` angles plus random unit-norm combinations."""
        angles = 2 * np.pi * np.arange(n_angles) / n_angles
        points = tuple(complex(r * np.exp(1j * a)) for r in radii for a in angles)
        rng = np.random.default_rng(seed)
        combos = []
        for _ in range(n_combos):
            idx = rng.choice(len(points), size=terms, replace=False)
            alpha = rng.normal(size=terms) + 1j * rng.normal(size=terms)
            alpha /= np.linalg.norm(alpha)
            combos.append(DiscCombination(tuple(points[i] for i in idx), tuple(alpha)))
        return cls(points, tuple(combos))

    def vectors(self):
        """Yield (descriptor, DiscCombination)."""
        for z in self.points:
            yield _fmt_point(z), DiscCombination.geometric(z)
        for i, c in enumerate(self.combos):
            yield f"combo{i}", c

    def __len__(self):
        return len(self.points) + len(self.combos)

    def to_json(self) -> dict:
        return {
            "points": [[z.real, z.imag] for z in map(complex, self.points)],
            "combos": [
                {
                    "points": [[z.real, z.imag] for z in c.points],
                    "coeffs": [[a.real, a.imag] for a in c.coeffs],
                }
                for c in self.combos
            ],
        }


def _fmt_point(z) -> str:
    z = complex(z)
    return f"z={z.real:+.6f}{z.imag:+.6f}j"


@dataclass
class SampleOutcome:
    descriptor: str
    residual: float | None
    status: str  # "pass", "fail" or "inconclusive"
    diagnostics: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "sample": self.descriptor,
            "residual": self.residual,
            "status": self.status,
            "diagnostics": self.diagnostics,
        }


@dataclass
class Verdict:
    passed: bool
    max_residual: float
    tolerance: float
    per_sample: list
    inconclusive_count: int

    @property
    def failed_count(self) -> int:
        return sum(1 for o in self.per_sample if o.status == "fail")

    @property
    def status(self) -> str:
        if self.passed:
            return "pass"
        return "fail" if self.failed_count else "inconclusive"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "inconclusive": 2}[self.status]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "status": self.status,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "inconclusive_count": self.inconclusive_count,
            "failed_count": self.failed_count,
            "per_sample": [o.to_json() for o in self.per_sample],
        }


def _aggregate(outcomes: list, tol: float) -> Verdict:
    residuals = [o.residual for o in outcomes if o.residual is not None]
    max_res = float(max(residuals)) if residuals else float("nan")
    inconclusive = sum(1 for o in outcomes if o.status == "inconclusive")
    passed = bool(outcomes) and inconclusive == 0 and all(o.status == "pass" for o in outcomes)
    return Verdict(passed, max_res, float(tol), outcomes, inconclusive)


def probe_order(C: CoeffMatrix) -> int:
    return max(2 * C.order, 64) if C.order is not None else 64


def membership_test(C: CoeffMatrix, m: DiscretizedMeasure, samples: DiscSampleSet | None = None,
                    tol: float = 1e-8, grid: SGrid | None = None, probes: int | None = None) -> Verdict:
    """Check C v = (C Abel-times A_ebar)(S_ebar Abel-times C) v on every sample v.

    Parameters
    ----------
    C : CoeffMatrix
    m : DiscretizedMeasure
    samples : DiscSampleSet, optional
        Defaults to :meth:`DiscSampleSet.default`.
    tol : float
        Residual tolerance; inner limits are computed to ``tol / 10``.
    grid : SGrid, optional
    probes : int, optional
        Number of leading entries of the outer limit compared with C v;
        defaults to ``max(2 * order, 64)``.

    Returns
    -------
    Verdict
        ``residual`` per sample is max_m |u_m - (C v)_m|.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    samples = DiscSampleSet.default() if samples is None else samples
    P = probe_order(C) if probes is None else probes
    outcomes = []
    for desc, v in samples.vectors():
        outcomes.append(_membership_sample(C, m, desc, v, tol, grid, P))
    return _aggregate(outcomes, tol)


def _membership_sample(C, m, desc, v, tol, grid, P) -> SampleOutcome:
    try:
        f, inner = boundary_limit(C, v, m, conjugated=True, grid=grid, tol=tol / 10)
    except BoundaryError as exc:
        diag = {"stage": "inner", "reason": str(exc)}
        traces = {}
        if exc.diagnostics is not None:
            diag["inner"] = exc.diagnostics.summary()
            traces["inner"] = exc.diagnostics[exc.diagnostics.worst()]
        return SampleOutcome(desc, None, "inconclusive", diag, traces)
    except ValueError as exc:
        return SampleOutcome(desc, None, "inconclusive", {"stage": "inner", "reason": str(exc)})

    try:
        outer = analysis_limit(C, f, P, conjugated=True, grid=grid, tol=tol)
    except ValueError as exc:
        return SampleOutcome(desc, None, "inconclusive", {"stage": "outer", "reason": str(exc)})
    traces = {"inner": inner[inner.worst()], "outer": outer[outer.worst()]}
    diag = {"inner": inner.summary(), "outer": outer.summary()}
    if not outer.all_converged:
        diag["stage"] = "outer"
        return SampleOutcome(desc, None, "inconclusive", diag, traces)
    Cv = C.apply(v, P)
    residual = float(np.max(np.abs(outer.value - Cv)))
    diag["norm_Cv_inf"] = float(np.max(np.abs(Cv)))
    return SampleOutcome(desc, residual, "pass" if residual <= tol else "fail", diag, traces)


def reproduction_check(C: CoeffMatrix, m: DiscretizedMeasure, pairs, tol: float = 1e-8,
                       grid: SGrid | None = None) -> Verdict:
    """Residuals |K_C(w, z) - <K*_w, K*_z>_mu| over the given (w, z) pairs."""
    cache = {}

    def star(p):
        p = check_disc(p)
        if p not in cache:
            cache[p] = boundary_function(C, p, m, tol / 10, grid)
        return cache[p]

    outcomes = []
    for w, z in pairs:
        desc = f"w={complex(w):.6f}, z={complex(z):.6f}"
        try:
            Kw, Kz = star(w), star(z)
        except BoundaryError as exc:
            outcomes.append(SampleOutcome(desc, None, "inconclusive", {"reason": str(exc)}))
            continue
        k = kernel_eval(C, w, z, tol / 10).value
        residual = abs(k - inner_product_mu(Kw.base, Kz.base))
        status = "pass" if residual <= tol else "fail"
        outcomes.append(SampleOutcome(desc, float(residual), status, {"kernel": [k.real, k.imag]}))
    return _aggregate(outcomes, tol)


def swapping_check(C: CoeffMatrix, m: DiscretizedMeasure, w, z, tol: float = 1e-10,
                   grid: SGrid | None = None) -> float:
    """|<L conj(w)_vec, L conj(z)_vec>_mu - <Ltilde z_vec, Ltilde w_vec>_mu|.

    L uses the S_e D_s C^T path and Ltilde the S_ebar D_s C path; the two are
    computed independently.
    """
    w, z = check_disc(w), check_disc(z)
    lw, _ = boundary_limit(C, DiscCombination.geometric(np.conj(w)), m, False, grid, tol / 10)
    lz, _ = boundary_limit(C, DiscCombination.geometric(np.conj(z)), m, False, grid, tol / 10)
    tz, _ = boundary_limit(C, DiscCombination.geometric(z), m, True, grid, tol / 10)
    tw, _ = boundary_limit(C, DiscCombination.geometric(w), m, True, grid, tol / 10)
    return abs(inner_product_mu(lw, lz) - inner_product_mu(tz, tw))


def adjoint_check(C: CoeffMatrix, m: DiscretizedMeasure, h: MuFunction, v, grid: SGrid | None = None,
                  tol: float = 1e-10) -> float:
    """|lim_r <C^T D_r A_e h, v> - <h, L v>_mu| with L v = lim_s S_e D_s C^T v."""
    if h.measure is not m:
        raise ValueError("h lives on a different measure")
    outer = abel_pairing(C.transpose(), Analysis(m, conjugated=False), h, v, grid, tol / 10)
    if not outer.converged:
        raise BoundaryError(f"outer limit is {outer.status}", None)
    Lv, _ = boundary_limit(C, v, m, conjugated=False, grid=grid, tol=tol / 10)
    return abs(outer.value - inner_product_mu(h, Lv))


def cmc_bounded_check(C: CoeffMatrix, m: DiscretizedMeasure, N: int, tol: float | None = None) -> float:
    """Frobenius norm of C_N - C_N M_N C_N on N x N truncations."""
    if N > MAX_DENSE_ORDER:
        raise ValueError(f"N must be at most {MAX_DENSE_ORDER}")
    CN = C.dense(N)
    MN = moment_matrix(m, N).dense()
    return float(np.linalg.norm(CN - CN @ MN @ CN, "fro"))
