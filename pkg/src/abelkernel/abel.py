"""Abel products: damped pairings <T2 D_s T1 x, y> and their limits as s -> 1-.

The limit is estimated by sampling the damped pairing on a grid
s_k = 1 - 2^-k and running Neville-Richardson extrapolation in h = 1 - s.
Every limit ends in one of three states: converged (the last two diagonal
extrapolants agree to ``tol``), divergent (log|g| grows against -log h with
slope above a threshold), or inconclusive (neither).

Series that are genuinely infinite are truncated separately for each s so
that the neglected tail stays below tol / 10. Samples that would need more
than ``max_terms()`` terms are dropped and listed in ``skipped``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .coeff import (
    CoeffMatrix,
    DiscCombination,
    Identity,
    RankOne,
    as_array,
    natural_length,
)
from .measures import DiscretizedMeasure, MuFunction, phases

DEFAULT_MAX_N = 20000
DIVERGENCE_SLOPE = 0.25


def max_terms() -> int:
    """Truncation cap, overridable through ``ABEL_KERNEL_MAX_N``."""
    return int(os.environ.get("ABEL_KERNEL_MAX_N", DEFAULT_MAX_N))


@dataclass(frozen=True)
class SGrid:
    values: tuple

    def __post_init__(self):
        v = tuple(float(s) for s in self.values)
        if any(not 0.0 < s < 1.0 for s in v):
            raise ValueError("grid values must lie in (0, 1)")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("grid values must be strictly increasing")
        object.__setattr__(self, "values", v)

    @classmethod
    def geometric(cls, k0: int = 3, k1: int = 12) -> "SGrid":
        """s_k = 1 - 2^-k for k = k0, ..., k1."""
        if k1 - k0 + 1 < 4:
            raise ValueError("grid must produce at least 4 samples")
        return cls(tuple(1.0 - 2.0 ** -k for k in range(k0, k1 + 1)))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


DEFAULT_GRID = SGrid.geometric(3, 12)


# ---------------------------------------------------------------------------
# Extrapolation
# ---------------------------------------------------------------------------


def neville_table(h: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Polynomial extrapolation to h = 0.

    ``g`` has shape (K, ...); returns T of shape (K, K, ...) where T[i, j]
    is the value at 0 of the polynomial through samples i-j, ..., i.
    """
    K = len(h)
    T = np.zeros((K, K) + g.shape[1:], dtype=complex)
    T[:, 0] = g
    for j in range(1, K):
        for i in range(j, K):
            T[i, j] = T[i, j - 1] + (T[i, j - 1] - T[i - 1, j - 1]) * (h[i] / (h[i - j] - h[i]))
    return T


def growth_exponents(s: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Least-squares slope of log|g| against -log(1 - s) over the last half of the samples."""
    K = len(s)
    tail = slice(K - max(3, K // 2), K) if K >= 3 else slice(0, K)
    x = -np.log1p(-s[tail])
    y = np.log(np.abs(g[tail]) + 1e-300)
    x = x - x.mean()
    y = y - y.mean(axis=0)
    return np.tensordot(x, y, axes=(0, 0)) / np.dot(x, x)


@dataclass(frozen=True, eq=False)
class AbelResult:
    """Outcome of one Abel limit."""

    value: complex
    est_error: float
    converged: bool
    divergent: bool
    samples: tuple
    extrapolation_table: np.ndarray
    growth_exponent: float | None
    tol: float = 0.0
    skipped: tuple = ()

    @property
    def inconclusive(self) -> bool:
        return not (self.converged or self.divergent)

    @property
    def status(self) -> str:
        return "converged" if self.converged else "divergent" if self.divergent else "inconclusive"

    def trace(self) -> list:
        """Rows (s, Re g, Im g, extrapolant, est_error) along the table diagonal."""
        diag = np.diagonal(self.extrapolation_table)
        rows = []
        for i, (s, g) in enumerate(self.samples):
            err = abs(diag[i] - diag[i - 1]) if i else float("nan")
            rows.append((s, g.real, g.imag, diag[i], err))
        return rows

    def to_json(self, with_trace: bool = True) -> dict:
        out = {
            "value": [self.value.real, self.value.imag],
            "est_error": self.est_error,
            "converged": self.converged,
            "divergent": self.divergent,
            "status": self.status,
            "growth_exponent": self.growth_exponent,
            "tol": self.tol,
            "skipped": list(self.skipped),
        }
        if with_trace:
            out["samples"] = [[s, g.real, g.imag] for s, g in self.samples]
            out["extrapolants"] = [[z.real, z.imag] for z in np.diagonal(self.extrapolation_table)]
        return out


@dataclass(frozen=True, eq=False)
class AbelBatch:
    """Many Abel limits sharing one s-grid; indexing yields :class:`AbelResult`."""

    s: np.ndarray
    samples: np.ndarray
    table: np.ndarray
    value: np.ndarray
    est_error: np.ndarray
    converged: np.ndarray
    divergent: np.ndarray
    growth_exponent: np.ndarray
    tol: float
    skipped: tuple = ()

    def __len__(self):
        return self.samples.shape[1]

    def __getitem__(self, i) -> AbelResult:
        return AbelResult(
            value=complex(self.value[i]),
            est_error=float(self.est_error[i]),
            converged=bool(self.converged[i]),
            divergent=bool(self.divergent[i]),
            samples=tuple((float(s), complex(g)) for s, g in zip(self.s, self.samples[:, i])),
            extrapolation_table=self.table[:, :, i],
            growth_exponent=float(self.growth_exponent[i]),
            tol=self.tol,
            skipped=self.skipped,
        )

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    @property
    def n_divergent(self) -> int:
        return int(np.count_nonzero(self.divergent))

    @property
    def n_inconclusive(self) -> int:
        return int(np.count_nonzero(~self.converged & ~self.divergent))

    def worst(self) -> int:
        """Index of the limit with the largest error estimate (non-converged first)."""
        key = np.where(self.converged, self.est_error, np.inf)
        return int(np.argmax(np.nan_to_num(key, nan=np.inf)))

    def summary(self) -> dict:
        return {
            "count": len(self),
            "converged": int(np.count_nonzero(self.converged)),
            "divergent": self.n_divergent,
            "inconclusive": self.n_inconclusive,
            "max_est_error": float(np.max(self.est_error)) if len(self) else 0.0,
            "skipped": list(self.skipped),
        }


def abel_limits(s, g, tol: float, divergence_threshold: float = DIVERGENCE_SLOPE, skipped=()) -> AbelBatch:
    """Vectorised :func:`abel_limit`: ``g`` has shape (K, n), one column per limit."""
    s = np.asarray(s, dtype=float)
    g = np.asarray(g, dtype=complex)
    if g.ndim == 1:
        g = g[:, None]
    if len(s) < 4:
        raise ValueError(f"need at least 4 samples for an Abel limit, got {len(s)}")
    if g.shape[0] != len(s):
        raise ValueError("samples and s-grid differ in length")
    order = np.argsort(s)
    s, g = s[order], g[order]
    h = 1.0 - s
    T = neville_table(h, g)
    diag = np.diagonal(T, axis1=0, axis2=1).T  # (K, n)
    value = diag[-1]
    est = np.abs(diag[-1] - diag[-2])
    finite = np.all(np.isfinite(g), axis=0)
    converged = finite & (est <= tol)
    growth = growth_exponents(s, g)
    divergent = ~converged & (growth > divergence_threshold)
    return AbelBatch(s, g, T, value, est, converged, divergent, growth, float(tol), tuple(skipped))


def abel_limit(samples, tol: float = 1e-10, divergence_threshold: float = DIVERGENCE_SLOPE) -> AbelResult:
    """Estimate lim_{s -> 1-} g(s) from samples ``[(s, g(s)), ...]``.

    Neville-Richardson extrapolation in h = 1 - s (model g = a0 + a1 h + a2 h^2
    + ...). ``value`` is the top diagonal extrapolant and ``est_error`` the
    distance between the last two diagonal extrapolants. A limit that fails
    to converge is flagged divergent when the tail slope of log|g| against
    -log h exceeds ``divergence_threshold``.
    """
    samples = list(samples)
    if len(samples) < 4:
        raise ValueError(f"need at least 4 samples for an Abel limit, got {len(samples)}")
    s = np.array([p[0] for p in samples], dtype=float)
    g = np.array([p[1] for p in samples], dtype=complex)
    return abel_limits(s, g, tol, divergence_threshold)[0]


# ---------------------------------------------------------------------------
# Damping and the damped synthesis / analysis operators
# ---------------------------------------------------------------------------


def _check_s(s):
    if not 0.0 < s < 1.0:
        raise ValueError(f"damping parameter must lie in (0, 1), got {s}")


def damp(v, s: float) -> np.ndarray:
    """D_s v = (s^n v_n)_n."""
    _check_s(s)
    v = np.asarray(v, dtype=complex)
    return v * s ** np.arange(v.size)


def truncation_length(A: float, q: float, s: float, eps: float) -> int:
    """Smallest N with A * (s q)^N / (1 - s q) <= eps (``inf`` when impossible)."""
    sq = s * q
    if A <= 0.0 or sq == 0.0:
        return 1
    if sq >= 1.0:
        return np.iinfo(np.int64).max
    N = np.log(eps * (1.0 - sq) / A) / np.log(sq)
    return max(int(np.ceil(N)), 1)


def _output_length(C: CoeffMatrix, v, s: float, eps: float) -> int:
    """Terms of D_s C v needed for a nodewise tail below eps."""
    bound = C.output_bound(v)
    if bound is None:
        return C.order if C.order is not None else natural_length(v)
    A, q, start = bound
    return max(start, truncation_length(A, q, s, eps))


def synthesis_damped(C: CoeffMatrix, v, s: float, m: DiscretizedMeasure, conjugated: bool) -> MuFunction:
    """S_ebar D_s C v (``conjugated``) or S_e D_s C^T v, as values on the nodes of ``m``.

    Infinite series are summed until the nodewise tail is below 1e-17 of the
    leading size (capped at ``max_terms()``).
    """
    _check_s(s)
    T = C if conjugated else C.transpose()
    n = min(_output_length(T, v, s, 1e-17), max_terms())
    coef = damp(T.apply(v, n), s)
    ks = np.arange(coef.size)
    E = phases(ks if conjugated else -ks, m.nodes)
    return MuFunction(coef @ E, m)


def analysis_vector(h: MuFunction, n: int, conjugated: bool) -> np.ndarray:
    """(<h, ebar_k>_mu)_{k<n} if ``conjugated`` else (<h, e_k>_mu)_{k<n}."""
    ks = np.arange(n)
    # <h, e_k> = sum w h e^{-2 pi i k x}
    E = phases(-ks if conjugated else ks, h.measure.nodes)
    return E @ (h.measure.weights * h.values)


def analysis_damped(C: CoeffMatrix, h: MuFunction, r: float, conjugated: bool, length: int | None = None) -> np.ndarray:
    """C D_r A_ebar h (``conjugated``) or C^T D_r A_e h.

    Entry m of the conjugated form is sum_n c_mn r^n <h, ebar_n>_mu. The result
    has ``C.order`` entries; infinite matrices need ``length``.
    """
    _check_s(r)
    T = C if conjugated else C.transpose()
    if T.order is None and length is None:
        raise ValueError("infinite matrix needs an explicit output length")
    n_in = T.order if T.order is not None else _analysis_input_length(T, length, r, h)
    a = damp(analysis_vector(h, n_in, conjugated), r)
    return T.apply(a, length)


def _analysis_input_length(T: CoeffMatrix, length: int, r: float, h: MuFunction) -> int:
    ext = column_extent(T, length)
    if ext is not None:
        return ext
    A = entry_sup(T) * np.sqrt(h.measure.mass) * h.norm()
    return min(truncation_length(A, 1.0, r, 1e-17), max_terms())


def column_extent(T: CoeffMatrix, nrows: int):
    """Columns that rows 0..nrows-1 of T touch, or ``None`` if unbounded."""
    if T.order is not None:
        return T.order
    if isinstance(T, Identity):
        return nrows
    return None


def entry_sup(T) -> float:
    """Upper bound on |entries| of T."""
    if isinstance(T, RankOne) and T.x is None:
        return abs(T.amplitude) ** 2
    if isinstance(T, CoeffMatrix):
        return T.norm_bound
    return T.bound


# ---------------------------------------------------------------------------
# Operators for abel_pairing
# ---------------------------------------------------------------------------


class RuleMatrix:
    """A matrix, possibly infinite in either direction, given by an entry rule.

    ``rule(i, j)`` receives broadcastable integer arrays. ``bound`` must bound
    every |entry|; it drives the truncation of infinite sums.
    """

    def __init__(self, rule, shape=(None, None), bound: float = 1.0, pattern=None):
        self.rule = rule
        self.shape = tuple(None if d is None else int(d) for d in shape)
        self.bound = float(bound)
        self.pattern = pattern

    @classmethod
    def periodic(cls, pattern, shape) -> "RuleMatrix":
        """Entry (i, j) = pattern[(i + j) % len(pattern)]."""
        p = np.asarray(pattern, dtype=complex)
        return cls(
            lambda i, j: p[(i + j) % p.size],
            shape,
            bound=float(np.max(np.abs(p))),
            pattern=tuple(p.tolist()),
        )

    def block(self, nrows, ncols):
        i = np.arange(nrows)[:, None]
        j = np.arange(ncols)[None, :]
        return np.asarray(self.rule(i, j), dtype=complex) * np.ones((nrows, ncols))

    def __repr__(self):
        return f"RuleMatrix(shape={self.shape}, pattern={self.pattern})"


@dataclass(frozen=True)
class Synthesis:
    """S_e (or S_ebar when ``conjugated``): coefficient sequences -> L^2(mu)."""

    measure: DiscretizedMeasure
    conjugated: bool = False


@dataclass(frozen=True)
class Analysis:
    """A_e (or A_ebar when ``conjugated``): L^2(mu) -> sequences."""

    measure: DiscretizedMeasure
    conjugated: bool = False


def _l1(v) -> float:
    if isinstance(v, DiscCombination):
        return float(sum(abs(a) / (1 - abs(z)) for z, a in zip(v.points, v.coeffs)))
    return float(np.sum(np.abs(v)))


def _vec_len(v) -> int:
    return v.exact_length() if isinstance(v, DiscCombination) else np.asarray(v).size


class _Side:
    """One factor of the middle sum sum_k s^k u_k r_k: first entries plus a decay bound."""

    def __init__(self, length, bound, fetch):
        self.length = length  # exact finite length or None
        self.bound = bound  # (A, q) with |entry_k| <= A q^k, used when length is None
        self.fetch = fetch  # n -> first n entries


def _matrix_side(T, x, adjoint: bool) -> _Side:
    """u = T x (adjoint=False) or r = conj(T^H y) (adjoint=True, y passed as x)."""
    if isinstance(T, CoeffMatrix):
        # Hermitian, so T^H y = T y
        out_bound = T.output_bound(x)
        if out_bound is None:
            L = T.order if T.order is not None else natural_length(x)
            fetch = lambda n: T.apply(x, n)
            return _Side(L, None, _conj_if(fetch, adjoint))
        A, q, _ = out_bound
        return _Side(None, (A, q), _conj_if(lambda n: T.apply(x, n), adjoint))

    if isinstance(T, np.ndarray):
        M = T.conj().T if adjoint else T
        cols = M.shape[1]
        fetch = lambda n: as_array(M @ as_array(x, cols), n)
        return _Side(M.shape[0], None, _conj_if(fetch, adjoint))

    if isinstance(T, RuleMatrix):
        rows, cols = T.shape if not adjoint else T.shape[::-1]
        n_in = cols if cols is not None else _vec_len(x)

        def fetch(n, rows=rows):
            nr = n if rows is None else rows
            B = T.block(n_in, nr).conj().T if adjoint else T.block(nr, n_in)
            return as_array(B @ as_array(x, n_in), n)

        if rows is not None:
            return _Side(rows, None, _conj_if(fetch, adjoint))
        return _Side(None, (T.bound * _l1(x), 1.0), _conj_if(fetch, adjoint))

    raise TypeError(f"unsupported matrix operator {type(T).__name__}")


def _conj_if(fetch, flag):
    return (lambda n: np.conj(fetch(n))) if flag else fetch


def _function_side(measure: DiscretizedMeasure, h: MuFunction, conjugated: bool, as_row: bool) -> _Side:
    """Entries <h, e_{+-k}> (analysis input) or <e_{+-k}, h> (synthesis against h)."""
    if h.measure is not measure:
        raise ValueError("function and operator live on different measures")
    bound = (np.sqrt(measure.mass) * h.norm(), 1.0)
    if as_row:
        # <e_{+-k}, h> = conj(<h, e_{+-k}>)
        return _Side(None, bound, lambda n: np.conj(analysis_vector(h, n, conjugated)))
    return _Side(None, bound, lambda n: analysis_vector(h, n, conjugated))


def abel_pairing(t2, t1, x, y, grid: SGrid | None = None, tol: float = 1e-10,
                 divergence_threshold: float = DIVERGENCE_SLOPE) -> AbelResult:
    """Abel limit of <T2 D_s T1 x, y>.

    Supported operator pairs:

    * matrix, matrix -- each a :class:`CoeffMatrix`, a finite ``ndarray`` or a
      :class:`RuleMatrix`; ``x`` and ``y`` are sequences (arrays or
      :class:`DiscCombination`);
    * :class:`Synthesis`, matrix -- ``y`` is a :class:`MuFunction`;
    * matrix, :class:`Analysis` -- ``x`` is a :class:`MuFunction`.

    Returns an :class:`AbelResult`; divergence is reported, not raised.
    """
    grid = DEFAULT_GRID if grid is None else grid
    if isinstance(t1, (Synthesis, Analysis)) and isinstance(t2, (Synthesis, Analysis)):
        raise ValueError("pairing of two L^2(mu) operators is not supported")
    if isinstance(t2, Analysis) or isinstance(t1, Synthesis):
        raise ValueError(f"unsupported operator pair ({type(t2).__name__}, {type(t1).__name__})")

    if isinstance(t1, Analysis):
        u = _function_side(t1.measure, x, t1.conjugated, as_row=False)
    else:
        u = _matrix_side(t1, x, adjoint=False)
    if isinstance(t2, Synthesis):
        r = _function_side(t2.measure, y, t2.conjugated, as_row=True)
    else:
        r = _matrix_side(t2, y, adjoint=True)

    s_vals, lengths, skipped = _plan(grid, u, r, tol / 10)
    if len(s_vals) < 4:
        raise ValueError(
            f"only {len(s_vals)} grid points can be truncated within tol/10 under "
            f"the cap of {max_terms()} terms"
        )
    n_max = max(lengths)
    prod = u.fetch(n_max) * r.fetch(n_max)
    k = np.arange(n_max)
    g = np.array([np.sum(s ** k[:n] * prod[:n]) for s, n in zip(s_vals, lengths)])
    return abel_limits(np.array(s_vals), g, tol, divergence_threshold, skipped)[0]


def _plan(grid: SGrid, u: _Side, r: _Side, eps: float):
    """Per-s truncation lengths; samples beyond the cap are skipped."""
    exact = [L for L in (u.length, r.length) if L is not None]
    cap = max_terms()
    keep, lengths, skipped = [], [], []
    for s in grid:
        if exact:
            n = min(exact)
        else:
            A = u.bound[0] * r.bound[0]
            q = u.bound[1] * r.bound[1]
            n = truncation_length(A, q, s, eps)
        if n > cap:
            skipped.append(s)
            continue
        keep.append(s)
        lengths.append(max(int(n), 1))
    return keep, lengths, tuple(skipped)


def synthesis_limit(C: CoeffMatrix, v, m: DiscretizedMeasure, conjugated: bool,
                    grid: SGrid | None = None, tol: float = 1e-10,
                    divergence_threshold: float = DIVERGENCE_SLOPE):
    """Nodewise Abel limit of S_ebar D_s C v (``conjugated``) or S_e D_s C^T v.

    Returns ``(MuFunction of limit values, AbelBatch of per-node diagnostics)``.
    On a finite node set the weak and nodewise limits coincide.
    """
    grid = DEFAULT_GRID if grid is None else grid
    T = C if conjugated else C.transpose()
    bound = T.output_bound(v)
    cap = max_terms()
    keep, lengths, skipped = [], [], []
    for s in grid:
        if bound is None:
            n = T.order if T.order is not None else natural_length(v)
        else:
            A, q, start = bound
            n = max(start, truncation_length(A, q, s, tol / 10))
        if n > cap:
            skipped.append(s)
            continue
        keep.append(s)
        lengths.append(max(int(n), 1))
    if len(keep) < 4:
        raise ValueError(
            f"only {len(keep)} grid points can be truncated within tol/10 under the cap of {cap} terms"
        )
    n_max = max(lengths)
    coef = T.apply(v, n_max)
    ks = np.arange(n_max)
    E = phases(ks if conjugated else -ks, m.nodes)
    G = np.empty((len(keep), len(m)), dtype=complex)
    for i, (s, n) in enumerate(zip(keep, lengths)):
        G[i] = (s ** ks[:n] * coef[:n]) @ E[:n]
    batch = abel_limits(np.array(keep), G, tol, divergence_threshold, skipped)
    return MuFunction(batch.value, m), batch


def analysis_limit(C: CoeffMatrix, h: MuFunction, probes: int, conjugated: bool = True,
                   grid: SGrid | None = None, tol: float = 1e-10,
                   divergence_threshold: float = DIVERGENCE_SLOPE) -> AbelBatch:
    """Abel limits of the first ``probes`` entries of C D_r A_ebar h (or C^T D_r A_e h).

    Entry m is <C D_r A h, delta_m>, i.e. the outer factor of the Abel
    product probed against the standard basis.
    """
    grid = DEFAULT_GRID if grid is None else grid
    T = C if conjugated else C.transpose()
    ext = column_extent(T, probes)
    cap = max_terms()
    keep, lengths, skipped = [], [], []
    A = entry_sup(T) * np.sqrt(h.measure.mass) * h.norm()
    for r in grid:
        n = ext if ext is not None else truncation_length(A, 1.0, r, tol / 10)
        if n > cap:
            skipped.append(r)
            continue
        keep.append(r)
        lengths.append(max(int(n), 1))
    if len(keep) < 4:
        raise ValueError(
            f"only {len(keep)} grid points can be truncated within tol/10 under the cap of {cap} terms"
        )
    n_max = max(lengths)
    a = analysis_vector(h, n_max, conjugated)
    B = T.block(probes, n_max)
    ks = np.arange(n_max)
    G = np.empty((len(keep), probes), dtype=complex)
    for i, (r, n) in enumerate(zip(keep, lengths)):
        G[i] = B[:, :n] @ (r ** ks[:n] * a[:n])
    return abel_limits(np.array(keep), G, tol, divergence_threshold, skipped)
