"""Positive coefficient matrices C acting on l^2(N_0), and the vectors they act on.

Finite vectors are plain 1-d complex arrays. Elements of the span V of the
geometric vectors z_vec = (z^n)_n are :class:`DiscCombination` objects, which
are infinite but can be truncated to any length with a known tail bound.

Matrices come in four variants: :class:`Dense`, :class:`Diagonal`,
:class:`RankOne` and :class:`Identity`. Each has a truncation ``order``
(entries at or beyond it are zero), except the infinite identity and the
power-law rank-one matrix, whose ``order`` is ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special

from .measures import DiscretizedMeasure, MuFunction, phases

HERMITIAN_ATOL = 1e-12
PSD_RTOL = 1e-10


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------


def check_disc(z, margin: float = 1e-9) -> complex:
    z = complex(z)
    if not abs(z) <= 1.0 - margin:
        raise ValueError(f"point {z} is not inside the disc |z| <= 1 - {margin:g}")
    return z


@dataclass(frozen=True)
class DiscCombination:
    """The l^2 vector sum_j coeffs[j] * (points[j]^n)_{n >= 0}."""

    points: tuple
    coeffs: tuple

    def __post_init__(self):
        points = tuple(check_disc(z) for z in self.points)
        coeffs = tuple(complex(a) for a in self.coeffs)
        if len(points) != len(coeffs) or not points:
            raise ValueError("need matching, non-empty points and coefficients")
        if len(set(points)) != len(points):
            raise ValueError("combination points must be pairwise distinct")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def geometric(cls, z) -> "DiscCombination":
        return cls((z,), (1.0,))

    @property
    def rho(self) -> float:
        return max(abs(z) for z in self.points)

    @property
    def coef_l1(self) -> float:
        return float(sum(abs(a) for a in self.coeffs))

    def truncate(self, n: int) -> np.ndarray:
        """First ``n`` entries."""
        k = np.arange(n)
        out = np.zeros(n, dtype=complex)
        for z, a in zip(self.points, self.coeffs):
            out += a * z ** k
        return out

    def conj(self) -> "DiscCombination":
        return DiscCombination(
            tuple(np.conj(z) for z in self.points), tuple(np.conj(a) for a in self.coeffs)
        )

    def scaled(self, alpha) -> "DiscCombination":
        return DiscCombination(self.points, tuple(alpha * a for a in self.coeffs))

    def norm(self) -> float:
        """Exact l^2 norm via the Szego Gram matrix 1 / (1 - z_j conj(z_k))."""
        z = np.asarray(self.points)
        a = np.asarray(self.coeffs)
        G = 1.0 / (1.0 - z[:, None] * np.conj(z[None, :]))
        return float(np.sqrt(max((np.conj(a) @ G @ a).real, 0.0)))

    def entry_bound(self):
        """(A, q) with |v_n| <= A * q**n for all n."""
        return self.coef_l1, self.rho

    def tail_norm(self, n: int) -> float:
        """Upper bound on the l^2 norm of the entries with index >= n."""
        return float(
            sum(abs(a) * abs(z) ** n / np.sqrt(1 - abs(z) ** 2) for z, a in zip(self.points, self.coeffs))
        )

    def exact_length(self, eps: float = 1e-17) -> int:
        """Length past which every entry is below ``eps`` times the largest coefficient."""
        rho = self.rho
        if rho == 0.0:
            return 1
        n = int(np.ceil(np.log(eps * (1 - rho)) / np.log(rho))) + 1
        return max(n, 1)


def as_array(v, n: int) -> np.ndarray:
    """First ``n`` entries of a finite array (zero-padded) or a DiscCombination."""
    if isinstance(v, DiscCombination):
        return v.truncate(n)
    v = np.asarray(v, dtype=complex).ravel()
    out = np.zeros(n, dtype=complex)
    out[: min(n, v.size)] = v[:n]
    return out


def natural_length(v) -> int | None:
    if isinstance(v, DiscCombination):
        return None
    return int(np.asarray(v).size)


def conj_vector(v):
    if isinstance(v, DiscCombination):
        return v.conj()
    return np.conj(np.asarray(v, dtype=complex))


def delta(n: int, length: int | None = None) -> np.ndarray:
    out = np.zeros(max(length or 0, n + 1), dtype=complex)
    out[n] = 1.0
    return out


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class CoeffMatrix:
    """Base class; subclasses fix ``order`` and ``norm_bound``."""

    order: int | None
    norm_bound: float

    def entry(self, m: int, n: int) -> complex:
        if m < 0 or n < 0:
            raise IndexError(f"negative index ({m}, {n})")
        if self.order is not None and (m >= self.order or n >= self.order):
            return 0j
        return complex(self.block(m + 1, n + 1)[m, n])

    def block(self, nrows: int, ncols: int) -> np.ndarray:
        raise NotImplementedError

    def dense(self, N: int | None = None) -> np.ndarray:
        N = self.order if N is None else N
        if N is None:
            raise ValueError("infinite matrix needs an explicit size")
        return self.block(N, N)

    def input_length(self, v, length: int | None) -> int:
        """How many entries of ``v`` the product needs."""
        if self.order is not None:
            return self.order
        nat = natural_length(v)
        if nat is not None:
            return nat
        return length if length is not None else v.exact_length()

    def apply(self, v, length: int | None = None) -> np.ndarray:
        """First ``length`` entries of C v (``length`` defaults to the order).

        ``v`` may be a finite array or a :class:`DiscCombination`.
        """
        if length is None:
            if self.order is None:
                nat = natural_length(v)
                if nat is None:
                    raise ValueError("infinite matrix applied to an infinite vector needs a length")
                length = nat
            else:
                length = self.order
        n_in = self.input_length(v, length)
        return self._apply(as_array(v, n_in), length)

    def _apply(self, v: np.ndarray, length: int) -> np.ndarray:
        out = self.block(length, v.size) @ v
        return out

    def output_bound(self, v):
        """(A, q, start) with |(C v)_k| <= A * q**k for every k >= start; ``None`` if C v is finite."""
        if self.order is not None:
            return None
        raise NotImplementedError

    def transpose(self) -> "CoeffMatrix":
        raise NotImplementedError

    def conjugate(self) -> "CoeffMatrix":
        raise NotImplementedError

    def scaled(self, alpha: float) -> "CoeffMatrix":
        raise NotImplementedError

    def psd_floor(self) -> float:
        N = self.order if self.order is not None else 64
        return float(np.linalg.eigvalsh(self.dense(N))[0])


def _check_hermitian_psd(A: np.ndarray) -> float:
    if A.size and np.max(np.abs(A - A.conj().T)) > HERMITIAN_ATOL:
        raise ValueError("coefficient matrix must be Hermitian")
    if not A.size:
        return 0.0
    lam = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
    lmax = max(float(lam[-1]), 0.0)
    if lam[0] < -PSD_RTOL * max(lmax, 1.0):
        raise ValueError(f"coefficient matrix is not positive semidefinite (min eig {lam[0]:.3e})")
    return lmax


class Dense(CoeffMatrix):
    def __init__(self, entries):
        A = np.array(entries, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"dense matrix must be square, got shape {A.shape}")
        self.norm_bound = _check_hermitian_psd(A)
        A.setflags(write=False)
        self.entries = A
        self.order = A.shape[0]

    def block(self, nrows, ncols):
        out = np.zeros((nrows, ncols), dtype=complex)
        r, c = min(nrows, self.order), min(ncols, self.order)
        out[:r, :c] = self.entries[:r, :c]
        return out

    def transpose(self):
        return Dense(self.entries.T)

    def conjugate(self):
        return Dense(self.entries.conj())

    def scaled(self, alpha):
        return Dense(alpha * self.entries)

    def __repr__(self):
        return f"Dense(order={self.order})"


class Diagonal(CoeffMatrix):
    def __init__(self, d):
        d = np.asarray(d, dtype=complex).ravel()
        if np.any(np.abs(d.imag) > HERMITIAN_ATOL):
            raise ValueError("diagonal entries must be real for a Hermitian matrix")
        d = d.real
        if d.size and d.min() < -PSD_RTOL * max(d.max(), 1.0):
            raise ValueError("diagonal entries must be nonnegative")
        d.setflags(write=False)
        self.d = d
        self.order = d.size
        self.norm_bound = float(d.max()) if d.size else 0.0

    def block(self, nrows, ncols):
        out = np.zeros((nrows, ncols), dtype=complex)
        k = min(nrows, ncols, self.order)
        out[np.arange(k), np.arange(k)] = self.d[:k]
        return out

    def _apply(self, v, length):
        out = np.zeros(length, dtype=complex)
        k = min(length, self.order, v.size)
        out[:k] = self.d[:k] * v[:k]
        return out

    def transpose(self):
        return self

    def conjugate(self):
        return self

    def scaled(self, alpha):
        return Diagonal(alpha * self.d)

    def __repr__(self):
        return f"Diagonal(order={self.order})"


class Identity(CoeffMatrix):
    """``scale`` times the identity, truncated at ``order`` (``None`` for the genuine identity)."""

    def __init__(self, order: int | None = None, scale: float = 1.0):
        if order is not None and (int(order) != order or order < 0):
            raise ValueError(f"order must be a nonnegative integer or None, got {order}")
        if not scale >= 0:
            raise ValueError("scale must be nonnegative")
        self.order = None if order is None else int(order)
        self.scale = float(scale)
        self.norm_bound = self.scale

    def block(self, nrows, ncols):
        out = np.zeros((nrows, ncols), dtype=complex)
        k = min(nrows, ncols) if self.order is None else min(nrows, ncols, self.order)
        out[np.arange(k), np.arange(k)] = self.scale
        return out

    def _apply(self, v, length):
        out = np.zeros(length, dtype=complex)
        k = min(length, v.size) if self.order is None else min(length, v.size, self.order)
        out[:k] = self.scale * v[:k]
        return out

    def output_bound(self, v):
        if self.order is not None:
            return None
        if isinstance(v, DiscCombination):
            A, q = v.entry_bound()
            return self.scale * A, q, 0
        return None  # finite input, finite output

    def transpose(self):
        return self

    def conjugate(self):
        return self

    def scaled(self, alpha):
        return Identity(self.order, self.scale * alpha)

    def __repr__(self):
        return f"Identity(order={self.order}, scale={self.scale})"


class RankOne(CoeffMatrix):
    """C = x (x)^*, entries x_m conj(x_n).

    ``x`` is either a finite array or, via :meth:`power_law`, the infinite
    sequence ``amplitude * (n + 1) ** -exponent``.
    """

    def __init__(self, x=None, *, power_law: float | None = None, amplitude: complex = 1.0):
        self.power_law = power_law
        self.amplitude = complex(amplitude)
        if power_law is None:
            x = np.asarray(x, dtype=complex).ravel()
            x.setflags(write=False)
            self.x = x
            self.order = x.size
            self.norm_bound = float(np.vdot(x, x).real)
        else:
            if not power_law > 0.5:
                raise ValueError("power-law exponent must exceed 1/2 for x to lie in l^2")
            self.x = None
            self.order = None
            self.norm_bound = float(abs(self.amplitude) ** 2 * scipy.special.zeta(2 * power_law))

    @classmethod
    def from_power_law(cls, exponent: float, amplitude: complex = 1.0) -> "RankOne":
        return cls(power_law=exponent, amplitude=amplitude)

    def xs(self, n: int) -> np.ndarray:
        """First ``n`` entries of x (zero-padded for finite x)."""
        if self.x is not None:
            return as_array(self.x, n)
        return self.amplitude * (np.arange(n) + 1.0) ** -self.power_law

    def block(self, nrows, ncols):
        return np.outer(self.xs(nrows), np.conj(self.xs(ncols)))

    def input_length(self, v, length):
        if self.order is not None:
            return self.order
        nat = natural_length(v)
        return nat if nat is not None else v.exact_length()

    def _apply(self, v, length):
        # <v, x> x
        return np.vdot(self.xs(v.size), v) * self.xs(length)

    def output_bound(self, v):
        if self.order is not None:
            return None
        n = self.input_length(v, None)
        # |x_k| <= |amplitude|; the input tail past n is below rounding
        c = abs(np.vdot(self.xs(n), as_array(v, n)))
        return c * abs(self.amplitude), 1.0, 0

    def transpose(self):
        if self.x is not None:
            return RankOne(np.conj(self.x))
        return RankOne(power_law=self.power_law, amplitude=np.conj(self.amplitude))

    conjugate = transpose

    def scaled(self, alpha):
        r = np.sqrt(alpha)
        if self.x is not None:
            return RankOne(r * self.x)
        return RankOne(power_law=self.power_law, amplitude=r * self.amplitude)

    def __repr__(self):
        if self.x is None:
            return f"RankOne(power_law={self.power_law}, amplitude={self.amplitude})"
        return f"RankOne(order={self.order})"


def entry(C: CoeffMatrix, m: int, n: int) -> complex:
    return C.entry(m, n)


def apply(C: CoeffMatrix, v, length: int | None = None) -> np.ndarray:
    return C.apply(v, length)


def transpose(C: CoeffMatrix) -> CoeffMatrix:
    return C.transpose()


def conjugate(C: CoeffMatrix) -> CoeffMatrix:
    return C.conjugate()


def synthesized_function(x, m: DiscretizedMeasure) -> MuFunction:
    """sum_n conj(x_n) e_n on the nodes of ``m``."""
    x = np.asarray(x, dtype=complex).ravel()
    E = phases(-np.arange(x.size), m.nodes)  # rows e_n
    return MuFunction(np.conj(x) @ E, m)


def rank_one_from_coeffs(x, m: DiscretizedMeasure, normalize: bool = True) -> RankOne:
    """Build C = x (x)^*, optionally rescaling x so that sum_n conj(x_n) e_n has unit L^2(mu) norm.

    If phi = sum_n a_n e_n is a trigonometric polynomial, pass
    ``x = conj(a)``; then the boundary functions of K_C are multiples of phi.
    """
    x = np.asarray(x, dtype=complex).ravel()
    if not np.any(x):
        raise ValueError("x must not be the zero vector")
    if normalize:
        nrm = synthesized_function(x, m).norm()
        if nrm <= 1e-14 * np.linalg.norm(x):
            raise ValueError("the measure annihilates the synthesized function; cannot normalize")
        x = x / nrm
    return RankOne(x)
