"""Finite Borel measures on the circle [0, 1) and the space L^2(mu).

A point x of [0, 1) stands for e^{2 pi i x}. Every measure is reduced to a
finite node/weight form (:class:`DiscretizedMeasure`) before any pairing is
computed, so L^2(mu) is always a finite-dimensional space here.

Fourier coefficients use the convention

    mu_hat(k) = int e^{-2 pi i k x} dmu(x),

which makes the Gram matrix of the exponentials, <e_m, e_n>_mu, equal to
mu_hat(n - m).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

TWO_PI = 2.0 * np.pi


def circle_point(x) -> float:
    """Reduce a real number (or a fraction string such as ``"1/3"``) into [0, 1)."""
    if isinstance(x, str):
        x = Fraction(x.strip())
    if isinstance(x, Fraction):
        return float(x - (x.numerator // x.denominator))
    x = float(x) % 1.0
    # float(-1e-20) % 1.0 == 1.0
    return 0.0 if x == 1.0 else x


def phases(ks, x) -> np.ndarray:
    """Matrix of e^{-2 pi i k x} with rows indexed by ``ks`` and columns by ``x``.

    Rows for -k are computed as exact complex conjugates of the rows for k, so
    conjugate symmetry holds bit-for-bit.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = np.abs(ks).astype(float)
    t = np.outer(a, x) % 1.0
    theta = TWO_PI * t
    out = np.cos(theta) - 1j * np.sin(theta)
    neg = ks < 0
    out[neg] = np.conj(out[neg])
    return out


# ---------------------------------------------------------------------------
# Measure specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atomic:
    """Finite sum of point masses; ``atoms`` is a sequence of (position, weight)."""

    atoms: tuple

    def __post_init__(self):
        if len(self.atoms) == 0:
            raise ValueError("atomic measure needs at least one atom")
        atoms = tuple((circle_point(x), float(w)) for x, w in self.atoms)
        for _, w in atoms:
            if not (w > 0 and np.isfinite(w)):
                raise ValueError(f"atom weights must be positive and finite, got {w}")
        positions = [x for x, _ in atoms]
        if len(set(positions)) != len(positions):
            raise ValueError("atom positions must be pairwise distinct")
        object.__setattr__(self, "atoms", atoms)

    @property
    def mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    @classmethod
    def equal_weights(cls, positions: Sequence, mass: float = 1.0) -> "Atomic":
        w = mass / len(positions)
        return cls(tuple((x, w) for x in positions))


@dataclass(frozen=True)
class Lebesgue:
    mass: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and np.isfinite(self.mass)):
            raise ValueError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class Density:
    """Absolutely continuous measure given by density samples on a uniform grid.

    ``density[j]`` is the density at ``j / grid_size``. If ``mass`` is given the
    table is rescaled so that the trapezoid-periodic total equals it.
    """

    density: tuple
    mass: float | None = None

    def __post_init__(self):
        d = np.asarray(self.density, dtype=float)
        if d.ndim != 1 or d.size == 0:
            raise ValueError("density table must be a non-empty 1-d sequence")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("density values must be nonnegative and finite")
        total = d.mean()
        if total <= 0:
            raise ValueError("density has zero total mass")
        if self.mass is not None:
            if not self.mass > 0:
                raise ValueError(f"mass must be positive, got {self.mass}")
            d = d * (self.mass / total)
        object.__setattr__(self, "density", tuple(d.tolist()))

    @property
    def grid_size(self) -> int:
        return len(self.density)

    @property
    def total_mass(self) -> float:
        return float(np.mean(self.density))


@dataclass(frozen=True)
class IFS:
    """Invariant measure of the maps x -> (x + d) / scale, d in ``digits``, equal weights."""

    scale: int
    digits: tuple
    depth: int = 8
    mass: float = 1.0

    def __post_init__(self):
        if int(self.scale) != self.scale or self.scale < 2:
            raise ValueError(f"scale must be an integer >= 2, got {self.scale}")
        digits = tuple(float(d) for d in self.digits)
        if len(digits) == 0:
            raise ValueError("IFS needs at least one digit")
        if len(set(digits)) != len(digits):
            raise ValueError("IFS digits must be pairwise distinct")
        if any(not (0 <= d < self.scale) for d in digits):
            raise ValueError("IFS digits must lie in [0, scale)")
        if int(self.depth) != self.depth or self.depth < 1:
            raise ValueError(f"depth must be an integer >= 1, got {self.depth}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        object.__setattr__(self, "scale", int(self.scale))
        object.__setattr__(self, "depth", int(self.depth))
        object.__setattr__(self, "digits", digits)

    def fourier_product(self, k: int, levels: int = 64) -> complex:
        """Truncated infinite-product formula for mu_hat(k) of the exact invariant measure."""
        d = np.asarray(self.digits)
        out = complex(self.mass)
        for j in range(1, levels + 1):
            t = (k * d / float(self.scale) ** j) % 1.0
            out *= np.mean(np.exp(-1j * TWO_PI * t))
        return out


MeasureSpec = Union[Atomic, Lebesgue, Density, IFS]


@dataclass(frozen=True, eq=False)
class DiscretizedMeasure:
    """Finite node/weight surrogate of a measure.

    Instances are compared by identity; :class:`MuFunction` values carry a
    reference to the measure they live on.
    """

    nodes: np.ndarray
    weights: np.ndarray
    mass: float
    source: object = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.nodes)

    def with_mass(self, mass: float) -> "DiscretizedMeasure":
        """Same nodes with weights rescaled to the given total mass."""
        return DiscretizedMeasure(self.nodes, self.weights * (mass / self.mass), mass, self.source)


def discretize(spec: MeasureSpec, resolution: int = 512) -> DiscretizedMeasure:
    """Reduce a measure spec to a finite node/weight form.

    Parameters
    ----------
    spec : Atomic, Lebesgue, Density or IFS
    resolution : int
        Number of uniform nodes for Lebesgue and Density measures. Atomic
        measures are passed through exactly and IFS measures use their own
        ``depth``, so the value is ignored there (it must still be >= 1).

    Returns
    -------
    DiscretizedMeasure
    """
    if int(resolution) != resolution or resolution < 1:
        raise ValueError(f"resolution must be a positive integer, got {resolution}")
    resolution = int(resolution)

    if isinstance(spec, Atomic):
        nodes = np.array([x for x, _ in spec.atoms])
        weights = np.array([w for _, w in spec.atoms])
        return DiscretizedMeasure(nodes, weights, spec.mass, spec)

    if isinstance(spec, Lebesgue):
        nodes = np.arange(resolution) / resolution
        weights = np.full(resolution, spec.mass / resolution)
        return DiscretizedMeasure(nodes, weights, spec.mass, spec)

    if isinstance(spec, Density):
        n = spec.grid_size
        if resolution > n:
            raise ValueError(f"resolution {resolution} exceeds density grid size {n}")
        grid = np.arange(n) / n
        nodes = np.arange(resolution) / resolution
        if n % resolution == 0:
            values = np.asarray(spec.density)[:: n // resolution]
        else:
            values = np.interp(nodes, grid, spec.density, period=1.0)
        mass = spec.total_mass
        weights = values / resolution
        if weights.sum() <= 0:
            raise ValueError("density vanishes on every node at this resolution")
        weights = weights * (mass / weights.sum())
        return DiscretizedMeasure(nodes, weights, mass, spec)

    if isinstance(spec, IFS):
        return _discretize_ifs(spec)

    raise TypeError(f"unsupported measure spec {type(spec).__name__}")


def _discretize_ifs(spec: IFS) -> DiscretizedMeasure:
    R, d = spec.scale, np.asarray(spec.digits)
    # level-`depth` cylinders: sum_j d_j R^{-j} + R^{-depth} * (attractor);
    # the attractor's barycenter is mean(digits) / (R - 1)
    powers = float(R) ** -np.arange(1, spec.depth + 1)
    left = np.zeros(1)
    for p in powers:
        left = (left[:, None] + d[None, :] * p).ravel()
    offset = d.mean() / (R - 1) * powers[-1]
    nodes = (left + offset) % 1.0
    n = len(nodes)
    weights = np.full(n, spec.mass / n)
    return DiscretizedMeasure(nodes, weights, spec.mass, spec)


def ifs_digit_words(spec: IFS):
    """Enumerate all digit words of length ``depth`` (for cross-checks on small depths)."""
    return itertools.product(spec.digits, repeat=spec.depth)


def sample_ifs(spec: IFS, size: int, rng: np.random.Generator, levels: int = 40) -> np.ndarray:
    """Draw points from the invariant measure via random digit expansions."""
    d = np.asarray(spec.digits)
    x = np.zeros(size)
    for j in range(levels, 0, -1):
        x = (x + d[rng.integers(len(d), size=size)]) / spec.scale
    return x % 1.0


# ---------------------------------------------------------------------------
# Fourier coefficients and L^2(mu)
# ---------------------------------------------------------------------------


def fourier_coefficient(m: DiscretizedMeasure, k: int) -> complex:
    """mu_hat(k) = sum_i w_i e^{-2 pi i k x_i}."""
    return complex(phases([k], m.nodes)[0] @ m.weights)


def fourier_coefficients(m: DiscretizedMeasure, ks) -> np.ndarray:
    return phases(ks, m.nodes) @ m.weights


@dataclass(frozen=True, eq=False)
class MuFunction:
    """An element of L^2(mu), stored as its values on the measure's nodes."""

    values: np.ndarray
    measure: DiscretizedMeasure

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.measure),):
            raise ValueError(
                f"expected {len(self.measure)} node values, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def _check(self, other: "MuFunction"):
        if other.measure is not self.measure:
            raise ValueError("functions live on different measures")

    def __add__(self, other: "MuFunction") -> "MuFunction":
        self._check(other)
        return MuFunction(self.values + other.values, self.measure)

    def __sub__(self, other: "MuFunction") -> "MuFunction":
        self._check(other)
        return MuFunction(self.values - other.values, self.measure)

    def __mul__(self, alpha) -> "MuFunction":
        return MuFunction(alpha * self.values, self.measure)

    __rmul__ = __mul__

    def conj(self) -> "MuFunction":
        return MuFunction(np.conj(self.values), self.measure)

    def norm(self) -> float:
        return float(np.sqrt(max(inner_product_mu(self, self).real, 0.0)))


def inner_product_mu(f: MuFunction, g: MuFunction) -> complex:
    """<f, g>_mu = sum_i w_i f_i conj(g_i)."""
    if f.measure is not g.measure:
        raise ValueError("inner product of functions on different measures")
    w = f.measure.weights
    return complex(np.sum(w * f.values * np.conj(g.values)))


def exponential(m: DiscretizedMeasure, n: int) -> MuFunction:
    """e_n(x) = e^{2 pi i n x} on the nodes of ``m``; exponential(m, -n) is its exact conjugate."""
    return MuFunction(phases([-n], m.nodes)[0], m)


def constant(m: DiscretizedMeasure, c: complex = 1.0) -> MuFunction:
    return MuFunction(np.full(len(m), c, dtype=complex), m)
