"""Kernels K_C(w, z) = <C z_vec, w_vec> on the unit disc, with certified truncation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeff import CoeffMatrix, check_disc

MAX_TERMS = 4096


@dataclass(frozen=True)
class DiscVector:
    """Leading entries (z^0, ..., z^N) of z_vec and a bound on the l^2 norm of the rest."""

    base: complex
    entries: np.ndarray
    tail_bound: float

    @property
    def order(self) -> int:
        return self.entries.size - 1

    def norm_sq(self) -> float:
        return float(np.vdot(self.entries, self.entries).real)


def disc_vector(z, N: int) -> DiscVector:
    z = check_disc(z)
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    entries = z ** np.arange(N + 1)
    tail = abs(z) ** (N + 1) / np.sqrt(1.0 - abs(z) ** 2)
    return DiscVector(z, entries, float(tail))


@dataclass(frozen=True)
class KernelValue:
    value: complex
    error_bound: float
    n_terms: int

    def __complex__(self):
        return self.value


def _certificate(norm_bound: float, w: complex, z: complex, n: int) -> float:
    """Bound on |<C z, w> - <C z_n, w_n>| when both vectors are cut after n terms."""
    full_w = 1.0 / np.sqrt(1.0 - abs(w) ** 2)
    full_z = 1.0 / np.sqrt(1.0 - abs(z) ** 2)
    tail_w = abs(w) ** n * full_w
    tail_z = abs(z) ** n * full_z
    return norm_bound * (tail_z * full_w + tail_w * full_z)


def kernel_eval(C: CoeffMatrix, w, z, tol: float = 1e-12, max_terms: int = MAX_TERMS) -> KernelValue:
    """Evaluate K_C(w, z) = sum_{m,n} c_mn conj(w)^m z^n.

    The series is cut at the smallest n for which the tail certificate
    ``norm_bound * (tail_z * |w_vec| + tail_w * |z_vec|)`` is at most ``tol``.
    Matrices of finite order are summed exactly (certificate 0).

    Raises
    ------
    ValueError
        If ``tol`` cannot be reached within ``max_terms`` terms; the message
        carries the achieved bound.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    w, z = check_disc(w), check_disc(z)
    if C.order is not None and C.order <= max_terms:
        n, cert = C.order, 0.0
    else:
        rho = max(abs(w), abs(z))
        if rho == 0.0:
            n = 1
        else:
            # 2 * |C| * rho^n / (1 - rho^2) <= tol, then verify with the exact certificate
            n = int(np.ceil(np.log(tol * (1 - rho**2) / (2 * max(C.norm_bound, 1e-300))) / np.log(rho)))
            n = min(max(n, 1), max_terms)
        while _certificate(C.norm_bound, w, z, n) > tol and n < max_terms:
            n += 1
        if C.order is not None:
            n = min(n, C.order)
        cert = 0.0 if (C.order is not None and n == C.order) else _certificate(C.norm_bound, w, z, n)
        if cert > tol:
            raise ValueError(
                f"tolerance {tol:g} not reachable within {max_terms} terms (achieved {cert:.3e})"
            )
    zv = z ** np.arange(n)
    wv = w ** np.arange(n)
    value = np.vdot(wv, C.apply(zv, n))
    return KernelValue(complex(value), float(cert), int(n))


def szego_kernel(w, z) -> complex:
    """k_w(z) = 1 / (1 - conj(w) z)."""
    w, z = complex(w), complex(z)
    return 1.0 / (1.0 - np.conj(w) * z)


def hardy_norm(coeffs) -> float:
    """H^2 norm of sum a_n z^n, i.e. the l^2 norm of its Taylor coefficients."""
    a = np.asarray(coeffs, dtype=complex)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def kernel_matrix(C: CoeffMatrix, points, tol: float = 1e-12) -> np.ndarray:
    """(K(zeta_j, zeta_i))_{ij}."""
    pts = [check_disc(p) for p in points]
    n = len(pts)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = kernel_eval(C, pts[j], pts[i], tol).value
    return G


def positive_matrix_check(C: CoeffMatrix, points, tol: float = 1e-12) -> float:
    """Smallest eigenvalue of the sampled Gram matrix (K(zeta_j, zeta_i))_{ij}."""
    if len(points) == 0:
        raise ValueError("need at least one point")
    G = kernel_matrix(C, points, tol)
    return float(np.linalg.eigvalsh(0.5 * (G + G.conj().T))[0])
