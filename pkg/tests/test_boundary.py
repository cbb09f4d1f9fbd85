import numpy as np
import pytest

from abelkernel.boundary import BoundaryError, boundary_function, boundary_limit, weak_limit_check
from abelkernel.coeff import Diagonal, DiscCombination, Identity, RankOne, synthesized_function
from abelkernel.measures import Atomic, Lebesgue, constant, discretize, exponential, inner_product_mu


def test_szego_boundary_on_lebesgue():
    m = discretize(Lebesgue(1.0), 128)
    K = boundary_function(Identity(), 0.5, m)
    oracle = 1 / (1 - 0.5 * np.exp(2j * np.pi * m.nodes))
    assert np.max(np.abs(K.values - oracle)) < 1e-10
    assert K.max_est_error <= 1e-10


def test_szego_boundary_complex_point():
    m = discretize(Lebesgue(1.0), 32)
    w = 0.3 - 0.6j
    K = boundary_function(Identity(), w, m)
    oracle = 1 / (1 - np.conj(w) * np.exp(2j * np.pi * m.nodes))
    assert np.allclose(K.values, oracle, atol=1e-10)


def test_zero_matrix_gives_zero():
    m = discretize(Lebesgue(1.0), 8)
    K = boundary_function(Diagonal(np.zeros(5)), 0.4j, m)
    assert np.array_equal(K.values, np.zeros(8))


def test_rank_one_boundary_closed_form(atoms3, rank_one):
    x = rank_one.x
    phi = synthesized_function(x, atoms3)
    for w in (0.0, 0.5, -0.2 + 0.7j):
        K = boundary_function(rank_one, w, atoms3)
        scalar = np.sum(x * np.conj(w) ** np.arange(x.size))  # <conj(w)_vec, conj(x)>
        assert np.allclose(K.values, scalar * phi.values, atol=1e-12)


def test_divergent_boundary_raises():
    m = discretize(Atomic(((0, 1.0),)))
    with pytest.raises(BoundaryError) as err:
        boundary_limit(RankOne(power_law=0.55), DiscCombination.geometric(0.5), m, conjugated=True)
    assert err.value.diagnostics.n_divergent == 1


def test_weak_limit_self_pairing():
    m = discretize(Lebesgue(1.0), 64)
    K = boundary_function(Identity(), 0.5, m)
    res = weak_limit_check(Identity(), 0.5, m, [K.base])
    assert res[0] < 1e-10
    # ||k_w||^2 on Lebesgue is 1 / (1 - |w|^2)
    assert abs(inner_product_mu(K.base, K.base) - 4 / 3) < 1e-10


def test_weak_limit_zero_test():
    m = discretize(Lebesgue(1.0), 16)
    assert weak_limit_check(Identity(), 0.2, m, [constant(m, 0)]) == [0.0]


def test_weak_limit_rank_one_exponentials(atoms3, rank_one):
    tests = [exponential(atoms3, n) for n in range(6)]
    res = weak_limit_check(rank_one, 0.3 + 0.4j, atoms3, tests)
    assert max(res) <= 1e-10


def test_tol_validation():
    m = discretize(Lebesgue(1.0), 8)
    with pytest.raises(ValueError):
        boundary_function(Identity(), 0.5, m, tol=0)
    with pytest.raises(ValueError):
        boundary_function(Identity(), 1.0, m)
