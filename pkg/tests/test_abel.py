import numpy as np
import pytest

from abelkernel.abel import (
    Analysis,
    RuleMatrix,
    SGrid,
    Synthesis,
    abel_limit,
    abel_pairing,
    analysis_damped,
    analysis_limit,
    damp,
    neville_table,
    synthesis_damped,
    synthesis_limit,
    truncation_length,
)
from abelkernel.coeff import Dense, DiscCombination, Identity, RankOne, delta, synthesized_function
from abelkernel.measures import Atomic, Lebesgue, MuFunction, constant, discretize, exponential, inner_product_mu

from conftest import PHI_COEFFS, random_psd, three_atoms

ROW_B = RuleMatrix.periodic([1.0], (1, None))  # (1, 1, 1, ...)
COL_A = RuleMatrix.periodic([1.0, -1.0], (None, 1))  # (1, -1, 1, ...)^T


def geometric(k0, k1):
    return np.array([1 - 2.0**-k for k in range(k0, k1 + 1)])


def test_damp():
    assert np.allclose(damp([1, 1, 1], 0.5), [1, 0.5, 0.25])
    v = np.arange(1, 6) * (1 + 1j)
    assert np.allclose(damp(damp(v, 0.7), 0.4), damp(v, 0.28))
    s, N = 0.9, 37
    assert np.isclose(np.sum(np.abs(damp(np.ones(N), s))), (1 - s**N) / (1 - s))
    with pytest.raises(ValueError):
        damp(v, 1.0)


def test_truncation_length():
    N = truncation_length(1.0, 0.5, 0.9, 1e-12)
    assert 0.45**N / 0.55 <= 1e-12 < 0.45 ** (N - 1) / 0.55


def test_abel_limit_geometric_example():
    s = geometric(3, 12)
    res = abel_limit(list(zip(s, 1 / (1 + s))), tol=1e-10)
    assert res.converged and abs(res.value - 0.5) < 1e-12


def test_abel_limit_constant():
    res = abel_limit([(s, 2 - 1j) for s in geometric(3, 10)])
    assert res.converged and res.value == 2 - 1j and res.est_error == 0


def test_abel_limit_divergent():
    s = geometric(3, 12)
    res = abel_limit(list(zip(s, 1 / (1 - s))))
    assert res.divergent and not res.converged
    assert abs(res.growth_exponent - 1) < 0.05
    assert res.status == "divergent"


def test_abel_limit_inconclusive():
    s = geometric(3, 12)
    res = abel_limit(list(zip(s, np.sin(1 / (1 - s)))))
    assert res.inconclusive and res.status == "inconclusive"


def test_abel_limit_needs_four_samples():
    with pytest.raises(ValueError):
        abel_limit([(0.5, 1), (0.75, 1), (0.875, 1)])


def test_neville_reproduces_polynomials():
    h = np.array([0.5, 0.25, 0.125, 0.0625])
    g = 3 - 2 * h + h**3
    assert np.isclose(neville_table(h, g)[-1, -1], 3)


def test_grid_monotonicity_of_geometric_example():
    s = geometric(3, 12)
    g = 1 / (1 + s)
    assert np.all(np.diff(g) < 0)
    res = abel_limit(list(zip(s, g)))
    diag = np.diagonal(res.extrapolation_table)
    errs = np.abs(diag - 0.5)
    assert np.all(np.diff(errs[:6]) < 0)


def test_refining_grid_is_consistent():
    f = lambda s: np.exp(-s) / (2 - s) ** 2
    coarse = abel_limit(list(zip(geometric(3, 12), f(geometric(3, 12)))))
    fine = abel_limit(list(zip(geometric(3, 14), f(geometric(3, 14)))))
    assert coarse.converged
    assert abs(fine.value - coarse.value) <= 2 * coarse.est_error + 1e-15


def test_trace_rows():
    s = geometric(3, 12)
    res = abel_limit(list(zip(s, 1 / (1 + s))))
    rows = res.trace()
    assert len(rows) == 10
    assert np.allclose([r[0] for r in rows], s)
    assert np.allclose([r[1] for r in rows], 1 / (1 + s))
    assert np.isnan(rows[0][4])
    assert abs(rows[-1][3] - res.value) == 0
    assert rows[-1][4] == res.est_error


def test_pairing_row_column_example():
    res = abel_pairing(ROW_B, COL_A, [1.0], [1.0])
    assert res.converged and abs(res.value - 0.5) < 1e-9


def test_pairing_row_column_divergent():
    ones_col = RuleMatrix.periodic([1.0], (None, 1))
    res = abel_pairing(ROW_B, ones_col, [1.0], [1.0])
    assert res.divergent and 0.8 <= res.growth_exponent <= 1.2


def test_pairing_skips_beyond_cap(monkeypatch):
    monkeypatch.setenv("ABEL_KERNEL_MAX_N", "20000")
    res = abel_pairing(ROW_B, COL_A, [1.0], [1.0])
    assert len(res.skipped) > 0 and len(res.samples) + len(res.skipped) == 10
    monkeypatch.setenv("ABEL_KERNEL_MAX_N", "50")
    with pytest.raises(ValueError):
        abel_pairing(ROW_B, COL_A, [1.0], [1.0])


def test_pairing_finite_matrices(rng):
    for _ in range(10):
        p, q, r = rng.integers(1, 20, size=3)
        T2 = rng.normal(size=(p, q)) + 1j * rng.normal(size=(p, q))
        T1 = rng.normal(size=(q, r)) + 1j * rng.normal(size=(q, r))
        x = rng.normal(size=r) + 1j * rng.normal(size=r)
        y = rng.normal(size=p) + 1j * rng.normal(size=p)
        res = abel_pairing(T2, T1, x, y)
        assert res.converged
        assert abs(res.value - np.vdot(y, T2 @ T1 @ x)) < 1e-9


def test_pairing_coeff_matrices(rng):
    A = Dense(random_psd(rng, 6))
    B = Dense(random_psd(rng, 6))
    x, y = rng.normal(size=6), rng.normal(size=6) + 1j
    res = abel_pairing(B, A, x, y)
    assert abs(res.value - np.vdot(y, B.entries @ A.entries @ x)) < 1e-10


def test_pairing_identity_with_disc_vectors():
    # <I D_s I z_vec, w_vec> -> 1 / (1 - conj(w) z)
    z, w = 0.6 + 0.1j, -0.3 + 0.5j
    res = abel_pairing(Identity(), Identity(), DiscCombination.geometric(z), DiscCombination.geometric(w))
    assert abs(res.value - 1 / (1 - np.conj(w) * z)) < 1e-10


def test_pairing_synthesis_rank_one(atoms3, rank_one):
    m = atoms3
    phi = synthesized_function(rank_one.x, m)
    z = 0.4 - 0.5j
    for n in range(-3, 4):
        h = exponential(m, n)
        res = abel_pairing(Synthesis(m, conjugated=True), rank_one, DiscCombination.geometric(z), h)
        zx = np.vdot(rank_one.x, z ** np.arange(rank_one.order))
        oracle = zx * inner_product_mu(phi.conj(), h)
        assert res.converged and abs(res.value - oracle) < 1e-10


def test_pairing_analysis(rng):
    m = three_atoms()
    C = Dense(random_psd(rng, 5))
    h = MuFunction(rng.normal(size=3) + 1j * rng.normal(size=3), m)
    y = rng.normal(size=5)
    res = abel_pairing(C, Analysis(m, conjugated=True), h, y)
    a = np.array([inner_product_mu(h, exponential(m, -n)) for n in range(5)])
    assert abs(res.value - np.vdot(y, C.entries @ a)) < 1e-10


def test_pairing_rejects_bad_combinations():
    m = three_atoms()
    with pytest.raises(ValueError):
        abel_pairing(Synthesis(m), Analysis(m), constant(m), constant(m))
    with pytest.raises(ValueError):
        abel_pairing(Analysis(m), Identity(3), [1], constant(m))


def test_synthesis_identity_delta():
    m = discretize(Lebesgue(1.0), 16)
    for s in (0.1, 0.5, 0.99):
        for conj in (True, False):
            f = synthesis_damped(Identity(), delta(0), s, m, conj)
            assert np.allclose(f.values, 1.0)


def test_synthesis_matches_direct_sum(rng):
    m = three_atoms()
    C = Dense(random_psd(rng, 4))
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    s = 0.8
    coef = s ** np.arange(4) * (C.entries @ v)
    oracle = np.array([np.sum(coef * np.exp(-2j * np.pi * np.arange(4) * x)) for x in m.nodes])
    assert np.allclose(synthesis_damped(C, v, s, m, True).values, oracle, atol=1e-14)


def test_conjugation_identity_variants(rng):
    m = three_atoms()
    mats = [Identity(), Identity(7), Dense(random_psd(rng, 5)), RankOne(rng.normal(size=4) + 1j),
            RankOne(power_law=1.2, amplitude=0.5 + 0.5j)]
    for C in mats:
        for _ in range(4):
            v = DiscCombination((0.5 * np.exp(2j * np.pi * rng.uniform()), -0.3j), tuple(rng.normal(size=2)))
            s = rng.uniform(0.05, 0.95)
            lhs = synthesis_damped(C, v, s, m, True).values
            rhs = np.conj(synthesis_damped(C, v.conj(), s, m, False).values)
            assert np.max(np.abs(lhs - rhs)) <= 1e-13


def test_synthesis_rank_one_two_paths(rng):
    m = three_atoms()
    x = rng.normal(size=5) + 1j * rng.normal(size=5)
    C = RankOne(x)
    z, s = 0.7j, 0.6
    f = synthesis_damped(C, DiscCombination.geometric(z), s, m, True)
    zx = np.vdot(x, z ** np.arange(5))
    g = synthesis_damped(Identity(5), x, s, m, True)
    assert np.allclose(f.values, zx * g.values, atol=1e-14)


def test_analysis_identity_on_atom():
    m = discretize(Atomic(((0, 1.0),)))
    r = 0.7
    a = analysis_damped(Identity(10), constant(m), r, True)
    assert np.allclose(a, r ** np.arange(10))
    assert np.allclose(analysis_damped(Identity(), constant(m, 0), r, True, length=6), 0)
    with pytest.raises(ValueError):
        analysis_damped(Identity(), constant(m), r, True)


def test_analysis_adjointness(rng):
    m = three_atoms()
    for _ in range(10):
        C = Dense(random_psd(rng, 6))
        h = MuFunction(rng.normal(size=3) + 1j * rng.normal(size=3), m)
        v = rng.normal(size=6) + 1j * rng.normal(size=6)
        r = rng.uniform(0.1, 0.95)
        lhs = np.vdot(v, analysis_damped(C, h, r, True))
        rhs = inner_product_mu(h, synthesis_damped(C, v, r, m, True))
        assert abs(lhs - rhs) < 1e-12


def test_synthesis_limit_szego_boundary():
    m = discretize(Lebesgue(1.0), 64)
    w = 0.5
    f, batch = synthesis_limit(Identity(), DiscCombination.geometric(np.conj(w)), m, False)
    assert batch.all_converged
    oracle = 1 / (1 - 0.5 * np.exp(2j * np.pi * m.nodes))
    assert np.allclose(f.values, oracle, atol=1e-10)


def test_analysis_limit_identity():
    m = discretize(Lebesgue(1.0), 32)
    h = exponential(m, -3)  # <h, ebar_n> = delta_{n,3}
    batch = analysis_limit(Identity(), h, 8)
    assert batch.all_converged
    assert np.allclose(batch.value, delta(3, 8), atol=1e-12)


def test_batch_summary():
    m = three_atoms()
    _, batch = synthesis_limit(Identity(4), [1, 0, 0, 0], m, True)
    summ = batch.summary()
    assert summ["count"] == 3 and summ["converged"] == 3
    assert batch[0].converged


def test_sgrid_validation():
    with pytest.raises(ValueError):
        SGrid.geometric(3, 5)
    with pytest.raises(ValueError):
        SGrid((0.5, 0.4, 0.9, 0.95))
    assert len(SGrid.geometric()) == 10
