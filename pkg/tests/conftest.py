import numpy as np
import pytest

from abelkernel.coeff import rank_one_from_coeffs
from abelkernel.measures import Atomic, Lebesgue, discretize

# phi = sum a_n e_n, a trigonometric polynomial of degree 4
PHI_COEFFS = np.array([1.0, 0.5, -0.3 + 0.2j, 0.1, 0.25j])


def three_atoms(mass=1.0):
    return discretize(Atomic.equal_weights(["0", "1/3", "2/3"], mass))


@pytest.fixture
def atoms3():
    return three_atoms()


@pytest.fixture
def lebesgue512():
    return discretize(Lebesgue(1.0), 512)


@pytest.fixture
def rank_one(atoms3):
    """Normalized rank-one matrix whose boundary functions are multiples of phi."""
    return rank_one_from_coeffs(np.conj(PHI_COEFFS), atoms3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    G = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    return G @ G.conj().T / n


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
