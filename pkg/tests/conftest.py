import numpy as np
import pytest

from qmin import generators as gen
from qmin.states import Sector, SpectralDecomposition

# Pauli matrices written out by hand, independent of the Gell-Mann code.
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def bell():
    return gen.bell_state()


def random_hermitian(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def paper_sec4_spectrum(x):
    """Reduced-state spectrum of the 3 x n example with the hand-picked eigenvectors
    k11 = (1,1,1)/sqrt3, k12 = (1,-1,0)/sqrt2, k1 = (1,1,-2)/sqrt6."""
    k11 = np.array([1, 1, 1]) / np.sqrt(3)
    k12 = np.array([1, -1, 0]) / np.sqrt(2)
    k1 = np.array([1, 1, -2]) / np.sqrt(6)
    e1, e1p = 2 * x - 1 / 3, -4 * x + 5 / 3
    sectors = (
        Sector(e1, (0, 1), np.column_stack([k11, k12]).astype(complex)),
        Sector(e1p, (2,), k1[:, None].astype(complex)),
    )
    return SpectralDecomposition(np.array([e1, e1, e1p]), sectors, 1e-9)


def random_corpus(count, seed):
    """Labelled random states drawn round-robin from every generator."""
    from qmin.verification import mixed_corpus

    return list(mixed_corpus(count, seed))
