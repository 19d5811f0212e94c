import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmin.bases import adapted_basis, expand, gell_mann_basis, reconstruct
from qmin.exceptions import InvalidDimensionError, ShapeError, SpectralInputError
from qmin.generators import engineered_degenerate
from qmin.oracle import haar_unitary
from qmin.states import Sector, SpectralDecomposition, partial_trace_b, spectral_decompose

from conftest import PAULI, paper_sec4_spectrum, random_hermitian


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_gell_mann_is_orthonormal_hermitian_traceless(dim):
    basis = gell_mann_basis(dim)
    assert len(basis.ops) == dim**2
    assert basis.orthonormality_defect() <= 1e-10
    assert basis.hermiticity_defect() <= 1e-12
    assert basis.trace_defect() <= 1e-12
    np.testing.assert_allclose(basis.ops[0], np.eye(dim) / np.sqrt(dim))


def test_gell_mann_dim3_matches_explicit_listing():
    x = gell_mann_basis(3).ops
    e = np.eye(3)
    x2 = (np.outer(e[0], e[0]) + np.outer(e[1], e[1]) - 2 * np.outer(e[2], e[2])) / np.sqrt(6)
    x5 = (np.outer(e[0], e[2]) + np.outer(e[2], e[0])) / np.sqrt(2)
    x8 = -1j * (np.outer(e[1], e[2]) - np.outer(e[2], e[1])) / np.sqrt(2)
    np.testing.assert_allclose(x[2], x2, atol=1e-15)
    np.testing.assert_allclose(x[5], x5, atol=1e-15)
    np.testing.assert_allclose(x[8], x8, atol=1e-15)


def test_gell_mann_dim2_is_normalized_pauli():
    ops = gell_mann_basis(2).ops
    expected = [np.eye(2) / np.sqrt(2)] + [PAULI[k] / np.sqrt(2) for k in "zxy"]
    for got, want in zip(ops, expected):
        np.testing.assert_allclose(got, want, atol=1e-15)


@pytest.mark.parametrize("dim", [0, 1, 2.5])
def test_gell_mann_rejects_bad_dimension(dim):
    with pytest.raises(InvalidDimensionError):
        gell_mann_basis(dim)


def test_expand_unit_vectors():
    basis = gell_mann_basis(3)
    np.testing.assert_allclose(expand(np.eye(3) / np.sqrt(3), basis), np.eye(9)[0], atol=1e-15)
    for k in range(9):
        np.testing.assert_allclose(expand(basis.ops[k], basis), np.eye(9)[k], atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(dim=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
def test_expand_parseval_and_reconstruction(dim, seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(dim, rng)
    basis = gell_mann_basis(dim)
    v = expand(h, basis)
    # Oracle: tr(H^2) by direct matrix multiplication.
    assert abs(np.sum(v**2) - np.trace(h @ h).real) <= 1e-10 * max(1, np.trace(h @ h).real)
    assert np.max(np.abs(reconstruct(v, basis) - h)) <= 1e-10


def test_expand_shape_mismatch():
    with pytest.raises(ShapeError):
        expand(np.eye(2), gell_mann_basis(3))


def test_adapted_basis_sec4_layout():
    basis = adapted_basis(paper_sec4_spectrum(0.3))
    k11 = np.array([1, 1, 1]) / np.sqrt(3)
    k12 = np.array([1, -1, 0]) / np.sqrt(2)
    k1 = np.array([1, 1, -2]) / np.sqrt(6)
    x1 = (np.outer(k11, k11) + np.outer(k12, k12)) / np.sqrt(2)
    np.testing.assert_allclose(basis.ops[0], x1, atol=1e-14)
    np.testing.assert_allclose(basis.ops[4], np.outer(k1, k1), atol=1e-14)
    assert basis.residual_start == 6
    assert basis.sector_offsets == (0, 4)
    assert len(basis.ops[basis.residual_slice]) == 4
    # Inter-sector operators in the order (k11,k1) sym/antisym, (k12,k1) sym/antisym.
    x6 = (np.outer(k11, k1) + np.outer(k1, k11)) / np.sqrt(2)
    x9 = -1j * (np.outer(k12, k1) - np.outer(k1, k12)) / np.sqrt(2)
    np.testing.assert_allclose(basis.ops[5], x6, atol=1e-14)
    np.testing.assert_allclose(basis.ops[8], x9, atol=1e-14)
    assert basis.base.orthonormality_defect() <= 1e-10


def test_adapted_basis_nondegenerate():
    spec = spectral_decompose(np.diag([0.5, 0.3, 0.2]))
    basis = adapted_basis(spec)
    assert basis.residual_start == 4
    assert basis.deg_count == 0
    for i in range(3):
        np.testing.assert_allclose(basis.ops[i], np.diag(np.eye(3)[i]), atol=1e-15)


def test_adapted_basis_fully_degenerate_is_conjugated_gell_mann():
    u = haar_unitary(3, 7)
    spec = SpectralDecomposition(np.full(3, 1 / 3), (Sector(1 / 3, (0, 1, 2), u),), 1e-9)
    basis = adapted_basis(spec)
    np.testing.assert_allclose(basis.ops, u @ gell_mann_basis(3).ops @ u.conj().T, atol=1e-14)
    assert basis.residual_start == 10
    assert len(basis.ops[basis.residual_slice]) == 0


def test_adapted_basis_rejects_non_orthonormal():
    v = np.array([[1, 1], [0, 1]], dtype=complex)
    spec = SpectralDecomposition(np.array([0.5, 0.5]), (Sector(0.5, (0, 1), v),), 1e-9)
    with pytest.raises(SpectralInputError):
        adapted_basis(spec)


@pytest.mark.parametrize("m,sectors", [(3, [2, 1]), (4, [2, 2]), (5, [3, 1, 1]), (4, [1, 1, 2])])
def test_adapted_basis_sector_support_and_residual_orthogonality(m, sectors):
    rho = engineered_degenerate(m, 2, sectors, seed=3)
    spec = spectral_decompose(partial_trace_b(rho))
    basis = adapted_basis(spec)
    assert basis.base.orthonormality_defect() <= 1e-10
    assert basis.base.hermiticity_defect() <= 1e-12
    vecs = basis.vectors
    start = 0
    for r, size in enumerate(basis.sector_dims, start=1):
        inside = np.zeros(m, dtype=bool)
        inside[start:start + size] = True
        for op in basis.ops[basis.sector_slice(r, include_projector=True)]:
            elems = vecs.conj().T @ op @ vecs
            assert np.max(np.abs(elems[~inside][:, ~inside])) <= 1e-10
            assert np.max(np.abs(elems[inside][:, ~inside])) <= 1e-10
        np.testing.assert_allclose(
            basis.ops[basis.first(r) - 1], basis.sector_vectors(r) @ basis.sector_vectors(r).conj().T / np.sqrt(size),
            atol=1e-12,
        )
        start += size
    for op in basis.ops[basis.residual_slice]:
        for k in range(m):
            assert abs(vecs[:, k].conj() @ op @ vecs[:, k]) <= 1e-10
