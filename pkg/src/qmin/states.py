"""Bipartite density matrices, reduced states, spectra and Bloch coefficients.

Subsystem ``a`` is the major index: ``|u>_a |v>_b`` sits at flat position
``u * n + v``.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_square, check_hermitian, frozen, hermiticity_defect
from .bases import HermitianBasis, _gell_mann
from .exceptions import (
    HermiticityError,
    PositivityError,
    ShapeError,
    TraceError,
)

TRACE_ATOL = 1e-8
POSITIVITY_FLOOR = -1e-9
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class DensityMatrix:
    dim_a: int
    dim_b: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", frozen(np.asarray(self.entries, dtype=complex)))

    @property
    def shape(self):
        return (self.dim_a, self.dim_b)

    @property
    def tensor(self):
        """Entries reshaped to ``(m, n, m, n)``."""
        return self.entries.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)

    def purity(self):
        return float(np.real(np.vdot(self.entries, self.entries)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def validate(entries, m, n):
    """Check ``entries`` is a density matrix on ``C^m (x) C^n`` and wrap it.

    Raises
    ------
    ShapeError, HermiticityError, TraceError, PositivityError
    """
    if int(m) != m or int(n) != n or m < 1 or n < 1:
        raise ShapeError(f"subsystem dimensions must be positive integers, got {m}, {n}")
    m, n = int(m), int(n)
    rho = as_square(entries, "density matrix", dim=m * n)
    defect = hermiticity_defect(rho)
    if defect > 1e-10:
        raise HermiticityError(f"density matrix is not Hermitian (max deviation {defect:.3e})")
    rho = (rho + rho.conj().T) / 2
    trace = np.trace(rho).real
    if abs(trace - 1.0) > TRACE_ATOL:
        raise TraceError(f"density matrix has trace {trace:.12g}, expected 1")
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < POSITIVITY_FLOOR:
        raise PositivityError(
            f"density matrix has negative eigenvalue {lowest:.6g}", eigenvalue=lowest
        )
    return DensityMatrix(m, n, rho)


def partial_trace_b(rho):
    """Reduced state on subsystem ``a``: ``(rho_a)_{uu'} = sum_v rho_{(u,v),(u',v)}``."""
    return np.einsum("avbv->ab", rho.tensor)


def partial_trace_a(rho):
    return np.einsum("avaw->vw", rho.tensor)


@dataclass(frozen=True)
class Sector:
    """One eigenspace cluster: common eigenvalue and orthonormal eigenvectors."""

    value: float
    indices: tuple
    vectors: np.ndarray = field(repr=False)

    @property
    def size(self):
        return len(self.indices)

    @property
    def projector(self):
        return self.vectors @ self.vectors.conj().T


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted in descending order, grouped into sectors."""

    eigenvalues: np.ndarray
    sectors: tuple
    tol: float
    warnings: tuple = ()

    @property
    def dim(self):
        return len(self.eigenvalues)

    @property
    def deg_count(self):
        return sum(1 for s in self.sectors if s.size >= 2)

    @property
    def nondeg_count(self):
        return sum(1 for s in self.sectors if s.size == 1)

    @property
    def degenerate(self):
        return [s for s in self.sectors if s.size >= 2]

    @property
    def sector_dims(self):
        return tuple(s.size for s in self.sectors)

    def vectors(self):
        return np.hstack([s.vectors for s in self.sectors])

    def reconstruct(self):
        return sum(s.value * s.projector for s in self.sectors)

    def rotated(self, unitaries):
        """Same spectrum with each degenerate sector's eigenbasis rotated.

        ``unitaries`` holds one ``m_r x m_r`` unitary per degenerate sector,
        in sector order.
        """
        unitaries = list(unitaries)
        sectors = []
        for s in self.sectors:
            if s.size >= 2:
                u = np.asarray(unitaries.pop(0), dtype=complex)
                s = Sector(s.value, s.indices, frozen(s.vectors @ u))
            sectors.append(s)
        return SpectralDecomposition(self.eigenvalues, tuple(sectors), self.tol, self.warnings)


def spectral_decompose(h, tol=DEFAULT_TOL):
    """Eigen-decompose a Hermitian matrix and cluster nearly equal eigenvalues.

    Sorted eigenvalues are split wherever two consecutive values differ by
    more than ``tol``. Each cluster's eigenvectors are re-orthonormalized and
    the cluster is assigned the mean of its eigenvalues. A gap that falls in
    ``(tol, 100 * tol]`` produces a warning, both on the returned object and
    through :mod:`warnings`.
    """
    if not tol > 0:
        raise ValueError(f"degeneracy tolerance must be positive, got {tol}")
    h = as_square(h, "operator")
    check_hermitian(h, "operator")
    h = (h + h.conj().T) / 2
    values, vecs = np.linalg.eigh(h)
    values, vecs = values[::-1], vecs[:, ::-1]

    groups = [[0]]
    notes = []
    for i in range(1, len(values)):
        gap = values[i - 1] - values[i]
        if gap > tol:
            groups.append([i])
            if gap <= 100 * tol:
                notes.append(
                    f"eigenvalues {values[i - 1]:.12g} and {values[i]:.12g} are split by "
                    f"a gap of {gap:.3e}, within 100x the tolerance {tol:.1e}"
                )
        else:
            groups[-1].append(i)
    sectors = []
    for g in groups:
        q, _ = np.linalg.qr(vecs[:, g])
        # Keep QR from flipping phases arbitrarily relative to eigh output.
        q = q * np.exp(-1j * np.angle(np.diag(q.conj().T @ vecs[:, g])))
        spread = values[g[0]] - values[g[-1]]
        if spread > tol:
            notes.append(f"cluster {g} spans {spread:.3e}, wider than the tolerance {tol:.1e}")
        sectors.append(Sector(float(np.mean(values[g])), tuple(g), frozen(q)))
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return SpectralDecomposition(frozen(values.copy()), tuple(sectors), tol, tuple(notes))


@dataclass(frozen=True)
class CoefficientMatrix:
    """Real coefficients ``c_ij = tr(rho (A_i (x) B_j))``.

    With ``convention="plain"`` both bases are Gell-Mann and row/column 0
    belong to the scaled identities, so ``x = c[1:, 0]``, ``y = c[0, 1:]``
    and the correlation matrix is ``t = c[1:, 1:]``. With
    ``convention="adapted"`` row ``i`` (0-based) holds the coefficients of
    adapted operator ``i + 1``.
    """

    c: np.ndarray
    basis_a: object = field(repr=False)
    basis_b: object = field(repr=False)
    convention: str = "plain"

    def __post_init__(self):
        object.__setattr__(self, "c", frozen(self.c))

    @property
    def x(self):
        return self.c[1:, 0]

    @property
    def y(self):
        return self.c[0, 1:]

    @property
    def t(self):
        return self.c[1:, 1:]

    def reconstruct(self):
        return np.einsum("ij,iab,jvw->avbw", self.c, self.basis_a.ops, self.basis_b.ops).reshape(
            self.basis_a.dim * self.basis_b.dim, -1
        )


def coefficients(rho, basis_a, basis_b, convention=None):
    """Expand ``rho`` in the product basis ``{A_i (x) B_j}``."""
    if basis_a.dim != rho.dim_a or basis_b.dim != rho.dim_b:
        raise ShapeError(
            f"bases have dims ({basis_a.dim}, {basis_b.dim}), state is {rho.shape}"
        )
    if convention is None:
        convention = "adapted" if hasattr(basis_a, "sector_offsets") else "plain"
    # c_ij = sum rho[a,v,b,w] A_i[b,a] B_j[w,v]
    c = np.einsum("avbw,iba,jwv->ij", rho.tensor, basis_a.ops, basis_b.ops, optimize=True)
    return CoefficientMatrix(c.real, basis_a, basis_b, convention)


def plain_coefficients(rho):
    return coefficients(rho, _gell_mann(rho.dim_a), _gell_mann(rho.dim_b), "plain")


__all__ = [
    "DensityMatrix",
    "Sector",
    "SpectralDecomposition",
    "CoefficientMatrix",
    "validate",
    "partial_trace_b",
    "partial_trace_a",
    "spectral_decompose",
    "coefficients",
    "plain_coefficients",
]
