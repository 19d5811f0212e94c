"""Orthonormal Hermitian operator bases.

Two kinds of basis are produced here:

* :func:`gell_mann_basis` -- the generalized Gell-Mann set on ``C^d``,
  normalized so that ``tr(A_i A_j) = delta_ij`` and with ``I/sqrt(d)`` first.
* :func:`adapted_basis` -- a basis built from the eigenvectors of a reduced
  state, grouped sector by sector so that a measurement that preserves the
  reduced state only ever mixes operators inside one degenerate sector.

Both are plain dense arrays of shape ``(dim**2, dim, dim)``.
"""
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_hermitian, frozen, as_square
from .exceptions import InvalidDimensionError, ShapeError, SpectralInputError

ORTHONORMAL_ATOL = 1e-10


@dataclass(frozen=True)
class HermitianBasis:
    """An ordered orthonormal basis of ``dim x dim`` Hermitian matrices.

    Gell-Mann bases put ``I/sqrt(dim)`` at ``ops[0]`` and keep the rest
    traceless; adapted bases (see :class:`AdaptedBasis`) do not.
    """

    dim: int
    ops: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", frozen(np.asarray(self.ops, dtype=complex)))
        if self.ops.shape != (self.dim**2, self.dim, self.dim):
            raise ShapeError(
                f"expected {self.dim**2} operators of size {self.dim}, got {self.ops.shape}"
            )

    def __len__(self):
        return self.dim**2

    def gram(self):
        """Matrix of Hilbert-Schmidt inner products ``tr(ops[i] ops[j])``."""
        flat = self.ops.reshape(len(self), -1)
        # tr(A B) = sum_ab A_ab B_ba; for Hermitian B this is vdot(A, B).
        return flat.conj() @ flat.T

    def orthonormality_defect(self):
        return float(np.max(np.abs(self.gram() - np.eye(len(self)))))

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.ops - np.conj(np.swapaxes(self.ops, 1, 2)))))

    def trace_defect(self):
        """Largest ``|tr ops[i]|`` over the traceless operators ``i >= 1``."""
        if len(self) == 1:
            return 0.0
        return float(np.max(np.abs(np.trace(self.ops[1:], axis1=1, axis2=2))))

    def conjugate(self, unitary):
        """Return the basis ``{V A V^dagger}`` for a unitary (or isometry) ``V``."""
        v = np.asarray(unitary, dtype=complex)
        ops = v @ self.ops @ v.conj().T
        return ops


def _pair_ops(dim, u, v, vectors=None):
    """Symmetric and antisymmetric pair operators on basis states ``u < v``."""
    if vectors is None:
        ket_u = np.zeros(dim, dtype=complex)
        ket_v = np.zeros(dim, dtype=complex)
        ket_u[u] = ket_v[v] = 1.0
    else:
        ket_u, ket_v = vectors[:, u], vectors[:, v]
    uv = np.outer(ket_u, ket_v.conj())
    sym = (uv + uv.conj().T) / np.sqrt(2)
    asym = -1j * (uv - uv.conj().T) / np.sqrt(2)
    return sym, asym


def gell_mann_basis(dim):
    """Normalized generalized Gell-Mann basis of dimension ``dim``.

    Order: ``I/sqrt(dim)``, the ``dim - 1`` diagonal generators
    ``(sum_{l<=k} |l><l| - k|k+1><k+1|)/sqrt(k(k+1))``, then for each pair
    ``u < v`` in lexicographic order the symmetric operator
    ``(|u><v| + |v><u|)/sqrt(2)`` followed by the antisymmetric one
    ``-i(|u><v| - |v><u|)/sqrt(2)``.

    For ``dim = 3`` this reproduces the familiar eight-operator listing
    (``X_1 .. X_8``) with ``X_5 = (|1><3| + |3><1|)/sqrt(2)``.
    """
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"basis dimension must be an integer >= 2, got {dim}")
    dim = int(dim)
    return _gell_mann(dim)


def _gell_mann(dim):
    # dim = 1 is allowed internally so that 1-dim sectors can reuse the code.
    ops = [np.eye(dim, dtype=complex) / np.sqrt(dim)]
    labels = ["I"]
    for k in range(1, dim):
        diag = np.zeros(dim)
        diag[:k] = 1.0
        diag[k] = -k
        ops.append(np.diag(diag).astype(complex) / np.sqrt(k * (k + 1)))
        labels.append(f"D{k}")
    for u in range(dim):
        for v in range(u + 1, dim):
            sym, asym = _pair_ops(dim, u, v)
            ops.extend([sym, asym])
            labels.extend([f"S{u}{v}", f"A{u}{v}"])
    return HermitianBasis(dim, np.array(ops), tuple(labels))


def expand(op, basis):
    """Real expansion coefficients ``tr(basis.ops[i] @ op)`` of a Hermitian ``op``."""
    op = as_square(op, "operator")
    if op.shape[0] != basis.dim:
        raise ShapeError(f"operator is {op.shape[0]}-dimensional, basis is {basis.dim}")
    check_hermitian(op, "operator")
    coeffs = np.einsum("iab,ba->i", basis.ops, op)
    return coeffs.real


def reconstruct(coeffs, basis):
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (len(basis),):
        raise ShapeError(f"expected {len(basis)} coefficients, got {coeffs.shape}")
    return np.einsum("i,iab->ab", coeffs, basis.ops)


@dataclass(frozen=True)
class AdaptedBasis:
    """Operator basis organized by the degenerate sectors of a reduced state.

    Indices below are 1-based to match the usual bookkeeping, so operator
    ``i`` lives at ``base.ops[i - 1]``:

    * sector ``r`` (1-based) occupies ``first(r) .. sector_offsets[r]``, with
      ``first(r) = sector_offsets[r - 1] + 1`` holding the scaled sector
      projector and the rest the sector's traceless operators;
    * ``B_d + 1 .. B_d + d'`` are rank-one projectors onto the
      non-degenerate eigenvectors;
    * ``residual_start .. m**2`` couple distinct sectors only.
    """

    base: HermitianBasis
    sector_offsets: tuple
    sector_dims: tuple
    nondeg_count: int
    residual_start: int
    vectors: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self):
        return self.base.dim

    @property
    def ops(self):
        return self.base.ops

    @property
    def deg_count(self):
        return len(self.sector_dims)

    def first(self, r):
        """1-based index of the scaled projector of degenerate sector ``r``."""
        return self.sector_offsets[r - 1] + 1

    def sector_slice(self, r, include_projector=False):
        """0-based slice into ``ops`` covering sector ``r``'s operators."""
        start = self.sector_offsets[r - 1] + (0 if include_projector else 1)
        return slice(start, self.sector_offsets[r])

    def sector_vectors(self, r):
        start = sum(self.sector_dims[: r - 1])
        return self.vectors[:, start : start + self.sector_dims[r - 1]]

    @property
    def nondeg_slice(self):
        b_d = self.sector_offsets[-1]
        return slice(b_d, b_d + self.nondeg_count)

    @property
    def residual_slice(self):
        return slice(self.residual_start - 1, self.dim**2)


def adapted_basis(spectrum, atol=ORTHONORMAL_ATOL):
    """Build the sector-adapted basis from a spectral decomposition.

    ``spectrum`` needs ``sectors`` (each with ``vectors`` of shape
    ``(m, size)``), ordered however the caller likes; degenerate sectors are
    laid out first, in that order, followed by the non-degenerate ones.
    Within a degenerate sector the operators are the Gell-Mann basis of the
    sector dimension conjugated into the sector's eigenvectors. All
    symmetric/antisymmetric pair operators between eigenvectors of distinct
    sectors fill the tail.
    """
    degenerate = [s for s in spectrum.sectors if s.size >= 2]
    single = [s for s in spectrum.sectors if s.size == 1]
    vectors = np.hstack([np.asarray(s.vectors, dtype=complex) for s in degenerate + single])
    m = vectors.shape[0]
    if vectors.shape != (m, m):
        raise SpectralInputError(
            f"sectors supply {vectors.shape[1]} eigenvectors for a {m}-dim space"
        )
    defect = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(m))))
    if defect > atol:
        raise SpectralInputError(f"eigenvectors are not orthonormal (defect {defect:.3e})")

    ops, labels, offsets, owner = [], [], [0], []
    col = 0
    for r, sector in enumerate(degenerate, start=1):
        local = _gell_mann(sector.size)
        v = vectors[:, col : col + sector.size]
        ops.extend(local.conjugate(v))
        labels.append(f"P{r}")
        labels.extend(f"{lab}@{r}" for lab in local.labels[1:])
        offsets.append(offsets[-1] + sector.size**2)
        owner.extend([r] * sector.size)
        col += sector.size
    for r, _ in enumerate(single, start=1):
        ket = vectors[:, col]
        ops.append(np.outer(ket, ket.conj()))
        labels.append(f"K{r}")
        owner.append(-r)
        col += 1
    for u in range(m):
        for v in range(u + 1, m):
            if owner[u] == owner[v]:
                continue
            sym, asym = _pair_ops(m, u, v, vectors)
            ops.extend([sym, asym])
            labels.extend([f"S{u}{v}", f"A{u}{v}"])

    base = HermitianBasis(m, np.array(ops), tuple(labels))
    residual_start = offsets[-1] + len(single) + 1
    return AdaptedBasis(
        base=base,
        sector_offsets=tuple(offsets),
        sector_dims=tuple(s.size for s in degenerate),
        nondeg_count=len(single),
        residual_start=residual_start,
        vectors=frozen(vectors),
    )
