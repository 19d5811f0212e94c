"""Small array validation helpers shared by the public modules."""
import numpy as np

from .exceptions import HermiticityError, ShapeError

HERMITIAN_ATOL = 1e-10


def as_square(matrix, name="matrix", dim=None):
    """Return ``matrix`` as a complex square ndarray, checking its shape."""
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be a square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ShapeError(f"{name} must be {dim}x{dim}, got {arr.shape[0]}x{arr.shape[1]}")
    return arr


def hermiticity_defect(matrix):
    """Max absolute deviation between ``matrix`` and its conjugate transpose."""
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def check_hermitian(matrix, name="matrix", atol=HERMITIAN_ATOL):
    defect = hermiticity_defect(matrix)
    if defect > atol:
        raise HermiticityError(f"{name} is not Hermitian (max deviation {defect:.3e})")
    return matrix


def unitarity_defect(u):
    u = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1])))) if u.size else 0.0


def hs_inner(a, b):
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    return np.vdot(a, b)


def frozen(arr):
    """Return a read-only view so dataclass payloads stay immutable."""
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr
