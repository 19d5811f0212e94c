"""Constructors for test and demo states.

Every random generator takes ``seed`` (anything accepted by
:func:`numpy.random.default_rng`, including a ``Generator``) and is
deterministic for a fixed integer seed.
"""
import numpy as np

from .bases import _gell_mann
from .exceptions import PositivityError, PreconditionError, ShapeError
from .oracle import haar_unitary
from .states import POSITIVITY_FLOOR, DensityMatrix, validate

SEC4_X_RANGE = (1 / 6, 5 / 12)


def _rng(seed):
    return np.random.default_rng(seed)


def _ginibre(rows, cols, rng):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def _unit_trace_psd(mat):
    return mat / np.trace(mat).real


def product_state(sigma, tau):
    sigma = np.asarray(sigma, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    return validate(np.kron(sigma, tau), sigma.shape[0], tau.shape[0])


def pure_state_from_schmidt(coeffs, m=None, n=None):
    """Pure state ``sum_i c_i |i>|i>`` with the coefficients normalized.

    ``m`` and ``n`` default to the number of coefficients.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    k = len(coeffs)
    m = k if m is None else m
    n = k if n is None else n
    if k > min(m, n):
        raise ShapeError(f"{k} Schmidt coefficients do not fit a {m}x{n} system")
    norm = np.linalg.norm(coeffs)
    if norm == 0:
        raise ValueError("Schmidt coefficients must not all vanish")
    psi = np.zeros(m * n, dtype=complex)
    for i, c in enumerate(coeffs / norm):
        psi[i * n + i] = c
    return validate(np.outer(psi, psi.conj()), m, n)


def haar_random_pure(m, n, seed=None):
    psi = _ginibre(m * n, 1, _rng(seed))[:, 0]
    psi /= np.linalg.norm(psi)
    return validate(np.outer(psi, psi.conj()), m, n)


def ginibre_random_mixed(m, n, rank=None, seed=None):
    """``G G^dagger / tr`` with ``G`` an ``mn x rank`` complex Gaussian matrix."""
    rank = m * n if rank is None else rank
    g = _ginibre(m * n, rank, _rng(seed))
    return validate(_unit_trace_psd(g @ g.conj().T), m, n)


def _sqrtm_psd(mat, inverse=False):
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0, None)
    if inverse:
        w = np.where(w > 0, 1 / np.sqrt(np.where(w > 0, w, 1)), 0)
    else:
        w = np.sqrt(w)
    return (v * w) @ v.conj().T


def engineered_degenerate(m, n, sector_dims, seed=None, min_gap=0.05, rank=None):
    """Random correlated state whose reduced state has a prescribed degeneracy.

    ``sector_dims`` lists the multiplicity of each distinct eigenvalue of the
    reduced state (e.g. ``[2, 1]``). A Ginibre state is locally filtered on
    subsystem ``a`` so that its marginal becomes exactly
    ``V diag(e) V^dagger`` with random ``V`` and random distinct ``e``
    (consecutive distinct values at least ``min_gap`` apart). Local
    filtering preserves positivity and keeps the correlations generic.
    """
    sector_dims = [int(s) for s in sector_dims]
    if sum(sector_dims) != m or any(s < 1 for s in sector_dims):
        raise PreconditionError(f"sector dims {sector_dims} must be positive and sum to m={m}")
    rng = _rng(seed)
    k = len(sector_dims)
    if k * min_gap >= 1:
        raise PreconditionError(f"min_gap {min_gap} too large for {k} sectors")
    while True:
        weights = rng.dirichlet(np.ones(k))
        levels = weights / np.array(sector_dims)
        if k == 1 or np.min(np.abs(np.subtract.outer(levels, levels))[~np.eye(k, dtype=bool)]) >= min_gap / m:
            break
    eig = np.repeat(levels, sector_dims)
    v = haar_unitary(m, rng)
    target = (v * eig) @ v.conj().T

    g = _ginibre(m * n, m * n if rank is None else rank, rng)
    rho0 = _unit_trace_psd(g @ g.conj().T)
    sigma0 = np.einsum("avbv->ab", rho0.reshape(m, n, m, n))
    filt = np.kron(_sqrtm_psd(target) @ _sqrtm_psd(sigma0, inverse=True), np.eye(n))
    rho = filt @ rho0 @ filt.conj().T
    rho = (rho + rho.conj().T) / 2
    return validate(rho / np.trace(rho).real, m, n)


def maximally_entangled(d):
    return pure_state_from_schmidt(np.ones(d))


def bell_state():
    return maximally_entangled(2)


def sec4_marginal_generator():
    """Traceless ``sqrt(3) X_2 - X_3 + 2 X_5 + 2 X_7`` in the 3-dim Gell-Mann basis."""
    x = _gell_mann(3).ops
    return np.sqrt(3) * x[2] - x[3] + 2 * x[5] + 2 * x[7]


def sec4_entries(x, y1, t_vec, n):
    """Unchecked entries of the parameterized ``3 x n`` example family.

    ``t_vec[i - 1]`` multiplies ``X_i (x) Y_1`` for ``i = 1..8``.
    """
    t_vec = np.asarray(t_vec, dtype=float)
    if t_vec.shape != (8,):
        raise ShapeError(f"t_vec must have 8 entries, got {t_vec.shape}")
    if n < 2:
        raise ShapeError("the example family needs n >= 2 (it uses Y_1)")
    xa = _gell_mann(3).ops
    yb = _gell_mann(n).ops
    eye_b = np.eye(n) / np.sqrt(n)
    rho = np.eye(3 * n, dtype=complex) / (3 * n)
    rho += np.sqrt(2 / n) * (x - 1 / 3) * np.kron(sec4_marginal_generator(), eye_b)
    rho += y1 * np.kron(np.eye(3) / np.sqrt(3), yb[1])
    rho += np.kron(np.einsum("i,iab->ab", t_vec, xa[1:]), yb[1])
    return rho


def example_state_sec4(x, y1, t_vec, n):
    """The ``3 x n`` family whose reduced state has eigenvalues
    ``2x - 1/3`` (twice) and ``5/3 - 4x``.

    Requires ``1/6 < x < 5/12``; ``y1`` and ``t_vec`` must leave the matrix
    positive semidefinite, otherwise :class:`PositivityError` names the
    offending eigenvalue.
    """
    lo, hi = SEC4_X_RANGE
    if not lo < x < hi:
        raise PreconditionError(f"x must lie in (1/6, 5/12), got {x}")
    rho = sec4_entries(x, y1, t_vec, n)
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < POSITIVITY_FLOOR:
        raise PositivityError(
            f"parameters give a negative eigenvalue {lowest:.6g}; shrink y1 or t_vec",
            eigenvalue=lowest,
        )
    return validate(rho, 3, n)


def random_sec4_parameters(x, n, seed=None, margin=0.9):
    """Random ``(y1, t_vec)`` admissible for :func:`example_state_sec4`.

    A Gaussian direction is drawn and scaled to ``margin`` times the largest
    multiple that keeps the state positive semidefinite.
    """
    rng = _rng(seed)
    direction = rng.standard_normal(9)
    base = sec4_entries(x, 0.0, np.zeros(8), n)
    pert = sec4_entries(x, direction[0], direction[1:], n) - base
    # Largest s with base + s * pert >= 0, via the generalized eigenproblem
    # on the support of base (base is full rank inside the allowed x range).
    w, v = np.linalg.eigh(base)
    b_inv_half = (v / np.sqrt(w)) @ v.conj().T
    lam = np.linalg.eigvalsh(b_inv_half @ pert @ b_inv_half)
    s_max = 1.0 / max(-lam.min(), 1e-300)
    coeffs = margin * s_max * direction
    return float(coeffs[0]), coeffs[1:]


def fully_degenerate_3x(n, seed=None, zero_rows=(1, 2, 4), margin=0.9, with_local_b=True):
    """Random ``3 x n`` state with reduced state ``I/3``.

    The correlation rows listed in ``zero_rows`` (1-based Gell-Mann indices on
    subsystem ``a``) are forced to zero.
    """
    rng = _rng(seed)
    xa = _gell_mann(3).ops
    yb = _gell_mann(n).ops
    t = rng.standard_normal((8, n * n - 1))
    for i in zero_rows:
        t[i - 1] = 0.0
    y = rng.standard_normal(n * n - 1) if with_local_b else np.zeros(n * n - 1)
    pert = np.kron(np.eye(3) / np.sqrt(3), np.einsum("j,jab->ab", y, yb[1:]))
    pert = pert + np.einsum("ij,iab,jvw->avbw", t, xa[1:], yb[1:]).reshape(3 * n, 3 * n)
    lam = np.linalg.eigvalsh(pert)
    # base is I/(3n); keep 1/(3n) + s * lam_min >= 0.
    s = margin / (3 * n * max(-lam.min(), 1e-300))
    return validate(np.eye(3 * n) / (3 * n) + s * pert, 3, n)


__all__ = [
    "product_state",
    "pure_state_from_schmidt",
    "haar_random_pure",
    "ginibre_random_mixed",
    "engineered_degenerate",
    "example_state_sec4",
    "random_sec4_parameters",
    "fully_degenerate_3x",
    "bell_state",
    "maximally_entangled",
    "DensityMatrix",
]
