"""Von Neumann measurements on subsystem ``a`` and their constraint checks."""
from dataclasses import dataclass

import numpy as np

from ._validation import frozen
from .bases import _gell_mann
from .exceptions import ShapeError

PROJECTOR_ATOL = 1e-9


@dataclass(frozen=True)
class Measurement:
    """A list of projectors ``Pi_k`` on ``C^m``, stored as an ``(K, m, m)`` array."""

    projectors: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.projectors, dtype=complex)
        if p.ndim != 3 or p.shape[1] != p.shape[2]:
            raise ShapeError(f"projectors must have shape (K, m, m), got {p.shape}")
        object.__setattr__(self, "projectors", frozen(p))

    @classmethod
    def from_vectors(cls, vectors):
        """Rank-one projectors onto the columns of ``vectors``."""
        v = np.asarray(vectors, dtype=complex)
        return cls(np.einsum("ak,bk->kab", v, v.conj()))

    @classmethod
    def from_coefficients(cls, a, basis=None):
        """``Pi_k = sum_i a[k, i] X_i``; ``basis`` defaults to Gell-Mann."""
        a = np.asarray(a, dtype=float)
        m = int(round(np.sqrt(a.shape[1])))
        basis = _gell_mann(m) if basis is None else basis
        return cls(np.einsum("ki,iab->kab", a, basis.ops))

    @property
    def dim(self):
        return self.projectors.shape[1]

    def __len__(self):
        return self.projectors.shape[0]

    def coefficients(self, basis=None):
        """Matrix ``a[k, i] = tr(Pi_k X_i)``."""
        basis = _gell_mann(self.dim) if basis is None else basis
        return np.einsum("kab,iba->ki", self.projectors, basis.ops).real

    def defects(self):
        """Max deviations from the projective-measurement identities."""
        p = self.projectors
        eye = np.eye(len(self))
        prod = np.einsum("kab,lbc->klac", p, p)
        target = eye[:, :, None, None] * p[:, None, :, :]
        return {
            "hermiticity": float(np.max(np.abs(p - np.conj(np.swapaxes(p, 1, 2))))),
            "orthogonality": float(np.max(np.abs(prod - target))),
            "completeness": float(np.max(np.abs(p.sum(axis=0) - np.eye(self.dim)))),
            "rank_one": float(np.max(np.abs(np.trace(p, axis1=1, axis2=2) - 1))),
        }

    def is_valid(self, atol=PROJECTOR_ATOL):
        return len(self) == self.dim and max(self.defects().values()) <= atol

    def dephase(self, op):
        """``sum_k Pi_k op Pi_k`` for an operator on ``C^m``."""
        return np.einsum("kab,bc,kcd->ad", self.projectors, op, self.projectors)


R2, R3, R6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)


def appendix_coefficients_3d():
    """The explicit 3 x 9 coefficient table ``a[k, i]`` (``k = 1..3``, ``i = 0..8``).

    Obtained by imposing ``a_11 = a_21 = a_12 = a_22 = a_26 = a_28 = 0`` on
    the 3-dim constraint system; entries not listed there are zero and
    ``a_k0 = 1/sqrt(3)``.
    """
    a = np.zeros((3, 9))
    a[:, 0] = 1 / R3
    a[1, 5] = a[1, 7] = a[0, 3] = a[1, 3] = R2 / 3
    a[2, 3] = -2 * R2 / 3
    a[0, 5] = a[0, 7] = a[2, 5] = a[2, 7] = -1 / (3 * R2)
    a[0, 6] = a[0, 8] = 1 / R6
    a[2, 6] = a[2, 8] = -1 / R6
    return a


def appendix_measurement_3d():
    """Measurement reconstructed from :func:`appendix_coefficients_3d`.

    The table is reproduced verbatim. Note that it does not describe a valid
    measurement: rows 1 and 2 both have ``a_k3 = sqrt(2)/3`` with
    ``a_k1 = a_k2 = 0``, which forces their vectors to share the relative
    phase of components 1 and 2 and rules out orthogonality. Use
    :func:`verify_measurement_constraints` to see the violations, and
    :func:`block_measurement_3d` for a feasible measurement in the same
    spirit.
    """
    return Measurement.from_coefficients(appendix_coefficients_3d())


def block_measurement_3d():
    """Projectors onto ``(|1> + i|2>)/sqrt(2)``, ``(|1> - i|2>)/sqrt(2)`` and ``|3>``.

    Its coefficients are supported on ``X_0, X_1, X_2, X_4`` only, so on a
    state with reduced state ``I/3`` whose correlation rows 1, 2 and 4 vanish
    it removes all of ``tr(T T^t)`` and attains the maximum.
    """
    v = np.array([[1, 1, 0], [1j, -1j, 0], [0, 0, R2]]) / R2
    return Measurement.from_vectors(v)


def _appendix_diagonal(a):
    """Residuals of the ``k = k'`` equations for one coefficient row ``a[0..8]``."""
    _, a1, a2, a3, a4, a5, a6, a7, a8 = a
    return np.array([
        np.sum(a[1:] ** 2) - 2 / 3,
        a1 / 3 - (2 / R6 * a1 * a2 + (a5**2 + a6**2 - a7**2 - a8**2) / (2 * R2)),
        a2 / 3 - (a1**2 - a2**2 + a3**2 + a4**2 - (a5**2 + a6**2 + a7**2 + a8**2) / 2) / R6,
        a3 / 3 - (2 / R6 * a3 * a2 + (a5 * a7 + a6 * a8) / R2),
        a4 / 3 - (2 / R6 * a4 * a2 + (-a5 * a8 + a6 * a7) / R2),
        a5 / 3 - (-a5 * a2 / R6 + (a1 * a5 + a3 * a7 - a4 * a8) / R2),
        a6 / 3 - (-a6 * a2 / R6 + (a1 * a6 + a3 * a8 + a4 * a7) / R2),
        a7 / 3 - (-a7 * a2 / R6 + (-a1 * a7 + a3 * a5 + a4 * a6) / R2),
        a8 / 3 - (-a8 * a2 / R6 + (-a1 * a8 + a3 * a6 - a4 * a5) / R2),
    ])


def _appendix_off_diagonal(p, q):
    """Residuals of the ``k = 1, k' = 2`` equations (complex valued)."""
    _, p1, p2, p3, p4, p5, p6, p7, p8 = p
    _, q1, q2, q3, q4, q5, q6, q7, q8 = q
    c = 1 / (2 * R2)
    return np.array([
        np.dot(p[1:], q[1:]) + 1 / 3,
        (p1 + q1) / 3 + (p1 * q2 + p2 * q1) / R6
        + c * (p5 * q5 + p6 * q6 - p7 * q7 - p8 * q8)
        + 1j * c * (2 * p4 * q3 - 2 * p3 * q4 + p6 * q5 - p5 * q6 + p7 * q8 - p8 * q7),
        (p2 + q2) / 3
        + (p1 * q1 - p2 * q2 + p3 * q3 + p4 * q4 - (p5 * q5 + p6 * q6 + p7 * q7 + p8 * q8) / 2) / R6
        + 3j / (2 * R6) * (p6 * q5 - p5 * q6 + p8 * q7 - p7 * q8),
        (p3 + q3) / 3 + (p2 * q3 + p3 * q2) / R6
        + c * (p5 * q7 + p7 * q5 + p6 * q8 + p8 * q6)
        + 1j / R2 * (p1 * q4 - p4 * q1 - p5 * q8 / 2 + p8 * q5 / 2 + p6 * q7 / 2 - p7 * q6 / 2),
        (p4 + q4) / 3 + (p2 * q4 + p4 * q2) / R6
        + c * (-p5 * q8 - p8 * q5 + p6 * q7 + p7 * q6)
        + 1j / R2 * (p3 * q1 - p1 * q3 - p5 * q7 / 2 + p7 * q5 / 2 + p8 * q6 / 2 - p6 * q8 / 2),
        (p5 + q5) / 3 - (p2 * q5 + p5 * q2) / (2 * R6)
        + c * (p1 * q5 + p5 * q1 + p3 * q7 + p7 * q3 - p4 * q8 - p8 * q4)
        + 1j * c * (p1 * q6 - p6 * q1 + p3 * q8 - p8 * q3 + p4 * q7 - p7 * q4 + R3 * p2 * q6 - R3 * p6 * q2),
        (p6 + q6) / 3 - (p2 * q6 + p6 * q2) / (2 * R6)
        + c * (p1 * q6 + p6 * q1 + p3 * q8 + p8 * q3 + p4 * q7 + p7 * q4)
        + 1j * c * (-p1 * q5 + p5 * q1 - p3 * q7 + p7 * q3 + p4 * q8 - p8 * q4 + R3 * p5 * q2 - R3 * p2 * q5),
        (p7 + q7) / 3 - (p2 * q7 + p7 * q2) / (2 * R6)
        + c * (-p1 * q7 - p7 * q1 + p3 * q5 + p5 * q3 + p4 * q6 + p6 * q4)
        + 1j * c * (-p1 * q8 + p8 * q1 + p3 * q6 - p6 * q3 - p4 * q5 + p5 * q4 + R3 * p2 * q8 - R3 * p8 * q2),
        (p8 + q8) / 3 - (p2 * q8 + p8 * q2) / (2 * R6)
        + c * (-p1 * q8 - p8 * q1 + p3 * q6 + p6 * q3 - p4 * q5 - p5 * q4)
        + 1j * c * (p1 * q7 - p7 * q1 - p3 * q5 + p5 * q3 - p4 * q6 + p6 * q4 + R3 * p7 * q2 - R3 * p2 * q7),
    ])


def verify_measurement_constraints(meas):
    """Report the largest violation of each family of measurement constraints.

    For any dimension the report has

    * ``diagonal``: ``max |tr X_l (Pi_k Pi_k - Pi_k)|``,
    * ``off_diagonal``: ``max |tr X_l Pi_k Pi_k'|`` over ``k != k'``,
    * ``column_sums``: ``max_i |sum_k a_ki|`` for ``i >= 1``,
    * ``row_orthonormality``: ``max |sum_i a_ki a_k'i - delta_kk'|``,

    all in the Gell-Mann basis. For ``m = 3`` the explicit polynomial
    equations for the coefficient rows are evaluated as well
    (``appendix_diagonal`` for ``k = k' = 1, 2`` and ``appendix_off_diagonal``
    for ``k = 1, k' = 2``).
    """
    basis = _gell_mann(meas.dim)
    a = meas.coefficients(basis)
    p = meas.projectors
    prod = np.einsum("kab,lbc->klac", p, p)
    comp = np.einsum("klac,ica->kli", prod, basis.ops)
    k = len(meas)
    diag = max(float(np.max(np.abs(comp[i, i] - a[i]))) for i in range(k))
    off = max(
        (float(np.max(np.abs(comp[i, j]))) for i in range(k) for j in range(k) if i != j),
        default=0.0,
    )
    report = {
        "diagonal": diag,
        "off_diagonal": off,
        "column_sums": float(np.max(np.abs(a[:, 1:].sum(axis=0)))) if a.shape[1] > 1 else 0.0,
        "row_orthonormality": float(np.max(np.abs(a @ a.T - np.eye(k)))),
    }
    if meas.dim == 3 and k == 3:
        report["appendix_diagonal"] = float(
            max(np.max(np.abs(_appendix_diagonal(a[i]))) for i in (0, 1))
        )
        report["appendix_off_diagonal"] = float(np.max(np.abs(_appendix_off_diagonal(a[0], a[1]))))
    return report
