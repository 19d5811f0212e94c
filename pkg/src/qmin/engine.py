"""Measurement-induced nonlocality through the sector-adapted block decomposition.

In the adapted basis ``{X'_i}`` of the reduced state the squared disturbance
of any admissible measurement splits into

* a residual ``sum_{i >= D, j >= 1} c_ij^2`` that no admissible measurement
  can change, and
* one term ``tr(C_r C_r^t) - tr(K_r C_r C_r^t K_r^t)`` per degenerate sector,

so each sector is optimized on its own. Sectors of dimension 2 have the
closed form ``tr(C_r C_r^t) - lambda_min``; larger sectors fall back to the
Givens search of :mod:`qmin.oracle` and are reported as an interval.
"""
from dataclasses import dataclass, field

import numpy as np

from .bases import _gell_mann, adapted_basis
from .exceptions import InfeasibleMeasurementError, PreconditionError, ShapeError
from .measurements import Measurement
from .oracle import (
    OracleConfig,
    feasible_measurement,
    hs_distance_sq,
    maximize_disturbance,
    oracle_min,
    post_measurement_state,
)
from .states import DEFAULT_TOL, coefficients, partial_trace_b, plain_coefficients, spectral_decompose

FEASIBILITY_ATOL = 1e-8


@dataclass(frozen=True)
class BlockProblem:
    """Correlation block ``C_r`` of degenerate sector ``r`` (1-based)."""

    r: int
    dim: int
    c: np.ndarray = field(repr=False)

    @property
    def gram(self):
        return self.c @ self.c.T

    @property
    def eigenvalues(self):
        """Eigenvalues of ``C_r C_r^t`` in decreasing order."""
        return np.clip(np.linalg.eigvalsh(self.gram)[::-1], 0.0, None)

    @property
    def total(self):
        return float(np.sum(self.c**2))

    def upper_bound(self):
        return float(np.sum(self.eigenvalues[: self.dim**2 - self.dim]))

    def operator(self, n):
        """``sum_{i,j>=1} c_ij G_i (x) Y_j`` on ``C^{m_r} (x) C^n`` as an ``(m_r, n, m_r, n)`` tensor."""
        g = _gell_mann(self.dim).ops[1:]
        y = _gell_mann(n).ops[1:]
        return np.einsum("ij,iab,jvw->avbw", self.c, g, y)


@dataclass
class BlockSolution:
    value: float
    exact: bool
    method: str
    unitary: np.ndarray = field(repr=False)
    upper: float = None
    converged: bool = True

    def k_matrix(self):
        """``K_r[s, i] = tr(Pi_s G_i)`` in sector-local coordinates, ``i >= 1``."""
        g = _gell_mann(self.unitary.shape[0]).ops[1:]
        u = self.unitary
        return np.einsum("as,iab,bs->si", u.conj(), g, u).real


@dataclass
class SectorResult:
    r: int
    dim: int
    value: float
    exact: bool
    method: str
    upper: float
    converged: bool = True

    def to_dict(self):
        return {
            "r": self.r,
            "m_r": self.dim,
            "value": self.value,
            "exact": self.exact,
            "method": self.method,
            "upper": self.upper,
            "converged": self.converged,
        }


@dataclass
class MinResult:
    value: float
    sectors: list
    residual: float
    upper_bound_global: float
    upper_bound_blockwise: float
    tol: float
    exact: bool
    witness: Measurement = field(default=None, repr=False)
    witness_value: float = None
    converged: bool = True
    seed: int = None
    sector_dims: tuple = ()
    warnings: tuple = ()
    oracle_value: float = None

    @property
    def lower_bound(self):
        return self.witness_value

    def to_dict(self):
        out = {
            "value": self.value,
            "exact": self.exact,
            "converged": self.converged,
            "residual": self.residual,
            "sectors": [s.to_dict() for s in self.sectors],
            "upper_bound_global": self.upper_bound_global,
            "upper_bound_blockwise": self.upper_bound_blockwise,
            "lower_bound_witness": self.witness_value,
            "tol": self.tol,
            "seed": self.seed,
            "marginal_sector_dims": list(self.sector_dims),
            "warnings": list(self.warnings),
            "oracle_value": self.oracle_value,
            "witness": None,
        }
        if self.witness is not None:
            out["witness"] = [
                [[[z.real, z.imag] for z in row] for row in p] for p in self.witness.projectors
            ]
        return out

    @classmethod
    def from_dict(cls, data):
        witness = None
        if data.get("witness") is not None:
            arr = np.array(data["witness"], dtype=float)
            witness = Measurement(arr[..., 0] + 1j * arr[..., 1])
        sectors = [
            SectorResult(s["r"], s["m_r"], s["value"], s["exact"], s["method"], s["upper"], s["converged"])
            for s in data["sectors"]
        ]
        return cls(
            value=data["value"],
            sectors=sectors,
            residual=data["residual"],
            upper_bound_global=data["upper_bound_global"],
            upper_bound_blockwise=data["upper_bound_blockwise"],
            tol=data["tol"],
            exact=data["exact"],
            witness=witness,
            witness_value=data["lower_bound_witness"],
            converged=data["converged"],
            seed=data["seed"],
            sector_dims=tuple(data["marginal_sector_dims"]),
            warnings=tuple(data["warnings"]),
            oracle_value=data.get("oracle_value"),
        )


@dataclass(frozen=True)
class Decomposition:
    """Everything the engine derives from a state before solving blocks."""

    spectrum: object
    basis: object
    coeffs: object
    blocks: tuple
    residual: float


def decompose(rho, tol=DEFAULT_TOL, spectrum=None):
    """Adapted-basis coefficients, block problems and residual for ``rho``."""
    if spectrum is None:
        spectrum = spectral_decompose(partial_trace_b(rho), tol)
    basis = adapted_basis(spectrum)
    coeffs = coefficients(rho, basis, _gell_mann(rho.dim_b), "adapted")
    c = coeffs.c
    blocks = tuple(
        BlockProblem(r, basis.sector_dims[r - 1], c[basis.sector_slice(r), 1:])
        for r in range(1, basis.deg_count + 1)
    )
    residual = float(np.sum(c[basis.residual_slice, 1:] ** 2))
    return Decomposition(spectrum, basis, coeffs, blocks, residual)


def _bloch_unitary(direction):
    """Unitary whose columns are the eigenvectors of ``n . sigma`` for a Bloch
    direction given in (z, x, y) order."""
    nz, nx, ny = direction
    op = np.array([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]])
    _, vecs = np.linalg.eigh(op)
    return vecs[:, ::-1]


def solve_block(block, cfg=None, n=None):
    """Maximize ``tr(C C^t) - tr(K C C^t K^t)`` over the sector's measurements.

    ``m_r = 2`` uses the closed form; ``m_r >= 3`` runs the Givens search on
    the block operator and returns the best value found (``exact=False``).
    """
    if block.dim < 2:
        raise PreconditionError("one-dimensional sectors do not form blocks")
    upper = block.upper_bound()
    if block.dim == 2:
        vals, vecs = np.linalg.eigh(block.gram)
        direction = vecs[:, 0]
        nonzero = np.flatnonzero(np.abs(direction) > 1e-12)
        if nonzero.size and direction[nonzero[0]] < 0:
            direction = -direction
        value = block.total - max(vals[0], 0.0)
        return BlockSolution(value, True, "closed-form-2dim", _bloch_unitary(direction), upper)

    cfg = OracleConfig() if cfg is None else cfg
    n = int(round(np.sqrt(block.c.shape[1] + 1))) if n is None else n
    r_tensor = block.operator(n)
    eye = np.eye(block.dim, dtype=complex)
    _, _, units, _, converged, _ = maximize_disturbance(
        r_tensor, [eye], np.zeros((block.dim, 0), dtype=complex), cfg
    )
    sol = BlockSolution(0.0, False, "numeric", units[0], upper, converged)
    k = sol.k_matrix()
    sol.value = min(block.total - float(np.trace(k @ block.gram @ k.T)), upper)
    return sol


def _witness(spectrum, solutions):
    return feasible_measurement(spectrum, [s.unitary for s in solutions])


def min_compute(rho, tol=DEFAULT_TOL, oracle_cfg=None, spectrum=None, cross_check=False):
    """Measurement-induced nonlocality of ``rho`` with bounds and a witness.

    Parameters
    ----------
    rho : DensityMatrix
    tol : float
        Degeneracy tolerance for clustering the reduced state's spectrum.
    oracle_cfg : OracleConfig, optional
        Budget for numeric sectors (``m_r >= 3``) and for ``cross_check``.
    spectrum : SpectralDecomposition, optional
        Use this decomposition of the reduced state instead of computing one.
    cross_check : bool
        Also run :func:`qmin.oracle.oracle_min` and store its value.
    """
    cfg = OracleConfig() if oracle_cfg is None else oracle_cfg
    dec = decompose(rho, tol, spectrum)
    solutions = [solve_block(b, cfg, rho.dim_b) for b in dec.blocks]
    sectors = [
        SectorResult(b.r, b.dim, s.value, s.exact, s.method, s.upper, s.converged)
        for b, s in zip(dec.blocks, solutions)
    ]
    value = sum(s.value for s in solutions) + dec.residual
    witness = _witness(dec.spectrum, solutions)
    witness_value = hs_distance_sq(rho, post_measurement_state(rho, witness))
    blockwise = sum(b.upper_bound() for b in dec.blocks) + dec.residual
    result = MinResult(
        value=value,
        sectors=sectors,
        residual=dec.residual,
        upper_bound_global=upper_bound_global(rho),
        upper_bound_blockwise=blockwise,
        tol=tol,
        exact=all(s.exact for s in solutions),
        witness=witness,
        witness_value=witness_value,
        converged=all(s.converged for s in solutions),
        seed=cfg.seed,
        sector_dims=dec.spectrum.sector_dims,
        warnings=dec.spectrum.warnings,
    )
    if cross_check:
        result.oracle_value = oracle_min(rho, dec.spectrum, cfg).value
    return result


def min_nondegenerate(rho, spectrum):
    """Shortcut for a non-degenerate reduced state: MIN is the residual alone."""
    if spectrum.deg_count:
        raise PreconditionError(
            f"reduced state has {spectrum.deg_count} degenerate sector(s); use min_compute"
        )
    return min_compute(rho, spectrum.tol, spectrum=spectrum)


def upper_bound_global(rho):
    """Sum of the ``m^2 - m`` largest eigenvalues of ``T T^t`` (Gell-Mann bases)."""
    t = plain_coefficients(rho).t
    m = rho.dim_a
    vals = np.clip(np.linalg.eigvalsh(t @ t.T)[::-1], 0.0, None)
    return float(np.sum(vals[: m * m - m]))


def upper_bound_blockwise(rho, tol=DEFAULT_TOL, spectrum=None):
    """Per-sector bound plus the residual term."""
    dec = decompose(rho, tol, spectrum)
    return float(sum(b.upper_bound() for b in dec.blocks) + dec.residual)


def marginal_disturbance(rho, meas):
    """``||sum_k Pi_k rho_a Pi_k - rho_a||`` (Frobenius)."""
    rho_a = partial_trace_b(rho)
    return float(np.linalg.norm(meas.dephase(rho_a) - rho_a))


def lower_bound_fixed(rho, meas, atol=FEASIBILITY_ATOL):
    """``||rho - Pi(rho)||^2`` for one admissible measurement (a lower bound on MIN).

    Raises
    ------
    InfeasibleMeasurementError
        If ``meas`` is not a rank-one projective measurement or disturbs the
        reduced state by more than ``atol``.
    """
    if meas.dim != rho.dim_a:
        raise ShapeError(f"measurement acts on C^{meas.dim}, state has dim_a={rho.dim_a}")
    defects = meas.defects()
    worst = max(defects, key=defects.get)
    if len(meas) != meas.dim or defects[worst] > 1e-9:
        raise InfeasibleMeasurementError(
            f"not a von Neumann measurement ({worst} defect {defects[worst]:.3e})",
            residual=defects[worst],
        )
    residual = marginal_disturbance(rho, meas)
    if residual > atol:
        raise InfeasibleMeasurementError(
            f"measurement disturbs the reduced state (residual norm {residual:.3e})",
            residual=residual,
        )
    return hs_distance_sq(rho, post_measurement_state(rho, meas))
