"""Brute-force maximization of the measurement-induced disturbance.

The oracle works directly with the definition: for a measurement made of
rank-one projectors ``|w_k><w_k|`` on subsystem ``a``,

    ||R - Pi(R)||^2 = ||R||^2 - sum_k ||<w_k| R |w_k>||^2,

where ``<w|R|w>`` is the ``n x n`` operator left on subsystem ``b``. Only
measurements that keep the reduced state fixed are searched, i.e. each
degenerate eigenspace gets its own unitary. Starting from Haar-random
unitaries, pairs of measurement vectors inside a sector are rotated by
Givens rotations (angle and relative phase); the best rotation of a pair is
found exactly because the objective restricted to one pair is a quadratic
form on a 2-sphere.
"""
from dataclasses import dataclass, field

import numpy as np

from ._validation import unitarity_defect
from .exceptions import InvalidUnitaryError, ShapeError
from .measurements import Measurement

UNITARY_ATOL = 1e-9
GRADIENT_ATOL = 1e-7


@dataclass(frozen=True)
class OracleConfig:
    """Search budget. ``restarts=None`` means ``8 * m_r**2`` for the largest sector."""

    restarts: int = None
    max_iters: int = 500
    step_tol: float = 1e-9
    value_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts is not None and self.restarts < 1:
            raise ValueError(f"restarts must be positive, got {self.restarts}")
        if self.max_iters < 1 or self.step_tol <= 0 or self.value_tol <= 0:
            raise ValueError("max_iters, step_tol and value_tol must be positive")

    def restarts_for(self, sector_dims):
        if not sector_dims:
            return 1
        if self.restarts is not None:
            return self.restarts
        return 8 * max(sector_dims) ** 2


@dataclass
class OracleResult:
    value: float
    measurement: Measurement = field(repr=False)
    restart_values: list = field(repr=False)
    converged: bool = True
    unitaries: list = field(default=None, repr=False)
    traces: list = field(default=None, repr=False)


def haar_unitary(d, seed=None):
    """Haar-random ``d x d`` unitary (QR of a Ginibre matrix, phases fixed)."""
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def post_measurement_state(rho, meas):
    """``sum_k (Pi_k (x) I) rho (Pi_k (x) I)`` as a new density matrix."""
    from .states import DensityMatrix

    if meas.dim != rho.dim_a:
        raise ShapeError(f"measurement acts on C^{meas.dim}, state has dim_a={rho.dim_a}")
    out = np.einsum("kab,bvcw,kcd->avdw", meas.projectors, rho.tensor, meas.projectors)
    n = rho.dim_a * rho.dim_b
    return DensityMatrix(rho.dim_a, rho.dim_b, out.reshape(n, n))


def hs_distance_sq(rho, sigma):
    """Squared Hilbert-Schmidt distance ``tr((rho - sigma)^dagger (rho - sigma))``."""
    a = np.asarray(rho, dtype=complex)
    b = np.asarray(sigma, dtype=complex)
    if a.shape != b.shape:
        raise ShapeError(f"shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.real(np.vdot(diff, diff)))


def feasible_measurement(spectrum, sector_unitaries=()):
    """Measurement in the eigenbasis of the reduced state, rotated per sector.

    One unitary per degenerate sector (in sector order); non-degenerate
    eigenvectors are used as they are.
    """
    unitaries = list(sector_unitaries)
    degenerate = spectrum.degenerate
    if len(unitaries) != len(degenerate):
        raise ShapeError(f"need {len(degenerate)} sector unitaries, got {len(unitaries)}")
    cols = []
    for s in spectrum.sectors:
        if s.size >= 2:
            u = np.asarray(unitaries.pop(0), dtype=complex)
            if u.shape != (s.size, s.size):
                raise ShapeError(f"sector of dim {s.size} got a {u.shape} unitary")
            defect = unitarity_defect(u)
            if defect > UNITARY_ATOL:
                raise InvalidUnitaryError(f"sector unitary deviates from unitarity by {defect:.3e}")
            cols.append(s.vectors @ u)
        else:
            cols.append(s.vectors)
    return Measurement.from_vectors(np.hstack(cols))


def _reduced_block(r_tensor, wx, wy):
    # <w_x| R |w_y> on subsystem b
    return np.einsum("a,avbw,b->vw", wx.conj(), r_tensor, wy)


def _frob2(mat):
    return float(np.real(np.vdot(mat, mat)))


def _real_inner(x, y):
    return float(np.real(np.vdot(x, y)))


class _GivensAscent:
    """Coordinate ascent over per-sector unitaries for a fixed operator ``R``.

    For each sector the blocks ``M[k, l] = <w_k| R |w_l>`` (operators on
    subsystem ``b``) are kept up to date under each rotation, so a sweep
    never touches the full ``(mn) x (mn)`` operator.
    """

    def __init__(self, r_tensor, sector_bases, fixed_vectors, cfg):
        self.r = r_tensor
        self.bases = [np.asarray(b, dtype=complex) for b in sector_bases]
        self.fixed = np.asarray(fixed_vectors, dtype=complex)
        self.cfg = cfg
        self.norm2 = _frob2(r_tensor)
        self.fixed_loss = sum(
            _frob2(_reduced_block(r_tensor, self.fixed[:, k], self.fixed[:, k]))
            for k in range(self.fixed.shape[1])
        )

    def _blocks(self, w):
        return np.einsum("ak,avbw,bl->klvw", w.conj(), self.r, w)

    def objective(self, blocks):
        loss = self.fixed_loss
        for mb in blocks:
            diag = np.einsum("kkvw->kvw", mb)
            loss += float(np.sum(np.abs(diag) ** 2))
        return self.norm2 - loss

    @staticmethod
    def _best_pair_rotation(mb, p, q):
        """Exact best rotation of the pair ``p, q`` given the sector blocks.

        With ``w_p -> c w_p + e^{i phi} s w_q`` and
        ``w_q -> -e^{-i phi} s w_p + c w_q`` the pair's loss is
        ``2||S||^2 + 2 v^t G v`` with ``v = (cos 2t, sin 2t cos phi,
        sin 2t sin phi)`` on the unit sphere, so the optimum is the lowest
        eigenvector of the 3 x 3 Gram matrix ``G``. Returns ``(theta, G2)``
        with ``G2`` the 2 x 2 rotation, or ``(0, None)`` if nothing improves.
        """
        m_pp, m_qq, m_pq = mb[p, p], mb[q, q], mb[p, q]
        m_qp = mb[q, p]
        parts = np.stack([(m_pp - m_qq) / 2, (m_pq + m_qp) / 2, 1j * (m_pq - m_qp) / 2]).reshape(3, -1)
        gram = np.real(parts.conj() @ parts.T)
        vals, vecs = np.linalg.eigh(gram)
        if gram[0, 0] - vals[0] <= 1e-15 * max(1.0, abs(gram[0, 0])):
            return 0.0, None
        v = vecs[:, 0] if vecs[0, 0] >= 0 else -vecs[:, 0]
        theta = 0.5 * np.arccos(np.clip(v[0], -1.0, 1.0))
        phase = np.exp(1j * np.arctan2(v[2], v[1]))
        c, s = np.cos(theta), np.sin(theta)
        return theta, np.array([[c, -np.conj(phase) * s], [phase * s, c]])

    def _extrapolate(self, vectors, blocks, previous, value):
        """Repeat the net rotation of the last sweep while that keeps improving.

        Coordinate ascent zigzags on flat ridges; stepping along the sweep's
        overall rotation ``exp(k log(W_old^dagger W_new))`` for growing ``k``
        recovers most of the lost speed. Only improving steps are kept, so
        the objective sequence stays monotone.
        """
        steps = []
        for w_old, w_new in zip(previous, vectors):
            delta = w_old.conj().T @ w_new
            vals, vecs = np.linalg.eig(delta)
            steps.append((w_new, vecs, np.angle(vals), np.linalg.inv(vecs)))
        best = None
        for k in (2.0, 4.0, 8.0):
            trial = [w @ ((vecs * np.exp(1j * k * ang)) @ inv) for w, vecs, ang, inv in steps]
            trial = [np.linalg.qr(t)[0] for t in trial]
            trial_blocks = [self._blocks(t) for t in trial]
            trial_value = self.objective(trial_blocks)
            if trial_value <= value:
                break
            best, value = (trial, trial_blocks), trial_value
        if best is not None:
            for w, t in zip(vectors, best[0]):
                w[:] = t
            for mb, t in zip(blocks, best[1]):
                mb[:] = t
        return value

    @staticmethod
    def _pairs(size):
        return [(j, k) for j in range(size) for k in range(j + 1, size)]

    def _gradient(self, vectors, blocks):
        """Derivative of the objective along ``W -> W exp(A)`` per sector.

        ``A`` is anti-Hermitian with zero diagonal (phases of the vectors do
        not matter) and parameterized by ``(Re A_jk, Im A_jk)`` for ``j < k``.
        """
        grad = []
        for w, mb in zip(vectors, blocks):
            diag = np.einsum("kkvw->kvw", mb)
            p = np.einsum("kvw,jkvw->jk", diag.conj(), mb)
            for j, k in self._pairs(w.shape[1]):
                grad.append(-4 * (p[j, k] - p[k, j]).real)
                grad.append(-4 * (p[j, k] + p[k, j]).imag)
        return np.array(grad)

    def _move(self, vectors, x):
        out, i = [], 0
        for w in vectors:
            size = w.shape[1]
            h = np.zeros((size, size), dtype=complex)
            for j, k in self._pairs(size):
                # h = i A, Hermitian
                h[j, k] = 1j * x[i] - x[i + 1]
                h[k, j] = np.conj(h[j, k])
                i += 2
            lam, v = np.linalg.eigh(h)
            out.append(w @ ((v * np.exp(-1j * lam)) @ v.conj().T))
        return out

    def polish(self, vectors, value, max_steps=60, step=1e-6):
        """Newton refinement of a coordinate-ascent end point.

        Coordinate ascent slows to a crawl near maxima with a singular
        Hessian (typically when the maximum saturates the per-block bound).
        Newton steps built from the analytic gradient and a finite-difference
        Hessian, with a backtracking search that only accepts improvements,
        close the remaining gap. Returns ``(vectors, blocks, values,
        stationary)`` where ``stationary`` means the final gradient is below
        ``GRADIENT_ATOL``.
        """
        blocks = [self._blocks(w) for w in vectors]
        values = []
        for _ in range(max_steps):
            grad = self._gradient(vectors, blocks)
            if not grad.size or np.max(np.abs(grad)) <= 1e-12:
                break
            hess = np.empty((grad.size, grad.size))
            for i in range(grad.size):
                e = np.zeros(grad.size)
                e[i] = step
                up = [self._blocks(w) for w in self._move(vectors, e)]
                down = [self._blocks(w) for w in self._move(vectors, -e)]
                hess[i] = (self._gradient(vectors, up) - self._gradient(vectors, down)) / (2 * step)
            hess = (hess + hess.T) / 2
            lam, v = np.linalg.eigh(hess)
            scale = np.abs(lam)
            keep = scale > 1e-12 * max(scale.max(), 1e-300)
            coef = v.T @ grad
            # Ascent direction: Newton on the curved part, gradient elsewhere.
            x = v @ np.where(keep, coef / np.where(keep, scale, 1.0), coef)
            t, accepted = 1.0, False
            while t > 1e-10:
                trial = self._move(vectors, t * x)
                trial_blocks = [self._blocks(w) for w in trial]
                trial_value = self.objective(trial_blocks)
                if trial_value > value:
                    accepted = True
                    break
                t /= 2
            if not accepted:
                break
            gain = trial_value - value
            vectors, blocks, value = trial, trial_blocks, trial_value
            values.append(value)
            if gain <= 1e-15 * max(1.0, abs(value)):
                break
        grad = self._gradient(vectors, blocks)
        stationary = not grad.size or float(np.max(np.abs(grad))) <= GRADIENT_ATOL
        return vectors, blocks, values, stationary

    def run(self, unitaries):
        vectors = [b @ u for b, u in zip(self.bases, unitaries)]
        blocks = [self._blocks(w) for w in vectors]
        trace = [self.objective(blocks)]
        previous = [w.copy() for w in vectors]
        converged = False
        for _ in range(self.cfg.max_iters):
            largest = 0.0
            for w, mb in zip(vectors, blocks):
                size = w.shape[1]
                for p in range(size):
                    for q in range(p + 1, size):
                        theta, g = self._best_pair_rotation(mb, p, q)
                        if g is None:
                            continue
                        largest = max(largest, theta)
                        idx = [p, q]
                        w[:, idx] = w[:, idx] @ g
                        mb[idx] = np.einsum("ki,k...->i...", g.conj(), mb[idx])
                        mb[:, idx] = np.einsum("lj,kl...->kj...", g, mb[:, idx])
            value = self.objective(blocks)
            value = self._extrapolate(vectors, blocks, previous, value)
            previous = [w.copy() for w in vectors]
            trace.append(value)
            if largest < self.cfg.step_tol or trace[-1] - trace[-2] < self.cfg.value_tol:
                converged = True
                break
        units = [b.conj().T @ w for b, w in zip(self.bases, vectors)]
        return vectors, units, trace, converged


def maximize_disturbance(r_tensor, sector_bases, fixed_vectors, cfg):
    """Maximize ``||R - Pi(R)||^2`` over per-sector rotations of the given bases.

    Returns ``(best value, best vector list, best unitaries, per-restart
    values, converged, traces)``. The best restart is refined by
    :meth:`_GivensAscent.polish` and ``converged`` refers to that restart.
    Per-restart seeds are spawned from ``cfg.seed`` by restart index, so
    results do not depend on execution order.
    """
    dims = [b.shape[1] for b in sector_bases]
    ascent = _GivensAscent(r_tensor, sector_bases, fixed_vectors, cfg)
    n_restarts = cfg.restarts_for(dims)
    children = np.random.SeedSequence(cfg.seed).spawn(n_restarts)
    best = None
    values, traces = [], []
    for child in children:
        rng = np.random.default_rng(child)
        start = [haar_unitary(d, rng) for d in dims]
        vectors, units, trace, converged = ascent.run(start)
        values.append(trace[-1])
        traces.append(trace)
        if best is None or trace[-1] > best[0]:
            best = (trace[-1], vectors, units, len(traces) - 1, converged)
    value, vectors, units, index, converged = best
    vectors, _, polished, stationary = ascent.polish(vectors, value)
    if polished:
        value = polished[-1]
        traces[index] = traces[index] + polished
        values[index] = value
        units = [b.conj().T @ w for b, w in zip(ascent.bases, vectors)]
    return value, vectors, units, values, converged or stationary, traces


def oracle_min(rho, spectrum, cfg=None):
    """Numerically maximize ``||rho - Pi(rho)||^2`` over admissible measurements.

    ``spectrum`` must be the spectral decomposition of ``rho``'s reduced
    state on subsystem ``a``. The reported value is re-evaluated from the
    best measurement through :func:`post_measurement_state` and
    :func:`hs_distance_sq`.
    """
    cfg = OracleConfig() if cfg is None else cfg
    bases = [s.vectors for s in spectrum.degenerate]
    fixed = [s.vectors for s in spectrum.sectors if s.size == 1]
    fixed = np.hstack(fixed) if fixed else np.zeros((rho.dim_a, 0), dtype=complex)
    _, _, units, values, converged, traces = maximize_disturbance(
        rho.tensor, bases, fixed, cfg
    )
    meas = feasible_measurement(spectrum, units)
    value = hs_distance_sq(rho, post_measurement_state(rho, meas))
    return OracleResult(value, meas, values, converged, units, traces)
