"""scikit-learn style wrappers.

:class:`AdaptedBasisTransformer` learns the sector-adapted operator basis
from a state's reduced density matrix and maps states to their coefficient
matrices in that basis. :class:`MINEstimator` computes measurement-induced
nonlocality for one or many states and exposes the values and bounds as a
feature matrix.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bases import _gell_mann, adapted_basis
from .engine import min_compute
from .exceptions import ShapeError
from .oracle import OracleConfig
from .states import DEFAULT_TOL, DensityMatrix, coefficients, partial_trace_b, spectral_decompose, validate


def check_state(x, dim_a=None, dim_b=None):
    """Coerce ``x`` to a validated :class:`DensityMatrix`.

    A raw ``(mn, mn)`` array needs ``dim_a`` or ``dim_b``; when only one is
    given the other is inferred.
    """
    if isinstance(x, DensityMatrix):
        if (dim_a not in (None, x.dim_a)) or (dim_b not in (None, x.dim_b)):
            raise ShapeError(f"state is {x.shape}, expected ({dim_a}, {dim_b})")
        return x
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    size = arr.shape[0]
    if dim_a is None and dim_b is None:
        raise ShapeError("dim_a or dim_b is required for raw arrays")
    if dim_a is None:
        dim_a = size // dim_b
    if dim_b is None:
        dim_b = size // dim_a
    return validate(arr, dim_a, dim_b)


def check_states(x, dim_a=None, dim_b=None):
    """Coerce a single state or a batch of states to a list of DensityMatrix."""
    if isinstance(x, DensityMatrix):
        return [x]
    if isinstance(x, (list, tuple)):
        return [check_state(s, dim_a, dim_b) for s in x]
    arr = np.asarray(x)
    if arr.ndim == 2:
        return [check_state(arr, dim_a, dim_b)]
    if arr.ndim == 3:
        return [check_state(s, dim_a, dim_b) for s in arr]
    raise ShapeError(f"expected one state or a batch of states, got shape {arr.shape}")


class AdaptedBasisTransformer(TransformerMixin, BaseEstimator):
    """Expand states in the operator basis adapted to a reference reduced state.

    Parameters
    ----------
    dim_a, dim_b : int, optional
        Subsystem dimensions, needed when states are passed as raw arrays.
    tol : float
        Degeneracy tolerance for the reference spectrum.
    """

    def __init__(self, dim_a=None, dim_b=None, tol=DEFAULT_TOL):
        self.dim_a = dim_a
        self.dim_b = dim_b
        self.tol = tol

    def fit(self, X, y=None):
        rho = check_states(X, self.dim_a, self.dim_b)[0]
        self.spectrum_ = spectral_decompose(partial_trace_b(rho), self.tol)
        self.basis_ = adapted_basis(self.spectrum_)
        self.basis_b_ = _gell_mann(rho.dim_b)
        self.shape_ = rho.shape
        return self

    def transform(self, X):
        """Coefficient matrices, shape ``(n_states, m**2, n**2)``."""
        check_is_fitted(self, "basis_")
        states = check_states(X, *self.shape_)
        return np.stack([coefficients(s, self.basis_, self.basis_b_, "adapted").c for s in states])

    def inverse_transform(self, C):
        check_is_fitted(self, "basis_")
        C = np.asarray(C, dtype=float)
        single = C.ndim == 2
        C = C[None] if single else C
        m, n = self.shape_
        out = np.einsum("kij,iab,jvw->kavbw", C, self.basis_.ops, self.basis_b_.ops)
        out = out.reshape(len(C), m * n, m * n)
        return out[0] if single else out


class MINEstimator(BaseEstimator):
    """Measurement-induced nonlocality as an estimator.

    ``fit`` computes a :class:`~qmin.engine.MinResult` per state and stores
    them in ``results_``; ``transform`` returns, per state, the columns
    ``[value, residual, upper_bound_blockwise, upper_bound_global]``.
    """

    feature_names = ("value", "residual", "upper_bound_blockwise", "upper_bound_global")

    def __init__(self, dim_a=None, dim_b=None, tol=DEFAULT_TOL, restarts=None, max_iters=500,
                 seed=0, cross_check=False):
        self.dim_a = dim_a
        self.dim_b = dim_b
        self.tol = tol
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed
        self.cross_check = cross_check

    def _config(self):
        return OracleConfig(restarts=self.restarts, max_iters=self.max_iters, seed=self.seed)

    def _compute(self, X):
        cfg = self._config()
        return [
            min_compute(s, self.tol, cfg, cross_check=self.cross_check)
            for s in check_states(X, self.dim_a, self.dim_b)
        ]

    def fit(self, X, y=None):
        self.results_ = self._compute(X)
        self.values_ = np.array([r.value for r in self.results_])
        return self

    def transform(self, X):
        check_is_fitted(self, "results_")
        return np.array([[getattr(r, f) for f in self.feature_names] for r in self._compute(X)])

    def fit_transform(self, X, y=None):
        self.fit(X)
        return np.array([[getattr(r, f) for f in self.feature_names] for r in self.results_])

    def get_feature_names_out(self, input_features=None):
        return np.array(self.feature_names, dtype=object)
