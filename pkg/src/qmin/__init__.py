"""Measurement-induced nonlocality of bipartite states.

The reduced state's degenerate eigenspaces decide which local measurements
are admissible; expanding the state in an operator basis adapted to those
eigenspaces splits the optimization into independent per-sector problems.
"""
__version__ = "0.1.0"

from .bases import AdaptedBasis, HermitianBasis, adapted_basis, expand, gell_mann_basis, reconstruct
from .engine import (
    BlockProblem,
    MinResult,
    lower_bound_fixed,
    min_compute,
    min_nondegenerate,
    solve_block,
    upper_bound_blockwise,
    upper_bound_global,
)
from .exceptions import QminError
from .measurements import (
    Measurement,
    appendix_measurement_3d,
    block_measurement_3d,
    verify_measurement_constraints,
)
from .oracle import (
    OracleConfig,
    OracleResult,
    feasible_measurement,
    haar_unitary,
    hs_distance_sq,
    oracle_min,
    post_measurement_state,
)
from .states import (
    CoefficientMatrix,
    DensityMatrix,
    SpectralDecomposition,
    coefficients,
    partial_trace_b,
    spectral_decompose,
    validate,
)
from .estimator import AdaptedBasisTransformer, MINEstimator
