"""Seeded verification campaigns used by ``qmin verify``."""
from dataclasses import asdict, dataclass

import numpy as np

from . import generators as gen
from .engine import decompose, lower_bound_fixed, min_compute
from .exceptions import InfeasibleMeasurementError
from .measurements import (
    Measurement,
    appendix_measurement_3d,
    block_measurement_3d,
    verify_measurement_constraints,
)
from .oracle import OracleConfig, haar_unitary, oracle_min
from .states import partial_trace_b, spectral_decompose

ORACLE_SHAPES = (((2, 2), (2,)), ((2, 3), (2,)), ((3, 2), (2, 1)), ((4, 2), (2, 2)))
SEC4_X_GRID = tuple(np.linspace(1 / 6, 5 / 12, 11)[1:-1])


@dataclass
class Check:
    name: str
    max_violation: float
    tol: float
    count: int

    @property
    def passed(self):
        return bool(self.max_violation <= self.tol)

    def to_dict(self):
        return {**asdict(self), "passed": self.passed}


def _rng(seed, i):
    return np.random.default_rng([seed, i])


def suite_constraints(count=10, seed=0):
    checks = []
    for label, meas in (("appendix", appendix_measurement_3d()), ("block", block_measurement_3d())):
        report = verify_measurement_constraints(meas)
        for family, value in report.items():
            checks.append(Check(f"{label}:{family}", value, 1e-10, 1))
    worst = 0.0
    for i in range(count):
        u = haar_unitary(3, _rng(seed, i))
        worst = max(worst, max(verify_measurement_constraints(Measurement.from_vectors(u)).values()))
    checks.append(Check("random-unitary:all-families", worst, 1e-9, count))
    return checks


def oracle_corpus(count, seed):
    """``count`` states per m_r <= 2 shape: engineered degenerate marginals."""
    for k, (shape, sectors) in enumerate(ORACLE_SHAPES):
        for i in range(count):
            yield f"{shape[0]}x{shape[1]}", gen.engineered_degenerate(*shape, sectors, seed=_rng(seed, 1000 * k + i))


def suite_oracle(count=50, seed=0):
    cfg = OracleConfig(seed=seed)
    worst = {}
    for label, rho in oracle_corpus(count, seed):
        res = min_compute(rho, oracle_cfg=cfg, cross_check=True)
        gap = abs(res.value - res.oracle_value)
        worst[label] = max(worst.get(label, 0.0), gap)
    return [Check(f"oracle-vs-analytic:{label}", v, 1e-6, count) for label, v in worst.items()]


def mixed_corpus(count, seed):
    """Random states cycling through every generator."""
    makers = (
        lambda r: gen.ginibre_random_mixed(2, 2, seed=r),
        lambda r: gen.ginibre_random_mixed(3, 2, rank=2, seed=r),
        lambda r: gen.haar_random_pure(2, 3, seed=r),
        lambda r: gen.haar_random_pure(3, 3, seed=r),
        lambda r: gen.engineered_degenerate(2, 2, [2], seed=r),
        lambda r: gen.engineered_degenerate(3, 2, [2, 1], seed=r),
        lambda r: gen.engineered_degenerate(4, 2, [2, 2], seed=r),
        lambda r: gen.engineered_degenerate(3, 2, [3], seed=r),
        lambda r: gen.product_state(
            gen.ginibre_random_mixed(1, 3, seed=r).entries, gen.ginibre_random_mixed(1, 2, seed=r).entries
        ),
        lambda r: gen.example_state_sec4(0.3, *gen.random_sec4_parameters(0.3, 2, seed=r), 2),
    )
    for i in range(count):
        yield makers[i % len(makers)](_rng(seed, i))


def suite_bounds(count=50, seed=0):
    cfg = OracleConfig(seed=seed, restarts=8)
    low = upper_b = upper_g = witness = 0.0
    for rho in mixed_corpus(count, seed):
        res = min_compute(rho, oracle_cfg=cfg)
        low = max(low, -res.value)
        upper_b = max(upper_b, res.value - res.upper_bound_blockwise)
        upper_g = max(upper_g, res.value - res.upper_bound_global)
        if res.exact:
            witness = max(witness, res.witness_value - res.value)
    return [
        Check("value>=0", low, 1e-8, count),
        Check("value<=blockwise", upper_b, 1e-8, count),
        Check("value<=global", upper_g, 1e-8, count),
        Check("witness<=value", witness, 1e-8, count),
    ]


def sec4_bound_gap(t_vec):
    """Gap between the global and blockwise bounds for the example family.

    ``t_vec[i - 1]`` is the coefficient of ``X_i (x) Y_1``.
    """
    t = dict(zip(range(1, 9), t_vec))
    r2, r6 = np.sqrt(2), np.sqrt(6)
    return (3 * t[2] / r6 + r2 * t[5] + r2 * t[7] - t[3] / r2) ** 2 / 6


def sec4_formula_value(rho):
    """``-c_5^2 + sum_{i=2..9} c_i^2`` on the ``Y_1`` column of the adapted expansion."""
    c = decompose(rho).coeffs.c[:, 1]
    return float(-c[4] ** 2 + np.sum(c[1:9] ** 2))


def suite_sec4(count=5, seed=0, n=2):
    cfg = OracleConfig(seed=seed)
    formula = gap = exact = 0.0
    total = 0
    for ix, x in enumerate(SEC4_X_GRID):
        for i in range(count):
            y1, t_vec = gen.random_sec4_parameters(x, n, seed=_rng(seed, 100 * ix + i))
            rho = gen.example_state_sec4(x, y1, t_vec, n)
            res = min_compute(rho, oracle_cfg=cfg)
            spectrum = spectral_decompose(partial_trace_b(rho))
            oracle = oracle_min(rho, spectrum, cfg).value
            formula = max(formula, abs(sec4_formula_value(rho) - oracle), abs(res.value - oracle))
            gap = max(gap, abs(res.upper_bound_global - res.upper_bound_blockwise - sec4_bound_gap(t_vec)))
            exact = max(exact, abs(res.upper_bound_blockwise - res.value))
            total += 1
    return [
        Check("formula-vs-oracle", formula, 1e-6, total),
        Check("bound-gap-identity", gap, 1e-9, total),
        Check("blockwise-equals-value", exact, 1e-9, total),
    ]


def appendix_lower_bound_checks(count=20, seed=0, n=2):
    """Fixed-measurement lower bounds on fully degenerate 3 x n states."""
    cfg = OracleConfig(seed=seed)
    worst_block = 0.0
    appendix_errors = []
    for i in range(count):
        rho = gen.fully_degenerate_3x(n, seed=_rng(seed, i))
        oracle = oracle_min(rho, spectral_decompose(partial_trace_b(rho)), cfg).value
        worst_block = max(worst_block, abs(lower_bound_fixed(rho, block_measurement_3d()) - oracle))
        try:
            appendix_errors.append(abs(lower_bound_fixed(rho, appendix_measurement_3d()) - oracle))
        except InfeasibleMeasurementError:
            appendix_errors.append(float("inf"))
    return [
        Check("appendix-lower-bound-vs-oracle", max(appendix_errors), 1e-6, count),
        Check("block-lower-bound-vs-oracle", worst_block, 1e-6, count),
    ]


SUITES = {
    "constraints": suite_constraints,
    "oracle": suite_oracle,
    "bounds": suite_bounds,
    "sec4": suite_sec4,
}


def run_suite(name, count=None, seed=0):
    fn = SUITES[name]
    checks = fn(seed=seed) if count is None else fn(count=count, seed=seed)
    if name == "constraints":
        checks += appendix_lower_bound_checks(seed=seed)
    return checks
