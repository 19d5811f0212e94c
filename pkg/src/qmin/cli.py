"""Command line interface: ``qmin {compute,bounds,gen,verify}``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 numeric search did not converge (only with ``--strict``).
"""
import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import generators as gen
from .engine import lower_bound_fixed, min_compute
from .exceptions import InfeasibleMeasurementError, QminError
from .io import read_state, write_state
from .measurements import appendix_measurement_3d, block_measurement_3d
from .oracle import OracleConfig
from .states import DEFAULT_TOL, partial_trace_b, spectral_decompose
from .verification import SUITES, run_suite

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 1, 2, 3


@dataclass
class RunReport:
    command: str
    input: dict
    result: dict = None
    oracle: dict = None
    extra: dict = field(default_factory=dict)
    seed: int = None
    version: str = __version__
    wall_time: float = None

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def _fmt(x):
    return "n/a" if x is None else f"{x:.10g}"


def _config(args):
    return OracleConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)


def _emit(report, args, lines):
    if args.json:
        print(report.to_json())
    else:
        print("\n".join(lines))


def cmd_compute(args):
    rho, meta = read_state(args.state)
    res = min_compute(rho, args.tol, _config(args), cross_check=args.oracle)
    report = RunReport("compute", {"path": args.state, "dims": [rho.dim_a, rho.dim_b], "metadata": meta},
                       result=res.to_dict(), seed=args.seed)
    if args.oracle:
        report.oracle = {"value": res.oracle_value, "difference": res.value - res.oracle_value}
    lines = [
        f"state          {args.state} ({rho.dim_a}x{rho.dim_b})",
        f"MIN            {_fmt(res.value)}  ({'exact' if res.exact else 'lower estimate'})",
        f"marginal       sectors {list(res.sector_dims)} at tol {res.tol:g}",
        f"residual       {_fmt(res.residual)}",
    ]
    for s in res.sectors:
        lines.append(f"sector {s.r}       m_r={s.dim} N_r={_fmt(s.value)} via {s.method} (bound {_fmt(s.upper)})")
    lines += [
        f"bound (block)  {_fmt(res.upper_bound_blockwise)}",
        f"bound (global) {_fmt(res.upper_bound_global)}",
    ]
    if args.oracle:
        lines.append(f"oracle         {_fmt(res.oracle_value)}")
    for w in res.warnings:
        lines.append(f"warning        {w}")
    return report, lines, (EXIT_NOT_CONVERGED if args.strict and not res.converged else EXIT_OK)


def _appendix_bound(rho, spectrum):
    if rho.dim_a != 3 or spectrum.sector_dims != (3,):
        return None
    out = {}
    for key, meas in (("appendix", appendix_measurement_3d()), ("block", block_measurement_3d())):
        try:
            out[key] = {"value": lower_bound_fixed(rho, meas), "error": None}
        except InfeasibleMeasurementError as exc:
            out[key] = {"value": None, "error": str(exc)}
    return out


def cmd_bounds(args):
    rho, meta = read_state(args.state)
    res = min_compute(rho, args.tol, _config(args))
    spectrum = spectral_decompose(partial_trace_b(rho), args.tol)
    fixed = _appendix_bound(rho, spectrum)
    extra = {
        "upper_bound_global": res.upper_bound_global,
        "upper_bound_blockwise": res.upper_bound_blockwise,
        "bound_gap": res.upper_bound_global - res.upper_bound_blockwise,
        "witness_lower_bound": res.witness_value,
        "fixed_measurement_lower_bounds": fixed,
    }
    report = RunReport("bounds", {"path": args.state, "dims": [rho.dim_a, rho.dim_b], "metadata": meta},
                       result=res.to_dict(), extra=extra, seed=args.seed)
    lines = [
        f"global bound     {_fmt(res.upper_bound_global)}",
        f"blockwise bound  {_fmt(res.upper_bound_blockwise)}",
        f"gap              {_fmt(extra['bound_gap'])}",
        f"MIN              {_fmt(res.value)} ({'exact' if res.exact else 'lower estimate'})",
        f"witness lower    {_fmt(res.witness_value)}",
    ]
    if fixed:
        for key, rec in fixed.items():
            lines.append(f"{key + ' lower':<16} {_fmt(rec['value'])}" + (f"  [{rec['error']}]" if rec["error"] else ""))
    return report, lines, EXIT_OK


def _floats(text):
    return [float(v) for v in text.replace(" ", "").split(",") if v]


def _generate(args):
    rng = np.random.default_rng(args.seed)
    kind = args.kind
    if kind == "product":
        sigma = gen.ginibre_random_mixed(1, args.m, seed=rng).entries
        tau = gen.ginibre_random_mixed(1, args.n, seed=rng).entries
        return gen.product_state(sigma, tau)
    if kind == "pure-schmidt":
        coeffs = _floats(args.coeffs) if args.coeffs else [1.0]
        return gen.pure_state_from_schmidt(coeffs, args.m, args.n)
    if kind == "haar-pure":
        return gen.haar_random_pure(args.m, args.n, seed=rng)
    if kind == "ginibre":
        return gen.ginibre_random_mixed(args.m, args.n, rank=args.rank, seed=rng)
    if kind == "engineered":
        sectors = [int(s) for s in args.sectors.split(",")] if args.sectors else [args.m]
        return gen.engineered_degenerate(args.m, args.n, sectors, seed=rng)
    if kind == "bell":
        return gen.bell_state()
    if kind == "sec4":
        if args.t is None:
            y1, t_vec = gen.random_sec4_parameters(args.x, args.n, seed=rng)
        else:
            y1, t_vec = args.y1, _floats(args.t)
        return gen.example_state_sec4(args.x, y1, t_vec, args.n)
    raise QminError(f"unknown kind {kind}")


def cmd_gen(args):
    rho = _generate(args)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "json", "output")}
    write_state(args.output, rho, {"generator": args.kind, "params": params})
    spectrum = spectral_decompose(partial_trace_b(rho), args.tol)
    report = RunReport("gen", {"kind": args.kind, "params": params}, seed=args.seed,
                       extra={"output": args.output, "marginal_sector_dims": list(spectrum.sector_dims),
                              "marginal_eigenvalues": [float(v) for v in spectrum.eigenvalues]})
    lines = [
        f"wrote {args.output} ({rho.dim_a}x{rho.dim_b}, {args.kind})",
        f"marginal eigenvalues {[float(f'{v:.10g}') for v in spectrum.eigenvalues]}",
        f"marginal sectors {list(spectrum.sector_dims)}",
    ]
    return report, lines, EXIT_OK


def cmd_verify(args):
    checks = run_suite(args.suite, args.count, args.seed)
    rows = [c.to_dict() for c in checks]
    report = RunReport("verify", {"suite": args.suite, "count": args.count}, seed=args.seed, extra={"checks": rows})
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'max violation':>14}  {'tol':>8}  {'n':>4}  result"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {c.max_violation:>14.3e}  {c.tol:>8.0e}  {c.count:>4}  "
                     f"{'PASS' if c.passed else 'FAIL'}")
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return report, lines, (EXIT_FAILED if failed else EXIT_OK)


def build_parser():
    parser = argparse.ArgumentParser(prog="qmin", description="Measurement-induced nonlocality toolkit")
    parser.add_argument("--version", action="version", version=f"qmin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, state=True):
        if state:
            p.add_argument("state", help="state JSON file")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="degeneracy tolerance")
        p.add_argument("--restarts", type=int, default=None, help="search restarts (default 8*m_r^2)")
        p.add_argument("--max-iters", type=int, default=500, help="sweeps per restart")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true", help="print a JSON report")

    p = sub.add_parser("compute", help="compute MIN of a state file")
    common(p)
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    p.add_argument("--strict", action="store_true", help="exit 3 if a numeric search did not converge")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("bounds", help="upper and lower bounds on MIN")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gen", help="generate a state file")
    p.add_argument("kind", choices=["product", "pure-schmidt", "haar-pure", "ginibre", "engineered", "sec4", "bell"])
    common(p, state=False)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--sectors", help="comma separated sector dims, e.g. 2,2")
    p.add_argument("--coeffs", help="comma separated Schmidt coefficients")
    p.add_argument("--x", type=float, default=0.3)
    p.add_argument("--y1", type=float, default=0.0)
    p.add_argument("--t", help="8 comma separated coefficients of X_i (x) Y_1")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run a seeded verification campaign")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report, lines, code = args.func(args)
    except (QminError, OSError) as exc:
        if args.json:
            print(json.dumps({"command": args.command, "error": {"type": type(exc).__name__, "message": str(exc)}}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report.wall_time = time.perf_counter() - start
    _emit(report, args, lines)
    return code


if __name__ == "__main__":
    sys.exit(main())
