"""Command-line interface.

Exit codes: 0 on success, 1 on input errors (including bad arguments),
2 on numerical or solver failures.  All CSV/JSON outputs are bitwise
reproducible from the seed and do not depend on the worker count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .decay import epsilon_estimate
from .errors import GramspecError, InputError, NumericalError
from .estimator import FRESH, SUBSAMPLE, EstimatorConfig, estimate_quantiles
from .experiments import (
    PRESETS,
    ExperimentSpec,
    dimension_sweep,
    full_spectrum_oracle,
    run_example,
    write_csv,
    write_json,
    write_quantiles_csv,
    write_spectrum_csv,
    SPEC_VERSION,
)
from .kernels import KernelSpec, PointSet, sample_uniform
from .scaling import load_distribution, save_distribution, solve_scaling
from .validation import as_point_matrix


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad arguments; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _kernel_from_args(args) -> KernelSpec:
    return KernelSpec(args.kernel, args.length_scale)


def _parse_override(text: str) -> tuple:
    if "=" not in text:
        raise InputError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    for cast in (int, float):
        try:
            return key, cast(raw)
        except ValueError:
            continue
    return key, raw


def _load_points(path, n: int, d: int) -> PointSet:
    try:
        arr = np.loadtxt(path, delimiter=None if _is_whitespace_delimited(path) else ",")
    except Exception as exc:
        raise InputError(f"could not read point file {path}: {exc}") from None
    pts = as_point_matrix(arr)
    if pts.shape != (n, d):
        raise InputError(f"point file {path} has shape {pts.shape}, expected ({n}, {d})")
    return PointSet(pts)


def _is_whitespace_delimited(path) -> bool:
    with open(path) as fh:
        for line in fh:
            if line.strip():
                return "," not in line
    return True


def _cmd_solve_xi(args) -> int:
    dist = solve_scaling(args.k, args.n)
    save_distribution(dist, args.out)
    print(f"wrote {args.out}: {len(dist.atoms)} atoms, max atom {dist.max_atom:.6g}, "
          f"moment residual {dist.moment_residual:.3e}")
    return 0


def _cmd_estimate(args) -> int:
    dist = load_distribution(args.xi) if args.xi else solve_scaling(args.k, args.n)
    mode = FRESH if args.fresh else SUBSAMPLE
    config = EstimatorConfig(
        k=args.k, n=args.n, d=args.d, kernel=_kernel_from_args(args),
        trials=args.trials, seed=args.seed, scaling=dist, sampling_mode=mode,
        ambient_dim=args.d, workers=args.workers,
    )
    X = None
    if mode == SUBSAMPLE:
        X = _load_points(args.points, args.n, args.d) if args.points else sample_uniform(args.n, args.d, args.seed)
    est = estimate_quantiles(config, X)
    out = Path(args.out)
    write_quantiles_csv(out, est)
    report = {
        "spec_version": SPEC_VERSION,
        "k": args.k, "n": args.n, "d": args.d,
        "kernel": {"family": args.kernel, "length_scale": args.length_scale},
        "trials": args.trials, "seed": args.seed, "sampling_mode": mode,
        "quantiles": [float(v) for v in est.averaged_eigenvalues],
        "stddev": [float(v) for v in est.per_trial_stddev],
        "repeat_factor": est.repeat_factor,
    }
    write_json(out.with_suffix(".json"), report)
    print(f"wrote {out} and {out.with_suffix('.json')}")
    return 0


def _cmd_oracle(args) -> int:
    spectrum = full_spectrum_oracle(
        args.n, args.d, _kernel_from_args(args), args.trials, args.seed, force=args.force
    )
    out = Path(args.out)
    if out.suffix == ".json":
        write_json(out, {
            "spec_version": SPEC_VERSION,
            "n": args.n, "d": args.d, "trials": args.trials, "seed": args.seed,
            "kernel": {"family": args.kernel, "length_scale": args.length_scale},
            "eigenvalues": [float(v) for v in spectrum.eigenvalues],
        })
    else:
        write_spectrum_csv(out, spectrum)
    print(f"wrote {out}")
    return 0


def _cmd_verify_decay(args) -> int:
    s_grid = [float(s) for s in args.sgrid.split(",") if s.strip()]
    report = epsilon_estimate(
        _kernel_from_args(args), args.lmax, s_grid, args.samples, args.seed,
        random_walks=args.random_walks, dim=args.dim, workers=args.workers,
    )
    out = Path(args.out)
    write_csv(out, ("l", "s", "ratio", "halfwidth"), report.rows())
    summary = out.with_suffix(".summary.json")
    write_json(summary, {
        "spec_version": SPEC_VERSION,
        "epsilon_hat": report.epsilon_hat,
        "t_effective": report.t_effective,
        "lmax": args.lmax, "samples": args.samples, "seed": args.seed,
        "random_walks": args.random_walks,
        "kernel": {"family": args.kernel, "length_scale": args.length_scale},
    })
    print(f"wrote {out} and {summary}; epsilon_hat = {report.epsilon_hat:.4f}")
    return 0


def _cmd_example(args) -> int:
    overrides = dict(_parse_override(s) for s in args.set or [])
    spec = ExperimentSpec(args.id, overrides)
    report = run_example(spec, outdir=Path(args.outdir), workers=args.workers)
    line = f"experiment {args.id} done"
    if report.coverage is not None:
        line += f"; coverage {report.coverage:.3f}"
    print(line + f"; artifacts in {args.outdir}")
    return 0


def _cmd_dim_sweep(args) -> int:
    overrides = dict(_parse_override(s) for s in args.set or [])
    candidates = [int(c) for c in args.candidates.split(",") if c.strip()]
    base = ExperimentSpec(args.base, overrides)
    result = dimension_sweep(base, candidates, outdir=Path(args.outdir), workers=args.workers)
    print(f"best candidate dimension: {result.best}; "
          + ", ".join(f"d={c}: misfit {result.misfits[c]:.4f}" for c in result.candidates))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gramspec",
                     description="Eigenvalue quantile estimation for kernel Gram matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-xi", help="solve and persist a scaling distribution")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_solve_xi)

    p = sub.add_parser("estimate", help="run the randomized quantile estimator")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kernel", choices=("gaussian", "cauchy"), required=True)
    p.add_argument("--lambda", dest="length_scale", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--xi", default=None, help="path to a solved scaling distribution")
    p.add_argument("--fresh", action="store_true", help="fresh uniform points instead of subsampling")
    p.add_argument("--points", default=None, help="optional whitespace/comma-delimited point file")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("oracle", help="averaged full spectrum over fresh draws")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kernel", choices=("gaussian", "cauchy"), required=True)
    p.add_argument("--lambda", dest="length_scale", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--force", action="store_true", help="override the size guard")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("verify-decay", help="Monte-Carlo check of the fast-decay condition")
    p.add_argument("--kernel", choices=("gaussian", "cauchy"), required=True)
    p.add_argument("--lambda", dest="length_scale", type=float, required=True)
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--sgrid", required=True, help="comma-separated values in (0, 1]")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--random-walks", type=int, default=8)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_verify_decay)

    p = sub.add_parser("example", help="run a stock experiment")
    p.add_argument("--id", required=True, choices=sorted(PRESETS) + ["custom"])
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("dim-sweep", help="score candidate scaling dimensions")
    p.add_argument("--candidates", required=True, help="comma-separated integers")
    p.add_argument("--base", default="ex3.2")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_dim_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except GramspecError as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
