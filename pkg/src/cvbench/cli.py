"""Command-line front end: closed-form values, single benchmark runs, and
figure-grid scans emitted as CSV/JSON.

Exit codes: 0 success, 1 computation integrity failure, 2 flag/usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analytic import (
    coherent_gaussian_benchmark,
    ideal_overlap,
    mixed_benchmark,
    pure_benchmark,
    uhlmann_bound,
)
from .bench import benchmark_pipeline, sample_doubling_delta, write_csv
from .ensemble import DeltaAtOrigin, EnsembleSpec, GaussianIsotropic
from .errors import AccuracyError, DomainError, IntegrityError
from .fock import fock_matrix
from .phase_space import apply_attenuation, squeezed_state

# full-scale figure grids; override --cutoff/--samples for quick desk runs
FIG1_S_GRID = tuple(np.round(np.linspace(1.0, 10.0, 37), 6))
FIG1_NOISES = (0.0, 0.5, 1.0)
FIG2_ALPHAS = (0.02, 0.05, 0.08, 0.10, 0.12, 0.15, 0.20, 0.25, 0.30, 0.40,
               0.50, 0.70, 1.00)
FIG2_CUTOFF = 35
FIG3_ALPHAS = FIG2_ALPHAS
FIG3_LOSSES = (0.6, 0.8, 1.0)
FIG3_CUTOFF = 30
FIG4_S_GRID = (2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)
FIG4_CUTOFF = 30


def _default_threads() -> int:
    env = os.environ.get("CVBENCH_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_analytic(ns) -> int:
    vals = {
        "squeezing": ns.squeezing,
        "noise": ns.noise,
        "pure_benchmark": pure_benchmark(ns.squeezing).value,
        "mixed_benchmark": mixed_benchmark(ns.squeezing, ns.noise).value,
        "uhlmann_bound": uhlmann_bound(ns.squeezing, ns.noise).value,
        "ideal_overlap": ideal_overlap(ns.squeezing, ns.noise).value,
    }
    if ns.alpha is not None:
        vals["coherent_gaussian_benchmark"] = coherent_gaussian_benchmark(
            ns.alpha
        ).value
    _emit(json.dumps(vals, indent=2, sort_keys=True) + "\n", ns.out)
    return 0


def _spec_from_flags(ns) -> EnsembleSpec:
    prior = DeltaAtOrigin() if ns.delta else GaussianIsotropic(alpha=ns.alpha)
    return EnsembleSpec(
        s=ns.squeezing,
        lam=ns.loss,
        prior=prior,
        cutoff=ns.cutoff,
        samples=ns.samples,
    )


def _cmd_benchmark(ns) -> int:
    spec = _spec_from_flags(ns)
    report = benchmark_pipeline(spec, tol=ns.tol)
    for msg in report.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    if ns.format == "csv":
        header, row = report.to_csv_row(reproducible=ns.reproducible)
        lines = ",".join(map(str, header)) + "\n" + ",".join(map(str, row)) + "\n"
        _emit(lines, ns.out)
        return 0
    payload = report.to_json_dict(reproducible=ns.reproducible)
    if ns.qmc_check:
        payload["qmc_check"] = sample_doubling_delta(spec, tol=ns.tol)
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", ns.out)
    return 0


def _scan_point(task: dict) -> dict:
    """One figure grid point (module-level so process pools can pickle it)."""
    prior = (
        DeltaAtOrigin()
        if task["prior"] == "delta"
        else GaussianIsotropic(alpha=task["alpha"])
    )
    spec = EnsembleSpec(
        s=task["s"],
        lam=task["lam"],
        prior=prior,
        cutoff=task["cutoff"],
        samples=task["samples"],
    )
    report = benchmark_pipeline(spec, tol=task["tol"])
    return {
        "task": task,
        "f_finite": report.f_finite,
        "eps_error": report.eps_error,
        "f_infinite": report.f_infinite,
    }


def _run_scan(tasks, threads):
    if threads <= 1:
        return [_scan_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_scan_point, tasks))


def _cmd_figure(ns) -> int:
    os.makedirs(ns.out, exist_ok=True)
    threads = ns.threads if ns.threads else _default_threads()
    path = os.path.join(ns.out, f"figure{ns.number}.csv")

    if ns.number == 1:
        rows = [
            (s, eta, mixed_benchmark(float(s), eta).value)
            for eta in FIG1_NOISES
            for s in FIG1_S_GRID
        ]
        write_csv(path, ("s", "eta", "f_bar"), rows)
        print(f"wrote {path}")
        return 0

    if ns.number == 2:
        cutoff = ns.cutoff if ns.cutoff is not None else FIG2_CUTOFF
        tasks = [
            dict(s=1.0, lam=1.0, prior="gaussian", alpha=a, cutoff=cutoff,
                 samples=ns.samples, tol=ns.tol)
            for a in FIG2_ALPHAS
        ]
        results = _run_scan(tasks, threads)
        rows = [
            (
                r["task"]["alpha"],
                r["f_finite"],
                r["eps_error"],
                r["f_infinite"],
                (2 * r["task"]["alpha"] + 1) / (2 * (r["task"]["alpha"] + 1)),
            )
            for r in results
        ]
        write_csv(
            path,
            ("alpha", "f_finite", "eps_error", "f_infinite", "formula"),
            rows,
        )
        print(f"wrote {path}")
        return 0

    if ns.number == 3:
        cutoff = ns.cutoff if ns.cutoff is not None else FIG3_CUTOFF
        tasks = [
            dict(s=8.0, lam=lam, prior="gaussian", alpha=a, cutoff=cutoff,
                 samples=ns.samples, tol=ns.tol)
            for lam in FIG3_LOSSES
            for a in FIG3_ALPHAS
        ]
        results = _run_scan(tasks, threads)
        rows = [
            (
                r["task"]["lam"],
                r["task"]["alpha"],
                r["f_finite"],
                r["eps_error"],
                r["f_infinite"],
            )
            for r in results
        ]
        write_csv(
            path,
            ("lam", "alpha", "f_finite", "eps_error", "f_infinite"),
            rows,
        )
        print(f"wrote {path}")
        return 0

    cutoff = ns.cutoff if ns.cutoff is not None else FIG4_CUTOFF
    tasks = [
        dict(s=s, lam=1.0, prior="delta", alpha=None, cutoff=cutoff,
             samples=1, tol=ns.tol)
        for s in FIG4_S_GRID
    ]
    results = _run_scan(tasks, threads)
    rows = [
        (
            r["task"]["s"],
            r["f_finite"],
            r["eps_error"],
            r["f_infinite"],
            float(np.sqrt(r["task"]["s"]) / (1 + r["task"]["s"])),
        )
        for r in results
    ]
    write_csv(
        path,
        ("s", "f_finite", "eps_error", "f_infinite", "flat_lower_bound"),
        rows,
    )
    print(f"wrote {path}")
    return 0


def _cmd_fock_table(ns) -> int:
    try:
        parts = [float(p) for p in ns.xi.split(",")]
        if len(parts) != 2:
            raise ValueError
    except ValueError:
        raise DomainError(f"--xi expects 'X,Y', got {ns.xi!r}")
    state = squeezed_state(ns.squeezing, xi=(parts[0], parts[1]))
    state = apply_attenuation(state, ns.loss)
    f = fock_matrix(state, ns.cutoff)
    lines = ["k,l,re,im"]
    lines += [
        f"{k},{l},{float(f.values[k, l].real)!r},{float(f.values[k, l].imag)!r}"
        for k in range(f.dim)
        for l in range(f.dim)
    ]
    _emit("\n".join(lines) + "\n", ns.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvbench",
        description="Rigorous quantum-memory benchmarks for squeezed-state "
        "ensembles: closed forms and PPT-relaxed SDP bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form benchmark values")
    p.add_argument("--squeezing", type=float, required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=None,
                   help="also evaluate the coherent-ensemble closed form")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("benchmark", help="single SDP benchmark evaluation")
    p.add_argument("--squeezing", type=float, required=True)
    p.add_argument("--loss", type=float, required=True)
    prior = p.add_mutually_exclusive_group(required=True)
    prior.add_argument("--alpha", type=float, default=None,
                       help="isotropic Gaussian displacement prior")
    prior.add_argument("--delta", action="store_true",
                       help="point prior: no displacement")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--samples", type=int, default=8192)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--qmc-check", action="store_true",
                   help="also report the half-sample doubling delta")
    p.add_argument("--reproducible", action="store_true",
                   help="byte-identical output (zeroes timing fields)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("figure", help="emit CSV data for one figure grid")
    p.add_argument("number", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cutoff", type=int, default=None,
                   help="override the full-scale cutoff")
    p.add_argument("--samples", type=int, default=8192)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--threads", type=int, default=0,
                   help="parallel grid points (default: CVBENCH_THREADS or 1)")
    p.add_argument("--reproducible", action="store_true")
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("fock-table", help="dump a number-basis matrix as CSV")
    p.add_argument("--squeezing", type=float, required=True)
    p.add_argument("--loss", type=float, default=1.0)
    p.add_argument("--xi", default="0,0", help="displacement label 'X,Y'")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fock_table)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code) if ex.code is not None else 0
    try:
        return ns.func(ns)
    except DomainError as ex:
        print(f"error: {ex}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return 2
    except (IntegrityError, AccuracyError) as ex:
        print(f"integrity error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
