"""End-to-end benchmark pipeline and operator-norm validation utilities.

`benchmark_pipeline` chains ensemble construction, the structured SDP solve,
dual certification, and truncation-error accounting into a single rigorous
number: `f_infinite = f_finite + eps_error`, an upper bound on the best
measure-and-prepare performance for the requested ensemble.  `f_finite` is the
*certified dual* value, not the primal, so the chain stays an upper bound
end-to-end.

Quasi-Monte-Carlo integration error is deliberately *not* folded into the
certified bound; `sample_doubling_delta` estimates it separately by comparing
against a half-sample run.

`random_separable_choi` + `operator_norm` numerically exercise the structural
fact that a channel is measure-and-prepare iff its bipartite operator is
separable with identity partial trace — every such operator has norm <= 1.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass, field

import numpy as np

from .ensemble import EnsembleSpec, build_eta, spec_to_dict, truncation_error
from .errors import DomainError
from .sdp import assemble_problem, certified_upper_bound, solve

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BenchmarkReport:
    """Rigorous benchmark evaluation for one ensemble spec."""

    spec: EnsembleSpec
    f_finite: float        # certified dual value of the truncated SDP
    eps_error: float       # ensemble weight beyond the cutoff
    f_infinite: float      # f_finite + eps_error, the reported bound
    certified: float       # same dual-side value, kept explicit
    gap: float             # certified minus repaired-primal (bracket width)
    trace_captured: float
    timings: dict = field(default_factory=dict)
    warnings: tuple = ()

    def __post_init__(self):
        if abs(self.f_infinite - (self.f_finite + self.eps_error)) > 1e-15:
            raise DomainError("f_infinite must equal f_finite + eps_error")

    def to_json_dict(self, reproducible: bool = False) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "spec": spec_to_dict(self.spec),
            "f_finite": self.f_finite,
            "eps_error": self.eps_error,
            "f_infinite": self.f_infinite,
            "gap": self.gap,
            "trace_captured": self.trace_captured,
            "samples": self.spec.samples,
            "wall_ms": 0.0 if reproducible else self.timings.get("wall_ms", 0.0),
        }

    def to_csv_row(self, reproducible: bool = False) -> tuple:
        d = self.to_json_dict(reproducible=reproducible)
        prior = d["spec"]["prior"]
        header = (
            "s", "lam", "prior", "alpha", "cutoff", "samples",
            "f_finite", "eps_error", "f_infinite", "gap",
            "trace_captured", "wall_ms",
        )
        row = (
            d["spec"]["s"], d["spec"]["lam"], prior["kind"],
            prior.get("alpha", ""), d["spec"]["cutoff"], d["samples"],
            d["f_finite"], d["eps_error"], d["f_infinite"], d["gap"],
            d["trace_captured"], d["wall_ms"],
        )
        return header, row


def benchmark_pipeline(spec: EnsembleSpec, tol: float = 1e-7) -> BenchmarkReport:
    """Build the ensemble operator, solve the SDP, and certify the bound."""
    t_start = time.perf_counter()
    e = build_eta(spec)
    t_eta = time.perf_counter()
    eps = truncation_error(e)
    problem = assemble_problem(e)
    sol = solve(problem, tol=tol)
    certified = certified_upper_bound(sol)
    t_solve = time.perf_counter()

    warnings = list(sol.warnings)
    if sol.status != "Optimal":
        warnings.append(f"solver stopped with status {sol.status}")
    f_finite = certified
    return BenchmarkReport(
        spec=spec,
        f_finite=f_finite,
        eps_error=eps,
        f_infinite=f_finite + eps,
        certified=certified,
        gap=certified - sol.primal_value,
        trace_captured=e.trace_captured,
        timings={
            "eta_ms": 1e3 * (t_eta - t_start),
            "solve_ms": 1e3 * (t_solve - t_eta),
            "wall_ms": 1e3 * (t_solve - t_start),
            "iterations": sol.iterations,
        },
        warnings=tuple(warnings),
    )


def sample_doubling_delta(spec: EnsembleSpec, tol: float = 1e-7) -> dict:
    """Integration-error probe: change in f_finite when halving the samples.

    The certified bound treats the sampled ensemble operator as exact; this
    reports how much the answer moves between N/2 and N points so the QMC
    error can be judged separately.
    """
    if spec.samples < 2:
        raise DomainError("sample-doubling check needs at least 2 samples")
    half = EnsembleSpec(
        s=spec.s,
        lam=spec.lam,
        prior=spec.prior,
        cutoff=spec.cutoff,
        samples=spec.samples // 2,
    )
    full_report = benchmark_pipeline(spec, tol=tol)
    half_report = benchmark_pipeline(half, tol=tol)
    return {
        "samples_full": spec.samples,
        "samples_half": half.samples,
        "f_finite_full": full_report.f_finite,
        "f_finite_half": half_report.f_finite,
        "doubling_delta": abs(full_report.f_finite - half_report.f_finite),
    }


# ---------------------------------------------------------------------------
# operator-norm sanity checks


def operator_norm(op: np.ndarray) -> float:
    """Largest eigenvalue magnitude of a Hermitian operator."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DomainError(f"operator must be square, got shape {op.shape}")
    if np.max(np.abs(op - op.conj().T)) > 1e-9:
        raise DomainError("operator is not Hermitian within 1e-9")
    w = np.linalg.eigvalsh(0.5 * (op + op.conj().T))
    return float(max(abs(w[0]), abs(w[-1])))


def random_separable_choi(c: int, terms: int, seed: int) -> np.ndarray:
    """Random separable bipartite operator with identity partial trace.

    Draws a random POVM {M_x} on the truncated A space (PSD matrices whisked
    to sum to the identity) and random density matrices sigma_x, and returns
    sum_x M_x (x) sigma_x — the operator form of a measure-and-prepare
    channel, which always has operator norm <= 1.
    """
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms}")
    d = c + 1
    rng = np.random.default_rng(seed)

    def ginibre_psd(k):
        g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        return g @ g.conj().T

    raw = [ginibre_psd(d) for _ in range(terms)]
    total = sum(raw)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    povm = [inv_sqrt @ m @ inv_sqrt for m in raw]
    out = np.zeros((d * d, d * d), dtype=complex)
    for m in povm:
        sigma = ginibre_psd(d)
        sigma /= np.trace(sigma).real
        out += np.kron(m, sigma)
    return 0.5 * (out + out.conj().T)


def write_csv(path, header, rows) -> None:
    """Small CSV writer shared by the CLI figure commands."""
    import csv

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
