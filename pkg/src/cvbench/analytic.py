"""Closed-form classical benchmarks for squeezed-state ensembles.

All values are exact closed forms; no quadrature anywhere.  Each function
returns a :class:`BenchmarkValue` carrying the number, its kind, and the
parameters it was evaluated at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError


class BenchmarkKind(str, Enum):
    PURE = "pure"
    MIXED_OVERLAP = "mixed_overlap"
    UHLMANN_BOUND = "uhlmann_bound"
    IDEAL_OVERLAP = "ideal_overlap"
    COHERENT_GAUSSIAN = "coherent_gaussian"


@dataclass(frozen=True)
class BenchmarkValue:
    """A closed-form benchmark value with a descriptive label."""

    value: float
    kind: BenchmarkKind
    params: dict = field(default_factory=dict)
    flagged: bool = False  # set when a degenerate-input branch was taken

    def __float__(self) -> float:
        return self.value


def _check_s(s: float) -> None:
    if s <= 0.0:
        raise DomainError(f"squeezing parameter must be positive, got {s}")


def _check_eta(eta_noise: float) -> None:
    if eta_noise < 0.0:
        raise DomainError(f"noise variance must be nonnegative, got {eta_noise}")


def pure_benchmark(s: float) -> BenchmarkValue:
    """Best measure-and-prepare fidelity on the flat squeezed ensemble: sqrt(s)/(1+s).

    Symmetric under s <-> 1/s; equals 1/2 at s = 1 and decays to 0 as the
    squeezing diverges.
    """
    _check_s(s)
    return BenchmarkValue(math.sqrt(s) / (1.0 + s), BenchmarkKind.PURE, {"s": s})


def mixed_benchmark(s: float, eta_noise: float) -> BenchmarkValue:
    """Best measure-and-prepare overlap after additive noise eta:
    [(1 + eta/2 + 1/s)(1 + eta/2 + s)]^(-1/2).  Reduces to pure_benchmark at eta = 0."""
    _check_s(s)
    _check_eta(eta_noise)
    val = ((1.0 + eta_noise / 2.0 + 1.0 / s) * (1.0 + eta_noise / 2.0 + s)) ** -0.5
    return BenchmarkValue(
        val, BenchmarkKind.MIXED_OVERLAP, {"s": s, "eta_noise": eta_noise}
    )


def uhlmann_bound(s: float, eta_noise: float = 0.0) -> BenchmarkValue:
    """Upper bound on the measure-and-prepare Uhlmann fidelity: sqrt(s)/(1+s).

    Independent of the additive-noise variance (accepted only for signature
    symmetry with the other benchmarks).
    """
    _check_s(s)
    _check_eta(eta_noise)
    return BenchmarkValue(
        math.sqrt(s) / (1.0 + s),
        BenchmarkKind.UHLMANN_BOUND,
        {"s": s, "eta_noise": eta_noise},
    )


def ideal_overlap(s: float, eta_noise: float) -> BenchmarkValue:
    """Overlap achieved by the ideal (identity) channel after additive noise:
    [(eta/2 + 1/s)(eta/2 + s)]^(-1/2); exactly 1 at eta = 0 (flagged branch)."""
    _check_s(s)
    _check_eta(eta_noise)
    if eta_noise == 0.0:
        return BenchmarkValue(
            1.0, BenchmarkKind.IDEAL_OVERLAP, {"s": s, "eta_noise": 0.0}, flagged=True
        )
    val = ((eta_noise / 2.0 + 1.0 / s) * (eta_noise / 2.0 + s)) ** -0.5
    return BenchmarkValue(
        val, BenchmarkKind.IDEAL_OVERLAP, {"s": s, "eta_noise": eta_noise}
    )


def coherent_gaussian_benchmark(alpha: float) -> BenchmarkValue:
    """Optimal classical bound for the isotropic-Gaussian coherent ensemble:
    (2*alpha + 1) / (2*(alpha + 1))."""
    if alpha < 0.0:
        raise DomainError(f"prior width alpha must be nonnegative, got {alpha}")
    return BenchmarkValue(
        (2.0 * alpha + 1.0) / (2.0 * (alpha + 1.0)),
        BenchmarkKind.COHERENT_GAUSSIAN,
        {"alpha": alpha},
    )
