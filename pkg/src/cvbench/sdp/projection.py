"""Dense projection-based cross-check backend for small cutoffs.

Solves the same optimization as the structured interior-point path, but on
the dense bipartite operator with consensus ADMM over three exactly-computable
projections:

* the PSD cone (eigenvalue clip),
* the PPT cone (partial transpose, clip, transpose back — the partial
  transpose is a Frobenius isometry, so this is an exact projection),
* the spectral cap {Tr_B X <= I} (a closed-form shift by Lambda (x) I).

Deliberately independent of the sector machinery: the operator is dense, the
partial transpose and partial trace are axis permutations/contractions of the
4-index reshape.  Intended for cross-validation at small cutoff, not speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from .structure import blocks_to_dense


def _partial_transpose(x: np.ndarray, d: int) -> np.ndarray:
    return x.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)


def _partial_trace(x: np.ndarray, d: int) -> np.ndarray:
    return np.einsum("abcb->ac", x.reshape(d, d, d, d))


def _project_psd(x: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(x)
    if w[0] >= 0.0:
        return x
    return (v * np.maximum(w, 0.0)) @ v.conj().T


def _project_trace_cap(x: np.ndarray, d: int) -> np.ndarray:
    """Nearest operator with Tr_B X <= I (KKT: subtract Lambda (x) I)."""
    excess = _partial_trace(x, d) - np.eye(d)
    w, v = np.linalg.eigh(excess)
    if w[-1] <= 0.0:
        return x
    lam = (v * (np.maximum(w, 0.0) / d)) @ v.conj().T
    return x - np.kron(lam, np.eye(d))


@dataclass
class ProjectionSolution:
    """Outcome of the dense ADMM cross-check."""

    value: float
    iterations: int
    primal_residual: float
    dual_residual: float
    status: str
    dense_operator: np.ndarray = field(repr=False, default=None)
    diagnostics: dict = field(default_factory=dict)


def solve_projection(
    problem,
    tol: float = 1e-6,
    max_iter: int = 20000,
    rho: float | None = None,
    over_relax: float = 1.6,
) -> ProjectionSolution:
    """Maximize Tr(C X) over PSD & PPT & {Tr_B X <= I} by consensus ADMM."""
    c = problem.c
    d = c + 1
    if d * d > 400:
        raise DomainError(
            f"projection backend is a dense cross-check; cutoff {c} is too large"
        )
    cmat = blocks_to_dense(c, problem.objective)
    if rho is None:
        rho = max(np.linalg.norm(cmat) / d, 1e-6)

    x = np.zeros((d * d, d * d), dtype=complex)
    zs = [x.copy(), x.copy(), x.copy()]
    us = [x.copy(), x.copy(), x.copy()]
    projections = (
        _project_psd,
        lambda m: _partial_transpose(_project_psd(_partial_transpose(m, d)), d),
        lambda m: _project_trace_cap(m, d),
    )

    status = "SlowProgress"
    r_pri = r_dua = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        x_old = x
        x = (sum(zs) - sum(us)) / 3.0 + cmat / (3.0 * rho)
        x = 0.5 * (x + x.conj().T)
        r_pri = 0.0
        for i, proj in enumerate(projections):
            xr = over_relax * x + (1.0 - over_relax) * zs[i]
            zs[i] = proj(xr + us[i])
            us[i] += xr - zs[i]
            r_pri = max(r_pri, float(np.linalg.norm(x - zs[i])))
        r_dua = 3.0 * rho * float(np.linalg.norm(x - x_old))
        if it % 10 == 0 and r_pri < tol and r_dua < tol:
            status = "Optimal"
            break
        # residual balancing: rescale the penalty (and the scaled duals with it)
        if it % 25 == 0:
            if r_pri > 10.0 * r_dua and rho < 1e8:
                rho *= 2.0
                us = [u / 2.0 for u in us]
            elif r_dua > 10.0 * r_pri and rho > 1e-8:
                rho /= 2.0
                us = [u * 2.0 for u in us]

    # feasibility repair: isotropic shift fixes PSD and PPT simultaneously
    # (the identity is its own partial transpose), then rescale the trace cap.
    lam_min = min(
        float(np.linalg.eigvalsh(x)[0]),
        float(np.linalg.eigvalsh(_partial_transpose(x, d))[0]),
    )
    if lam_min < 0.0:
        x = x + (-lam_min) * np.eye(d * d)
    cap = float(np.linalg.eigvalsh(_partial_trace(x, d))[-1])
    if cap > 1.0:
        x = x / cap
    value = float(np.real(np.vdot(cmat, x)))
    return ProjectionSolution(
        value=value,
        iterations=it,
        primal_residual=r_pri,
        dual_residual=r_dua,
        status=status,
        dense_operator=x,
        diagnostics={"rho": rho, "shift": max(0.0, -lam_min), "cap": cap},
    )
