"""Fock-basis (number-basis) matrices of single-mode Gaussian states.

Two independent computation paths are provided:

* :func:`fock_matrix` — a two-index recurrence on the Bargmann (coherent-state)
  kernel of the state.  Writing G(a*, b) = ⟨a|rho|b⟩ e^{(|a|²+|b|²)/2} for a
  Gaussian state, G = C exp(m a*²/2 + conj(m) b²/2 + r a* b + w a* + conj(w) b)
  with, in terms of W = (cov + I)^{-1} and the first moments d,

      m = (W[1,1] - W[0,0]) - 2i W[0,1],      r = 1 - tr(W),
      w = sqrt(2) ((W d)[0] + i (W d)[1]),    C = 2 e^{-d·Wd} / sqrt(det(cov+I)),

  and ⟨k|rho|l⟩ are the Taylor coefficients of G divided by sqrt(k! l!).  The
  recurrence propagates the matrix elements themselves, which are bounded by 1
  for physical states, so it is stable to large cutoffs without rescaling.
* :func:`fock_matrix_oracle` — a structurally different path (normal-mode
  decomposition into a thermal state, then squeeze / rotate / displace applied
  as truncated ladder-operator exponentials at an enlarged working dimension).

The two must agree entrywise to ~1e-8; the test suite enforces this on random
states.  Rotation convention: for ``rotate(g, theta)`` of `phase_space` (the
clockwise matrix [[cos, sin], [-sin, cos]]), matrix elements pick up the phase
``exp(-i theta (k-l))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import AccuracyError, DomainError, IntegrityError
from .phase_space import GaussianState, _inv2


@dataclass(frozen=True)
class FockMatrix:
    """Complex Hermitian matrix of Fock-basis elements ⟨k|rho|l⟩, k,l ≤ cutoff.

    ``herm_defect`` records the magnitude of the (F - F†)/2 part removed when
    the raw recurrence output was symmetrized.
    """

    values: np.ndarray
    herm_defect: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DomainError(f"Fock matrix must be square, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.values)))

    def validate(self, psd_tol: float = 1e-9) -> None:
        """Check the invariants of a (possibly truncated) density matrix."""
        v = self.values
        if np.max(np.abs(v - v.conj().T)) > 1e-12:
            raise IntegrityError("Fock matrix not Hermitian within 1e-12")
        diag = np.diagonal(v).real
        if np.any(diag < -psd_tol) or np.any(diag > 1.0 + psd_tol):
            raise IntegrityError("diagonal entries outside [0, 1]")
        if self.trace > 1.0 + 1e-9:
            raise IntegrityError(f"trace {self.trace} exceeds 1")
        if np.linalg.eigvalsh(v)[0] < -psd_tol:
            raise IntegrityError("Fock matrix not PSD within tolerance")


def _as_fock(raw: np.ndarray) -> FockMatrix:
    bad = ~np.isfinite(raw)
    if bad.any():
        k, l = np.argwhere(bad)[0]
        raise AccuracyError(f"non-finite Fock matrix element at (k, l) = ({k}, {l})")
    defect = 0.5 * float(np.max(np.abs(raw - raw.conj().T)))
    return FockMatrix(0.5 * (raw + raw.conj().T), herm_defect=defect)


def bargmann_params(g: GaussianState) -> tuple[complex, complex, complex, float]:
    """Bargmann-kernel parameters (m, r, w, C) of a Gaussian state."""
    w_mat, det = _inv2(g.cov + np.eye(2))
    m = complex(w_mat[1, 1] - w_mat[0, 0], -2.0 * w_mat[0, 1])
    r = complex(1.0 - w_mat[0, 0] - w_mat[1, 1])
    wd = w_mat @ g.disp
    w = math.sqrt(2.0) * complex(wd[0], wd[1])
    c_norm = 2.0 * math.exp(-float(g.disp @ wd)) / math.sqrt(det)
    return m, r, w, c_norm


def fock_matrix(g: GaussianState, cutoff: int) -> FockMatrix:
    """Fock matrix of a Gaussian state up to ``cutoff`` via the Bargmann recurrence."""
    if cutoff < 0:
        raise DomainError(f"cutoff must be >= 0, got {cutoff}")
    m, r, w, c_norm = bargmann_params(g)
    raw = _kernels.fock_batch(m, r, w, c_norm, cutoff)[0]
    return _as_fock(raw)


def _ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1)


def fock_matrix_oracle(g: GaussianState, cutoff: int) -> FockMatrix:
    """Independent Fock-matrix computation via normal-mode decomposition.

    Decomposes cov = O diag(nu e^{2r}, nu e^{-2r}) O^T (O a rotation, nu the
    symplectic eigenvalue), builds the geometric thermal diagonal, then applies
    squeeze, rotation, and displacement as dense truncated operators at working
    dimension 2*(cutoff+1) + 40 before truncating back.  Slow and simple.
    """
    if cutoff < 0:
        raise DomainError(f"cutoff must be >= 0, got {cutoff}")
    work = 2 * (cutoff + 1) + 40
    nu = math.sqrt(max(g.det_cov, 1.0))
    ratio = (nu - 1.0) / (nu + 1.0)
    n = np.arange(work)
    rho = np.diag((2.0 / (nu + 1.0)) * ratio**n).astype(complex)

    evals, evecs = np.linalg.eigh(g.cov)
    o = evecs[:, ::-1].copy()  # columns: descending eigenvalues
    if np.linalg.det(o) < 0:
        o[:, 1] *= -1.0
    phi = math.atan2(o[1, 0], o[0, 0])
    r_sq = 0.25 * math.log(evals[1] / evals[0])

    a = _ladder(work)
    if abs(r_sq) > 0:
        sq = scipy.linalg.expm(0.5 * r_sq * (a.T @ a.T - a @ a))
        rho = sq @ rho @ sq.T
    phases = np.exp(1j * phi * n)
    rho = (phases[:, None] * rho) * phases.conj()[None, :]
    if np.any(g.disp != 0.0):
        alpha0 = complex(g.disp[0], g.disp[1]) / math.sqrt(2.0)
        disp_op = scipy.linalg.expm(alpha0 * a.T - np.conj(alpha0) * a)
        rho = disp_op @ rho @ disp_op.conj().T
    return _as_fock(rho[: cutoff + 1, : cutoff + 1])


def squeezed_vacuum_amplitudes(s: float, nmax: int) -> np.ndarray:
    """Fock amplitudes of the squeezed vacuum with covariance diag(s, 1/s).

    Entry 2n is sqrt(2 sqrt(s)/(1+s)) * sqrt((2n)!)/n! * ((s-1)/(2s+2))^n; odd
    entries vanish.  Evaluated by a stable ratio recurrence (no factorials).
    """
    if s <= 0.0:
        raise DomainError(f"squeezing parameter must be positive, got {s}")
    if nmax < 0:
        raise DomainError(f"nmax must be >= 0, got {nmax}")
    amps = np.zeros(nmax + 1)
    val = math.sqrt(2.0 * math.sqrt(s) / (1.0 + s))
    amps[0] = val
    q = (s - 1.0) / (2.0 * s + 2.0)
    for n in range(1, nmax // 2 + 1):
        val *= q * math.sqrt((2.0 * n) * (2.0 * n - 1.0)) / n
        amps[2 * n] = val
    return amps


def rotation_average(f: FockMatrix) -> FockMatrix:
    """Average over phase-space rotations: keeps the diagonal, zeroes the rest."""
    return FockMatrix(np.diag(np.diagonal(f.values)), herm_defect=f.herm_defect)


def covariant_channel_overlap(tau: FockMatrix, g: GaussianState) -> float:
    """Figure of merit (1/2) Tr[tau F(g)] of the covariant channel labelled by tau.

    Only valid for centered Gaussian inputs (disp = 0); ``tau`` must satisfy
    the FockMatrix invariants (normalized up to truncation).
    """
    tau.validate()
    if np.any(g.disp != 0.0):
        raise DomainError("covariant_channel_overlap requires a centered state")
    f = fock_matrix(g, tau.dim - 1)
    return 0.5 * float(np.real(np.trace(tau.values @ f.values)))
