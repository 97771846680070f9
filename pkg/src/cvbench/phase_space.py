"""Single-mode Gaussian phase-space calculus.

Conventions
-----------
A single bosonic mode is described by a ``GaussianState``: a 2x2 covariance
matrix ``cov`` of symmetrized second moments and a 2-vector ``disp`` of first
moments ``(<X>, <P>)``, scaled so that the vacuum covariance is the identity
(equivalently ``cov = 2 * Cov[(X, P)]`` with ``[X, P] = i``).  A covariance
matrix is physical iff it is symmetric, positive definite and
``det(cov) >= 1``; purity is ``det(cov) == 1``.

The symplectic form is ``SIGMA = [[0, 1], [-1, 0]]`` and ``Z = diag(1, -1)``
is the momentum flip.  Phase-space displacement labels follow the Weyl-
operator convention in which a displacement with label ``xi`` shifts the
first moments by ``-xi``; the single owner of that sign is
:func:`moments_from_weyl_label`, validated against the Fock-basis oracle.

Rotations use ``rotation_matrix(theta) = [[cos, sin], [-sin, cos]]`` (a
clockwise rotation of the (X, P) plane), so that
``squeezed_state(s, pi/2).cov == diag(1/s, s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrityError

SIGMA = np.array([[0.0, 1.0], [-1.0, 0.0]])
SIGMA.setflags(write=False)

Z = np.array([[1.0, 0.0], [0.0, -1.0]])
Z.setflags(write=False)

#: physicality tolerance on det(cov) >= 1
DET_TOL = 1e-9
#: purity tolerance on |det(cov) - 1|
PURITY_TOL = 1e-10


def _inv2(a: np.ndarray) -> tuple[np.ndarray, float]:
    """Closed-form inverse of a symmetric 2x2 matrix; returns (inverse, det)."""
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    inv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
    return inv, det


@dataclass(frozen=True)
class GaussianState:
    """Immutable single-mode Gaussian state (covariance matrix + first moments)."""

    cov: np.ndarray
    disp: np.ndarray

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        disp = np.array(self.disp, dtype=float).reshape(2)
        if cov.shape != (2, 2):
            raise DomainError(f"covariance matrix must be 2x2, got {cov.shape}")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-9 * max(1.0, abs(cov[0, 1])):
            raise DomainError("covariance matrix must be symmetric")
        cov[0, 1] = cov[1, 0] = 0.5 * (cov[0, 1] + cov[1, 0])
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] ** 2
        if cov[0, 0] <= 0.0 or det <= 0.0:
            raise DomainError("covariance matrix must be positive definite")
        if det < 1.0 - DET_TOL:
            raise DomainError(
                f"unphysical covariance matrix: det = {det:.12g} < 1"
            )
        cov.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "disp", disp)

    @property
    def det_cov(self) -> float:
        c = self.cov
        return float(c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0])

    @property
    def is_pure(self) -> bool:
        return abs(self.det_cov - 1.0) <= PURITY_TOL


VACUUM = GaussianState(np.eye(2), np.zeros(2))


def rotation_matrix(theta: float) -> np.ndarray:
    """2x2 rotation ``[[cos, sin], [-sin, cos]]`` used throughout this package."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def moments_from_weyl_label(xi) -> np.ndarray:
    """First-moment vector of a state displaced with Weyl label ``xi``.

    This function owns the sign convention (``moments = -xi``); every place
    that converts a displacement label into first moments must go through it.
    """
    xi = np.asarray(xi, dtype=float).reshape(2)
    return -xi


def squeezed_state(s: float, theta: float = 0.0, xi=(0.0, 0.0)) -> GaussianState:
    """Pure squeezed state: cov = R(theta) diag(s, 1/s) R(theta)^T, displaced by xi.

    ``s`` is the variance scale of the first principal axis (s > 1 stretches X
    at theta = 0); ``xi`` is a Weyl displacement label.
    """
    if s <= 0.0:
        raise DomainError(f"squeezing parameter must be positive, got {s}")
    r = rotation_matrix(theta)
    cov = r @ np.diag([float(s), 1.0 / s]) @ r.T
    return GaussianState(cov, moments_from_weyl_label(xi))


def rotate(g: GaussianState, theta: float) -> GaussianState:
    """Rotate a state in phase space by ``rotation_matrix(theta)``."""
    r = rotation_matrix(theta)
    return GaussianState(r @ g.cov @ r.T, r @ g.disp)


def apply_attenuation(g: GaussianState, lam: float) -> GaussianState:
    """Pure-loss (attenuation) channel with transmissivity ``lam`` in [0, 1].

    cov -> lam*cov + (1-lam)*I, disp -> sqrt(lam)*disp.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"transmissivity must be in [0, 1], got {lam}")
    cov = lam * g.cov + (1.0 - lam) * np.eye(2)
    return GaussianState(cov, math.sqrt(lam) * g.disp)


def apply_additive_noise(g: GaussianState, eta_noise: float) -> GaussianState:
    """Additive classical Gaussian noise: cov -> cov + eta*I, disp unchanged."""
    if eta_noise < 0.0:
        raise DomainError(f"noise variance must be nonnegative, got {eta_noise}")
    return GaussianState(g.cov + eta_noise * np.eye(2), g.disp)


def heterodyne_output(g: GaussianState) -> GaussianState:
    """Measure-and-reprepare (heterodyne) strategy output: cov -> cov + 2*I."""
    return GaussianState(g.cov + 2.0 * np.eye(2), g.disp)


def overlap(g1: GaussianState, g2: GaussianState) -> float:
    """Overlap Tr[rho1 rho2] = 2 exp(-d^T (c1+c2)^{-1} d) / sqrt(det(c1+c2)).

    Symmetric in its arguments; equals 1 iff g1 == g2 and the state is pure.
    The constant is validated against the Fock-basis oracle in the test suite.
    """
    a = g1.cov + g2.cov
    inv, det = _inv2(a)
    if det <= 0.0:
        raise IntegrityError("singular covariance sum for physical states")
    delta = g1.disp - g2.disp
    q = float(delta @ inv @ delta)
    return float(2.0 * math.exp(-q) / math.sqrt(det))
