"""Ensemble operator in block-diagonal Fock form, built by quasi-Monte Carlo.

For a rotationally symmetric ensemble of displaced squeezed states (prior
q(xi) isotropic) sent through an attenuation channel, the bipartite ensemble
operator is block diagonal over the total photon number j = k_A + k_B.  Block
j collects

    block[j][k1, k2] = sum_i w_i * A_i[k1, k2] * B_i[j-k1, j-k2]

with A_i the Fock matrix of the channel output for sample displacement xi_i
and B_i the Fock matrix of the corresponding input state.  The isotropic
Gaussian prior q(xi) = (alpha/pi) exp(-alpha ||xi||^2) is integrated with the
two-dimensional Halton sequence (bases 2 and 3, index starting at 1) mapped
through the inverse normal CDF — a deterministic transform, as QMC requires.

``trace_captured`` is the ensemble weight inside the photon-number cutoff;
``truncation_error`` = 1 - trace_captured is the rigorous penalty added to the
SDP value downstream.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtri

from . import _kernels
from .errors import DomainError, IntegrityError
from .fock import bargmann_params
from .phase_space import (
    GaussianState,
    _inv2,
    apply_attenuation,
    moments_from_weyl_label,
    squeezed_state,
)

_MAGIC = b"CVBETA1\n"


@dataclass(frozen=True)
class GaussianIsotropic:
    """Isotropic Gaussian displacement prior q(xi) = (alpha/pi) e^{-alpha |xi|^2}."""

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise DomainError(f"prior width alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class DeltaAtOrigin:
    """Point prior at xi = 0 (single-state ensemble); integrated exactly."""


@dataclass(frozen=True)
class ExplicitSamples:
    """A user-supplied list of (xi, weight) samples; weights must sum to 1."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        wts = np.array(self.weights, dtype=float).reshape(-1)
        if pts.shape[0] != wts.shape[0]:
            raise DomainError("points and weights must have equal length")
        if abs(wts.sum() - 1.0) > 1e-6:
            raise DomainError(f"weights must sum to 1, got {wts.sum():.9g}")
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)


Prior = Union[GaussianIsotropic, DeltaAtOrigin, ExplicitSamples]


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of one benchmark instance.

    s: squeezing of the input states; lam: channel transmissivity; prior:
    displacement distribution; cutoff: photon-number cutoff c; samples: QMC
    sample count N (ignored for DeltaAtOrigin / ExplicitSamples).
    """

    s: float
    lam: float
    prior: Prior
    cutoff: int
    samples: int = 8192

    def __post_init__(self):
        if self.s <= 0.0:
            raise DomainError(f"squeezing parameter must be positive, got {self.s}")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"transmissivity must be in [0, 1], got {self.lam}")
        if self.cutoff < 0:
            raise DomainError(f"cutoff must be >= 0, got {self.cutoff}")
        if self.samples < 1:
            raise DomainError(f"sample count must be >= 1, got {self.samples}")


@dataclass(frozen=True)
class EtaBlocks:
    """Sum-sector blocks of the ensemble operator up to total photon number c.

    ``blocks[j]`` is the (j+1)x(j+1) complex Hermitian compression of the
    ensemble operator onto span{|k, j-k>}; dimensions beyond the cutoff are
    dropped, and their weight 1 - trace_captured is accounted separately.
    """

    c: int
    blocks: tuple
    trace_captured: float
    spec: EnsembleSpec | None = None
    n_samples: int = 0

    def validate(self, psd_tol: float = 1e-9, herm_tol: float = 1e-10) -> None:
        if len(self.blocks) != self.c + 1:
            raise IntegrityError("block count does not match cutoff")
        for j, blk in enumerate(self.blocks):
            if blk.shape != (j + 1, j + 1):
                raise IntegrityError(f"block {j} has shape {blk.shape}")
            if np.max(np.abs(blk - blk.conj().T)) > herm_tol:
                raise IntegrityError(f"block {j} not Hermitian within {herm_tol}")
            if np.linalg.eigvalsh(blk)[0] < -psd_tol:
                raise IntegrityError(f"block {j} not PSD within {psd_tol}")
        if not 0.0 < self.trace_captured <= 1.0 + 1e-9:
            raise IntegrityError(f"trace_captured = {self.trace_captured} outside (0, 1]")


def halton_points(n: int, bases: tuple[int, int] = (2, 3)) -> np.ndarray:
    """First n points of the 2-D Halton sequence, index starting at 1.

    Radical-inverse per coordinate; with bases (2, 3) the sequences start
    1/2, 1/4, 3/4, ... and 1/3, 2/3, 1/9, ...
    """
    if n < 1:
        raise DomainError(f"need n >= 1 points, got {n}")
    idx = np.arange(1, n + 1, dtype=np.int64)
    out = np.empty((n, 2))
    for col, base in enumerate(bases):
        i = idx.copy()
        acc = np.zeros(n)
        f = 1.0
        while i.max() > 0:
            f /= base
            acc += f * (i % base)
            i //= base
        out[:, col] = acc
    return out


def sample_displacements(spec: EnsembleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Displacement samples (points, weights) realizing the prior of ``spec``."""
    prior = spec.prior
    if isinstance(prior, DeltaAtOrigin):
        return np.zeros((1, 2)), np.ones(1)
    if isinstance(prior, ExplicitSamples):
        return prior.points, prior.weights
    if isinstance(prior, GaussianIsotropic):
        u = halton_points(spec.samples)
        scale = 1.0 / np.sqrt(2.0 * prior.alpha)  # per-coordinate std of q
        pts = ndtri(u) * scale
        wts = np.full(spec.samples, 1.0 / spec.samples)
        return pts, wts
    raise DomainError(f"unknown prior type {type(prior).__name__}")


def _family_params(cov: np.ndarray, disps: np.ndarray):
    """Bargmann parameters for a family of states sharing one covariance matrix."""
    base = GaussianState(cov, np.zeros(2))
    m, r, _, c0 = bargmann_params(base)
    w_mat, _det = _inv2(cov + np.eye(2))
    wd = disps @ w_mat.T  # (n, 2)
    w = np.sqrt(2.0) * (wd[:, 0] + 1j * wd[:, 1])
    quad = np.einsum("ij,ij->i", disps, wd)
    c_norm = c0 * np.exp(-quad)
    n = disps.shape[0]
    return np.full(n, m), np.full(n, r), w, c_norm


def build_eta(spec: EnsembleSpec) -> EtaBlocks:
    """Assemble the sum-sector blocks of the ensemble operator for ``spec``."""
    pts, wts = sample_displacements(spec)
    disp_in = np.array([moments_from_weyl_label(x) for x in pts])
    cov_in = squeezed_state(spec.s).cov
    out_state = apply_attenuation(GaussianState(cov_in, np.zeros(2)), spec.lam)
    cov_out = out_state.cov
    disp_out = np.sqrt(spec.lam) * disp_in

    c = spec.cutoff
    fa = _kernels.fock_batch(*_family_params(cov_out, disp_out), c)
    fb = _kernels.fock_batch(*_family_params(cov_in, disp_in), c)
    fa = 0.5 * (fa + fa.conj().transpose(0, 2, 1))
    fb = 0.5 * (fb + fb.conj().transpose(0, 2, 1))

    raw = _kernels.eta_accumulate(fa, fb, wts, c)
    blocks = []
    for j, blk in enumerate(raw):
        defect = np.max(np.abs(blk - blk.conj().T)) if blk.size else 0.0
        if defect > 1e-10:
            raise IntegrityError(f"eta block {j} hermiticity residual {defect:.3e}")
        h = 0.5 * (blk + blk.conj().T)
        h.setflags(write=False)
        blocks.append(h)
    trace_captured = float(sum(np.real(np.trace(b)) for b in blocks))
    e = EtaBlocks(
        c=c,
        blocks=tuple(blocks),
        trace_captured=trace_captured,
        spec=spec,
        n_samples=len(wts),
    )
    e.validate()
    return e


def truncation_error(e: EtaBlocks) -> float:
    """Ensemble weight lost to the cutoff: 1 - trace_captured (clamped at 0)."""
    if e.trace_captured > 1.0 + 1e-9:
        raise IntegrityError(f"trace_captured = {e.trace_captured} exceeds 1")
    return max(0.0, 1.0 - e.trace_captured)


# ---------------------------------------------------------------------------
# serialization: magic + u64 header length + JSON header + raw complex payload


def _prior_to_json(prior: Prior) -> dict:
    if isinstance(prior, GaussianIsotropic):
        return {"kind": "gaussian", "alpha": prior.alpha}
    if isinstance(prior, DeltaAtOrigin):
        return {"kind": "delta"}
    if isinstance(prior, ExplicitSamples):
        return {
            "kind": "explicit",
            "points": prior.points.tolist(),
            "weights": prior.weights.tolist(),
        }
    raise DomainError(f"unknown prior type {type(prior).__name__}")


def _prior_from_json(d: dict) -> Prior:
    kind = d.get("kind")
    if kind == "gaussian":
        return GaussianIsotropic(alpha=float(d["alpha"]))
    if kind == "delta":
        return DeltaAtOrigin()
    if kind == "explicit":
        return ExplicitSamples(np.array(d["points"]), np.array(d["weights"]))
    raise IntegrityError(f"unknown prior kind {kind!r} in header")


def spec_to_dict(spec: EnsembleSpec) -> dict:
    """JSON-ready dictionary form of an ensemble spec (stable key order)."""
    return {
        "s": spec.s,
        "lam": spec.lam,
        "prior": _prior_to_json(spec.prior),
        "cutoff": spec.cutoff,
        "samples": spec.samples,
    }


def save_eta(e: EtaBlocks, path) -> None:
    """Write EtaBlocks to ``path`` (versioned header + row-major complex pairs)."""
    header = {
        "version": 1,
        "c": e.c,
        "trace_captured": e.trace_captured,
        "n_samples": e.n_samples,
        "spec": None if e.spec is None else spec_to_dict(e.spec),
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for blk in e.blocks:
            fh.write(np.ascontiguousarray(blk, dtype=np.complex128).tobytes())


def load_eta(path) -> EtaBlocks:
    """Read EtaBlocks written by :func:`save_eta`."""
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise IntegrityError(f"{path}: not an EtaBlocks file")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        if header.get("version") != 1:
            raise IntegrityError(f"unsupported EtaBlocks version {header.get('version')}")
        c = int(header["c"])
        blocks = []
        for j in range(c + 1):
            nbytes = (j + 1) * (j + 1) * 16
            buf = fh.read(nbytes)
            if len(buf) != nbytes:
                raise IntegrityError("EtaBlocks payload truncated")
            blk = np.frombuffer(buf, dtype=np.complex128).reshape(j + 1, j + 1).copy()
            blk.setflags(write=False)
            blocks.append(blk)
    spec = None
    if header.get("spec") is not None:
        sd = header["spec"]
        spec = EnsembleSpec(
            s=float(sd["s"]),
            lam=float(sd["lam"]),
            prior=_prior_from_json(sd["prior"]),
            cutoff=int(sd["cutoff"]),
            samples=int(sd["samples"]),
        )
    return EtaBlocks(
        c=c,
        blocks=tuple(blocks),
        trace_captured=float(header["trace_captured"]),
        spec=spec,
        n_samples=int(header.get("n_samples", 0)),
    )
