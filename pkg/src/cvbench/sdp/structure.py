"""Sector structure of the benchmark SDP.

The bipartite operator variable lives on the doubly-truncated Fock space
span{|k>_A |l>_B : k, l = 0..c}.  Ensemble symmetry restricts it to be block
diagonal over the *sum sectors* j = k + l = 0..2c; block j has dimension
d_j = min(j, c) - max(0, j - c) + 1.  Under that symmetry:

* the partial transpose is block diagonal over the *difference sectors*
  m = k - l = -c..c, and — in the real coordinates used here — difference-
  sector blocks are a pure re-indexing (a permutation, no sign flips) of the
  sum-sector blocks: entry ((a, a-m), (a', a'-m)) of sector m equals entry
  (a, a') of block j = a + a' - m;
* the partial trace over B is diagonal: row a of Tr_B is
  t_a = sum_{j=a}^{a+c} (X_j)_{a,a}, exactly c+1 terms.

Real coordinates ("hvec"): a Hermitian d x d block maps to d^2 reals ordered
[diagonal (d) | sqrt(2)*Re upper (row-major) | sqrt(2)*Im upper], which makes
the real inner product x . y equal to Tr(XY).

The layout is verified numerically at construction against a dense
reconstruction (partial transpose via axis permutation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..ensemble import EtaBlocks
from ..errors import DomainError, IntegrityError

_SQRT2 = math.sqrt(2.0)


def hvec(x: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix; inner products are preserved."""
    d = x.shape[0]
    v = np.empty(d * d)
    v[:d] = np.real(np.diagonal(x))
    if d > 1:
        iu = np.triu_indices(d, 1)
        off = x[iu]
        npair = off.size
        v[d : d + npair] = _SQRT2 * off.real
        v[d + npair :] = _SQRT2 * off.imag
    return v


def unhvec(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`hvec`."""
    x = np.zeros((d, d), dtype=complex)
    if d > 1:
        iu = np.triu_indices(d, 1)
        npair = iu[0].size
        x[iu] = (v[d : d + npair] + 1j * v[d + npair :]) / _SQRT2
        x += x.conj().T
    x[np.diag_indices(d)] = v[:d]
    return x


def sector_dims(c: int) -> list[int]:
    """Dimensions of the sum-sector blocks j = 0..2c."""
    return [min(j, c) - max(0, j - c) + 1 for j in range(2 * c + 1)]


@dataclass(frozen=True)
class SectorLayout:
    """Index maps between the block variable and its two sector views."""

    c: int
    dims: tuple            # sum-sector block dims, j = 0..2c
    kmin: tuple            # lowest A-photon index of each sum sector
    offsets: tuple         # x-vector offset of each sum-sector block
    n: int                 # total real dimension
    diff_dims: tuple       # difference-sector dims, index t = m + c
    perms: tuple           # x-coordinates of each difference sector, hvec order
    trace_coords: tuple    # x-coordinates of the diagonal entries at A-level a

    def gather_sum(self, x: np.ndarray) -> list[np.ndarray]:
        return [
            unhvec(x[o : o + d * d], d) for o, d in zip(self.offsets, self.dims)
        ]

    def gather_diff(self, x: np.ndarray) -> list[np.ndarray]:
        return [unhvec(x[p], d) for p, d in zip(self.perms, self.diff_dims)]

    def scatter_sum(self, blocks, out: np.ndarray) -> None:
        for o, d, blk in zip(self.offsets, self.dims, blocks):
            out[o : o + d * d] += hvec(blk)

    def scatter_diff(self, blocks, out: np.ndarray) -> None:
        for p, blk in zip(self.perms, blocks):
            out[p] += hvec(blk)

    def trace_rows(self, x: np.ndarray) -> np.ndarray:
        return np.array([x[idx].sum() for idx in self.trace_coords])

    def scatter_trace(self, y: np.ndarray, out: np.ndarray) -> None:
        for a, idx in enumerate(self.trace_coords):
            out[idx] += y[a]


def _pair_pos(p: int, q: int, d: int) -> int:
    """Row-major position of upper pair (p, q), p < q, among the d(d-1)/2 pairs."""
    return p * (2 * d - p - 1) // 2 + (q - p - 1)


@lru_cache(maxsize=16)
def build_layout(c: int) -> SectorLayout:
    if c < 0:
        raise DomainError(f"cutoff must be >= 0, got {c}")
    dims = sector_dims(c)
    kmin = [max(0, j - c) for j in range(2 * c + 1)]
    offsets = np.concatenate([[0], np.cumsum([d * d for d in dims])])
    n = int(offsets[-1])

    def diag_coord(j, k):
        return int(offsets[j] + (k - kmin[j]))

    def pair_coords(j, k1, k2):
        d = dims[j]
        npair = d * (d - 1) // 2
        t = _pair_pos(k1 - kmin[j], k2 - kmin[j], d)
        base = int(offsets[j] + d)
        return base + t, base + npair + t

    diff_dims = []
    perms = []
    for m in range(-c, c + 1):
        amin, amax = max(0, m), c + min(0, m)
        dm = amax - amin + 1
        idx_diag = []
        idx_re = []
        idx_im = []
        for i1 in range(dm):
            a1 = amin + i1
            idx_diag.append(diag_coord(2 * a1 - m, a1))
            for i2 in range(i1 + 1, dm):
                a2 = amin + i2
                re, im = pair_coords(a1 + a2 - m, a1, a2)
                idx_re.append(re)
                idx_im.append(im)
        diff_dims.append(dm)
        perms.append(np.array(idx_diag + idx_re + idx_im, dtype=np.intp))

    trace_coords = tuple(
        np.array([diag_coord(j, a) for j in range(a, a + c + 1)], dtype=np.intp)
        for a in range(c + 1)
    )

    layout = SectorLayout(
        c=c,
        dims=tuple(dims),
        kmin=tuple(kmin),
        offsets=tuple(int(o) for o in offsets[:-1]),
        n=n,
        diff_dims=tuple(diff_dims),
        perms=tuple(perms),
        trace_coords=trace_coords,
    )
    _verify_layout(layout)
    return layout


def _verify_layout(layout: SectorLayout) -> None:
    """Check the two sector views against a dense reconstruction."""
    c = layout.c
    rng = np.random.default_rng(2024)
    x = rng.standard_normal(layout.n)
    blocks = layout.gather_sum(x)
    dense = blocks_to_dense(c, blocks)
    # partial trace of a sum-sector-symmetric operator is diagonal
    tr_b = dense_partial_trace(dense, c)
    if np.max(np.abs(tr_b - np.diag(np.diagonal(tr_b)))) > 1e-12:
        raise IntegrityError("partial trace not diagonal under sector symmetry")
    if np.max(np.abs(np.diagonal(tr_b).real - layout.trace_rows(x))) > 1e-10:
        raise IntegrityError("trace-row index map disagrees with dense partial trace")
    # partial transpose is block diagonal over difference sectors
    pt = dense_partial_transpose(dense, c)
    diff = layout.gather_diff(x)
    seen = np.zeros(pt.shape, dtype=bool)
    for m, blk in zip(range(-c, c + 1), diff):
        amin = max(0, m)
        rows = np.array([a * (c + 1) + (a - m) for a in range(amin, amin + blk.shape[0])])
        sub = pt[np.ix_(rows, rows)]
        if np.max(np.abs(sub - blk)) > 1e-10:
            raise IntegrityError(f"difference-sector {m} disagrees with dense transpose")
        seen[np.ix_(rows, rows)] = True
    outside = pt[~seen]
    if outside.size and np.max(np.abs(outside)) > 1e-12:
        raise IntegrityError("partial transpose has weight outside difference sectors")


def blocks_to_dense(c: int, blocks) -> np.ndarray:
    """Embed sum-sector blocks into the dense (c+1)^2-dimensional operator."""
    dim = (c + 1) ** 2
    out = np.zeros((dim, dim), dtype=complex)
    for j, blk in enumerate(blocks):
        ks = np.arange(max(0, j - c), min(j, c) + 1)
        rows = ks * (c + 1) + (j - ks)
        out[np.ix_(rows, rows)] += blk
    return out


def dense_partial_transpose(x: np.ndarray, c: int) -> np.ndarray:
    """Partial transpose over subsystem B of a dense bipartite operator."""
    d = c + 1
    return x.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)


def dense_partial_trace(x: np.ndarray, c: int) -> np.ndarray:
    """Partial trace over subsystem B of a dense bipartite operator."""
    d = c + 1
    return np.einsum("abcb->ac", x.reshape(d, d, d, d))


@dataclass(frozen=True)
class BlockSdp:
    """The sector-structured SDP: objective blocks + index layout.

    maximize   sum_j Tr(C_j X_j)
    subject to X_j >= 0,  difference-sector views >= 0,  trace rows <= 1.
    """

    c: int
    objective: tuple
    layout: SectorLayout = field(repr=False)

    @property
    def n(self) -> int:
        return self.layout.n

    def objective_vector(self) -> np.ndarray:
        v = np.zeros(self.n)
        self.layout.scatter_sum(self.objective, v)
        return v

    def value_of(self, blocks) -> float:
        return float(
            sum(np.real(np.vdot(cb, xb)) for cb, xb in zip(self.objective, blocks))
        )


def from_objective_blocks(c: int, blocks) -> BlockSdp:
    """Build a BlockSdp from explicit objective blocks (j = 0..len-1, padded to 2c)."""
    layout = build_layout(c)
    dims = layout.dims
    if len(blocks) > 2 * c + 1:
        raise IntegrityError(f"too many objective blocks for cutoff {c}")
    padded = []
    for j in range(2 * c + 1):
        if j < len(blocks):
            blk = np.asarray(blocks[j], dtype=complex)
            if blk.shape != (dims[j], dims[j]):
                raise IntegrityError(
                    f"objective block {j} has shape {blk.shape}, expected {(dims[j], dims[j])}"
                )
            if np.max(np.abs(blk - blk.conj().T)) > 1e-10:
                raise IntegrityError(f"objective block {j} not Hermitian")
            blk = 0.5 * (blk + blk.conj().T)
        else:
            blk = np.zeros((dims[j], dims[j]), dtype=complex)
        blk.setflags(write=False)
        padded.append(blk)
    return BlockSdp(c=c, objective=tuple(padded), layout=layout)


def assemble_problem(e: EtaBlocks) -> BlockSdp:
    """Assemble the benchmark SDP from ensemble blocks (validates the layout)."""
    e.validate()
    return from_objective_blocks(e.c, e.blocks)
