"""Pure-numpy implementation of the hot kernels.

Selected automatically when the compiled extension is unavailable (or when
CVBENCH_FORCE_FALLBACK=1).  Same contract as ``_gaussian_fock``:

* ``fock_batch`` runs the two-index recurrence for the Fock-basis matrix
  elements of a batch of Gaussian states, given their Bargmann-kernel
  parameters (m, r, w, C).  Output is raw (not hermitized).
* ``eta_accumulate`` forms the weighted sum-sector blocks
  ``block[j][k1, k2] = sum_i weights[i] * fa[i, k1, k2] * fb[i, j-k1, j-k2]``.

Summation over samples uses numpy reductions (pairwise summation) in a fixed
order, so results are reproducible run to run.
"""

import numpy as np

backend_name = "numpy"


def _as_batch(m, r, w, c_norm):
    arrs = np.broadcast_arrays(
        np.asarray(m, dtype=complex),
        np.asarray(r, dtype=complex),
        np.asarray(w, dtype=complex),
        np.asarray(c_norm, dtype=complex),
    )
    return [np.atleast_1d(a).ravel() for a in arrs]


def fock_batch(m, r, w, c_norm, cutoff):
    """Fock matrices ⟨k|rho|l⟩, k,l = 0..cutoff, for a batch of Gaussian states.

    Parameters are broadcast together; returns (n, cutoff+1, cutoff+1) complex.
    """
    m, r, w, c_norm = _as_batch(m, r, w, c_norm)
    n = m.shape[0]
    d = cutoff + 1
    sq = np.sqrt(np.arange(d))
    s = np.zeros((n, d, d), dtype=complex)
    s[:, 0, 0] = c_norm
    wb, mb = np.conj(w), np.conj(m)
    for l in range(cutoff):
        acc = wb * s[:, 0, l]
        if l:
            acc = acc + (sq[l] * mb) * s[:, 0, l - 1]
        s[:, 0, l + 1] = acc / sq[l + 1]
    for k in range(cutoff):
        acc = w[:, None] * s[:, k, :]
        if k:
            acc = acc + (sq[k] * m)[:, None] * s[:, k - 1, :]
        acc[:, 1:] += (r[:, None] * sq[None, 1:]) * s[:, k, :-1]
        s[:, k + 1, :] = acc / sq[k + 1]
    return s


def eta_accumulate(fa, fb, weights, cutoff):
    """Weighted accumulation of the total-photon-number sector blocks."""
    fa = np.asarray(fa, dtype=complex)
    fb = np.asarray(fb, dtype=complex)
    weights = np.asarray(weights, dtype=float)
    blocks = []
    for j in range(cutoff + 1):
        a_sub = fa[:, : j + 1, : j + 1]
        b_sub = fb[:, j::-1, :][:, :, j::-1]
        blocks.append(np.einsum("i,ikl,ikl->kl", weights, a_sub, b_sub))
    return blocks
