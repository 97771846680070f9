"""Primal-dual interior-point solver for the sector-structured SDP.

The problem is solved in conic inequality form

    minimize    q . x
    subject to  G x + s = h,   s in K,

where x holds the real block coordinates, q = -hvec(C), and
K = (PSD sum sectors) x (PSD difference sectors) x (nonnegative trace rows).
G is never formed: its three slices are the sum-sector gather (negated), the
difference-sector gather (negated, a permutation), and the trace-row map.

Search directions use Nesterov-Todd scaling, computed natively on the complex
Hermitian blocks (Cholesky + SVD), with a Mehrotra predictor-corrector step.
The Schur complement is assembled per difference-sector block from closed-form
quadratic representations and factored densely — the only O(n^2) object.

After the iteration stops, the primal iterate is repaired to exact feasibility
(eigenvalue clip, isotropic shift, trace rescale) so the reported primal value
is a true lower bound on the SDP optimum; `certified_upper_bound` does the
mirror-image repair on the dual iterate to produce a rigorous upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky, eigh, solve_triangular, svd

from ..errors import IntegrityError

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# cone points


class ConePoint:
    """A point in K: Hermitian blocks for both sector families + a vector."""

    __slots__ = ("a", "b", "lin")

    def __init__(self, a, b, lin):
        self.a = a
        self.b = b
        self.lin = lin

    @classmethod
    def identity(cls, layout) -> "ConePoint":
        return cls(
            [np.eye(d, dtype=complex) for d in layout.dims],
            [np.eye(d, dtype=complex) for d in layout.diff_dims],
            np.ones(len(layout.trace_coords)),
        )

    @classmethod
    def zeros(cls, layout) -> "ConePoint":
        return cls(
            [np.zeros((d, d), dtype=complex) for d in layout.dims],
            [np.zeros((d, d), dtype=complex) for d in layout.diff_dims],
            np.zeros(len(layout.trace_coords)),
        )

    def copy(self) -> "ConePoint":
        return ConePoint(
            [m.copy() for m in self.a], [m.copy() for m in self.b], self.lin.copy()
        )

    def inner(self, other: "ConePoint") -> float:
        tot = float(np.dot(self.lin, other.lin))
        for x, y in zip(self.a, other.a):
            tot += float(np.real(np.vdot(x, y)))
        for x, y in zip(self.b, other.b):
            tot += float(np.real(np.vdot(x, y)))
        return tot

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self), 0.0))

    def axpy(self, alpha: float, other: "ConePoint") -> None:
        for m, dm in zip(self.a, other.a):
            m += alpha * dm
        for m, dm in zip(self.b, other.b):
            m += alpha * dm
        self.lin += alpha * other.lin

    def combo(self, alpha: float, other: "ConePoint") -> "ConePoint":
        out = self.copy()
        out.axpy(alpha, other)
        return out


def _apply_G(layout, x: np.ndarray) -> ConePoint:
    """G x = (-sum-sector view, -difference-sector view, trace rows)."""
    return ConePoint(
        [-blk for blk in layout.gather_sum(x)],
        [-blk for blk in layout.gather_diff(x)],
        layout.trace_rows(x),
    )


def _apply_Gt(layout, z: ConePoint) -> np.ndarray:
    out = np.zeros(layout.n)
    layout.scatter_sum([-blk for blk in z.a], out)
    layout.scatter_diff([-blk for blk in z.b], out)
    layout.scatter_trace(z.lin, out)
    return out


# ---------------------------------------------------------------------------
# Nesterov-Todd scaling


class _NTBlock:
    """NT scaling for one Hermitian PSD block pair (s, z)."""

    __slots__ = ("r", "rinv", "lam", "theta_inv", "ls")

    def __init__(self, s: np.ndarray, z: np.ndarray):
        self.ls = cholesky(s, lower=True)
        lz = cholesky(z, lower=True)
        u, sv, vh = svd(lz.conj().T @ self.ls)
        sv = np.maximum(sv, 1e-300)
        self.lam = sv
        self.r = self.ls @ (vh.conj().T * (sv**-0.5)[None, :])
        self.rinv = (sv**-0.5)[:, None] * (u.conj().T @ lz.conj().T)
        self.theta_inv = self.rinv.conj().T @ self.rinv

    def scale_s(self, ds: np.ndarray) -> np.ndarray:
        """R^{-1} ds R^{-dagger} (s-space to scaled space)."""
        return self.rinv @ ds @ self.rinv.conj().T

    def scale_z(self, dz: np.ndarray) -> np.ndarray:
        """R^dagger dz R (z-space to scaled space)."""
        return self.r.conj().T @ dz @ self.r

    def unscale_to_s(self, m: np.ndarray) -> np.ndarray:
        return self.r @ m @ self.r.conj().T

    def inv_w2(self, u: np.ndarray) -> np.ndarray:
        """(W^T W)^{-1} u = Theta^{-1} u Theta^{-1}."""
        return self.theta_inv @ u @ self.theta_inv


class _Scaling:
    def __init__(self, s: ConePoint, z: ConePoint):
        self.a = [_NTBlock(sb, zb) for sb, zb in zip(s.a, z.a)]
        self.b = [_NTBlock(sb, zb) for sb, zb in zip(s.b, z.b)]
        self.w_lin = np.sqrt(s.lin / z.lin)
        self.lam_lin = np.sqrt(s.lin * z.lin)

    def inv_w2(self, u: ConePoint) -> ConePoint:
        return ConePoint(
            [blk.inv_w2(m) for blk, m in zip(self.a, u.a)],
            [blk.inv_w2(m) for blk, m in zip(self.b, u.b)],
            u.lin / (self.w_lin**2),
        )


def _quad_rep(g: np.ndarray) -> np.ndarray:
    """Matrix of x -> hvec(G unhvec(x) G) in the real block coordinates.

    G must be Hermitian; the result is symmetric of size d^2.
    """
    d = g.shape[0]
    if d == 1:
        return np.array([[float(g[0, 0].real) ** 2]])
    gc = np.conj(g)
    p_, q_ = np.triu_indices(d, 1)
    no = p_.size
    out = np.empty((d * d, d * d))
    out[:d, :d] = np.abs(g) ** 2
    t = g[:, p_] * gc[:, q_]
    out[:d, d : d + no] = _SQRT2 * t.real
    out[:d, d + no :] = -_SQRT2 * t.imag
    x1 = g[np.ix_(q_, p_)] * gc[np.ix_(p_, q_)]
    x2 = g[np.ix_(q_, q_)] * gc[np.ix_(p_, p_)]
    out[d : d + no, d : d + no] = x1.real + x2.real
    out[d : d + no, d + no :] = x2.imag - x1.imag
    out[d + no :, d + no :] = x2.real - x1.real
    out[d : d + no, :d] = out[:d, d : d + no].T
    out[d + no :, :d] = out[:d, d + no :].T
    out[d + no :, d : d + no] = out[d : d + no, d + no :].T
    return out


def _min_eig_ratio(ls: np.ndarray, dmat: np.ndarray) -> float:
    """Smallest eigenvalue of Ls^{-1} dmat Ls^{-dagger} for step-length bounds."""
    t1 = solve_triangular(ls, dmat, lower=True)
    t2 = solve_triangular(ls, t1.conj().T, lower=True)
    return float(eigh(0.5 * (t2 + t2.conj().T), eigvals_only=True)[0].real)


def _max_step(s: ConePoint, ds: ConePoint, scaling: _Scaling) -> float:
    """Largest alpha in [0, 1] with s + alpha ds in the cone (boundary factor 1)."""
    alpha = 1.0
    for blk, dm in zip(scaling.a, ds.a):
        lo = _min_eig_ratio(blk.ls, dm)
        if lo < 0:
            alpha = min(alpha, -1.0 / lo)
    for blk, dm in zip(scaling.b, ds.b):
        lo = _min_eig_ratio(blk.ls, dm)
        if lo < 0:
            alpha = min(alpha, -1.0 / lo)
    neg = ds.lin < 0
    if np.any(neg):
        alpha = min(alpha, float(np.min(-s.lin[neg] / ds.lin[neg])))
    return alpha


def _max_step_z(z: ConePoint, dz: ConePoint) -> float:
    alpha = 1.0
    for m, dm in zip(z.a, dz.a):
        ls = cholesky(m, lower=True)
        lo = _min_eig_ratio(ls, dm)
        if lo < 0:
            alpha = min(alpha, -1.0 / lo)
    for m, dm in zip(z.b, dz.b):
        ls = cholesky(m, lower=True)
        lo = _min_eig_ratio(ls, dm)
        if lo < 0:
            alpha = min(alpha, -1.0 / lo)
    neg = dz.lin < 0
    if np.any(neg):
        alpha = min(alpha, float(np.min(-z.lin[neg] / dz.lin[neg])))
    return alpha


# ---------------------------------------------------------------------------
# Schur complement


def _assemble_schur(layout, scaling: _Scaling) -> np.ndarray:
    """M = G^T (W^T W)^{-1} G, assembled blockwise in x coordinates."""
    n = layout.n
    m = np.zeros((n, n))
    # sum sectors: contiguous slices
    for off, d, blk in zip(layout.offsets, layout.dims, scaling.a):
        sl = slice(off, off + d * d)
        m[sl, sl] += _quad_rep(blk.theta_inv)
    # difference sectors: scattered via permutations
    for perm, blk in zip(layout.perms, scaling.b):
        m[np.ix_(perm, perm)] += _quad_rep(blk.theta_inv)
    # trace rows: rank-structured diagonal updates
    d_lin = 1.0 / (scaling.w_lin**2)
    for a, idx in enumerate(layout.trace_coords):
        m[np.ix_(idx, idx)] += d_lin[a]
    return m


def _factor_schur(m: np.ndarray, diagnostics: dict):
    base = float(np.mean(np.diagonal(m)))
    for reg in (0.0, 1e-12, 1e-9, 1e-6):
        try:
            m2 = m if reg == 0.0 else m + (reg * base) * np.eye(m.shape[0])
            return cho_factor(m2, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            diagnostics["schur_regularizations"] = (
                diagnostics.get("schur_regularizations", 0) + 1
            )
    raise IntegrityError("Schur complement factorization failed after regularization")


# ---------------------------------------------------------------------------
# solution container


@dataclass
class SdpSolution:
    """Outcome of a structured SDP solve (maximization convention)."""

    problem: object
    status: str
    iterations: int
    primal_blocks: list
    primal_value: float
    dual_value: float
    gap: float
    dual_y: np.ndarray
    dual_V: list
    dual_S: list
    trace: list = field(default_factory=list)
    certified: float | None = None
    warnings: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def solution_to_json(sol: SdpSolution) -> dict:
    """JSON-serializable summary of a solve (no large arrays)."""
    prob = sol.problem
    return {
        "cutoff": prob.c,
        "n_variables": prob.n,
        "sector_dims": list(prob.layout.dims),
        "objective_block_norms": [
            float(np.linalg.norm(b)) for b in prob.objective
        ],
        "status": sol.status,
        "iterations": sol.iterations,
        "primal_value": sol.primal_value,
        "dual_value": sol.dual_value,
        "gap": sol.gap,
        "certified_upper_bound": sol.certified,
        "warnings": list(sol.warnings),
        "trace": sol.trace,
        "diagnostics": {
            k: v for k, v in sol.diagnostics.items() if np.isscalar(v)
        },
    }


# ---------------------------------------------------------------------------
# main solver


def solve(problem, tol: float = 1e-7, max_iter: int = 60, verbose: bool = False,
          callback=None) -> SdpSolution:
    """Solve the block SDP with an NT-scaled predictor-corrector method.

    Returns an :class:`SdpSolution` whose `primal_value` is evaluated on a
    repaired, exactly feasible primal point (a true lower bound), and whose
    dual fields hold the raw dual iterate for later certification.
    """
    layout = problem.layout
    n = layout.n
    q = -problem.objective_vector()
    n_lin = len(layout.trace_coords)
    nu = float(sum(layout.dims) + sum(layout.diff_dims) + n_lin)
    norm_h = math.sqrt(n_lin)
    norm_q = max(1.0, float(np.linalg.norm(q)))

    x = np.zeros(n)
    s = ConePoint.identity(layout)
    z = ConePoint.identity(layout)
    h = ConePoint.zeros(layout)
    h.lin = np.ones(n_lin)

    diagnostics: dict = {}
    trace_rows: list = []
    status = "SlowProgress"
    best_metric = math.inf
    stall = 0
    it = 0

    for it in range(1, max_iter + 1):
        # residuals: r_d = q + G^T z ; r_p = G x + s - h
        r_d = q + _apply_Gt(layout, z)
        gx = _apply_G(layout, x)
        r_p = gx.copy()
        r_p.axpy(1.0, s)
        r_p.axpy(-1.0, h)

        mu = s.inner(z) / nu
        pobj = float(np.dot(q, x))
        dobj = -h.inner(z)
        pres = r_p.norm() / max(1.0, norm_h)
        dres = float(np.linalg.norm(r_d)) / norm_q
        gap_rel = s.inner(z) / max(1.0, abs(pobj))
        trace_rows.append(
            {
                "iter": it,
                "primal": -pobj,
                "dual": -dobj,
                "mu": mu,
                "pres": pres,
                "dres": dres,
                "relgap": gap_rel,
            }
        )
        if callback is not None:
            callback(trace_rows[-1])
        if verbose:
            print(
                f"  it {it:3d}  primal {-pobj:+.9e}  dual {-dobj:+.9e}  "
                f"mu {mu:8.2e}  pres {pres:8.2e}  dres {dres:8.2e}"
            )
        if pres <= tol and dres <= tol and gap_rel <= tol:
            status = "Optimal"
            break
        metric = max(pres, dres, gap_rel)
        if metric < 0.9 * best_metric:
            best_metric = metric
            stall = 0
        else:
            stall += 1
            if stall >= 12:
                status = "SlowProgress"
                break

        try:
            scaling = _Scaling(s, z)
        except np.linalg.LinAlgError:
            # an s/z block hit the cone boundary within rounding error:
            # float64 cannot push the complementarity gap further, so stop
            # with the current iterate (repair/certification stay rigorous)
            diagnostics["numerical_breakdown_iter"] = it
            status = "SlowProgress"
            break
        m_schur = _assemble_schur(layout, scaling)
        factor = _factor_schur(m_schur, diagnostics)

        def kkt_solve(bx, bz, bs):
            rhs_pt = scaling.inv_w2(bz.combo(-1.0, bs))
            rhs = -bx - _apply_Gt(layout, rhs_pt)
            dx = cho_solve(factor, rhs, check_finite=False)
            gdx = _apply_G(layout, dx)
            dz = scaling.inv_w2(gdx.combo(1.0, bz.combo(-1.0, bs)))
            ds = bz.copy()
            ds.axpy(1.0, gdx)
            for mmat in ds.a:
                mmat *= -1.0
            for mmat in ds.b:
                mmat *= -1.0
            ds.lin *= -1.0
            return dx, gdx, dz, ds

        # predictor (affine) direction: bs = s  (scaled target lambda o lambda)
        dx_a, _, dz_a, ds_a = kkt_solve(r_d, r_p, s)
        alpha_p = _max_step(s, ds_a, scaling)
        alpha_d = _max_step_z(z, dz_a)
        alpha_aff = min(alpha_p, alpha_d)
        mu_aff = s.combo(alpha_aff, ds_a).inner(z.combo(alpha_aff, dz_a)) / nu
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        # corrector: scaled-space target lambda^2 + correction - sigma mu I
        bs = ConePoint.zeros(layout)
        for i, blk in enumerate(scaling.a):
            dsl = blk.scale_s(ds_a.a[i])
            dzl = blk.scale_z(dz_a.a[i])
            corr = 0.5 * (dsl @ dzl + dzl @ dsl)
            lam = blk.lam
            tgt = np.diag(lam**2 - sigma * mu) + corr
            tgt = 0.5 * (tgt + tgt.conj().T)
            tgt *= 2.0 / (lam[:, None] + lam[None, :])
            bs.a[i] = blk.unscale_to_s(tgt)
        for i, blk in enumerate(scaling.b):
            dsl = blk.scale_s(ds_a.b[i])
            dzl = blk.scale_z(dz_a.b[i])
            corr = 0.5 * (dsl @ dzl + dzl @ dsl)
            lam = blk.lam
            tgt = np.diag(lam**2 - sigma * mu) + corr
            tgt = 0.5 * (tgt + tgt.conj().T)
            tgt *= 2.0 / (lam[:, None] + lam[None, :])
            bs.b[i] = blk.unscale_to_s(tgt)
        bs.lin = s.lin + (ds_a.lin * dz_a.lin - sigma * mu) / z.lin

        dx, _, dz, ds = kkt_solve(r_d, r_p, bs)
        alpha = 0.98 * min(_max_step(s, ds, scaling), _max_step_z(z, dz))
        alpha = min(alpha, 1.0)
        x += alpha * dx
        s.axpy(alpha, ds)
        z.axpy(alpha, dz)
        trace_rows[-1]["sigma"] = sigma
        trace_rows[-1]["step"] = alpha
    else:
        status = "SlowProgress"

    # ----- primal repair to exact feasibility -----
    blocks, repair = _repair_primal(layout, x)
    diagnostics.update(repair)
    primal_value = problem.value_of(blocks)

    dual_y = z.lin.copy()
    dual_v = [m.copy() for m in z.b]
    dual_s = [m.copy() for m in z.a]
    dual_value = float(np.sum(dual_y))

    sol = SdpSolution(
        problem=problem,
        status=status,
        iterations=it,
        primal_blocks=blocks,
        primal_value=primal_value,
        dual_value=dual_value,
        gap=abs(dual_value - primal_value),
        dual_y=dual_y,
        dual_V=dual_v,
        dual_S=dual_s,
        trace=trace_rows,
        diagnostics=diagnostics,
    )
    return sol


def _repair_primal(layout, x: np.ndarray):
    """Project the iterate to an exactly feasible point (clip, shift, rescale)."""
    blocks = layout.gather_sum(x)
    clipped = []
    for blk in blocks:
        w, v = eigh(blk)
        clipped.append((v * np.maximum(w, 0.0)) @ v.conj().T)
    vec = np.zeros(layout.n)
    layout.scatter_sum(clipped, vec)
    lam_min = 0.0
    for blk in layout.gather_diff(vec):
        lam_min = min(lam_min, float(eigh(blk, eigvals_only=True)[0].real))
    shift = -lam_min
    if shift > 0.0:
        clipped = [blk + shift * np.eye(blk.shape[0]) for blk in clipped]
        vec = np.zeros(layout.n)
        layout.scatter_sum(clipped, vec)
    rows = layout.trace_rows(vec)
    scale = max(1.0, float(np.max(rows)))
    if scale > 1.0:
        clipped = [blk / scale for blk in clipped]
    return clipped, {"repair_shift": shift, "repair_scale": scale}


def certified_upper_bound(sol: SdpSolution) -> float:
    """Rigorous upper bound on the SDP value from the (repaired) dual iterate.

    The dual certificate is (y >= 0, V >= 0) with
    S = T^*(y) - Gamma^*(V) - C >= 0, giving bound sum_a y_a.  The iterate is
    repaired: y is clipped nonnegative, V eigenvalue-clipped, S recomputed
    exactly and its most-negative eigenvalue absorbed into y (the adjoint of
    the trace map covers every diagonal, so a uniform increase of y shifts
    every sum-sector block of S by the identity).
    """
    problem = sol.problem
    layout = problem.layout
    y = np.maximum(sol.dual_y, 0.0)
    v_clip = []
    for blk in sol.dual_V:
        w, vecs = eigh(blk)
        v_clip.append((vecs * np.maximum(w, 0.0)) @ vecs.conj().T)
    # S = T^*(y) - Gamma^*(V) - C, assembled in x coordinates
    vec = np.zeros(layout.n)
    layout.scatter_trace(y, vec)
    layout.scatter_diff([-blk for blk in v_clip], vec)
    vec -= problem.objective_vector()
    s_blocks = layout.gather_sum(vec)
    lam_min = min(
        float(eigh(blk, eigvals_only=True)[0].real) for blk in s_blocks
    )
    inflation = max(0.0, -lam_min)
    y = y + inflation
    bound = float(np.sum(y))
    sol.diagnostics["certificate_inflation"] = inflation
    if inflation > 0.01:
        sol.warnings.append(
            f"dual certificate needed inflation {inflation:.3e}; "
            "bound may be loose — consider more iterations or a tighter tol"
        )
    sol.certified = bound
    return bound
