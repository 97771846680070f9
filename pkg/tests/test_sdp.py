import json

import numpy as np
import pytest

from cvbench.ensemble import DeltaAtOrigin, EnsembleSpec, build_eta
from cvbench.errors import DomainError, IntegrityError
from cvbench.sdp import (
    assemble_problem,
    blocks_to_dense,
    build_layout,
    certified_upper_bound,
    dense_partial_trace,
    dense_partial_transpose,
    from_objective_blocks,
    hvec,
    sector_dims,
    solution_to_json,
    solve,
    solve_projection,
    unhvec,
)


def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)


def random_problem(rng, c, scale=1.0):
    dims = sector_dims(c)
    blocks = []
    for d in dims:
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        blocks.append(scale * (g @ g.conj().T) / d)
    return from_objective_blocks(c, blocks)


def brute_force_c1(problem, grid=49, refine=4):
    """Dense grid maximization for the cutoff-1 problem (independent oracle).

    After symmetry reduction the variable is a = X_0, X_1 = [[p, z], [z*, q]],
    b = X_2 with constraints: all three blocks PSD (|z|^2 <= p q), the
    difference-sector view [[a, z], [z*, b]] PSD (|z|^2 <= a b), and row sums
    a + p <= 1, q + b <= 1.  For nonnegative scalar corner weights, b = 1 - q
    is optimal (it only loosens the |z| bound and C_2 >= 0), and the phase of
    z aligns with the off-diagonal objective entry, so |z| saturates its cap.
    """
    c0 = float(np.real(problem.objective[0][0, 0]))
    c1 = problem.objective[1]
    c2 = float(np.real(problem.objective[2][0, 0]))
    assert c0 >= 0 and c2 >= 0, "oracle assumes nonnegative corner weights"
    c1_00 = float(np.real(c1[0, 0]))
    c1_11 = float(np.real(c1[1, 1]))
    w = 2.0 * abs(c1[0, 1])

    lo = np.zeros(3)
    hi = np.ones(3)
    best = -np.inf
    for _ in range(refine):
        axes = [np.linspace(lo[i], hi[i], grid) for i in range(3)]
        a = axes[0][:, None, None]
        p = axes[1][None, :, None]
        q = axes[2][None, None, :]
        b = 1.0 - q
        zcap = np.minimum(np.sqrt(p * q), np.sqrt(a * b))
        val = c0 * a + c1_00 * p + c1_11 * q + c2 * b + w * zcap
        val = np.where(a + p <= 1.0 + 1e-12, val, -np.inf)
        flat = int(np.argmax(val))
        best = max(best, float(val.ravel()[flat]))
        idx = np.unravel_index(flat, val.shape)
        centers = [axes[i][idx[i]] for i in range(3)]
        width = (hi - lo) / (grid - 1)
        lo = np.maximum(0.0, np.array(centers) - 1.5 * width)
        hi = np.minimum(1.0, np.array(centers) + 1.5 * width)
    return best


class TestCoordinates:
    def test_hvec_roundtrip_and_isometry(self, rng):
        for d in (1, 2, 5):
            x = random_hermitian(rng, d)
            y = random_hermitian(rng, d)
            assert np.allclose(unhvec(hvec(x), d), x, atol=1e-13)
            assert np.isclose(
                float(hvec(x) @ hvec(y)), float(np.real(np.vdot(x, y))), atol=1e-12
            )

    def test_sector_dims(self):
        assert sector_dims(2) == [1, 2, 3, 2, 1]
        assert sector_dims(0) == [1]

    @pytest.mark.parametrize("c", [0, 1, 2, 3, 5])
    def test_variable_count(self, c):
        n = build_layout(c).n
        assert n == c * (c + 1) * (2 * c + 1) // 3 + (c + 1) ** 2

    def test_layout_dense_consistency(self, rng, c=3):
        layout = build_layout(c)
        x = rng.normal(size=layout.n)
        dense = blocks_to_dense(c, layout.gather_sum(x))
        # partial trace of the embedded operator is diagonal, rows match
        pt = dense_partial_trace(dense, c)
        assert np.max(np.abs(pt - np.diag(np.diagonal(pt)))) < 1e-12
        assert np.allclose(np.real(np.diagonal(pt)), layout.trace_rows(x))
        # the difference-sector gather is the partial transpose, re-blocked
        swapped = dense_partial_transpose(dense, c)
        rebuilt = np.zeros_like(dense)
        off = 0
        for blk in layout.gather_diff(x):
            d = blk.shape[0]
            rebuilt[off : off + d, off : off + d] = blk
            off += d
        evals_direct = np.sort(np.linalg.eigvalsh(swapped))
        evals_blocks = np.sort(np.linalg.eigvalsh(rebuilt))
        assert np.allclose(evals_direct, evals_blocks, atol=1e-12)


class TestProblemAssembly:
    def test_rejects_bad_blocks(self):
        with pytest.raises(IntegrityError):
            from_objective_blocks(1, [np.eye(1)] * 4)
        with pytest.raises(IntegrityError):
            from_objective_blocks(1, [np.eye(2)])
        with pytest.raises(IntegrityError):
            from_objective_blocks(1, [np.eye(1), np.array([[0, 1], [0, 0]])])

    def test_pads_and_freezes(self):
        prob = from_objective_blocks(2, [np.eye(1)])
        assert len(prob.objective) == 5
        assert all(b.shape == (d, d) for b, d in zip(prob.objective, sector_dims(2)))
        with pytest.raises(ValueError):
            prob.objective[0][0, 0] = 2.0

    def test_objective_vector_matches_value(self, rng):
        prob = random_problem(rng, 2)
        x = rng.normal(size=prob.n)
        blocks = prob.layout.gather_sum(x)
        assert np.isclose(
            float(prob.objective_vector() @ x), prob.value_of(blocks), atol=1e-11
        )


class TestInteriorPoint:
    def test_exact_vacuum_instance(self):
        e = build_eta(EnsembleSpec(s=1.0, lam=1.0, prior=DeltaAtOrigin(), cutoff=2))
        sol = solve(assemble_problem(e), tol=1e-9)
        assert sol.status == "Optimal"
        assert abs(sol.primal_value - 1.0) < 1e-7
        cert = certified_upper_bound(sol)
        assert cert >= sol.primal_value - 1e-12
        assert abs(cert - 1.0) < 1e-6

    def test_solution_is_feasible(self, rng):
        prob = random_problem(rng, 3)
        sol = solve(prob, tol=1e-8)
        c = prob.c
        dense = blocks_to_dense(c, sol.primal_blocks)
        assert np.min(np.linalg.eigvalsh(dense)) > -1e-9
        assert np.min(np.linalg.eigvalsh(dense_partial_transpose(dense, c))) > -1e-9
        rows = np.real(np.diagonal(dense_partial_trace(dense, c)))
        assert np.max(rows) <= 1.0 + 1e-9

    def test_certificate_dominates_primal(self, rng):
        for c in (1, 2, 3):
            prob = random_problem(rng, c)
            sol = solve(prob, tol=1e-8)
            cert = certified_upper_bound(sol)
            assert cert >= sol.primal_value - 1e-10
            assert cert - sol.primal_value < 1e-5

    def test_linearity_in_objective(self, rng):
        dims = sector_dims(2)
        blocks = []
        for d in dims:
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            blocks.append((g @ g.conj().T) / d)
        base = solve(from_objective_blocks(2, blocks), tol=1e-9)
        scaled = solve(
            from_objective_blocks(2, [3.7 * b for b in blocks]), tol=1e-9
        )
        assert np.isclose(scaled.primal_value, 3.7 * base.primal_value, rtol=1e-6)

    def test_matches_grid_oracle_at_cutoff_one(self, rng):
        for _ in range(5):
            blocks = [
                np.array([[rng.uniform(0.1, 1.0)]]),
                random_hermitian(rng, 2),
                np.array([[rng.uniform(0.1, 1.0)]]),
            ]
            prob = from_objective_blocks(1, blocks)
            sol = solve(prob, tol=1e-9)
            cert = certified_upper_bound(sol)
            ref = brute_force_c1(prob)
            assert abs(sol.primal_value - ref) < 1e-3
            assert cert >= ref - 1e-3

    def test_tight_tolerance_stops_gracefully(self, rng):
        prob = random_problem(rng, 2)
        sol = solve(prob, tol=1e-13, max_iter=80)
        assert sol.status in ("Optimal", "SlowProgress")
        cert = certified_upper_bound(sol)
        assert cert >= sol.primal_value - 1e-10

    def test_json_summary(self, rng):
        prob = random_problem(rng, 1)
        sol = solve(prob)
        certified_upper_bound(sol)
        payload = solution_to_json(sol)
        expected = {
            "cutoff",
            "n_variables",
            "sector_dims",
            "objective_block_norms",
            "status",
            "iterations",
            "primal_value",
            "dual_value",
            "gap",
            "certified_upper_bound",
            "warnings",
            "trace",
            "diagnostics",
        }
        assert set(payload) == expected
        json.dumps(payload)  # must be serializable as-is


class TestProjectionBackend:
    def test_agrees_with_interior_point(self, rng):
        for c in (1, 2, 3):
            prob = random_problem(rng, c)
            ip = solve(prob, tol=1e-9)
            pj = solve_projection(prob, tol=1e-7)
            assert abs(ip.primal_value - pj.value) < 1e-4

    def test_outputs_feasible_operator(self, rng):
        prob = random_problem(rng, 2)
        pj = solve_projection(prob, tol=1e-7)
        dense = pj.dense_operator
        c = prob.c
        assert np.min(np.linalg.eigvalsh(dense)) > -1e-7
        assert np.min(np.linalg.eigvalsh(dense_partial_transpose(dense, c))) > -1e-7
        rows = np.real(np.diagonal(dense_partial_trace(dense, c)))
        assert np.max(rows) <= 1.0 + 1e-7

    def test_refuses_large_cutoff(self, rng):
        prob = random_problem(rng, 1)
        big = from_objective_blocks(20, [np.eye(1)])
        assert prob is not big
        with pytest.raises(DomainError):
            solve_projection(big)
