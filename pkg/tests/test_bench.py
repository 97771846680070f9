import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from cvbench.bench import (
    BenchmarkReport,
    benchmark_pipeline,
    operator_norm,
    random_separable_choi,
    sample_doubling_delta,
    write_csv,
)
from cvbench.ensemble import DeltaAtOrigin, EnsembleSpec, GaussianIsotropic
from cvbench.errors import DomainError

SCHEMA_PATH = (
    Path(__file__).resolve().parents[1]
    / "src"
    / "cvbench"
    / "schemas"
    / "benchmark_report.schema.json"
)


def delta_spec(c=4):
    return EnsembleSpec(s=1.0, lam=1.0, prior=DeltaAtOrigin(), cutoff=c)


class TestOperatorNorm:
    def test_known_values(self):
        assert np.isclose(operator_norm(np.diag([0.2, -3.0, 1.0])), 3.0)
        assert np.isclose(operator_norm(np.eye(4)), 1.0)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            operator_norm(np.ones((2, 3)))
        with pytest.raises(DomainError):
            operator_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSeparableChoi:
    @pytest.mark.parametrize("seed", range(10))
    def test_structure(self, seed):
        c = 4
        d = c + 1
        j = random_separable_choi(c, terms=5, seed=seed)
        assert j.shape == (d * d, d * d)
        assert np.max(np.abs(j - j.conj().T)) < 1e-12
        assert np.min(np.linalg.eigvalsh(j)) > -1e-11
        # identity partial trace over B, hence total trace d
        pt = np.einsum("abcb->ac", j.reshape(d, d, d, d))
        assert np.allclose(pt, np.eye(d), atol=1e-10)
        assert np.isclose(np.real(np.trace(j)), d, atol=1e-10)

    def test_single_term(self):
        j = random_separable_choi(3, terms=1, seed=7)
        pt = np.einsum("abcb->ac", j.reshape(4, 4, 4, 4))
        assert np.allclose(pt, np.eye(4), atol=1e-10)

    def test_deterministic_in_seed(self):
        a = random_separable_choi(2, terms=4, seed=11)
        b = random_separable_choi(2, terms=4, seed=11)
        assert np.array_equal(a, b)
        assert not np.allclose(a, random_separable_choi(2, terms=4, seed=12))

    def test_rejects_bad_terms(self):
        with pytest.raises(DomainError):
            random_separable_choi(2, terms=0, seed=0)


class TestPipeline:
    def test_vacuum_reaches_unity(self):
        report = benchmark_pipeline(delta_spec(), tol=1e-9)
        assert abs(report.f_finite - 1.0) < 1e-6
        assert report.eps_error < 1e-12
        assert abs(report.f_infinite - 1.0) < 1e-6

    def test_report_invariants(self):
        report = benchmark_pipeline(
            EnsembleSpec(
                s=1.0,
                lam=1.0,
                prior=GaussianIsotropic(alpha=0.5),
                cutoff=6,
                samples=1024,
            )
        )
        assert report.f_infinite == pytest.approx(
            report.f_finite + report.eps_error, abs=1e-14
        )
        assert 0.0 <= report.gap < 1e-4
        assert 0.0 < report.trace_captured <= 1.0 + 1e-12
        assert report.timings["wall_ms"] > 0

    def test_certified_side_of_gap(self):
        # f_finite is the certified (dual) bound: it must sit above the
        # repaired primal value by exactly the reported gap
        report = benchmark_pipeline(delta_spec(c=3))
        assert report.gap >= 0.0

    def test_json_payload_matches_schema(self):
        schema = json.loads(SCHEMA_PATH.read_text())
        report = benchmark_pipeline(delta_spec(c=3))
        payload = report.to_json_dict(reproducible=True)
        jsonschema.validate(payload, schema)
        assert payload["wall_ms"] == 0
        assert set(payload) == {
            "schema",
            "spec",
            "f_finite",
            "eps_error",
            "f_infinite",
            "gap",
            "trace_captured",
            "samples",
            "wall_ms",
        }

    def test_reproducible_payload_is_stable(self):
        a = benchmark_pipeline(delta_spec(c=3)).to_json_dict(reproducible=True)
        b = benchmark_pipeline(delta_spec(c=3)).to_json_dict(reproducible=True)
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_csv_row_matches_json(self):
        report = benchmark_pipeline(delta_spec(c=3))
        header, row = report.to_csv_row(reproducible=True)
        assert len(header) == len(row)
        d = dict(zip(header, row))
        payload = report.to_json_dict(reproducible=True)
        assert d["f_finite"] == payload["f_finite"]
        assert d["f_infinite"] == payload["f_infinite"]

    def test_sample_doubling_probe(self):
        spec = EnsembleSpec(
            s=1.0,
            lam=1.0,
            prior=GaussianIsotropic(alpha=1.0),
            cutoff=4,
            samples=512,
        )
        probe = sample_doubling_delta(spec)
        assert probe["samples_half"] == 256
        assert 0.0 <= probe["doubling_delta"] < 1e-2
        with pytest.raises(DomainError):
            sample_doubling_delta(
                EnsembleSpec(
                    s=1.0,
                    lam=1.0,
                    prior=GaussianIsotropic(alpha=1.0),
                    cutoff=2,
                    samples=1,
                )
            )

    def test_report_consistency_guard(self):
        spec = delta_spec(c=2)
        report = benchmark_pipeline(spec)
        with pytest.raises(Exception):
            BenchmarkReport(
                spec=spec,
                f_finite=report.f_finite,
                eps_error=report.eps_error,
                f_infinite=report.f_finite + report.eps_error + 1.0,
                certified=report.certified,
                gap=report.gap,
                trace_captured=report.trace_captured,
                timings=dict(report.timings),
                warnings=report.warnings,
            )


class TestCsvWriter:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "table.csv"
        write_csv(path, ("x", "y"), [(1, 2.5), (3, 4.0)])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,y"
        assert lines[1] == "1,2.5"
