import csv
import io
import json
from pathlib import Path

import jsonschema
import pytest

from cvbench.cli import main

SCHEMA = json.loads(
    (
        Path(__file__).resolve().parents[1]
        / "src"
        / "cvbench"
        / "schemas"
        / "benchmark_report.schema.json"
    ).read_text()
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestArgHandling:
    def test_no_command_is_usage_error(self, capsys):
        code, _, err = run(capsys, *[])
        assert code == 2

    def test_unknown_command(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 2

    def test_benchmark_requires_exactly_one_prior(self, capsys):
        code, _, _ = run(capsys, "benchmark", "--squeezing", "1", "--loss", "1")
        assert code == 2
        code, _, _ = run(
            capsys, "benchmark", "--squeezing", "1", "--loss", "1", "--alpha", "0.5", "--delta"
        )
        assert code == 2

    def test_domain_error_exits_2(self, capsys):
        code, _, err = run(
            capsys, "analytic", "--squeezing", "-3"
        )
        assert code == 2
        assert "error" in err.lower()


class TestAnalytic:
    def test_unit_squeezing_values(self, capsys):
        code, out, _ = run(capsys, "analytic", "--squeezing", "1")
        assert code == 0
        payload = json.loads(out)
        assert payload["pure_benchmark"] == pytest.approx(0.5, abs=1e-12)
        assert payload["uhlmann_bound"] == pytest.approx(0.5, abs=1e-12)

    def test_coherent_value_included_with_alpha(self, capsys):
        code, out, _ = run(
            capsys, "analytic", "--squeezing", "2", "--noise", "0.5", "--alpha", "1"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["coherent_gaussian_benchmark"] == pytest.approx(0.75, abs=1e-12)
        assert 0 < payload["mixed_benchmark"] < 1

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "values.json"
        code, out, _ = run(
            capsys, "analytic", "--squeezing", "4", "--out", str(target)
        )
        assert code == 0
        assert json.loads(target.read_text())["pure_benchmark"] == pytest.approx(
            2.0 / 5.0, abs=1e-12
        )


class TestBenchmark:
    def test_delta_prior_json(self, capsys):
        code, out, _ = run(
            capsys,
            "benchmark",
            "--squeezing", "1",
            "--loss", "1",
            "--delta",
            "--cutoff", "4",
            "--reproducible",
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, SCHEMA)
        assert payload["f_infinite"] == pytest.approx(1.0, abs=1e-6)
        assert payload["wall_ms"] == 0

    def test_reproducible_is_byte_identical(self, capsys):
        args = (
            "benchmark",
            "--squeezing", "1",
            "--loss", "1",
            "--alpha", "0.8",
            "--cutoff", "4",
            "--samples", "256",
            "--reproducible",
        )
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_qmc_check_payload(self, capsys):
        code, out, _ = run(
            capsys,
            "benchmark",
            "--squeezing", "1",
            "--loss", "1",
            "--alpha", "1.0",
            "--cutoff", "3",
            "--samples", "128",
            "--qmc-check",
            "--reproducible",
        )
        assert code == 0
        payload = json.loads(out)
        jsonschema.validate(payload, SCHEMA)
        assert payload["qmc_check"]["samples_half"] == 64
        assert payload["qmc_check"]["doubling_delta"] >= 0.0

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys,
            "benchmark",
            "--squeezing", "2",
            "--loss", "1",
            "--delta",
            "--cutoff", "3",
            "--format", "csv",
            "--reproducible",
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 2
        assert "f_finite" in rows[0]


class TestFigure:
    def test_figure_two_includes_formula_column(self, tmp_path, capsys):
        code, _, _ = run(
            capsys,
            "figure", "2",
            "--out", str(tmp_path),
            "--cutoff", "3",
            "--samples", "64",
        )
        assert code == 0
        files = list(tmp_path.glob("*.csv"))
        assert len(files) == 1
        with open(files[0]) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 13
        for row in rows:
            alpha = float(row["alpha"])
            formula = float(row["formula"])
            assert formula == pytest.approx(
                (2 * alpha + 1) / (2 * (alpha + 1)), abs=1e-12
            )
            assert 0.0 < float(row["f_infinite"]) <= 1.05

    def test_figure_one_closed_forms(self, tmp_path, capsys):
        code, _, _ = run(capsys, "figure", "1", "--out", str(tmp_path))
        assert code == 0
        files = list(tmp_path.glob("*.csv"))
        assert len(files) == 1
        with open(files[0]) as fh:
            rows = list(csv.DictReader(fh))
        # 37 squeezing values x 3 noise levels
        assert len(rows) == 37 * 3
        first = rows[0]
        assert float(first["s"]) == 1.0
        assert float(first["f_bar"]) == pytest.approx(0.5, abs=1e-12)

    def test_rejects_bad_figure_number(self, tmp_path, capsys):
        code, _, _ = run(capsys, "figure", "9", "--out", str(tmp_path))
        assert code == 2


class TestFockTable:
    def test_table_parses_and_is_normalized(self, capsys):
        code, out, _ = run(
            capsys,
            "fock-table",
            "--squeezing", "2",
            "--loss", "0.9",
            "--cutoff", "12",
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 13 * 13
        trace = sum(float(r["re"]) for r in rows if r["k"] == r["l"])
        assert 0.9 < trace <= 1.0 + 1e-9

    def test_bad_xi_is_usage_error(self, capsys):
        code, _, err = run(
            capsys,
            "fock-table",
            "--squeezing", "1",
            "--xi", "frog",
            "--cutoff", "3",
        )
        assert code == 2
        assert "error" in err.lower()
