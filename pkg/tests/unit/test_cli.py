"""Tests for the Click-based CLI.

Uses Click's ``CliRunner``; every command runs in the per-test temporary
working directory set up in ``conftest.py``.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from freeotoc.cli.app import cli

# ── Fixtures ─────────────────────────────────────────────────────────


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def observables(tmp_path: Path) -> tuple[Path, Path]:
    """Pauli Z on sites 1 and 2, as JSON files."""
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text('{"kind": "pauli_string", "params": {"letters": "Z"}}', encoding="utf-8")
    b.write_text('{"kind": "pauli_string", "params": {"letters": "Z"}, "first_site": 2}', encoding="utf-8")
    return a, b


def _csv(text: str) -> list[dict[str, str]]:
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    return list(csv.DictReader(lines[1:]))


def _by_quantity(rows: list[dict[str, str]], quantity: str) -> list[dict[str, str]]:
    return [r for r in rows if r["quantity"] == quantity]


class TestCLIRoot:
    def test_help(self, runner: CliRunner):
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        assert "Weingarten calculus" in result.output

    def test_no_command_shows_help(self, runner: CliRunner):
        result = runner.invoke(cli, [])
        assert result.exit_code == 0
        assert "Usage:" in result.output

    def test_version(self, runner: CliRunner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "free-otoc" in result.output

    def test_config(self, runner: CliRunner):
        result = runner.invoke(cli, ["config"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["caps"]["table"] == 6
        assert data["weingarten_cache"]["enabled"] is False


# ── Combinatorics ────────────────────────────────────────────────────


class TestCombinatorics:
    def test_wg_table(self, runner: CliRunner):
        result = runner.invoke(cli, ["wg-table", "--dim", "4", "--k", "3"])
        assert result.exit_code == 0, result.output
        rows = _csv(result.output)
        assert [r["cycle_type"] for r in rows] == ["1-1-1", "2-1", "3"]
        assert [r["value"] for r in rows] == ["7/360", "-1/180", "1/360"]
        assert [r["mobius"] for r in rows] == ["1", "-1", "2"]

    def test_wg_table_rejects_small_dimension(self, runner: CliRunner):
        result = runner.invoke(cli, ["wg-table", "--dim", "2", "--k", "3"])
        assert result.exit_code == 1
        assert "Error" in result.output

    def test_wg_table_to_file(self, runner: CliRunner, tmp_path: Path):
        out = tmp_path / "out" / "wg.csv"
        result = runner.invoke(cli, ["wg-table", "--dim", "3", "--k", "2", "--out", str(out)])
        assert result.exit_code == 0
        assert [r["value"] for r in _csv(out.read_text(encoding="utf-8"))] == ["1/8", "-1/24"]

    def test_nc_count(self, runner: CliRunner):
        result = runner.invoke(cli, ["nc-count", "--k", "1,2,3,4"])
        assert result.exit_code == 0
        rows = _csv(result.output)
        assert [int(r["count"]) for r in rows] == [1, 3, 12, 55]
        assert all(float(r["wall_time"]) >= 0 for r in rows)

    def test_nc_count_k10(self, runner: CliRunner):
        result = runner.invoke(cli, ["nc-count", "--k", "10"])
        assert result.exit_code == 0, result.output
        assert int(_csv(result.output)[0]["count"]) == 1430715

    def test_nc_count_bad_list(self, runner: CliRunner):
        result = runner.invoke(cli, ["nc-count", "--k", "1,two"])
        assert result.exit_code == 2

    def test_cumulants(self, runner: CliRunner):
        result = runner.invoke(cli, ["cumulants", "--moments", "0,1,0,2"])
        assert result.exit_code == 0
        assert [r["cumulant"] for r in _csv(result.output)] == ["0", "1", "0", "0"]

    def test_cumulants_inverse(self, runner: CliRunner):
        result = runner.invoke(cli, ["cumulants", "--moments", "1,1,1", "--inverse"])
        assert result.exit_code == 0
        assert [r["moment"] for r in _csv(result.output)] == ["1", "2", "5"]


# ── Predictions ──────────────────────────────────────────────────────


class TestOtocExact:
    def test_haar(self, runner: CliRunner):
        result = runner.invoke(cli, ["otoc-exact", "--k", "2", "--moments-a", "0,1", "--moments-b", "0,1", "--dim", "4"])
        assert result.exit_code == 0, result.output
        rows = _csv(result.output)
        assert float(_by_quantity(rows, "otoc_haar")[0]["value"]) == pytest.approx(-1 / 15)
        assert float(_by_quantity(rows, "otoc_free")[0]["value"]) == 0.0
        assert float(_by_quantity(rows, "subleading_haar")[0]["value"]) == pytest.approx(-1.0)

    def test_rmpu_chi_list(self, runner: CliRunner):
        result = runner.invoke(
            cli, ["otoc-exact", "--k", "2", "--moments-a", "0,1", "--moments-b", "0,1", "--n", "2", "--chi-list", "4,8"]
        )
        assert result.exit_code == 0, result.output
        rmpu = _by_quantity(_csv(result.output), "otoc_rmpu")
        assert [int(r["chi"]) for r in rmpu] == [4, 8]
        assert float(rmpu[0]["value"]) == pytest.approx(0.03250188964, rel=1e-8)

    def test_from_observable_files(self, runner: CliRunner, observables):
        a, b = observables
        result = runner.invoke(cli, ["otoc-exact", "--k", "2", "--observable-a", str(a), "--observable-b", str(b), "--dim", "8"])
        assert result.exit_code == 0, result.output
        assert float(_by_quantity(_csv(result.output), "otoc_haar")[0]["value"]) == pytest.approx(-1 / 63)

    def test_missing_moments(self, runner: CliRunner):
        result = runner.invoke(cli, ["otoc-exact", "--k", "2", "--moments-a", "0,1", "--dim", "4"])
        assert result.exit_code == 2
        assert "--moments-b" in result.output

    def test_moments_and_observable_conflict(self, runner: CliRunner, observables):
        a, _ = observables
        result = runner.invoke(
            cli, ["otoc-exact", "--k", "2", "--moments-a", "0,1", "--observable-a", str(a), "--moments-b", "0,1", "--dim", "4"]
        )
        assert result.exit_code == 2

    def test_dimension_too_small(self, runner: CliRunner):
        result = runner.invoke(cli, ["otoc-exact", "--k", "2", "--moments-a", "0,1", "--moments-b", "0,1", "--dim", "2"])
        assert result.exit_code == 1


class TestFramePotential:
    def test_single_gate(self, runner: CliRunner):
        result = runner.invoke(cli, ["frame-potential", "--k", "2", "--n", "1", "--chi-list", "2"])
        assert result.exit_code == 0
        row = _csv(result.output)[0]
        assert float(row["value"]) == 2.0
        assert row["mc_mean"] == ""

    def test_deep_staircase_above_haar(self, runner: CliRunner):
        result = runner.invoke(cli, ["frame-potential", "--k", "2", "--n", "3", "--r", "2"])
        assert result.exit_code == 0
        row = _csv(result.output)[0]
        assert int(row["chi"]) == 4
        assert float(row["value"]) > float(row["haar_value"])


class TestVerifyIdentity:
    def test_passes(self, runner: CliRunner):
        result = runner.invoke(cli, ["verify-identity", "--dim", "4", "--k", "2"])
        assert result.exit_code == 0
        assert json.loads(result.output)["passed"] is True

    def test_negative_control(self, runner: CliRunner):
        result = runner.invoke(cli, ["verify-identity", "--dim", "4", "--k", "2", "--frame-potential", "3"])
        assert result.exit_code == 1

    def test_dimension_must_be_power_of_two(self, runner: CliRunner):
        result = runner.invoke(cli, ["verify-identity", "--dim", "6"])
        assert result.exit_code == 1


class TestOtocMonteCarlo:
    def test_haar(self, runner: CliRunner, observables):
        a, b = observables
        result = runner.invoke(
            cli,
            ["otoc-mc", "--k", "2", "--observable-a", str(a), "--observable-b", str(b),
             "--dim", "4", "--samples", "200", "--seed", "5"],
        )
        assert result.exit_code == 0, result.output
        row = _csv(result.output)[0]
        assert int(row["samples"]) == 200
        assert int(row["seed"]) == 5
        assert float(row["stderr"]) > 0


# ── Experiments ──────────────────────────────────────────────────────


class TestTableReport:
    def test_table2(self, runner: CliRunner):
        result = runner.invoke(cli, ["table-report", "table2", "--max-k", "4"])
        assert result.exit_code == 0, result.output
        assert "k=3 genus 1" in result.output
        assert "✗" not in result.output

    def test_table1_row2(self, runner: CliRunner):
        result = runner.invoke(cli, ["table-report", "table1_row2"])
        assert result.exit_code == 0, result.output
        assert "large-n formula" in result.output

    def test_table1_row1(self, runner: CliRunner):
        result = runner.invoke(cli, ["table-report", "table1_row1"])
        assert result.exit_code == 0, result.output
        assert "fitted chi exponent" in result.output

    def test_unknown_table(self, runner: CliRunner):
        result = runner.invoke(cli, ["table-report", "table3"])
        assert result.exit_code == 2


class TestRun:
    def _write(self, tmp_path: Path, manifest: dict) -> Path:
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest), encoding="utf-8")
        return path

    def test_valid_manifest(self, runner: CliRunner, tmp_path: Path):
        path = self._write(tmp_path, {"quantity": "genus_counts", "grid": {"k": [1, 2, 3, 4]}})
        result = runner.invoke(cli, ["run", "--manifest", str(path), "--out", str(tmp_path / "res")])
        assert result.exit_code == 0, result.output
        summary = json.loads((tmp_path / "res" / "summary.json").read_text(encoding="utf-8"))
        assert summary["passed"] is True
        assert summary["rows"] == 4

    def test_default_output_directory(self, runner: CliRunner, tmp_path: Path):
        path = self._write(tmp_path, {"quantity": "genus_counts", "grid": {"k": [2]}})
        result = runner.invoke(cli, ["run", "--manifest", str(path)])
        assert result.exit_code == 0
        assert (tmp_path / "results" / "results.csv").exists()

    def test_invalid_manifest(self, runner: CliRunner, tmp_path: Path):
        path = self._write(tmp_path, {"quantity": "otoc_haar", "grid": {"k": [2]}, "moments": {"A": ["0", "1"]}})
        result = runner.invoke(cli, ["run", "--manifest", str(path)])
        assert result.exit_code == 2
        payload = json.loads(result.output)
        assert payload["error"] == "invalid manifest"
        assert payload["details"]

    def test_unreadable_manifest(self, runner: CliRunner, tmp_path: Path):
        result = runner.invoke(cli, ["run", "--manifest", str(tmp_path / "absent.json")])
        assert result.exit_code == 2

    def test_failed_check_exits_one(self, runner: CliRunner, tmp_path: Path):
        path = self._write(
            tmp_path, {"quantity": "otoc_haar", "grid": {"k": [2], "D": [2]}, "moments": {"A": ["0", "1"], "B": ["0", "1"]}}
        )
        result = runner.invoke(cli, ["run", "--manifest", str(path), "--out", str(tmp_path / "res")])
        assert result.exit_code == 1
        assert (tmp_path / "res" / "summary.json").exists()
