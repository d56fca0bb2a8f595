"""Tests for defaults, layered settings, reference data and the core models."""
from __future__ import annotations

from fractions import Fraction

import pytest

from freeotoc.config.defaults import (
    DEFAULT_EXACT_TRANSFER_CAP,
    DEFAULT_FLOAT_FORMAT,
    DEFAULT_MC_SAMPLES,
    DEFAULT_MC_SEED,
    DEFAULT_TABLE_CAP,
    DEFAULT_TRANSFER_CAP,
)
from freeotoc.config.loader import load_reference_section, load_table2
from freeotoc.config.settings import Settings, get_settings
from freeotoc.core.exceptions import CapExceededError, ConfigError, FreeOtocError, ManifestError
from freeotoc.core.models import EstimateRecord, OrderTag, OtocPrediction, RmpuGeometry


class TestDefaults:
    def test_caps_are_ordered(self):
        assert DEFAULT_EXACT_TRANSFER_CAP <= DEFAULT_TRANSFER_CAP <= DEFAULT_TABLE_CAP

    def test_float_format_is_usable(self):
        assert format(0.1, DEFAULT_FLOAT_FORMAT) == "0.1"


class TestSettings:
    def test_default_values(self):
        s = Settings(_env_file=None)
        assert s.monte_carlo.samples == DEFAULT_MC_SAMPLES
        assert s.monte_carlo.seed == DEFAULT_MC_SEED
        assert s.caps.table == DEFAULT_TABLE_CAP
        assert s.weingarten_cache.enabled is False

    def test_env_override_nested(self, monkeypatch):
        monkeypatch.setenv("FOTOC_MONTE_CARLO__SAMPLES", "500")
        monkeypatch.setenv("FOTOC_CAPS__TABLE", "5")
        s = Settings(_env_file=None)
        assert s.monte_carlo.samples == 500
        assert s.caps.table == 5

    def test_yaml_in_working_directory(self, tmp_path):
        (tmp_path / "config.yaml").write_text("monte_carlo:\n  seed: 99\nlog_level: DEBUG\n", encoding="utf-8")
        s = Settings(_env_file=None)
        assert s.monte_carlo.seed == 99
        assert s.log_level == "DEBUG"

    def test_env_beats_yaml(self, tmp_path, monkeypatch):
        (tmp_path / "config.yaml").write_text("monte_carlo:\n  seed: 99\n", encoding="utf-8")
        monkeypatch.setenv("FOTOC_MONTE_CARLO__SEED", "7")
        assert Settings(_env_file=None).monte_carlo.seed == 7

    def test_invalid_log_level_rejected(self):
        with pytest.raises(ValueError):
            Settings(log_level="LOUD")

    def test_invalid_float_format_rejected(self):
        with pytest.raises(ValueError):
            Settings(output={"float_format": "%f"})

    def test_cap_bounds(self):
        with pytest.raises(ValueError):
            Settings(caps={"table": 12})

    def test_singleton(self):
        assert get_settings() is get_settings()
        fresh = get_settings(log_level="INFO")
        assert fresh.log_level == "INFO"
        assert get_settings() is fresh


class TestReferenceData:
    def test_table2_rows(self):
        rows = load_table2()
        assert [r.k for r in rows] == list(range(1, 11))
        assert rows[2].nc2_g0 == 12
        assert rows[2].nc2_g1 == 21

    def test_sections(self):
        row2 = load_reference_section("table1_row2")
        assert (row2["k"], row2["d"], row2["n"], row2["chi"]) == (2, 2, 3, 32)

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            load_reference_section("table9")

    def test_malformed_rows(self, monkeypatch):
        monkeypatch.setattr("freeotoc.config.loader._load_yaml", lambda _: {"table2": [{"k": "one"}]})
        with pytest.raises(ConfigError):
            load_table2()

    def test_missing_file_uses_fallback(self, monkeypatch):
        monkeypatch.setattr("freeotoc.config.loader._load_yaml", lambda _: None)
        assert load_table2()[5].nc2_g1 == 27300


class TestModels:
    def test_geometry(self):
        g = RmpuGeometry.from_chi(2, 8, 3)
        assert (g.r, g.chi, g.q, g.N, g.D) == (3, 8, 16, 6, 64)

    def test_chi_must_be_power_of_d(self):
        with pytest.raises(ValueError):
            RmpuGeometry.from_chi(2, 6, 2)

    def test_prediction_keeps_exact_value(self):
        p = OtocPrediction.from_value("otoc_haar", Fraction(-1, 15), k=2, D=4)
        assert p.exact_value == "-1/15"
        assert p.value == pytest.approx(-1 / 15)
        assert p.order_tag is OrderTag.EXACT
        assert p.to_row()["D"] == 4

    def test_estimate_agreement(self):
        record = EstimateRecord(quantity="otoc", mean=0.5, stderr=0.01, samples=100, seed=1)
        assert record.agrees_with(0.53)
        assert not record.agrees_with(0.6)
        assert record.relative_stderr == pytest.approx(0.02)


class TestExceptions:
    def test_hierarchy(self):
        assert issubclass(CapExceededError, FreeOtocError)
        err = CapExceededError("k", 9, 8)
        assert (err.what, err.requested, err.limit) == ("k", 9, 8)

    def test_manifest_error_details(self):
        err = ManifestError("invalid manifest", [{"loc": "grid.k", "msg": "must be positive"}])
        assert "grid.k: must be positive" in str(err)
