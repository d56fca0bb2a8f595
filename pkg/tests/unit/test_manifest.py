"""Tests for manifest validation, hashing and loading."""
from __future__ import annotations

import json

import pytest

from freeotoc.core.exceptions import ManifestError
from freeotoc.core.models import Quantity
from freeotoc.experiments.manifest import load_manifest, manifest_hash, parse_manifest

RMPU = {
    "quantity": "otoc_rmpu",
    "grid": {"k": [2], "d": [2], "n": [2], "chi": [2, 4, 8]},
    "moments": {"A": ["0", "1"], "B": ["0", "1"]},
    "seed": 7,
}

HAAR_MC = {
    "quantity": "otoc_haar",
    "grid": {"k": [2], "D": [4]},
    "observables": {
        "A": {"kind": "pauli_string", "params": {"letters": "Z"}},
        "B": {"kind": "pauli_string", "params": {"letters": "Z"}, "first_site": 2},
    },
    "samples": 100,
}


def _messages(exc: ManifestError) -> str:
    return " | ".join(f"{d['loc']}: {d['msg']}" for d in exc.details)


class TestParseManifest:
    def test_valid(self):
        manifest = parse_manifest(RMPU)
        assert manifest.quantity is Quantity.OTOC_RMPU
        assert manifest.grid.chi == [2, 4, 8]
        assert manifest.schema_version == 1

    def test_grid_is_sorted_and_deduplicated(self):
        manifest = parse_manifest({**RMPU, "grid": {"chi": [8, 2, 8]}})
        assert manifest.grid.chi == [2, 8]

    def test_default_checks_skip_sampling(self):
        assert parse_manifest(RMPU).requested_checks == ("chi_exponent", "leading_collapse")

    def test_default_checks_with_sampling(self):
        assert "mc_agreement" in parse_manifest(HAAR_MC).requested_checks

    def test_explicit_checks(self):
        manifest = parse_manifest({**RMPU, "checks": ["leading_collapse"]})
        assert manifest.requested_checks == ("leading_collapse",)

    def test_not_an_object(self):
        with pytest.raises(ManifestError) as info:
            parse_manifest([1, 2])
        assert info.value.details[0]["loc"] == "manifest"

    def test_unknown_key(self):
        with pytest.raises(ManifestError) as info:
            parse_manifest({**RMPU, "bogus": 1})
        assert any(d["loc"] == "bogus" for d in info.value.details)

    def test_nested_location(self):
        with pytest.raises(ManifestError) as info:
            parse_manifest({**RMPU, "grid": {"k": [0]}})
        assert any(d["loc"] == "grid.k" for d in info.value.details)

    def test_unsupported_schema_version(self):
        with pytest.raises(ManifestError):
            parse_manifest({**RMPU, "schema_version": 2})

    @pytest.mark.parametrize(
        "patch, fragment",
        [
            ({"checks": ["nonsense"]}, "unknown checks"),
            ({"samples": 1}, "samples must be 0 or at least 2"),
            ({"checks": ["mc_agreement"]}, "mc_agreement needs samples"),
            ({"observables": {"A": {"kind": "projector"}}}, "not both"),
            ({"moments": {"A": ["0", "1"]}}, "needs moments or an observable for B"),
            ({"moments": {"A": ["x"], "B": ["0"]}}, "moments for A"),
            ({"samples": 10}, "Monte Carlo sampling needs observables"),
        ],
    )
    def test_rmpu_rules(self, patch, fragment):
        with pytest.raises(ManifestError) as info:
            parse_manifest({**RMPU, **patch})
        assert fragment in _messages(info.value)

    def test_haar_needs_dimension(self):
        with pytest.raises(ManifestError) as info:
            parse_manifest({**HAAR_MC, "grid": {"k": [2]}})
        assert "otoc_haar needs grid.D" in _messages(info.value)

    def test_identity_needs_dimension(self):
        with pytest.raises(ManifestError):
            parse_manifest({"quantity": "identity_checks"})

    def test_frame_potential_sample_floor(self):
        with pytest.raises(ManifestError) as info:
            parse_manifest({"quantity": "frame_potential", "samples": 50})
        assert "at least 100" in _messages(info.value)

    def test_invalid_observable(self):
        bad = {**HAAR_MC, "observables": {**HAAR_MC["observables"], "B": {"kind": "pauli_string", "params": {"letters": "Q"}}}}
        with pytest.raises(ManifestError) as info:
            parse_manifest(bad)
        assert "observable B" in _messages(info.value)


class TestMomentSequences:
    def test_explicit_moments(self):
        m = parse_manifest(RMPU).moment_sequence("A", 2)
        assert m.moments == (0, 1)

    def test_from_observable(self):
        m = parse_manifest(HAAR_MC).moment_sequence("A", 4)
        assert m.moments == (0, 1, 0, 1)

    def test_missing_name(self):
        with pytest.raises(ManifestError):
            parse_manifest(RMPU).moment_sequence("C", 2)

    def test_observable_lookup(self):
        manifest = parse_manifest(HAAR_MC)
        assert manifest.observable("B").first_site == 2
        assert manifest.observable("C") is None


class TestManifestHash:
    def test_hex_digest(self):
        digest = manifest_hash(parse_manifest(RMPU))
        assert len(digest) == 64
        int(digest, 16)

    def test_independent_of_key_order(self):
        reordered = dict(reversed(list(RMPU.items())))
        assert manifest_hash(parse_manifest(reordered)) == manifest_hash(parse_manifest(RMPU))

    def test_defaults_are_part_of_the_hash(self):
        explicit = {**RMPU, "samples": 0, "checks": [], "output": None}
        assert manifest_hash(parse_manifest(explicit)) == manifest_hash(parse_manifest(RMPU))

    def test_changes_with_seed(self):
        assert manifest_hash(parse_manifest({**RMPU, "seed": 8})) != manifest_hash(parse_manifest(RMPU))


class TestLoadManifest:
    def test_load(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(RMPU), encoding="utf-8")
        assert load_manifest(path) == parse_manifest(RMPU)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ManifestError, match="not valid JSON"):
            load_manifest(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ManifestError, match="cannot read"):
            load_manifest(tmp_path / "absent.json")
