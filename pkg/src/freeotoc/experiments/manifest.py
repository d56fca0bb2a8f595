"""Experiment manifests: a versioned JSON description of one run.

Example::

    {
      "schema_version": 1,
      "quantity": "otoc_rmpu",
      "grid": {"k": [2], "d": [2], "n": [2], "chi": [2, 4, 8, 16]},
      "moments": {"A": ["1/2", "1/2"], "B": ["1/2", "1/2"]},
      "seed": 7,
      "samples": 0
    }

The manifest hash (SHA-256 of the canonical JSON dump) is written into
every output file.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..config.defaults import (
    DEFAULT_CHECK_TOLERANCE,
    DEFAULT_FRAME_MIN_SAMPLES,
    DEFAULT_MANIFEST_SCHEMA_VERSION,
    DEFAULT_MC_SEED,
)
from ..core.exceptions import FreeOtocError, ManifestError
from ..core.models import Quantity
from ..freeprob.moments import MomentSequence
from ..mcsim.observables import ObservableSpec, observable_from_dict

# Checks the runner knows, per quantity; an empty ``checks`` list runs all.
KNOWN_CHECKS: dict[Quantity, tuple[str, ...]] = {
    Quantity.GENUS_COUNTS: ("table2_match", "fuss_catalan"),
    Quantity.CUMULANTS: ("round_trip",),
    Quantity.OTOC_HAAR: ("subleading_convergence", "mc_agreement"),
    Quantity.OTOC_RMPU: ("chi_exponent", "mc_agreement", "leading_collapse"),
    Quantity.FRAME_POTENTIAL: ("haar_limit", "asymptotic_agreement", "mc_agreement"),
    Quantity.IDENTITY_CHECKS: ("identity",),
}


class GridSpec(BaseModel):
    """Parameter lists; the runner evaluates their product where it applies."""

    model_config = ConfigDict(extra="forbid")

    k: list[int] = Field(default_factory=lambda: [2])
    d: list[int] = Field(default_factory=lambda: [2])
    r: list[int] = Field(default_factory=lambda: [1])
    n: list[int] = Field(default_factory=lambda: [1])
    chi: list[int] = Field(default_factory=list)
    D: list[int] = Field(default_factory=list)
    M: list[int] = Field(default_factory=list, description="Sites carrying B (light-cone placements)")

    @field_validator("k", "d", "r", "n", "chi", "D", "M")
    @classmethod
    def _positive(cls, values: list[int]) -> list[int]:
        if any(v < 1 for v in values):
            raise ValueError("grid values must be positive")
        return sorted(set(values))


class ExperimentManifest(BaseModel):
    """One experiment: a quantity, its grid, inputs and requested checks."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = DEFAULT_MANIFEST_SCHEMA_VERSION
    quantity: Quantity
    grid: GridSpec = Field(default_factory=GridSpec)
    moments: dict[str, list[Any]] = Field(default_factory=dict)
    observables: dict[str, dict[str, Any]] = Field(default_factory=dict)
    seed: int = Field(default=DEFAULT_MC_SEED, ge=0, lt=1 << 64)
    samples: int = Field(default=0, ge=0, description="Monte Carlo samples per point; 0 disables sampling")
    checks: list[str] = Field(default_factory=list)
    tolerance: float = Field(default=DEFAULT_CHECK_TOLERANCE, gt=0.0)
    output: Optional[str] = None

    @model_validator(mode="after")
    def _inputs_for_quantity(self) -> ExperimentManifest:
        unknown = sorted(set(self.checks) - set(KNOWN_CHECKS[self.quantity]))
        if unknown:
            raise ValueError(f"unknown checks for {self.quantity.value}: {', '.join(unknown)}")
        if self.samples == 1:
            raise ValueError("samples must be 0 or at least 2")
        if "mc_agreement" in self.checks and not self.samples:
            raise ValueError("mc_agreement needs samples > 0")
        if self.quantity is Quantity.FRAME_POTENTIAL and 0 < self.samples < DEFAULT_FRAME_MIN_SAMPLES:
            raise ValueError(f"frame potential sampling needs at least {DEFAULT_FRAME_MIN_SAMPLES} samples")
        both = sorted(set(self.moments) & set(self.observables))
        if both:
            raise ValueError(f"give either moments or an observable, not both: {', '.join(both)}")
        for name, values in self.moments.items():
            try:
                MomentSequence(moments=tuple(values))
            except (ValueError, FreeOtocError) as exc:
                raise ValueError(f"moments for {name}: {exc}") from exc
        for name, spec in self.observables.items():
            try:
                observable_from_dict(spec)
            except FreeOtocError as exc:
                raise ValueError(f"observable {name}: {exc}") from exc
        needs = {
            Quantity.OTOC_HAAR: ("A", "B"),
            Quantity.OTOC_RMPU: ("A", "B"),
            Quantity.CUMULANTS: ("A",),
        }.get(self.quantity, ())
        for name in needs:
            if name not in self.moments and name not in self.observables:
                raise ValueError(f"{self.quantity.value} needs moments or an observable for {name}")
        if self.quantity is Quantity.OTOC_HAAR and not self.grid.D:
            raise ValueError("otoc_haar needs grid.D")
        if self.quantity is Quantity.IDENTITY_CHECKS and not self.grid.D:
            raise ValueError("identity_checks needs grid.D")
        if self.samples and self.quantity in (Quantity.OTOC_HAAR, Quantity.OTOC_RMPU):
            missing = [name for name in ("A", "B") if name not in self.observables]
            if missing:
                raise ValueError(f"Monte Carlo sampling needs observables for {', '.join(missing)}")
        return self

    @property
    def requested_checks(self) -> tuple[str, ...]:
        if self.checks:
            return tuple(self.checks)
        return tuple(c for c in KNOWN_CHECKS[self.quantity] if self.samples or c != "mc_agreement")

    def observable(self, name: str) -> ObservableSpec | None:
        spec = self.observables.get(name)
        return observable_from_dict(spec) if spec is not None else None

    def moment_sequence(self, name: str, K: int) -> MomentSequence:
        """Moments of ``name``: given explicitly, else from its observable."""
        if name in self.moments:
            return MomentSequence(moments=tuple(self.moments[name]))
        observable = self.observable(name)
        if observable is None:
            raise ManifestError(f"no moments or observable for {name}")
        return observable.moments(K)


def manifest_hash(manifest: ExperimentManifest) -> str:
    """SHA-256 of the canonical JSON form (sorted keys, no whitespace)."""
    canonical = json.dumps(manifest.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _details(exc: ValidationError) -> list[dict[str, str]]:
    return [{"loc": ".".join(str(p) for p in err["loc"]) or "manifest", "msg": err["msg"]} for err in exc.errors()]


def parse_manifest(data: Any) -> ExperimentManifest:
    """Validate a decoded manifest.

    Raises:
        ManifestError: with one ``details`` entry per validation problem.
    """
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object", [{"loc": "manifest", "msg": "not an object"}])
    try:
        return ExperimentManifest.model_validate(data)
    except ValidationError as exc:
        raise ManifestError("invalid manifest", _details(exc)) from exc


def load_manifest(path: str | Path) -> ExperimentManifest:
    """Read and validate a manifest file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}", [{"loc": "manifest", "msg": str(exc)}]) from exc
    except ValueError as exc:
        raise ManifestError("manifest is not valid JSON", [{"loc": "manifest", "msg": str(exc)}]) from exc
    return parse_manifest(data)
