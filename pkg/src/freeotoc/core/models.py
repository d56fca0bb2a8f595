"""Pydantic data models shared between the prediction, simulation and CLI layers.

All models are immutable (``frozen=True``).  Use ``.model_copy()`` to create
modified copies.
"""
from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator

# ── Enums ────────────────────────────────────────────────────────────


class Variant(str, Enum):
    """RMPU circuit geometry."""

    STAIRCASE = "staircase"
    TWO_FLOOR = "two_floor"


class Orientation(str, Enum):
    """Order in which staircase gates act (ascending is canonical)."""

    ASCENDING = "ascending"
    DESCENDING = "descending"


class OrderTag(str, Enum):
    EXACT = "exact"
    LEADING = "leading"
    SUBLEADING = "subleading"


class Quantity(str, Enum):
    """Experiment quantities understood by the runner."""

    OTOC_HAAR = "otoc_haar"
    OTOC_RMPU = "otoc_rmpu"
    FRAME_POTENTIAL = "frame_potential"
    GENUS_COUNTS = "genus_counts"
    CUMULANTS = "cumulants"
    IDENTITY_CHECKS = "identity_checks"


class ObservableKind(str, Enum):
    PAULI_STRING = "pauli_string"
    RANDOM_HERMITIAN = "random_hermitian"
    PROJECTOR = "projector"
    SHIFTED_PROJECTOR = "shifted_projector"


# ── Geometry ─────────────────────────────────────────────────────────


class RmpuGeometry(BaseModel, frozen=True):
    """Staircase of n Haar gates of size (chi*d) on N = r + n sites of dimension d.

    Gate i (1-based) acts on sites i..i+r; consecutive gates overlap on r
    sites, a bond of dimension chi = d**r.
    """

    d: int = Field(ge=2, description="Local site dimension")
    r: int = Field(ge=1, description="Overlap exponent, chi = d**r")
    n: int = Field(ge=1, description="Number of gates per staircase")
    variant: Variant = Variant.STAIRCASE
    orientation: Orientation = Orientation.ASCENDING

    @model_validator(mode="after")
    def _two_floor_needs_layers(self) -> RmpuGeometry:
        if self.variant is Variant.TWO_FLOOR and self.n < 2:
            raise ValueError("two_floor variant requires n >= 2")
        return self

    @property
    def chi(self) -> int:
        return self.d**self.r

    @property
    def q(self) -> int:
        """Dimension of one gate, chi * d."""
        return self.chi * self.d

    @property
    def N(self) -> int:
        return self.r + self.n

    @property
    def D(self) -> int:
        return self.d**self.N

    @classmethod
    def from_chi(cls, d: int, chi: int, n: int, **kwargs: Any) -> RmpuGeometry:
        """Geometry with bond dimension chi, which must be a power of d."""
        r = round(math.log(chi, d))
        if r < 1 or d**r != chi:
            raise ValueError(f"chi={chi} is not a positive power of d={d}")
        return cls(d=d, r=r, n=n, **kwargs)


# ── Predictions ──────────────────────────────────────────────────────


class OtocPrediction(BaseModel, frozen=True):
    """An analytic value with its order of validity.

    ``exact_value`` keeps the rational result (``"p/q"``) when the inputs
    were rational, so reports can show it without float round-off.
    """

    quantity: str
    value: float
    exact_value: Optional[str] = None
    order_tag: OrderTag = OrderTag.EXACT
    error_scale: str = Field(default="0", description="Residual power, e.g. 'chi^-2'")
    k: Optional[int] = None
    d: Optional[int] = None
    r: Optional[int] = None
    n: Optional[int] = None
    chi: Optional[int] = None
    D: Optional[int] = None

    @classmethod
    def from_value(cls, quantity: str, value: Any, **kwargs: Any) -> OtocPrediction:
        exact = str(value) if isinstance(value, (Fraction, int)) else None
        return cls(quantity=quantity, value=float(value), exact_value=exact, **kwargs)

    def to_row(self) -> dict[str, Any]:
        """One row of the prediction CSV (fixed column set)."""
        return {
            "quantity": self.quantity,
            "k": self.k,
            "d": self.d,
            "r": self.r,
            "n": self.n,
            "chi": self.chi,
            "D": self.D,
            "value": self.value,
            "order_tag": self.order_tag.value,
            "residual_estimate": self.error_scale,
        }


# ── Monte Carlo ──────────────────────────────────────────────────────


class EnsembleConfig(BaseModel, frozen=True):
    """Either an RMPU geometry or a global Haar ensemble of dimension ``global_dim``."""

    geometry: Optional[RmpuGeometry] = None
    global_dim: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(ge=0, lt=1 << 64)
    samples: int = Field(ge=2)

    @model_validator(mode="after")
    def _exactly_one_ensemble(self) -> EnsembleConfig:
        if (self.geometry is None) == (self.global_dim is None):
            raise ValueError("give exactly one of geometry or global_dim")
        return self

    @classmethod
    def global_haar(cls, D: int, seed: int, samples: int) -> EnsembleConfig:
        return cls(global_dim=D, seed=seed, samples=samples)

    @property
    def D(self) -> int:
        return self.geometry.D if self.geometry is not None else int(self.global_dim)

    @property
    def label(self) -> str:
        if self.geometry is None:
            return f"haar(D={self.global_dim})"
        g = self.geometry
        return f"rmpu(d={g.d},r={g.r},n={g.n},{g.variant.value},{g.orientation.value})"


class EstimateRecord(BaseModel, frozen=True):
    """A Monte Carlo mean with its standard error."""

    quantity: str
    mean: float
    stderr: float = Field(ge=0.0)
    samples: int = Field(ge=1)
    seed: int
    k: Optional[int] = None
    ensemble: str = ""

    @property
    def relative_stderr(self) -> float:
        return self.stderr / abs(self.mean) if self.mean else math.inf

    def agrees_with(self, value: float, sigmas: float = 4.0, floor: float = 1e-10) -> bool:
        """True if ``value`` lies within ``sigmas`` standard errors (or ``floor``)."""
        return abs(self.mean - float(value)) <= max(sigmas * self.stderr, floor)

    def to_row(self) -> dict[str, Any]:
        return {
            "quantity": self.quantity,
            "ensemble": self.ensemble,
            "k": self.k,
            "mean": self.mean,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
        }
