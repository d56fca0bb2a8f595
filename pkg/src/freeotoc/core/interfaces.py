"""Protocol definitions for the pluggable components.

These protocols use structural subtyping: any class that implements the
required methods is compatible, no inheritance needed.

    - UnitaryEnsemble:  draws dense unitaries  (HaarEnsemble, RmpuEnsemble)
    - WeingartenStore:  persists exact Wg class values  (WeingartenCache)
    - ProgressCallback: reports progress of an experiment run

Usage::

    class DiagonalPhases:  # No inheritance needed!
        dimension = 4

        def sample(self, rng: np.random.Generator) -> np.ndarray:
            return np.diag(np.exp(2j * np.pi * rng.random(4)))

    ensemble: UnitaryEnsemble = DiagonalPhases()  # ✓
"""
from __future__ import annotations

from fractions import Fraction
from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class UnitaryEnsemble(Protocol):
    """A distribution over D x D unitaries.

    Implementations:
        - HaarEnsemble:  global Haar measure on U(D)
        - RmpuEnsemble:  staircase / two-floor random matrix product unitaries
    """

    @property
    def dimension(self) -> int:
        """Total Hilbert-space dimension D."""
        ...

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one unitary using only the given generator.

        Args:
            rng: Per-sample generator; the result must depend on nothing else.

        Returns:
            Dense complex (D, D) array.
        """
        ...


@runtime_checkable
class WeingartenStore(Protocol):
    """Persistent store of exact Weingarten class-function values."""

    def load(self, dim: int, k: int) -> list[Fraction] | None:
        """Return the per-class values for (dim, k), or None if absent."""
        ...

    def store(self, dim: int, k: int, values: list[Fraction]) -> None:
        ...

    def clear(self) -> None:
        ...

    def size(self) -> int:
        """Return the number of cached tables."""
        ...


@runtime_checkable
class ProgressCallback(Protocol):
    """Callback for reporting progress while a manifest grid is evaluated."""

    def on_start(self, total: int) -> None:
        ...

    def on_progress(self, current: int, total: int, message: str = "") -> None:
        ...

    def on_complete(self, passed: int, failed: int) -> None:
        ...
