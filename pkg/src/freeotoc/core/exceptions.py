"""Custom exception hierarchy for freeotoc.

All exceptions raised by this package inherit from :class:`FreeOtocError`
so callers can catch the base class for generic handling, or specific
subclasses for targeted recovery.

Usage::

    from freeotoc.core.exceptions import CapExceededError, DomainError

    try:
        table = weingarten(dim, k)
    except DomainError as exc:
        logger.warning("Gram matrix may be singular: %s", exc)
    except CapExceededError as exc:
        logger.error("Table too large (%s > %s)", exc.requested, exc.limit)
    except FreeOtocError as exc:
        logger.error("Unexpected error: %s", exc)
"""
from __future__ import annotations


class FreeOtocError(Exception):
    """Base class for all freeotoc exceptions."""


class IncompatibleReplicaError(FreeOtocError):
    """Raised when two permutations (or operator lists) disagree on k."""


class DomainError(FreeOtocError):
    """Raised when a mathematical precondition does not hold (D <= k, crossing input, ...)."""


class CapExceededError(FreeOtocError):
    """Raised when a request exceeds a configured resource cap.

    Attributes:
        what: Name of the capped resource.
        requested: The requested size.
        limit: The configured limit.
    """

    def __init__(self, what: str, requested: int, limit: int) -> None:
        super().__init__(f"{what} {requested} exceeds cap {limit}")
        self.what = what
        self.requested = requested
        self.limit = limit


class InsufficientMomentsError(FreeOtocError):
    """Raised when a cycle is longer than the available moment sequence.

    Attributes:
        required: Highest moment order needed.
        available: Highest moment order supplied.
    """

    def __init__(self, required: int, available: int) -> None:
        super().__init__(f"need moments up to order {required}, only {available} available")
        self.required = required
        self.available = available


class UnsupportedError(FreeOtocError):
    """Raised for requests outside the implemented scope (g >= 2 series, two-floor frame potential)."""


class ObservableError(FreeOtocError):
    """Raised when an observable is malformed or not Hermitian."""


class ConsistencyError(FreeOtocError):
    """Raised when an identity that must hold exactly is violated at runtime."""


class ManifestError(FreeOtocError):
    """Raised when an experiment manifest fails validation.

    Attributes:
        details: Machine-readable list of ``{"loc": ..., "msg": ...}`` entries.
    """

    def __init__(self, message: str, details: list[dict[str, str]] | None = None) -> None:
        super().__init__(message)
        self.details = details or []

    def __str__(self) -> str:
        base = super().__str__()
        if self.details:
            parts = "; ".join(f"{d.get('loc', '?')}: {d.get('msg', '')}" for d in self.details)
            return f"{base} ({parts})"
        return base


class ConfigError(FreeOtocError):
    """Raised when configuration is invalid or missing required values."""
