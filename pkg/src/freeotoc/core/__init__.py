"""Core abstractions: models, interfaces, exceptions."""
from .exceptions import (  # noqa: F401
    CapExceededError,
    ConfigError,
    ConsistencyError,
    DomainError,
    FreeOtocError,
    IncompatibleReplicaError,
    InsufficientMomentsError,
    ManifestError,
    ObservableError,
    UnsupportedError,
)
