"""Configuration system for freeotoc.

Submodules:
    defaults   Hardcoded default values (single source of truth).
    settings   Pydantic Settings model with layered loading.
    loader     Loaders for the bundled YAML reference tables.
"""
from .settings import Settings, get_settings, reset_settings  # noqa: F401
