"""Data loading utilities for the bundled reference tables.

The reference values reproduced by ``free-otoc table-report`` live in
``data/reference_tables.yaml`` inside the package.  The loader has a
built-in fallback so a missing or unreadable file never breaks a report;
it simply uses the hardcoded rows below.

Typical usage::

    from freeotoc.config.loader import load_table2, load_reference_section

    rows = load_table2()                          # list[Table2Row]
    row2 = load_reference_section("table1_row2")  # dict[str, Any]
"""
from __future__ import annotations

import importlib.resources
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ValidationError

from ..core.exceptions import ConfigError

logger = logging.getLogger(__name__)

# ── Package data root ────────────────────────────────────────────────

_DATA_PACKAGE = "freeotoc.data"
_REFERENCE_FILE = "reference_tables.yaml"


def _data_dir() -> Path:
    """Return path to the bundled ``data/`` directory.

    Uses ``importlib.resources`` for correct resolution even when the
    package is installed as a wheel.
    """
    try:
        return Path(str(importlib.resources.files(_DATA_PACKAGE)))
    except (TypeError, AttributeError, ModuleNotFoundError):
        return Path(__file__).resolve().parent.parent / "data"


# ── Models ───────────────────────────────────────────────────────────


class Table2Row(BaseModel, frozen=True):
    """One row of the genus-count reference table."""

    k: int
    nc2_g0: int
    nc2_g1: int
    pairs: int


# ── Reference tables ─────────────────────────────────────────────────

# Module-level cache: parsed reference file
_reference_cache: dict[str, Any] = {}


def load_reference_tables() -> dict[str, Any]:
    """Load the whole reference file, falling back to built-in values."""
    if _reference_cache:
        return _reference_cache

    data = _load_yaml(_REFERENCE_FILE)
    if not isinstance(data, dict):
        logger.warning("reference tables unavailable, using built-in fallback")
        data = _builtin_reference()
    _reference_cache.update(data)
    return _reference_cache


def load_table2() -> list[Table2Row]:
    """Return the genus-count table rows, sorted by k."""
    rows = load_reference_tables().get("table2") or _builtin_reference()["table2"]
    try:
        return sorted((Table2Row(**row) for row in rows), key=lambda r: r.k)
    except (TypeError, ValidationError) as exc:
        raise ConfigError(f"malformed table2 reference rows: {exc}") from exc


def load_reference_section(name: str) -> dict[str, Any]:
    """Return one named section (e.g. ``"table1_row2"``) of the reference file."""
    section = load_reference_tables().get(name)
    if section is None:
        section = _builtin_reference().get(name)
    if section is None:
        raise ConfigError(f"unknown reference section: {name}")
    return dict(section)


def clear_caches() -> None:
    """Clear loader caches (useful after editing files or in tests)."""
    _reference_cache.clear()


# ── Internal helpers ─────────────────────────────────────────────────


def _load_yaml(relative_path: str) -> Any:
    """Load a YAML file relative to the data directory.

    Returns None if the file doesn't exist or can't be parsed.
    """
    path = _data_dir() / relative_path
    if not path.exists():
        return None
    import yaml

    try:
        return yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        logger.warning("could not parse YAML file %s: %s", path, exc)
        return None


def _builtin_reference() -> dict[str, Any]:
    """Hardcoded reference values used when the YAML file is unavailable."""
    g0 = [1, 3, 12, 55, 273, 1428, 7752, 43263, 246675, 1430715]
    g1 = [0, 1, 21, 270, 2860, 27300, 244188, 2089164, 17305200, 139864725]
    factorials = [1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800]
    return {
        "table2": [
            {"k": k, "nc2_g0": a, "nc2_g1": b, "pairs": f * f}
            for k, a, b, f in zip(range(1, 11), g0, g1, factorials)
        ],
        "table1_row2": {"k": 2, "d": 2, "n": 3, "chi": 32, "tolerance": 0.05},
        "table1_row1": {
            "k": 2,
            "d": 2,
            "n": 2,
            "chi": [4, 8, 16, 32],
            "exponent": -2.0,
            "exponent_tolerance": 0.3,
        },
    }
