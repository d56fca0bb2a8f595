"""On-disk JSON cache of exact Weingarten class-function values.

Layout::

    {
      "format": "free-otoc/weingarten",
      "version": 1,
      "tables": {
        "D=10,k=3": {
          "dim": 10, "k": 3,
          "classes": [[1, 1, 1], [2, 1], [3]],
          "values": [[num, den], ...]      # one pair per class
        }
      }
    }

Classes follow :func:`freeotoc.combinatorics.symgroup.conjugacy_classes`.
"""
from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

from ..combinatorics.symgroup import conjugacy_classes
from ..config.defaults import DEFAULT_WG_CACHE_FORMAT, DEFAULT_WG_CACHE_PATH, DEFAULT_WG_CACHE_VERSION

logger = logging.getLogger(__name__)


def _key(dim: int, k: int) -> str:
    return f"D={dim},k={k}"


class WeingartenCache:
    """Satisfies the ``WeingartenStore`` protocol::

        store: WeingartenStore = WeingartenCache("~/.cache/free-otoc/weingarten.json")
        store.store(10, 3, values)
        store.load(10, 3)

    Args:
        path: JSON file location; parent directories are created on save.
    """

    def __init__(self, path: Path | str = DEFAULT_WG_CACHE_PATH) -> None:
        self._path = Path(path).expanduser()
        self._tables: dict[str, dict[str, Any]] = self._load_cache()

    @property
    def path(self) -> Path:
        return self._path

    # ── WeingartenStore Protocol ─────────────────────────────────────

    def load(self, dim: int, k: int) -> list[Fraction] | None:
        entry = self._tables.get(_key(dim, k))
        if entry is None:
            return None
        classes = [tuple(c) for c in entry.get("classes", [])]
        if classes != list(conjugacy_classes(k)):
            logger.warning("ignoring cached Wg table %s: class order mismatch", _key(dim, k))
            return None
        try:
            return [Fraction(int(num), int(den)) for num, den in entry["values"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            logger.warning("ignoring malformed cached Wg table %s: %s", _key(dim, k), exc)
            return None

    def store(self, dim: int, k: int, values: list[Fraction]) -> None:
        self._tables[_key(dim, k)] = {
            "dim": dim,
            "k": k,
            "classes": [list(c) for c in conjugacy_classes(k)],
            "values": [[v.numerator, v.denominator] for v in map(Fraction, values)],
        }
        self._save_cache()

    def clear(self) -> None:
        """Remove all cached tables."""
        self._tables = {}
        self._save_cache()

    def size(self) -> int:
        return len(self._tables)

    # ── Internal helpers ─────────────────────────────────────────────

    def _load_cache(self) -> dict[str, dict[str, Any]]:
        if not self._path.exists():
            return {}
        try:
            data = json.loads(self._path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            logger.warning("could not load Weingarten cache %s: %s", self._path, exc)
            return {}
        if (
            not isinstance(data, dict)
            or data.get("format") != DEFAULT_WG_CACHE_FORMAT
            or data.get("version") != DEFAULT_WG_CACHE_VERSION
        ):
            logger.warning("unrecognized Weingarten cache layout in %s, starting empty", self._path)
            return {}
        return dict(data.get("tables", {}))

    def _save_cache(self) -> None:
        payload = {
            "format": DEFAULT_WG_CACHE_FORMAT,
            "version": DEFAULT_WG_CACHE_VERSION,
            "tables": dict(sorted(self._tables.items())),
        }
        try:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        except OSError as exc:
            logger.warning("could not save Weingarten cache %s: %s", self._path, exc)
