"""Gram and Weingarten tables over S_k at finite dimension.

Both matrices are class functions of pi^-1 sigma, so the Weingarten table is
obtained by solving a p(k) x p(k) system on conjugacy classes instead of
inverting the (k!)^2 Gram matrix:

    sum_mu M[lam, mu] w[mu] = delta(lam, identity),
    M[lam, mu] = sum_nu N[lam, mu, nu] D^#(nu)

with N the class structure constants of :class:`SymmetricGroup`.  Exact
mode does this in ``Fraction`` arithmetic; float mode uses
``numpy.linalg.solve``.  Solved tables are memoized per (D, k, mode).
"""
from __future__ import annotations

import logging
import time
from fractions import Fraction
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..combinatorics.symgroup import Permutation, compose, symmetric_group
from ..config.defaults import DEFAULT_ENUMERATION_CAP, DEFAULT_TABLE_CAP
from ..core.exceptions import CapExceededError, DomainError, IncompatibleReplicaError
from ..core.interfaces import WeingartenStore
from . import exact

logger = logging.getLogger(__name__)

Mode = Literal["exact", "float"]


def _check_mode(mode: str) -> None:
    if mode not in ("exact", "float"):
        raise DomainError(f"mode must be 'exact' or 'float', got {mode!r}")


def _check_table_cap(k: int, cap: int) -> None:
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > cap:
        raise CapExceededError("k", k, cap)


# ── Gram ─────────────────────────────────────────────────────────────


class GramTable(BaseModel):
    """Gram matrix entries D^(k - dist(pi, sigma)) over the canonical S_k order."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int
    k: int
    mode: str
    entries: np.ndarray


def gram_class_values(dim: int, k: int, mode: Mode = "exact") -> np.ndarray:
    """D^#(lam) for every conjugacy class lam."""
    group = symmetric_group(k)
    if mode == "exact":
        return np.array([dim ** (k - int(dist)) for dist in group.class_distance], dtype=object)
    return np.array([float(dim) ** (k - int(dist)) for dist in group.class_distance])


def gram(dim: int, k: int, mode: Mode = "exact", cap: int = DEFAULT_TABLE_CAP) -> GramTable:
    """Full Gram table; exact mode keeps Python integers so entries never wrap."""
    _check_mode(mode)
    _check_table_cap(k, cap)
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    group = symmetric_group(k)
    entries = gram_class_values(dim, k, mode)[group.class_matrix()]
    return GramTable(dim=dim, k=k, mode=mode, entries=entries)


def class_gram_system(dim: int, k: int, mode: Mode = "exact") -> np.ndarray:
    """The p(k) x p(k) matrix M of the class-function Gram system."""
    group = symmetric_group(k)
    structure = group.class_structure()
    powers = gram_class_values(dim, k, mode)
    if mode == "exact":
        p = len(group.classes)
        return np.array(
            [[sum(int(structure[lam, mu, nu]) * powers[nu] for nu in range(p)) for mu in range(p)] for lam in range(p)],
            dtype=object,
        )
    return structure.astype(float) @ powers


# ── Weingarten ───────────────────────────────────────────────────────


class WeingartenTable(BaseModel):
    """Weingarten function Wg(pi, sigma; D) stored once per conjugacy class.

    ``class_values[c]`` is Wg for any pair whose pi^-1 sigma has cycle type
    ``classes[c]``; :meth:`matrix` expands to the full (k!)^2 table.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int
    k: int
    mode: str
    classes: tuple[tuple[int, ...], ...]
    class_values: tuple

    def values_array(self) -> np.ndarray:
        if self.mode == "exact":
            return np.array(self.class_values, dtype=object)
        return np.array(self.class_values, dtype=float)

    def matrix(self, cap: int = DEFAULT_TABLE_CAP) -> np.ndarray:
        """Full table over the canonical S_k order."""
        _check_table_cap(self.k, cap)
        return self.values_array()[symmetric_group(self.k).class_matrix()]

    def class_value(self, cycle_type: tuple[int, ...]) -> Fraction | float:
        return self.class_values[self.classes.index(tuple(cycle_type))]

    def value(self, pi: Permutation, sigma: Permutation) -> Fraction | float:
        if pi.k != self.k or sigma.k != self.k:
            raise IncompatibleReplicaError(f"permutations do not live in S_{self.k}")
        return self.class_value(compose(pi.inverse(), sigma).cycle_type)

    def as_float(self) -> WeingartenTable:
        if self.mode == "float":
            return self
        return self.model_copy(update={"mode": "float", "class_values": tuple(float(v) for v in self.class_values)})


_TABLES: dict[tuple[int, int, str], WeingartenTable] = {}


def _default_store() -> WeingartenStore | None:
    from ..config.settings import get_settings
    from .cache import WeingartenCache

    cfg = get_settings().weingarten_cache
    return WeingartenCache(cfg.path) if cfg.enabled else None


def _solve_class_values(dim: int, k: int, mode: Mode) -> tuple:
    system = class_gram_system(dim, k, mode)
    rhs = [1] + [0] * (system.shape[0] - 1)
    if mode == "exact":
        return tuple(exact.solve(system, rhs))
    return tuple(float(v) for v in np.linalg.solve(system, np.asarray(rhs, dtype=float)))


def weingarten(
    dim: int,
    k: int,
    mode: Mode = "exact",
    cap: int = DEFAULT_ENUMERATION_CAP,
    store: WeingartenStore | None = None,
) -> WeingartenTable:
    """Inverse of the Gram matrix at dimension ``dim`` (requires dim > k).

    Args:
        dim: Total dimension D.
        k: Replica count.
        mode: ``"exact"`` (Fractions, zero-residual inverse) or ``"float"``.
        cap: Largest k accepted.
        store: Optional persistent store; defaults to the configured
            on-disk cache when ``weingarten_cache.enabled`` is set.

    Raises:
        DomainError: dim <= k, where the Gram matrix may be singular.
        CapExceededError: k above ``cap``.
    """
    _check_mode(mode)
    _check_table_cap(k, cap)
    if dim <= k:
        raise DomainError(f"Gram matrix may be singular for D={dim} <= k={k}; need D > k")
    key = (dim, k, mode)
    table = _TABLES.get(key)
    if table is not None:
        return table

    started = time.perf_counter()
    values = None
    if mode == "exact":
        store = store if store is not None else _default_store()
        values = store.load(dim, k) if store is not None else None
        if values is not None:
            values = tuple(values)
    if values is None:
        values = _solve_class_values(dim, k, mode)
        if mode == "exact" and store is not None:
            store.store(dim, k, list(values))
    table = WeingartenTable(
        dim=dim,
        k=k,
        mode=mode,
        classes=symmetric_group(k).classes,
        class_values=values,
    )
    logger.debug("Weingarten table D=%d k=%d (%s) in %.3fs", dim, k, mode, time.perf_counter() - started)
    return _TABLES.setdefault(key, table)


def clear_caches() -> None:
    """Drop memoized Weingarten tables."""
    _TABLES.clear()
