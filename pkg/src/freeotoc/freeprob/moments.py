"""Moment and free-cumulant sequences with exact rational support.

A :class:`MomentSequence` holds normalized moments m_j = <A^j> = tr(A^j)/D
for j = 1..K.  Entries are ``Fraction`` when every input is rational
(integers, ``Fraction`` or ``"p/q"`` strings) and floats otherwise, and all
transforms below keep whichever arithmetic they are given.
"""
from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ..combinatorics.ncposet import enumerate_nc, mobius_of_type
from ..combinatorics.symgroup import Permutation, compose, integer_partitions, symmetric_group
from ..config.defaults import DEFAULT_MOMENT_ORDER_CAP
from ..core.exceptions import CapExceededError, DomainError, InsufficientMomentsError

Scalar = Any  # Fraction | float


def _coerce(value: Any) -> Scalar:
    if isinstance(value, bool):
        raise DomainError("booleans are not moments")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational number: {value!r}") from exc
    if isinstance(value, (np.integer,)):
        return Fraction(int(value))
    if isinstance(value, complex) or np.iscomplexobj(value):
        raise DomainError(f"moments must be real, got {value!r}")
    return float(value)


def _coerce_all(values: Iterable[Any]) -> tuple[Scalar, ...]:
    items = tuple(_coerce(v) for v in values)
    if any(isinstance(v, float) for v in items):
        return tuple(float(v) for v in items)
    return items


class _Sequence(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def K(self) -> int:
        return len(self._values())

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self._values())

    def _values(self) -> tuple[Scalar, ...]:
        raise NotImplementedError

    def to_json(self) -> str:
        """Ordered JSON array; rationals become ``"p/q"`` strings."""
        return json.dumps([str(v) if isinstance(v, Fraction) else v for v in self._values()])


class MomentSequence(_Sequence):
    """Normalized moments m_1..m_K of one operator."""

    moments: tuple[Any, ...]

    @field_validator("moments", mode="before")
    @classmethod
    def _rationals(cls, value: Any) -> tuple[Scalar, ...]:
        values = _coerce_all(value)
        if not values:
            raise ValueError("at least one moment is required")
        return values

    def _values(self) -> tuple[Scalar, ...]:
        return self.moments

    def m(self, j: int) -> Scalar:
        """m_j, with m_0 = 1."""
        if j == 0:
            return Fraction(1) if self.is_exact else 1.0
        if j > self.K:
            raise InsufficientMomentsError(j, self.K)
        return self.moments[j - 1]

    # ── Constructors ─────────────────────────────────────────────────

    @classmethod
    def from_spectrum(cls, values: Sequence[Any], K: int) -> MomentSequence:
        """Moments of the uniform distribution on ``values`` (exact if all rational)."""
        spectrum = _coerce_all(values)
        if not spectrum:
            raise DomainError("empty spectrum")
        if all(isinstance(v, Fraction) for v in spectrum):
            n = len(spectrum)
            return cls(moments=tuple(sum(v**j for v in spectrum) / n for j in range(1, K + 1)))
        eig = np.asarray(spectrum, dtype=float)
        return cls(moments=tuple(float(np.mean(eig**j)) for j in range(1, K + 1)))

    @classmethod
    def from_operator(cls, matrix: np.ndarray, K: int) -> MomentSequence:
        """Real parts of tr(A^j)/D for an explicit square matrix."""
        A = np.asarray(matrix)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DomainError(f"operator must be square, got shape {A.shape}")
        D = A.shape[0]
        power = np.eye(D, dtype=A.dtype)
        values = []
        for _ in range(K):
            power = power @ A
            values.append(float(np.trace(power).real) / D)
        return cls(moments=tuple(values))

    @classmethod
    def from_json(cls, source: str | Path) -> MomentSequence:
        """Read an ordered JSON array of numbers or ``"p/q"`` strings (text or file path)."""
        return cls(moments=tuple(_read_json_array(source)))

    # ── Derived sequences ────────────────────────────────────────────

    def traceless(self) -> MomentSequence:
        """Moments of A - m_1, the centered operator."""
        a = self.moments[0]
        centered = []
        for j in range(1, self.K + 1):
            centered.append(sum(math.comb(j, i) * self.m(i) * (-a) ** (j - i) for i in range(j + 1)))
        return MomentSequence(moments=tuple(centered))

    def tensor_power(self, copies: int) -> MomentSequence:
        """Moments of A^{⊗copies}: every normalized moment is raised to ``copies``."""
        return MomentSequence(moments=tuple(v**copies for v in self.moments))

    def as_float(self) -> MomentSequence:
        return MomentSequence(moments=tuple(float(v) for v in self.moments))

    def truncated(self, K: int) -> MomentSequence:
        if K > self.K:
            raise InsufficientMomentsError(K, self.K)
        return MomentSequence(moments=self.moments[:K])


class CumulantSequence(_Sequence):
    """Free cumulants kappa_1..kappa_K."""

    kappas: tuple[Any, ...]

    @field_validator("kappas", mode="before")
    @classmethod
    def _rationals(cls, value: Any) -> tuple[Scalar, ...]:
        values = _coerce_all(value)
        if not values:
            raise ValueError("at least one cumulant is required")
        return values

    def _values(self) -> tuple[Scalar, ...]:
        return self.kappas

    def kappa(self, j: int) -> Scalar:
        if j > self.K:
            raise InsufficientMomentsError(j, self.K)
        return self.kappas[j - 1]

    @classmethod
    def from_json(cls, source: str | Path) -> CumulantSequence:
        return cls(kappas=tuple(_read_json_array(source)))


def _read_json_array(source: str | Path) -> list[Any]:
    if isinstance(source, str) and source.lstrip().startswith("["):
        text = source
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise DomainError(f"cannot read moment file {source}: {exc}") from exc
    try:
        data = json.loads(text)
    except ValueError as exc:
        raise DomainError(f"invalid moment JSON: {exc}") from exc
    if not isinstance(data, list):
        raise DomainError("moment JSON must be an array")
    return data


# ── Partitioned moments ──────────────────────────────────────────────


def product_over_type(values: MomentSequence | CumulantSequence, cycle_type: Sequence[int]) -> Scalar:
    """prod over parts l of the l-th entry."""
    if isinstance(values, MomentSequence):
        getter = values.m
    else:
        getter = values.kappa
    needed = max(cycle_type, default=0)
    if needed > values.K:
        raise InsufficientMomentsError(needed, values.K)
    result: Scalar = Fraction(1) if values.is_exact else 1.0
    for length in cycle_type:
        result = result * getter(length)
    return result


def partitioned_moment(m: MomentSequence, p: Permutation) -> Scalar:
    """<A>_p = product over cycles c of p of m_|c|."""
    return product_over_type(m, p.cycle_type)


def class_moments(m: MomentSequence, k: int) -> np.ndarray:
    """<A>_lam for every conjugacy class of S_k, in canonical class order."""
    classes = symmetric_group(k).classes
    dtype = object if m.is_exact else float
    return np.array([product_over_type(m, lam) for lam in classes], dtype=dtype)


# ── Moment-cumulant transforms ───────────────────────────────────────


def _check_order(K: int, cap: int) -> None:
    if K > cap:
        raise CapExceededError("moment order", K, cap)


def _nc_block_type_count(blocks: tuple[int, ...]) -> int:
    """Number of non-crossing partitions of n with the given block sizes."""
    n = sum(blocks)
    b = len(blocks)
    denominator = math.factorial(n - b + 1)
    for size in set(blocks):
        denominator *= math.factorial(blocks.count(size))
    return math.factorial(n) // denominator


@lru_cache(maxsize=None)
def _kreweras_type_pairs(k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """(cycle type of sigma, mu(sigma, gamma)) summed over sigma in NC(k)."""
    gamma = Permutation.long_cycle(k)
    totals: dict[tuple[int, ...], int] = {}
    for sigma in enumerate_nc(k, cap=k):
        weight = mobius_of_type(compose(sigma.inverse(), gamma).cycle_type)
        totals[sigma.cycle_type] = totals.get(sigma.cycle_type, 0) + weight
    return tuple(sorted(totals.items()))


def cumulants_from_moments(m: MomentSequence, cap: int = DEFAULT_MOMENT_ORDER_CAP) -> CumulantSequence:
    """kappa_k = sum over sigma in NC(k) of <A>_sigma mu(sigma, gamma_k)."""
    _check_order(m.K, cap)
    kappas = []
    for k in range(1, m.K + 1):
        total: Scalar = Fraction(0) if m.is_exact else 0.0
        for cycle_type, weight in _kreweras_type_pairs(k):
            if weight:
                total = total + weight * product_over_type(m, cycle_type)
        kappas.append(total)
    return CumulantSequence(kappas=tuple(kappas))


def moments_from_cumulants(c: CumulantSequence, cap: int = DEFAULT_MOMENT_ORDER_CAP) -> MomentSequence:
    """m_k = sum over pi in NC(k) of prod over blocks kappa_|block|."""
    _check_order(c.K, cap)
    moments = []
    for k in range(1, c.K + 1):
        total: Scalar = Fraction(0) if c.is_exact else 0.0
        for blocks in integer_partitions(k):
            total = total + _nc_block_type_count(blocks) * product_over_type(c, blocks)
        moments.append(total)
    return MomentSequence(moments=tuple(moments))
