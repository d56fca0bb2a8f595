"""Observables on a contiguous block of sites.

An :class:`ObservableSpec` stores the local matrix and its support; the
operator on the full chain is ``1 ⊗ matrix ⊗ 1``.  Kinds with a rational
spectrum (Pauli strings, projectors) keep it so their moments stay exact.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.defaults import DEFAULT_HERMITIAN_TOLERANCE
from ..core.exceptions import ObservableError
from ..core.models import ObservableKind
from ..freeprob.moments import MomentSequence

_PAULI_LETTERS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ObservableSpec(BaseModel):
    """Hermitian matrix on sites ``first_site..last_site`` (1-based, inclusive)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str = "explicit"
    matrix: np.ndarray
    first_site: int = Field(ge=1)
    last_site: int = Field(ge=1)
    d: int = Field(default=2, ge=2)
    spectrum: Optional[tuple[Fraction, ...]] = None

    @model_validator(mode="after")
    def _hermitian_on_support(self) -> ObservableSpec:
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"observable matrix must be square, got shape {m.shape}")
        if self.last_site < self.first_site:
            raise ValueError("last_site precedes first_site")
        if m.shape[0] != self.d**self.support_size:
            raise ValueError(f"matrix of size {m.shape[0]} does not act on {self.support_size} sites of dimension {self.d}")
        if np.max(np.abs(m - m.conj().T)) > DEFAULT_HERMITIAN_TOLERANCE:
            raise ValueError("observable is not Hermitian")
        return self

    @property
    def support_size(self) -> int:
        return self.last_site - self.first_site + 1

    @property
    def local_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def normalized_trace(self) -> float:
        return float(np.trace(self.matrix).real) / self.local_dim

    @property
    def traceless(self) -> bool:
        return abs(np.trace(self.matrix)) <= DEFAULT_HERMITIAN_TOLERANCE

    @property
    def operator_norm(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))

    def is_scalar(self, atol: float = DEFAULT_HERMITIAN_TOLERANCE) -> bool:
        """True if the matrix is a multiple of the identity."""
        return bool(np.allclose(self.matrix, self.matrix[0, 0] * np.eye(self.local_dim), atol=atol, rtol=0.0))

    def placed(self, first_site: int) -> ObservableSpec:
        """The same operator moved to start at ``first_site``."""
        return self.model_copy(update={"first_site": first_site, "last_site": first_site + self.support_size - 1})

    def embed(self, d: int, N: int) -> np.ndarray:
        """1 ⊗ matrix ⊗ 1 on N sites of dimension d."""
        if d != self.d:
            raise ObservableError(f"observable built for d={self.d}, used with d={d}")
        if self.last_site > N:
            raise ObservableError(f"support {self.first_site}..{self.last_site} exceeds {N} sites")
        left = np.eye(d ** (self.first_site - 1))
        right = np.eye(d ** (N - self.last_site))
        return np.kron(np.kron(left, self.matrix), right)

    def moments(self, K: int) -> MomentSequence:
        """Normalized moments m_1..m_K (exact for rational spectra)."""
        if self.spectrum is not None:
            return MomentSequence.from_spectrum(self.spectrum, K)
        return MomentSequence.from_operator(self.matrix, K)

    @classmethod
    def from_json(cls, source: str | Path) -> ObservableSpec:
        """Read ``{"matrix": [[[re, im], ...], ...], "first_site": .., "d": ..}``.

        ``source`` is JSON text or a path to a JSON file.
        """
        try:
            if isinstance(source, str) and source.lstrip().startswith("{"):
                data = json.loads(source)
            else:
                data = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ObservableError(f"cannot read observable JSON: {exc}") from exc
        return observable_from_dict(data)


def observable_from_dict(data: dict[str, Any]) -> ObservableSpec:
    """Observable from a mapping: an explicit ``matrix`` or a ``kind`` with params."""
    if not isinstance(data, dict):
        raise ObservableError("observable must be a JSON object")
    first = int(data.get("first_site", 1))
    d = int(data.get("d", 2))
    if "matrix" not in data:
        kind = data.get("kind")
        if kind is None:
            raise ObservableError("observable needs either 'matrix' or 'kind'")
        return make_observable(kind, data.get("params", {}), (first, int(data.get("last_site", first))), d=d)
    try:
        entries = np.asarray(data["matrix"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ObservableError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    if entries.ndim != 3 or entries.shape[2] != 2:
        raise ObservableError(f"matrix entries must be [re, im] pairs, got array of shape {entries.shape}")
    matrix = entries[..., 0] + 1j * entries[..., 1]
    size = round(np.log(matrix.shape[0]) / np.log(d)) if matrix.shape[0] > 1 else 1
    last = int(data.get("last_site", first + size - 1))
    try:
        return ObservableSpec(matrix=matrix, first_site=first, last_site=last, d=d)
    except ValueError as exc:
        raise ObservableError(str(exc)) from exc


def _pauli_string(letters: str) -> tuple[np.ndarray, tuple[Fraction, ...]]:
    letters = letters.upper()
    if not letters or any(ch not in _PAULI_LETTERS for ch in letters):
        raise ObservableError(f"invalid Pauli string {letters!r}")
    matrix = reduce(np.kron, [_PAULI_LETTERS[ch] for ch in letters])
    dim = matrix.shape[0]
    if set(letters) == {"I"}:
        return matrix, (Fraction(1),) * dim
    return matrix, (Fraction(1),) * (dim // 2) + (Fraction(-1),) * (dim // 2)


def _random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2
    return h / np.max(np.abs(np.linalg.eigvalsh(h)))


def make_observable(
    kind: ObservableKind | str,
    params: dict[str, Any] | None,
    sites: tuple[int, int],
    d: int = 2,
) -> ObservableSpec:
    """Build one of the standard observables on ``sites`` (1-based, inclusive).

    Kinds and params:
        pauli_string: ``letters`` (one of IXYZ per site, d = 2 only).
        random_hermitian: ``seed``; spectrum rescaled to operator norm 1.
        projector: ``rank`` (default half the support dimension).
        shifted_projector: ``rank`` and ``shift`` (default 1/2), P - shift with norm at most 1.
    """
    params = dict(params or {})
    try:
        kind = ObservableKind(kind)
    except ValueError as exc:
        raise ObservableError(f"unknown observable kind {kind!r}") from exc
    first, last = sites
    if first < 1 or last < first:
        raise ObservableError(f"invalid support {first}..{last}")
    dim = d ** (last - first + 1)
    spectrum: tuple[Fraction, ...] | None = None

    if kind is ObservableKind.PAULI_STRING:
        if d != 2:
            raise ObservableError("Pauli strings need d = 2")
        letters = str(params.get("letters", "Z" * (last - first + 1)))
        if len(letters) != last - first + 1:
            raise ObservableError(f"Pauli string {letters!r} does not cover {last - first + 1} sites")
        matrix, spectrum = _pauli_string(letters)
    elif kind is ObservableKind.RANDOM_HERMITIAN:
        matrix = _random_hermitian(dim, int(params.get("seed", 0)))
    else:
        rank = int(params.get("rank", dim // 2))
        if not 0 <= rank <= dim:
            raise ObservableError(f"projector rank must lie in 0..{dim}, got {rank}")
        diagonal = [Fraction(1)] * rank + [Fraction(0)] * (dim - rank)
        if kind is ObservableKind.SHIFTED_PROJECTOR:
            try:
                shift = Fraction(str(params.get("shift", "1/2")))
            except (ValueError, ZeroDivisionError) as exc:
                raise ObservableError(f"invalid shift {params.get('shift')!r}") from exc
            diagonal = [v - shift for v in diagonal]
            if max(abs(v) for v in diagonal) > 1:
                raise ObservableError(f"shifted projector P - {shift} has operator norm above 1")
        matrix = np.diag([float(v) for v in diagonal]).astype(complex)
        spectrum = tuple(diagonal)

    return ObservableSpec(kind=kind.value, matrix=matrix, first_site=first, last_site=last, d=d, spectrum=spectrum)
