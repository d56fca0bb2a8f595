"""Dense random matrix product unitaries.

Sites are ordered left to right as kron factors, site 1 most significant.
Gate i of a staircase acts on sites i..i+r.  The canonical (ascending)
circuit is U = U_1 U_2 ... U_n, so U^dagger A U conjugates an operator on
the first block by U_1 first and carries it towards the last sites.
"""
from __future__ import annotations

import logging

import numpy as np

from ..config.defaults import DEFAULT_DENSE_DIM_CAP
from ..core.exceptions import CapExceededError, DomainError
from ..core.interfaces import UnitaryEnsemble
from ..core.models import EnsembleConfig, Orientation, RmpuGeometry, Variant
from .sampling import sample_haar_unitary

logger = logging.getLogger(__name__)


def _check_dense(D: int, cap: int) -> None:
    if D > cap:
        raise CapExceededError("dense dimension D", D, cap)


def embed_gate(gate: np.ndarray, first_site: int, d: int, N: int) -> np.ndarray:
    """gate on sites first_site.. (1-based) tensored with identities elsewhere."""
    span = round(np.log(gate.shape[0]) / np.log(d))
    if d**span != gate.shape[0] or first_site < 1 or first_site + span - 1 > N:
        raise DomainError(f"gate of size {gate.shape[0]} does not fit at site {first_site} of {N}")
    left = np.eye(d ** (first_site - 1))
    right = np.eye(d ** (N - first_site - span + 1))
    return np.kron(np.kron(left, gate), right)


class HaarEnsemble:
    """Global Haar measure on U(D)."""

    def __init__(self, dimension: int, cap: int = DEFAULT_DENSE_DIM_CAP) -> None:
        _check_dense(dimension, cap)
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        return self._dimension

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return sample_haar_unitary(self._dimension, rng)


class RmpuEnsemble:
    """Staircase or two-floor RMPU with independent Haar gates of size chi*d."""

    def __init__(self, geometry: RmpuGeometry, cap: int = DEFAULT_DENSE_DIM_CAP) -> None:
        _check_dense(geometry.D, cap)
        self.geometry = geometry

    @property
    def dimension(self) -> int:
        return self.geometry.D

    def _apply(self, U: np.ndarray, gates: list[np.ndarray], sites: range) -> np.ndarray:
        g = self.geometry
        for site in sites:
            U = U @ embed_gate(gates[site - 1], site, g.d, g.N)
        return U

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        g = self.geometry
        upper = [sample_haar_unitary(g.q, rng) for _ in range(g.n)]
        if g.orientation is Orientation.DESCENDING:
            sites = range(g.n, 0, -1)
        else:
            sites = range(1, g.n + 1)
        U = self._apply(np.eye(g.D, dtype=complex), upper, sites)
        if g.variant is Variant.TWO_FLOOR:
            lower = [sample_haar_unitary(g.q, rng) for _ in range(g.n - 1)]
            U = self._apply(U, lower, range(g.n - 1, 0, -1))
        return U


def make_ensemble(config: EnsembleConfig, cap: int = DEFAULT_DENSE_DIM_CAP) -> UnitaryEnsemble:
    """Ensemble described by ``config``."""
    if config.geometry is None:
        return HaarEnsemble(config.D, cap)
    return RmpuEnsemble(config.geometry, cap)


def build_rmpu(config: EnsembleConfig, rng: np.random.Generator, cap: int = DEFAULT_DENSE_DIM_CAP) -> np.ndarray:
    """One dense D x D unitary drawn from the ensemble of ``config``."""
    return make_ensemble(config, cap).sample(rng)


def operator_entanglement_rank(U: np.ndarray, d: int, N: int, cut: int, rtol: float = 1e-10) -> int:
    """Operator Schmidt rank of U across the cut after site ``cut``."""
    if not 1 <= cut < N:
        raise DomainError(f"cut must lie in 1..{N - 1}, got {cut}")
    dL, dR = d**cut, d ** (N - cut)
    if U.shape != (dL * dR, dL * dR):
        raise DomainError(f"operator of shape {U.shape} does not match d={d}, N={N}")
    reshaped = U.reshape(dL, dR, dL, dR).transpose(0, 2, 1, 3).reshape(dL * dL, dR * dR)
    singular = np.linalg.svd(reshaped, compute_uv=False)
    return int(np.sum(singular > rtol * singular[0]))
