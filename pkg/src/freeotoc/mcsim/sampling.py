"""Random streams and Haar-distributed unitaries.

Every sample i of a run with seed s draws from its own counter-based
generator, ``Philox(SeedSequence(s, spawn_key=(i,)))``, so results do not
depend on the number of worker threads or the order they finish in.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import qr

from ..core.exceptions import DomainError


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of a run seeded with ``seed``."""
    if index < 0:
        raise DomainError(f"sample index must be >= 0, got {index}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random dim x dim unitary.

    QR of a complex Ginibre matrix, with the columns rephased so that the
    diagonal of R is positive; without that step the distribution is not
    Haar.
    """
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = qr(z)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def unitarity_residual(U: np.ndarray) -> float:
    """max |U^dagger U - I|."""
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))
