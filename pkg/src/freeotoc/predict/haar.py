"""Exact Haar-averaged OTOCs at finite dimension.

With A_U = U^dagger A U, the k-fold Weingarten sum gives

    C = (1/D) sum_{pi, sigma} Wg(pi^-1 sigma) D^#pi <A>_pi D^#(sigma^-1 gamma) <B>_{sigma^-1 gamma}.

Substituting x = pi, y = pi^-1 sigma, z = sigma^-1 gamma (so x y z = gamma)
turns the (k!)^2 sum into a contraction of class vectors with the
factorization tensor of :func:`factorization_counts`.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

import numpy as np

from ..combinatorics.ncposet import factorization_counts
from ..combinatorics.symgroup import Permutation, symmetric_group
from ..config.defaults import DEFAULT_DENSE_DIM_CAP, DEFAULT_ENUMERATION_CAP, DEFAULT_TABLE_CAP
from ..core.exceptions import CapExceededError, DomainError, IncompatibleReplicaError, InsufficientMomentsError
from ..freeprob.moments import MomentSequence, class_moments
from ..weingarten.tables import weingarten
from ..weingarten.twirl import replica_trace

logger = logging.getLogger(__name__)


def _dimension_weights(D: int, k: int, exact: bool) -> np.ndarray:
    lengths = [len(lam) for lam in symmetric_group(k).classes]
    if exact:
        return np.array([Fraction(D) ** n for n in lengths], dtype=object)
    return np.array([float(D) ** n for n in lengths])


def contract_classes(a: np.ndarray, w: np.ndarray, b: np.ndarray, k: int) -> Any:
    """sum over x y z = gamma of a(x) w(y) b(z) for class functions a, w, b."""
    counts = factorization_counts(k)
    if a.dtype == object or w.dtype == object or b.dtype == object:
        partial = np.tensordot(counts.astype(object), b, axes=([2], [0]))
        return a @ partial @ w
    return float(np.einsum("lmn,l,m,n->", counts.astype(float), a, w, b))


def haar_otoc_exact(
    mA: MomentSequence,
    mB: MomentSequence,
    D: int,
    k: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Any:
    """Exact Haar average of (1/D) tr[(A_U B)^k] from the moments of A and B.

    Exact (``Fraction``) when both moment sequences are rational.

    Raises:
        DomainError: D <= k.
        InsufficientMomentsError: fewer than k moments.
    """
    if D <= k:
        raise DomainError(f"need D > k, got D={D}, k={k}")
    available = min(mA.K, mB.K)
    if available < k:
        raise InsufficientMomentsError(k, available)
    exact = mA.is_exact and mB.is_exact
    wg = weingarten(D, k, "exact" if exact else "float", cap=cap)
    scale = _dimension_weights(D, k, exact)
    a = scale * class_moments(mA, k)
    b = scale * class_moments(mB, k)
    w = wg.values_array()
    value = contract_classes(a, w, b, k)
    return value / D if exact else float(value) / D


def haar_multi_otoc_exact(
    opsA: Sequence[np.ndarray],
    opsB: Sequence[np.ndarray],
    D: int,
    cap: int = DEFAULT_DENSE_DIM_CAP,
    table_cap: int = DEFAULT_TABLE_CAP,
) -> complex:
    """Haar average of (1/D) tr[A1_U B1 A2_U B2 ... Ak_U Bk] for explicit operators.

    The value is complex in general (the operators need not be Hermitian).
    """
    k = len(opsA)
    if len(opsB) != k:
        raise IncompatibleReplicaError(f"{k} A operators but {len(opsB)} B operators")
    if D > cap:
        raise CapExceededError("dimension D", D, cap)
    for op in (*opsA, *opsB):
        if np.shape(op) != (D, D):
            raise DomainError(f"operator of shape {np.shape(op)} is not {D}x{D}")
    if D <= k:
        raise DomainError(f"need D > k, got D={D}, k={k}")
    a, b = multi_trace_vectors(opsA, opsB)
    wg = np.asarray(weingarten(D, k, "float").matrix(table_cap), dtype=float)
    return complex(b @ wg @ a) / D


def multi_trace_vectors(opsA: Sequence[np.ndarray], opsB: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Per-permutation traces tr[(⊗A) T_{sigma^-1}] and tr[(⊗B) T_{gamma^-1 pi}]."""
    k = len(opsA)
    group = symmetric_group(k)
    gamma_inverse = Permutation.long_cycle(k).inverse()
    a = np.empty(group.order, dtype=complex)
    b = np.empty(group.order, dtype=complex)
    for i, perm in enumerate(group.permutations()):
        a[i] = replica_trace(opsA, perm.inverse())
        b[i] = replica_trace(opsB, gamma_inverse * perm)
    return a, b
