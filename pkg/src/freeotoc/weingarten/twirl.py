r"""Replica permutation operators, permuted traces and the exact Haar twirl.

T_p acts on (C^D)^{\otimes k} as T_p|x_1 ... x_k> = |x_{p^-1(1)} ... x_{p^-1(k)}>,
with basis index in ``np.kron`` order (first factor most significant).
Only :func:`replica_operator` and :func:`haar_twirl_exact` materialize
D^k-dimensional objects; every analytic formula goes through
:func:`replica_trace`.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
import scipy.sparse as sp

from ..combinatorics.symgroup import Permutation, symmetric_group
from ..config.defaults import DEFAULT_REPLICA_DIM_CAP
from ..core.exceptions import CapExceededError, DomainError, IncompatibleReplicaError
from .tables import weingarten

logger = logging.getLogger(__name__)


def _check_replica_dim(D: int, k: int, cap: int) -> int:
    size = D**k
    if size > cap:
        raise CapExceededError("replica dimension D^k", size, cap)
    return size


def _replica_rows(word: np.ndarray, D: int) -> np.ndarray:
    """For each column x, the row y with T[y, x] = 1 (0-based image word)."""
    k = len(word)
    digits = np.indices((D,) * k).reshape(k, -1)
    inverse_word = np.argsort(word)
    return np.ravel_multi_index(tuple(digits[inverse_word]), (D,) * k)


def replica_operator(p: Permutation, D: int, cap: int = DEFAULT_REPLICA_DIM_CAP) -> sp.csr_matrix:
    """Sparse permutation matrix T_p on D^k replicas."""
    size = _check_replica_dim(D, p.k, cap)
    rows = _replica_rows(p.zero_based(), D)
    return sp.csr_matrix((np.ones(size), (rows, np.arange(size))), shape=(size, size))


def replica_trace(ops: Sequence[np.ndarray], p: Permutation) -> complex:
    """tr[(W_1 ⊗ ... ⊗ W_k) T_p] without building the replica space.

    Factorizes over cycles of p^-1 as tr(W_i W_{p^-1(i)} W_{p^-2(i)} ...);
    with p = gamma^-1 this is the ordered trace tr(W_1 W_2 ... W_k).
    """
    if len(ops) != p.k:
        raise IncompatibleReplicaError(f"{len(ops)} operators for a permutation of S_{p.k}")
    mats = [np.asarray(w) for w in ops]
    result: complex = 1.0
    for cycle in p.inverse().cycles():
        product = mats[cycle[0] - 1]
        for i in cycle[1:]:
            product = product @ mats[i - 1]
        result *= np.trace(product)
    return complex(result)


def haar_twirl_exact(X, D: int, k: int, cap: int = DEFAULT_REPLICA_DIM_CAP) -> sp.csr_matrix:
    """k-fold Haar twirl sum_{pi,sigma} Wg(pi,sigma) tr[X T_{sigma^-1}] T_pi.

    Args:
        X: Dense or sparse (D^k, D^k) operator.
        D: Local dimension of each replica (must exceed k).
        k: Replica count.

    Returns:
        The twirled operator as a sparse matrix.
    """
    size = _check_replica_dim(D, k, cap)
    if X.shape != (size, size):
        raise DomainError(f"operator shape {X.shape} does not match D^k = {size}")
    group = symmetric_group(k)
    wg = np.asarray(weingarten(D, k).as_float().matrix(), dtype=float)

    cols = np.arange(size)
    traces = np.empty(group.order, dtype=complex)
    for s in range(group.order):
        rows = _replica_rows(group.inverse_words[s], D)
        traces[s] = np.asarray(X[cols, rows]).sum()
    coefficients = wg @ traces

    result = sp.csr_matrix((size, size), dtype=complex)
    for i in range(group.order):
        if coefficients[i] != 0:
            rows = _replica_rows(group.words[i], D)
            result = result + coefficients[i] * sp.csr_matrix(
                (np.ones(size), (rows, cols)), shape=(size, size)
            )
    logger.debug("twirled a %dx%d operator at D=%d k=%d", size, size, D, k)
    return result
