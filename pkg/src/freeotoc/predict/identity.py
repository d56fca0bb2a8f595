"""Frame potential as a sum of squared multi-operator OTOCs.

For the Haar ensemble on n qubits (D = 2^n),

    sum over Pauli tuples (P_1..P_k, Q_1..Q_k) of |C / D^2k|^2 = F^(k) / D^2(k+1),

with C the multi-operator OTOC of :func:`haar_multi_otoc_exact`.  The sum
is evaluated as one matrix product over all A-tuples and B-tuples.
"""
from __future__ import annotations

import itertools
import logging
import time
from functools import reduce

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..combinatorics.symgroup import Permutation, symmetric_group
from ..config.defaults import DEFAULT_IDENTITY_RTOL, DEFAULT_PAULI_ASSIGNMENT_CAP, DEFAULT_TABLE_CAP
from ..core.exceptions import CapExceededError, DomainError
from ..weingarten.tables import weingarten
from ..weingarten.twirl import replica_trace
from .frame import frame_potential_haar

logger = logging.getLogger(__name__)

_PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class IdentityReport(BaseModel):
    """Outcome of one frame-potential / OTOC identity check."""

    model_config = ConfigDict(frozen=True)

    D: int
    k: int
    lhs: float
    rhs: float
    relative_error: float
    tolerance: float
    passed: bool


def pauli_basis(qubits: int) -> list[np.ndarray]:
    """All 4^qubits Pauli strings as dense matrices."""
    if qubits < 1:
        raise DomainError(f"need at least one qubit, got {qubits}")
    return [reduce(np.kron, letters) for letters in itertools.product(_PAULI, repeat=qubits)]


def verify_frame_otoc_identity(
    D: int,
    k: int,
    frame_potential: float | None = None,
    tolerance: float = DEFAULT_IDENTITY_RTOL,
    cap: int = DEFAULT_PAULI_ASSIGNMENT_CAP,
) -> IdentityReport:
    """Check the Pauli-sum identity exhaustively.

    Args:
        D: Hilbert-space dimension, a power of two.
        k: OTOC order (D > k).
        frame_potential: Value used on the right-hand side; defaults to k!.
            Passing anything else is a negative control.
        tolerance: Relative tolerance for ``passed``.
        cap: Largest number of Pauli assignments (D^2)^(2k).
    """
    if D < 2 or D & (D - 1):
        raise DomainError(f"D must be a power of two, got {D}")
    if D <= k:
        raise DomainError(f"need D > k, got D={D}, k={k}")
    assignments = (D * D) ** (2 * k)
    if assignments > cap:
        raise CapExceededError("Pauli assignments", assignments, cap)

    started = time.perf_counter()
    paulis = pauli_basis(D.bit_length() - 1)
    group = symmetric_group(k)
    gamma_inverse = Permutation.long_cycle(k).inverse()
    perms = group.permutations()
    tuples = list(itertools.product(paulis, repeat=k))
    a_traces = np.array([[replica_trace(ops, p.inverse()) for p in perms] for ops in tuples])
    b_traces = np.array([[replica_trace(ops, gamma_inverse * p) for p in perms] for ops in tuples])
    wg = np.asarray(weingarten(D, k, "float").matrix(DEFAULT_TABLE_CAP), dtype=float)
    otocs = a_traces @ wg @ b_traces.T / D

    lhs = float(np.sum(np.abs(otocs / float(D) ** (2 * k)) ** 2))
    F = float(frame_potential_haar(k) if frame_potential is None else frame_potential)
    rhs = F / float(D) ** (2 * (k + 1))
    relative_error = abs(lhs - rhs) / abs(rhs) if rhs else abs(lhs)
    logger.info(
        "identity check D=%d k=%d: lhs=%.12g rhs=%.12g in %.2fs", D, k, lhs, rhs, time.perf_counter() - started
    )
    return IdentityReport(
        D=D,
        k=k,
        lhs=lhs,
        rhs=rhs,
        relative_error=relative_error,
        tolerance=tolerance,
        passed=relative_error <= tolerance,
    )
