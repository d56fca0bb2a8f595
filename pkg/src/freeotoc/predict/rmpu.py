"""OTOCs averaged over random matrix product unitaries (RMPUs).

The exact average is a chain of permutation sums, one Weingarten table
Wg(chi*d, k) per gate, glued by Gram factors on the bond legs.  It is
folded left to right as (k! x k!) transfer matrices:

    v <- Wg_q a                                   gate 1 acting on A
    v <- Wg_q diag(d^#sigma) G_chi (leg_i * v)    gates 2..n
    C  = (1/D) sum_pi v[pi] q^#(pi^-1 gamma) <B>_{pi^-1 gamma}

where ``leg_i`` is the d-dimensional site leaving the staircase after gate
i (carrying B when ``b_site == i``).  At large chi only geodesic chains
survive and the sum collapses to the free-probability value; that
collapse is what :func:`rmpu_otoc_leading` evaluates.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Any

import numpy as np

from ..combinatorics.ncposet import nc_poset
from ..combinatorics.symgroup import symmetric_group
from ..config.defaults import DEFAULT_COUNTING_CAP, DEFAULT_EXACT_TRANSFER_CAP, DEFAULT_TRANSFER_CAP
from ..core.exceptions import (
    CapExceededError,
    ConsistencyError,
    DomainError,
    InsufficientMomentsError,
    UnsupportedError,
)
from ..core.models import RmpuGeometry, Variant
from ..freeprob.freeness import free_otoc_prediction
from ..freeprob.moments import MomentSequence, class_moments, partitioned_moment
from ..weingarten.tables import gram, weingarten

logger = logging.getLogger(__name__)


def _powers(base: int, exponents: np.ndarray, exact: bool) -> np.ndarray:
    if exact:
        return np.array([Fraction(base) ** int(e) for e in exponents], dtype=object)
    return float(base) ** exponents.astype(float)


def _check_moments(mA: MomentSequence, mB: MomentSequence, k: int) -> None:
    available = min(mA.K, mB.K)
    if available < k:
        raise InsufficientMomentsError(k, available)


def rmpu_otoc_exact(
    mA: MomentSequence,
    mB: MomentSequence,
    geom: RmpuGeometry,
    k: int,
    b_site: int | None = None,
    cap: int = DEFAULT_TRANSFER_CAP,
    exact_cap: int = DEFAULT_EXACT_TRANSFER_CAP,
) -> Any:
    """Exact RMPU-averaged OTOC with A on the first r+1 sites.

    Args:
        mA, mB: Normalized moments of A and B.
        geom: Staircase geometry.  The descending orientation evaluates the
            mirrored placement (A on the last block, B on the first), whose
            value equals the ascending canonical one.
        k: OTOC order.
        b_site: Single site 1..N carrying B.  ``None`` (or any s >= n)
            places B on the last r+1 sites.  Sites s < n leave the circuit
            after gate s, which truncates the light cone.
        cap: Largest k for the transfer contraction.
        exact_cap: Largest k contracted in rational arithmetic (rational
            moments only); floats above.

    Raises:
        DomainError: chi*d <= k or b_site outside 1..N.
        UnsupportedError: two-floor geometry.
    """
    if geom.variant is Variant.TWO_FLOOR:
        raise UnsupportedError("exact OTOC contraction is only available for the staircase geometry")
    if k > cap:
        raise CapExceededError("k for transfer contraction", k, cap)
    q, d, n = geom.q, geom.d, geom.n
    if q <= k:
        raise DomainError(f"need chi*d > k, got chi*d={q}, k={k}")
    if b_site is not None and not 1 <= b_site <= geom.N:
        raise DomainError(f"b_site must lie in 1..{geom.N}, got {b_site}")
    _check_moments(mA, mB, k)

    exact = mA.is_exact and mB.is_exact and k <= exact_cap
    mode = "exact" if exact else "float"
    group = symmetric_group(k)
    counts = group.cycle_counts
    complement_counts = counts[group.kreweras_index]

    wg_q = weingarten(q, k, mode).matrix(cap)
    g_chi = gram(geom.chi, k, mode, cap=cap).entries
    a_values = class_moments(mA, k)[group.class_index]
    b_values = class_moments(mB, k)[group.class_index[group.kreweras_index]]
    if not exact:
        a_values = a_values.astype(float)
        b_values = b_values.astype(float)
        wg_q = wg_q.astype(float)
        g_chi = g_chi.astype(float)

    fresh_leg = _powers(d, counts, exact)
    exit_leg = _powers(d, complement_counts, exact)
    placed_early = b_site is not None and b_site < n

    v = wg_q @ (_powers(q, counts, exact) * a_values)
    for i in range(1, n):
        leg = exit_leg * b_values if b_site == i else exit_leg
        v = wg_q @ (fresh_leg * (g_chi @ (leg * v)))

    final = _powers(q, complement_counts, exact)
    if not placed_early:
        final = final * b_values
    total = v @ final
    logger.debug("RMPU transfer d=%d r=%d n=%d k=%d (%s)", d, geom.r, n, k, mode)
    return total / Fraction(geom.D) if exact else float(total) / geom.D


def rmpu_otoc_leading(
    mA: MomentSequence,
    mB: MomentSequence,
    n: int,
    k: int,
    cap: int = DEFAULT_COUNTING_CAP,
) -> Any:
    """Leading-order RMPU OTOC: the multichain sum over pi_1 <= sigma_1 <= ... <= sigma_n.

    Each gate contributes mu(pi_i, sigma_i).  The Möbius identity collapses
    the sum to the free-probability value, which is checked before
    returning.

    Raises:
        ConsistencyError: the multichain sum differs from the 2-chain value.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    _check_moments(mA, mB, k)
    poset = nc_poset(k, cap)
    exact = mA.is_exact and mB.is_exact
    dtype = object if exact else float
    gate = poset.mobius_matrix().T.astype(dtype)
    bond = poset.leq_matrix().T.astype(np.int64).astype(dtype)
    v = np.array([partitioned_moment(mA, p) for p in poset.elements], dtype=dtype)
    b_values = np.array([partitioned_moment(mB, poset.elements[j]) for j in poset.kreweras_index], dtype=dtype)
    for i in range(n):
        v = gate @ v
        if i < n - 1:
            v = bond @ v
    value = v @ b_values
    expected = free_otoc_prediction(mA, mB, k)
    if exact:
        if value != expected:
            raise ConsistencyError(f"multichain sum {value} != free value {expected} (n={n}, k={k})")
    else:
        value = float(value)
        if not np.isclose(value, float(expected), rtol=1e-9, atol=1e-12):
            raise ConsistencyError(f"multichain sum {value} != free value {expected} (n={n}, k={k})")
    return expected


def nonlocal_otoc_leading(mA: MomentSequence, mB: MomentSequence, k: int, cap: int = DEFAULT_COUNTING_CAP) -> Any:
    """Leading RMPU value at n = 2 for product observables A⊗A and B⊗B.

    Both gates see one tensor factor of each observable, so the chain
    alpha_1 <= beta_1 <= alpha_2 <= beta_2 carries two A and two B moments:

        sum mu(a1, b1) mu(a2, b2) <A>_a1 <A>_a2 <B>_{b1^-1 gamma} <B>_{b2^-1 gamma}.
    """
    _check_moments(mA, mB, k)
    poset = nc_poset(k, cap)
    exact = mA.is_exact and mB.is_exact
    dtype = object if exact else float
    mu = poset.mobius_matrix().astype(dtype)
    leq = poset.leq_matrix().astype(np.int64).astype(dtype)
    a = np.array([partitioned_moment(mA, p) for p in poset.elements], dtype=dtype)
    b = np.array([partitioned_moment(mB, poset.elements[j]) for j in poset.kreweras_index], dtype=dtype)
    left = (mu.T @ a) * b          # indexed by beta_1
    right = a * (mu @ b)           # indexed by alpha_2
    value = left @ leq @ right
    return value if exact else float(value)


def nonlocal_discrepancy(mA: MomentSequence, mB: MomentSequence, k: int) -> Any:
    """Nonlocal leading value minus the Haar (free) value for A⊗A, B⊗B."""
    haar = free_otoc_prediction(mA.tensor_power(2), mB.tensor_power(2), k)
    return nonlocal_otoc_leading(mA, mB, k) - haar
