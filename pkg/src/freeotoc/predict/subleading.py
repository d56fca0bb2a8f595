"""First corrections to freeness: c_k for Haar, c~_{k,n} for RMPUs.

Haar:  C(D) = C_FP + c_k / D^2 + O(D^-4).
RMPU:  C(chi) = C_FP + c~_{k,n} / chi^2 + O(chi^-3).

Both coefficients are bilinear in the partitioned moments.  The Haar one
is a class form: with x y z = gamma (x = pi, y = pi^-1 sigma,
z = sigma^-1 gamma) a triple contributes Wg^(1)(y) when it is geodesic and
mu(y) when it overshoots the geodesic by two.

The RMPU coefficient sums two kinds of term:

* one gate carrying Wg^(1) on an otherwise geodesic multichain, which
  collapses to n/d^2 times the geodesic part of c_k;
* all-Möbius walks e -> a_1 -> b_1 -> ... -> b_n -> gamma of excess two,
  each gate weighted by d^-e_i, e_i = 1 - k + |a_i| + d(a_i, b_i) + d(b_i, gamma).

The walk sum is a dynamic program over S_k with two states (excess 0 and
excess 2 so far).
"""
from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..combinatorics.ncposet import factorization_counts
from ..combinatorics.symgroup import symmetric_group
from ..config.defaults import DEFAULT_ENUMERATION_CAP, DEFAULT_TRANSFER_CAP
from ..core.exceptions import CapExceededError, DomainError, InsufficientMomentsError
from ..freeprob.freeness import BilinearMomentForm
from ..freeprob.moments import MomentSequence, class_moments
from ..weingarten.series import genus_class_values, mobius_class_values

logger = logging.getLogger(__name__)


def _class_form(k: int, kernels: dict[int, np.ndarray]) -> BilinearMomentForm:
    """sum over x y z = gamma of kernels[excess](class of y), keyed by (class x, class z)."""
    group = symmetric_group(k)
    counts = factorization_counts(k)
    dist = group.class_distance
    p = len(group.classes)
    coefficients = np.zeros((p, p), dtype=object)
    for lam, mu, nu in zip(*np.nonzero(counts)):
        excess = int(dist[lam] + dist[mu] + dist[nu]) - (k - 1)
        kernel = kernels.get(excess)
        if kernel is not None:
            coefficients[lam, nu] += int(counts[lam, mu, nu]) * kernel[mu]
    return BilinearMomentForm(k=k, coefficients=coefficients)


@lru_cache(maxsize=None)
def free_class_form(k: int) -> BilinearMomentForm:
    """C_FP written over S_k triples; equals the 2-chain form."""
    return _class_form(k, {0: mobius_class_values(k)})


@lru_cache(maxsize=None)
def geodesic_wg1_form(k: int) -> BilinearMomentForm:
    """sum over 2-chains of Wg^(1)(pi, sigma) <A>_pi <B>_{sigma^-1 gamma}."""
    return _class_form(k, {0: genus_class_values(k, 1)})


@lru_cache(maxsize=None)
def haar_subleading_form(k: int) -> BilinearMomentForm:
    """The D^-2 coefficient c_k as a bilinear moment form."""
    return _class_form(k, {0: genus_class_values(k, 1), 2: mobius_class_values(k)})


def _check(mA: MomentSequence, mB: MomentSequence, k: int, cap: int) -> None:
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > cap:
        raise CapExceededError("k", k, cap)
    available = min(mA.K, mB.K)
    if available < k:
        raise InsufficientMomentsError(k, available)


def subleading_coeff_haar(
    mA: MomentSequence,
    mB: MomentSequence,
    k: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Any:
    """c_k(A, B): the D^-2 coefficient of the Haar OTOC around C_FP."""
    _check(mA, mB, k, cap)
    return haar_subleading_form(k).evaluate(mA, mB)


# ── RMPU ─────────────────────────────────────────────────────────────


class _WalkTables:
    """Per-(k, d) gate and bond matrices of the excess-two walk sum."""

    def __init__(self, k: int, d: int, exact: bool) -> None:
        group = symmetric_group(k)
        dist = group.distance_matrix().astype(np.int64)
        to_gamma = group.distance_to_long_cycle.astype(np.int64)
        from_identity = group.distance_to_identity.astype(np.int64)

        self.start_increment = from_identity + to_gamma - (k - 1)
        gate_increment = dist + to_gamma[None, :] - to_gamma[:, None]
        bond_increment = gate_increment
        exponent = 1 - k + from_identity[:, None] + dist + to_gamma[None, :]
        mu = mobius_class_values(k)[group.class_matrix()]

        if exact:
            scale = np.vectorize(lambda e: Fraction(1, d ** int(e)), otypes=[object])(exponent)
            gate = mu.astype(object) * scale
            zero: Any = Fraction(0)
        else:
            gate = mu.astype(float) * float(d) ** (-exponent.astype(float))
            zero = 0.0
        dtype = object if exact else float
        self.gate = {inc: np.where(gate_increment == inc, gate, zero).astype(dtype) for inc in (0, 2)}
        self.bond = {inc: (bond_increment == inc).astype(np.int64).astype(dtype) for inc in (0, 2)}


def _walk_sums(mA: MomentSequence, mB: MomentSequence, n: int, d: int, k: int) -> tuple[Any, Any]:
    """(excess-0 total, excess-2 total) of the all-Möbius walk sum."""
    exact = mA.is_exact and mB.is_exact
    group = symmetric_group(k)
    tables = _WalkTables(k, d, exact)
    a_values = class_moments(mA, k)[group.class_index]
    b_values = class_moments(mB, k)[group.class_index[group.kreweras_index]]
    if not exact:
        a_values = a_values.astype(float)
        b_values = b_values.astype(float)
    zero: Any = Fraction(0) if exact else 0.0

    t0 = np.where(tables.start_increment == 0, a_values, zero)
    t2 = np.where(tables.start_increment == 2, a_values, zero)
    for i in range(n):
        g0, g2 = tables.gate[0], tables.gate[2]
        t0, t2 = g0.T @ t0, g0.T @ t2 + g2.T @ t0
        if i < n - 1:
            b0, b2 = tables.bond[0], tables.bond[2]
            t0, t2 = b0.T @ t0, b0.T @ t2 + b2.T @ t0
    return t0 @ b_values, t2 @ b_values


def subleading_coeff_rmpu(
    mA: MomentSequence,
    mB: MomentSequence,
    n: int,
    d: int,
    k: int,
    cap: int = DEFAULT_TRANSFER_CAP,
) -> Any:
    """c~_{k,n}(A, B): the chi^-2 coefficient of the RMPU OTOC around C_FP.

    At n = 1 this is c_k / d^2, the Haar coefficient expressed in chi = D/d.
    """
    _check(mA, mB, k, cap)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    exact = mA.is_exact and mB.is_exact
    _, broken = _walk_sums(mA, mB, n, d, k)
    gate_term = geodesic_wg1_form(k).evaluate(mA, mB)
    value = (Fraction(n, d * d) if exact else n / d**2) * gate_term + broken
    logger.debug("c~ for k=%d n=%d d=%d: %s", k, n, d, value)
    return value if exact else float(value)


def rmpu_leading_walk_sum(mA: MomentSequence, mB: MomentSequence, n: int, d: int, k: int) -> Any:
    """Excess-0 branch of the walk program; equals C_FP for every n and d."""
    _check(mA, mB, k, DEFAULT_TRANSFER_CAP)
    leading, _ = _walk_sums(mA, mB, n, d, k)
    return leading


class SplitCoefficients(BaseModel):
    """a_k, b_k in c~_{k,n} = (n/d^2 - (n-1)) a_k + b_k / d^(2n)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    d: int
    fitted_n: tuple[int, int]
    a: Any
    b: Any

    def predict(self, n: int) -> Any:
        """c~_{k,n} implied by the split."""
        if isinstance(self.a, Fraction):
            return (Fraction(n, self.d**2) - (n - 1)) * self.a + self.b / Fraction(self.d) ** (2 * n)
        return (n / self.d**2 - (n - 1)) * self.a + self.b / float(self.d) ** (2 * n)


def rmpu_split_coefficients(
    mA: MomentSequence,
    mB: MomentSequence,
    k: int,
    d: int = 2,
    fitted_n: tuple[int, int] = (2, 3),
) -> SplitCoefficients:
    """Solve the two-term split of c~_{k,n} from two layer counts.

    The split is a conjecture; callers check a + b = c_k and predictions
    at other n instead of assuming them.
    """
    n1, n2 = fitted_n
    if n1 == n2:
        raise DomainError("the split needs two distinct layer counts")
    exact = mA.is_exact and mB.is_exact
    one: Any = Fraction(1) if exact else 1.0
    rows = []
    rhs = []
    for n in fitted_n:
        rows.append((one * n / d**2 - (n - 1), one / d ** (2 * n)))
        rhs.append(subleading_coeff_rmpu(mA, mB, n, d, k))
    (p, q), (r, s) = rows
    det = p * s - q * r
    a = (rhs[0] * s - q * rhs[1]) / det
    b = (p * rhs[1] - r * rhs[0]) / det
    return SplitCoefficients(k=k, d=d, fitted_n=(n1, n2), a=a, b=b)
