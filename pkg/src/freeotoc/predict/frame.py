"""Frame potentials F^(k) = E |tr(U V^dagger)|^2k.

For the staircase RMPU the pair (U, V) contracts to a ladder of
permutation pairs, one rung per gate, folded as (k! x k!) matrices X:

    X_1 = G_q
    Y_i = Wg_q X_i Wg_q
    X_{i+1} = (G_chi (Y_i o G_d) G_chi) o G_d      (o is the entrywise product)
    F = sum(Y_n o G_q)

with q = chi d.  At n = 1 this is tr(Wg G) = k!.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Any

from ..config.defaults import DEFAULT_EXACT_TRANSFER_CAP, DEFAULT_TRANSFER_CAP
from ..core.exceptions import CapExceededError, DomainError, UnsupportedError
from ..core.models import RmpuGeometry, Variant
from ..weingarten.tables import gram, weingarten

logger = logging.getLogger(__name__)


def frame_potential_haar(k: int) -> int:
    """k!, the Haar frame potential (valid for D >= k)."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    return math.factorial(k)


def _staircase_only(geom: RmpuGeometry) -> None:
    if geom.variant is Variant.TWO_FLOOR:
        raise UnsupportedError("frame potential of the two-floor geometry is not available")


def frame_potential_rmpu_exact(
    geom: RmpuGeometry,
    k: int,
    cap: int = DEFAULT_TRANSFER_CAP,
    exact_cap: int = DEFAULT_EXACT_TRANSFER_CAP,
) -> Any:
    """Exact RMPU frame potential by ladder transfer; Fraction for k <= exact_cap.

    Raises:
        UnsupportedError: two-floor geometry.
        DomainError: chi*d <= k.
    """
    _staircase_only(geom)
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > cap:
        raise CapExceededError("k for transfer contraction", k, cap)
    q = geom.q
    if q <= k:
        raise DomainError(f"need chi*d > k, got chi*d={q}, k={k}")
    mode = "exact" if k <= exact_cap else "float"
    wg = weingarten(q, k, mode).matrix(cap)
    g_q = gram(q, k, mode, cap=cap).entries
    g_chi = gram(geom.chi, k, mode, cap=cap).entries
    g_d = gram(geom.d, k, mode, cap=cap).entries

    x = g_q
    total: Any = None
    for i in range(1, geom.n + 1):
        y = wg @ x @ wg
        if i < geom.n:
            x = (g_chi @ (y * g_d) @ g_chi) * g_d
        else:
            total = (y * g_q).sum()
    logger.debug("frame potential d=%d r=%d n=%d k=%d (%s)", geom.d, geom.r, geom.n, k, mode)
    return Fraction(total) if mode == "exact" else float(total)


def frame_potential_rmpu_asymptotic(geom: RmpuGeometry, k: int) -> Fraction:
    """k! (1 + k(k-1)/(2 chi^2) (n - 1 - n/d^2 + 1/d^2n)), up to O(chi^-3)."""
    _staircase_only(geom)
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    d, n, chi = geom.d, geom.n, geom.chi
    bracket = (n - 1) - Fraction(n, d * d) + Fraction(1, d ** (2 * n))
    return math.factorial(k) * (1 + Fraction(k * (k - 1), 2 * chi * chi) * bracket)


def frame_potential_deviation(geom: RmpuGeometry, k: int) -> Any:
    """Relative deviation F_R / k! - 1 of the exact contraction."""
    return frame_potential_rmpu_exact(geom, k) / math.factorial(k) - 1
