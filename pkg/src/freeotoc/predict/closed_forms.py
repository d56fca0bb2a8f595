"""Closed-form subleading coefficients in free cumulants, k <= 4.

These are literal polynomial expressions used as independent checks on
the generic evaluations in :mod:`freeotoc.predict.subleading`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any

from ..core.exceptions import DomainError, InsufficientMomentsError, UnsupportedError
from ..freeprob.moments import MomentSequence, cumulants_from_moments

_MAX_CLOSED_FORM_K = 4


def _kappas(m: MomentSequence, k: int) -> tuple[Any, ...]:
    if m.K < k:
        raise InsufficientMomentsError(k, m.K)
    c = cumulants_from_moments(m.truncated(k))
    zero: Any = Fraction(0) if c.is_exact else 0.0
    return (zero, *c.kappas, *([zero] * (4 - k)))


def _check_k(k: int) -> None:
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > _MAX_CLOSED_FORM_K:
        raise UnsupportedError(f"closed forms are tabulated for k <= {_MAX_CLOSED_FORM_K}, got {k}")


def subleading_coeff_haar_closed_form(mA: MomentSequence, mB: MomentSequence, k: int) -> Any:
    """c_k(A, B) in free cumulants."""
    _check_k(k)
    _, a1, a2, a3, a4 = _kappas(mA, k)
    _, b1, b2, b3, b4 = _kappas(mB, k)
    if k == 1:
        return a1 * 0
    if k == 2:
        return -a2 * b2
    if k == 3:
        return a3 * (-3 * b1 * b2 + b3) - 3 * a1 * a2 * (2 * b1 * b2 + b3)
    return (
        a4 * (-6 * b1**2 * b2 + b2**2 + 4 * b1 * b3)
        + a2**2 * (-10 * b1**2 * b2 + b4)
        + 4 * a1 * a3 * (-5 * b1**2 * b2 + b4)
        - 2 * a1**2 * a2 * (5 * (2 * b1**2 * b2 + b2**2 + 2 * b1 * b3) + 3 * b4)
    )


def rmpu_layer_factor(n: int, d: int, exact: bool = True) -> Any:
    """(n - 1) - n/d^2, the weight of the first split part in c~_{k,n}."""
    return (n - 1) - (Fraction(n, d * d) if exact else n / d**2)


def subleading_coeff_rmpu_closed_form(mA: MomentSequence, mB: MomentSequence, n: int, d: int, k: int) -> Any:
    """c~_{k,n}(A, B) in free cumulants."""
    _check_k(k)
    if n < 1 or d < 2:
        raise DomainError(f"need n >= 1 and d >= 2, got n={n}, d={d}")
    _, a1, a2, a3, a4 = _kappas(mA, k)
    _, b1, b2, b3, b4 = _kappas(mB, k)
    exact = mA.is_exact and mB.is_exact
    p = rmpu_layer_factor(n, d, exact)
    tail = Fraction(1, d ** (2 * n)) if exact else 1.0 / d ** (2 * n)
    if k == 1:
        return a1 * 0
    if k == 2:
        return p * a2 * b2
    if k == 3:
        return p * (3 * a1 * a2 * (2 * b1 * b2 + b3) + 3 * a3 * b1 * b2) + tail * a3 * b3
    first = (
        6 * a4 * b1**2 * b2
        + 2 * a2**2 * b1 * (5 * b1 * b2 + 2 * b3)
        + 4 * a1 * a3 * (b2 * (5 * b1**2 + b2) + 2 * b1 * b3)
        + 2 * a1**2 * a2 * (10 * b1**2 * b2 + 5 * b2**2 + 10 * b1 * b3 + 3 * b4)
    )
    second = (
        a4 * (b2**2 + 4 * b1 * b3)
        + 4 * a1 * a3 * (b2**2 + 2 * b1 * b3 + b4)
        + a2**2 * (4 * b1 * b3 + b4)
    )
    return p * first + tail * second
