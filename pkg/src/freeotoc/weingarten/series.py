"""1/D expansion of the Weingarten function.

Writing the Gram matrix as D^k (1 + sum_t D^-t A_t), where A_t is the class
indicator of Cayley distance t acting by convolution, the inverse is the
Neumann series

    D^k Wg = sum_j B_j D^-j,   B_0 = 1,   B_j = -sum_{t=1}^{min(j, k-1)} A_t * B_{j-t}

in exact integers.  For a pair at distance m, B_m is the Möbius function
and B_{m+2g} the genus-g coefficient Wg^(g).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..combinatorics.ncposet import mobius_of_type
from ..combinatorics.symgroup import Permutation, compose, symmetric_group
from ..config.defaults import DEFAULT_ENUMERATION_CAP
from ..core.exceptions import CapExceededError, DomainError, IncompatibleReplicaError, UnsupportedError


def convolve_classes(f: np.ndarray, g: np.ndarray, k: int) -> np.ndarray:
    """Convolution of two class functions on S_k: (f*g)(x) = sum_y f(y) g(y^-1 x)."""
    structure = symmetric_group(k).class_structure().astype(object)
    return np.tensordot(structure, np.asarray(g, dtype=object), axes=([2], [0])) @ np.asarray(f, dtype=object)


@lru_cache(maxsize=None)
def _series(k: int, max_order: int) -> tuple[tuple[int, ...], ...]:
    group = symmetric_group(k)
    p = len(group.classes)
    distance = group.class_distance
    indicators = [np.array([int(distance[c] == t) for c in range(p)], dtype=object) for t in range(k)]
    coefficients = [np.array([1] + [0] * (p - 1), dtype=object)]
    for j in range(1, max_order + 1):
        total = np.zeros(p, dtype=object)
        for t in range(1, min(j, k - 1) + 1):
            total = total + convolve_classes(indicators[t], coefficients[j - t], k)
        coefficients.append(-total)
    return tuple(tuple(int(x) for x in c) for c in coefficients)


def wg_series_coefficients(k: int, max_order: int, cap: int = DEFAULT_ENUMERATION_CAP) -> list[np.ndarray]:
    """Class-function coefficients B_0..B_max_order of D^k Wg in powers of 1/D."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > cap:
        raise CapExceededError("k", k, cap)
    if max_order < 0:
        raise DomainError(f"max_order must be >= 0, got {max_order}")
    return [np.array(c, dtype=object) for c in _series(k, max_order)]


def genus_class_values(k: int, genus: int) -> np.ndarray:
    """Wg^(genus) per conjugacy class: B_{dist(c) + 2 genus}[c]."""
    group = symmetric_group(k)
    distance = group.class_distance
    series = wg_series_coefficients(k, int(distance.max()) + 2 * genus)
    return np.array([series[int(distance[c]) + 2 * genus][c] for c in range(len(group.classes))], dtype=object)


def mobius_class_values(k: int) -> np.ndarray:
    """mu per conjugacy class (cycle factorization)."""
    return np.array([mobius_of_type(lam) for lam in symmetric_group(k).classes], dtype=object)


def wg_asymptotic_coeff(pi: Permutation, sigma: Permutation, k: int, order: int) -> Fraction:
    """Genus-``order`` coefficient of Wg(pi, sigma) in D^-(k + dist + 2 order).

    order 0 is the Möbius function; order 1 is Wg^(1); higher orders are
    not supported.
    """
    if pi.k != k or sigma.k != k:
        raise IncompatibleReplicaError(f"permutations do not live in S_{k}")
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    if order >= 2:
        raise UnsupportedError(f"Weingarten series coefficients of genus {order} >= 2 are not supported")
    cycle_type = compose(pi.inverse(), sigma).cycle_type
    if order == 0:
        return Fraction(mobius_of_type(cycle_type))
    group = symmetric_group(k)
    return Fraction(int(genus_class_values(k, 1)[group.classes.index(cycle_type)]))
