"""The non-crossing partition poset NC(k) embedded in S_k.

A permutation is non-crossing when it lies on a geodesic from the identity
to the long cycle gamma: ``dist(e, p) + dist(p, gamma) = k - 1``.  Elements
of NC(k) are generated directly as non-crossing set partitions whose
blocks become increasing cycles; the order relation pi <= sigma is block
refinement, stored as a boolean ``leq`` matrix over the canonical order.

Typical usage::

    poset = nc_poset(4)
    poset.size                 # 14
    poset.leq_matrix()         # (14, 14) bool
    count_multichains(10, 2)   # 1430715
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from collections.abc import Iterator
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..config.defaults import (
    DEFAULT_COUNTING_CAP,
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_PAIR_COUNTING_CAP,
    DEFAULT_PAIR_ENUMERATION_CAP,
)
from ..core.exceptions import CapExceededError, DomainError
from .symgroup import (
    Permutation,
    cayley_distance,
    compose,
    symmetric_group,
)

logger = logging.getLogger(__name__)

# Largest NC(k) for which the C_k x C_k order matrix is materialized.
_ORDER_MATRIX_MAX_K = 9


# ── Closed-form counts ───────────────────────────────────────────────


def catalan(n: int) -> int:
    """C_n = binom(2n, n) / (n + 1)."""
    if n < 0:
        raise DomainError(f"catalan index must be >= 0, got {n}")
    return math.comb(2 * n, n) // (n + 1)


def fuss_catalan(k: int, m: int) -> int:
    """Number of m-multichains in NC(k): binom((m+1)k, k) / (mk + 1)."""
    if k < 0 or m < 1:
        raise DomainError(f"fuss_catalan needs k >= 0 and m >= 1, got k={k}, m={m}")
    return math.comb((m + 1) * k, k) // (m * k + 1)


# ── Membership, complement, Möbius ───────────────────────────────────


def is_noncrossing(p: Permutation) -> bool:
    """True iff p sits on a geodesic between e and gamma."""
    k = p.k
    gamma = Permutation.long_cycle(k)
    return (k - p.num_cycles) + cayley_distance(p, gamma) == k - 1


def kreweras(s: Permutation) -> Permutation:
    """Kreweras complement s^-1 gamma of a non-crossing permutation."""
    if not is_noncrossing(s):
        raise DomainError(f"{s} is crossing; its complement leaves NC({s.k})")
    return compose(s.inverse(), Permutation.long_cycle(s.k))


def mobius_of_type(cycle_type: tuple[int, ...]) -> int:
    """Product over cycles of (-1)^(l-1) C_(l-1)."""
    value = 1
    for length in cycle_type:
        value *= (-1) ** (length - 1) * catalan(length - 1)
    return value


def mobius(a: Permutation, b: Permutation) -> int:
    """Möbius function mu(a, b) = mu(a^-1 b), factorized over cycles."""
    return mobius_of_type(compose(a.inverse(), b).cycle_type)


def nc_leq(a: Permutation, b: Permutation) -> bool:
    """The NC order a <= b <= gamma (both on one geodesic from e)."""
    k = a.k
    gamma = Permutation.long_cycle(k)
    total = (k - a.num_cycles) + cayley_distance(a, b) + cayley_distance(b, gamma)
    return total == k - 1


# ── Chains ───────────────────────────────────────────────────────────


class GeodesicChain(BaseModel):
    """Permutations e -> x_1 -> ... -> x_m -> gamma saturating the triangle inequality."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    elements: tuple[Permutation, ...]
    k: int

    @model_validator(mode="after")
    def _on_geodesic(self) -> GeodesicChain:
        if any(p.k != self.k for p in self.elements):
            raise ValueError("chain elements disagree on k")
        if chain_length(self.elements, self.k) != self.k - 1:
            raise ValueError("chain does not lie on a geodesic from e to gamma")
        return self


def chain_length(elements: tuple[Permutation, ...] | list[Permutation], k: int) -> int:
    """Summed Cayley distances along e -> elements -> gamma."""
    path = [Permutation.identity(k), *elements, Permutation.long_cycle(k)]
    return sum(cayley_distance(a, b) for a, b in zip(path, path[1:]))


# ── NC(k) generation ─────────────────────────────────────────────────


@lru_cache(maxsize=None)
def _nc_shapes(length: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All non-crossing set partitions of 0..length-1 (blocks sorted)."""
    if length == 0:
        return ((),)
    shapes = []
    rest = range(1, length)
    for size in range(length):
        for partners in itertools.combinations(rest, size):
            block = (0, *partners)
            bounds = [*block, length]
            gaps = [(bounds[j] + 1, bounds[j + 1]) for j in range(len(block))]
            options = [
                [tuple(tuple(lo + x for x in b) for b in shape) for shape in _nc_shapes(hi - lo)]
                for lo, hi in gaps
            ]
            for combo in itertools.product(*options):
                blocks = [block]
                for part in combo:
                    blocks.extend(part)
                shapes.append(tuple(sorted(blocks)))
    return tuple(shapes)


def enumerate_nc(k: int, cap: int = DEFAULT_COUNTING_CAP) -> list[Permutation]:
    """All of NC(k), blocks as increasing cycles, sorted by image word."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > cap:
        raise CapExceededError("k", k, cap)
    perms = [
        Permutation.from_cycles([[x + 1 for x in block] for block in shape], k)
        for shape in _nc_shapes(k)
    ]
    perms.sort(key=lambda p: p.images)
    return perms


def _block_minima(p: Permutation) -> list[int]:
    labels = [0] * p.k
    for cycle in p.cycles():
        low = min(cycle) - 1
        for x in cycle:
            labels[x - 1] = low
    return labels


class NcPoset:
    """NC(k) with vectorized order and Möbius tables.

    Attributes:
        k: Replica count.
        elements: NC(k) sorted by image word.
        size: Catalan number C_k.
        labels: (size, k) block minimum of every point, 0-based.
        cycle_counts: #(pi) per element.
        kreweras_index: position of sigma^-1 gamma for each sigma.
    """

    def __init__(self, k: int, cap: int = DEFAULT_COUNTING_CAP) -> None:
        started = time.perf_counter()
        self.k = k
        self.elements = enumerate_nc(k, cap)
        self.size = len(self.elements)
        self._position = {p.images: i for i, p in enumerate(self.elements)}
        self.labels = np.array([_block_minima(p) for p in self.elements], dtype=np.int64)
        self.cycle_counts = np.array([p.num_cycles for p in self.elements], dtype=np.int64)
        gamma = Permutation.long_cycle(k)
        self.kreweras_index = np.array(
            [self._position[compose(p.inverse(), gamma).images] for p in self.elements],
            dtype=np.int64,
        )
        self._leq: np.ndarray | None = None
        self._mobius: np.ndarray | None = None
        logger.debug("built NC(%d) with %d elements in %.3fs", k, self.size, time.perf_counter() - started)

    def index(self, p: Permutation) -> int:
        try:
            return self._position[p.images]
        except KeyError as exc:
            raise DomainError(f"{p} is not in NC({self.k})") from exc

    def leq_matrix(self) -> np.ndarray:
        """leq[i, j] is True iff elements[i] refines elements[j]."""
        if self._leq is None:
            if self.k > _ORDER_MATRIX_MAX_K:
                raise CapExceededError("k for the NC(k) order matrix", self.k, _ORDER_MATRIX_MAX_K)
            leq = np.empty((self.size, self.size), dtype=bool)
            labels = self.labels
            for i in range(self.size):
                leq[i] = np.all(labels[:, labels[i]] == labels, axis=1)
            self._leq = leq
        return self._leq

    def mobius_matrix(self) -> np.ndarray:
        """mu(pi_i, pi_j) where pi_i <= pi_j, zero elsewhere."""
        if self._mobius is None:
            leq = self.leq_matrix()
            mu = np.zeros((self.size, self.size), dtype=np.int64)
            inverses = [p.inverse() for p in self.elements]
            for i, j in zip(*np.nonzero(leq)):
                mu[i, j] = mobius_of_type(compose(inverses[i], self.elements[j]).cycle_type)
            self._mobius = mu
        return self._mobius

    def group_indices(self) -> np.ndarray:
        """Positions of the elements in the canonical S_k order."""
        group = symmetric_group(self.k)
        return np.asarray(group.index_of(np.array([p.zero_based() for p in self.elements])), dtype=np.int64)


_POSETS: dict[int, NcPoset] = {}


def nc_poset(k: int, cap: int = DEFAULT_COUNTING_CAP) -> NcPoset:
    """Shared :class:`NcPoset` for k (first builder wins)."""
    if k > cap:
        raise CapExceededError("k", k, cap)
    poset = _POSETS.get(k)
    if poset is None:
        poset = _POSETS.setdefault(k, NcPoset(k, cap=max(cap, k)))
    return poset


def clear_poset_cache() -> None:
    _POSETS.clear()


# ── Multichains ──────────────────────────────────────────────────────


def _power_coefficient(seq: list[int], s: int, t: int) -> int:
    """Coefficient of x^t in (sum_i seq[i] x^i)^s."""
    poly = [1] + [0] * t
    for _ in range(s):
        poly = [sum(poly[a] * seq[b - a] for a in range(b + 1)) for b in range(t + 1)]
    return poly[t]


def block_weighted_sums(weights: list[int], k: int) -> list[int]:
    """S_n = sum over NC(n) of the product of weights[|block|], for n = 0..k.

    The block holding 1 has size s and leaves s gaps, each filled by an
    independent non-crossing partition.
    """
    sums = [1] + [0] * k
    for n in range(1, k + 1):
        sums[n] = sum(weights[s] * _power_coefficient(sums, s, n - s) for s in range(1, n + 1))
    return sums


def count_multichains(k: int, m: int, cap: int = DEFAULT_COUNTING_CAP) -> int:
    """Number of m-tuples pi_1 <= ... <= pi_m in NC(k), without materializing them.

    Fixing pi_m = sigma leaves the lower interval [e, sigma], a product of
    NC(|b|) over the blocks b of sigma, so chain counts of length m are
    block-weighted sums of the counts of length m - 1.
    """
    if m < 1:
        raise DomainError(f"chain length must be >= 1, got {m}")
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > cap:
        raise CapExceededError("k", k, cap)
    counts = [1] * (k + 1)
    for _ in range(m):
        counts = block_weighted_sums(counts, k)
    return counts[k]


def iter_multichains(k: int, m: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple[Permutation, ...]]:
    """Depth-first walk over m-multichains, each tuple in chain order."""
    if m < 1:
        raise DomainError(f"chain length must be >= 1, got {m}")
    poset = nc_poset(k, cap)
    leq = poset.leq_matrix()
    successors = [np.flatnonzero(leq[i]) for i in range(poset.size)]

    def extend(chain: list[int]) -> Iterator[tuple[Permutation, ...]]:
        if len(chain) == m:
            yield tuple(poset.elements[i] for i in chain)
            return
        for j in successors[chain[-1]]:
            chain.append(int(j))
            yield from extend(chain)
            chain.pop()

    for start in range(poset.size):
        yield from extend([start])


def enumerate_multichains(k: int, m: int, cap: int = DEFAULT_ENUMERATION_CAP) -> list[tuple[Permutation, ...]]:
    """All m-tuples (pi_1 <= ... <= pi_m <= gamma); m = 2 gives Fuss-Catalan many."""
    started = time.perf_counter()
    chains = list(iter_multichains(k, m, cap))
    logger.debug("enumerated %d %d-chains of NC(%d) in %.3fs", len(chains), m, k, time.perf_counter() - started)
    return chains


# ── Genus stratification ─────────────────────────────────────────────


def genus_one_pair_indices(k: int, cap: int = DEFAULT_PAIR_ENUMERATION_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Canonical S_k indices of all pairs exceeding the geodesic by exactly 2."""
    if k > cap:
        raise CapExceededError("k", k, cap)
    group = symmetric_group(k)
    pis: list[np.ndarray] = []
    sigmas: list[np.ndarray] = []
    for i in range(group.order):
        total = (
            group.distance_to_identity[i]
            + group.class_distance[group.relative_class_row(i)]
            + group.distance_to_long_cycle
        )
        hit = np.flatnonzero(total == k + 1)
        if hit.size:
            pis.append(np.full(hit.size, i, dtype=np.int64))
            sigmas.append(hit)
    if not pis:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(pis), np.concatenate(sigmas)


def enumerate_genus_one_pairs(k: int, cap: int = DEFAULT_PAIR_ENUMERATION_CAP) -> list[tuple[Permutation, Permutation]]:
    """All (pi, sigma) with dist(e,pi) + dist(pi,sigma) + dist(sigma,gamma) = k + 1."""
    started = time.perf_counter()
    group = symmetric_group(k)
    pi_idx, sigma_idx = genus_one_pair_indices(k, cap)
    pairs = [(group.permutation(i), group.permutation(j)) for i, j in zip(pi_idx, sigma_idx)]
    logger.debug("enumerated %d genus-one pairs for k=%d in %.3fs", len(pairs), k, time.perf_counter() - started)
    return pairs


@lru_cache(maxsize=None)
def factorization_counts(k: int) -> np.ndarray:
    """T[l, m, n]: number of x y z = gamma with x, y, z in classes l, m, n.

    Summing a class-function kernel over pairs (pi, sigma) with fixed
    classes of pi, pi^-1 sigma and sigma^-1 gamma reduces to this tensor.
    """
    group = symmetric_group(k, cap=max(k, DEFAULT_ENUMERATION_CAP))
    structure = group.class_structure()
    gamma_class = int(group.class_index[group.long_cycle_index])
    # x y = w with w in class rho, then z = w^-1 gamma.
    return np.einsum("rml,rn->lmn", structure, structure[gamma_class])


def genus_stratification(k: int, cap: int = DEFAULT_PAIR_COUNTING_CAP) -> dict[int, int]:
    """Histogram of dist(e,pi) + dist(pi,sigma) + dist(sigma,gamma) - (k-1) over S_k x S_k."""
    if k > cap:
        raise CapExceededError("k", k, cap)
    group = symmetric_group(k, cap=max(k, DEFAULT_ENUMERATION_CAP))
    counts = factorization_counts(k)
    dist = group.class_distance
    excess = dist[:, None, None] + dist[None, :, None] + dist[None, None, :] - (k - 1)
    histogram: dict[int, int] = {}
    for value, count in zip(excess.ravel(), counts.ravel()):
        if count:
            histogram[int(value)] = histogram.get(int(value), 0) + int(count)
    return dict(sorted(histogram.items()))


def count_genus_one_pairs(k: int, cap: int = DEFAULT_PAIR_COUNTING_CAP) -> int:
    """Number of genus-one pairs, from class factorization counts (no pair list)."""
    return genus_stratification(k, cap).get(2, 0)


def enumerate_broken_multichains(
    k: int,
    length: int,
    excess: int,
    cap: int = DEFAULT_PAIR_ENUMERATION_CAP,
) -> list[tuple[Permutation, ...]]:
    """Walks e -> x_1 -> ... -> x_length -> gamma of total distance k - 1 + excess.

    Intermediate elements range over all of S_k.  Odd excess is impossible
    by parity and returns an empty list.
    """
    if k > cap:
        raise CapExceededError("k", k, cap)
    if length < 1 or excess < 0:
        raise DomainError(f"need length >= 1 and excess >= 0, got {length}, {excess}")
    if excess % 2:
        return []
    group = symmetric_group(k)
    dist = group.distance_matrix()
    to_gamma = group.distance_to_long_cycle
    budget = k - 1 + excess
    walks: list[tuple[Permutation, ...]] = []

    def extend(path: list[int], used: int) -> None:
        last = path[-1]
        if len(path) == length + 1:
            if used + to_gamma[last] == budget:
                walks.append(tuple(group.permutation(i) for i in path[1:]))
            return
        reachable = np.flatnonzero(used + dist[last] + to_gamma <= budget)
        for nxt in reachable:
            path.append(int(nxt))
            extend(path, used + int(dist[last, nxt]))
            path.pop()

    extend([group.identity_index], 0)
    return walks


def count_report(k_values: list[int], m: int = 2) -> list[dict[str, object]]:
    """Rows (k, m, count, wall_time) for the counting CLI."""
    rows = []
    for k in k_values:
        started = time.perf_counter()
        count = count_multichains(k, m)
        rows.append({"k": k, "m": m, "count": count, "wall_time": round(time.perf_counter() - started, 6)})
    return rows
