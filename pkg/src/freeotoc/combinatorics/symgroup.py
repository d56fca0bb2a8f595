"""Symmetric group machinery: permutations, cycles, Cayley distance, enumeration.

Conventions used throughout the package:

* A :class:`Permutation` of ``{1..k}`` is stored as its 1-based image word.
* Composition is ``(a * b)(i) = a(b(i))``.
* The replica operator ``T_p`` sends ``|x_1 ... x_k>`` to
  ``|x_{p^-1(1)} ... x_{p^-1(k)}>`` so that ``T_a T_b = T_{a*b}``.
* ``gamma`` is the long cycle ``i -> i+1 (mod k)``.

:class:`SymmetricGroup` holds vectorized numpy tables over the canonical
(lexicographic by image word) enumeration; everything that sums over S_k
indexes into it.
"""
from __future__ import annotations

import itertools
import logging
import math
import re
import time
from collections.abc import Iterable, Iterator, Sequence

import numpy as np

from ..config.defaults import DEFAULT_ENUMERATION_CAP
from ..core.exceptions import CapExceededError, DomainError, IncompatibleReplicaError

logger = logging.getLogger(__name__)

_CYCLE_GROUP = re.compile(r"\(([^()]*)\)")
_CYCLE_TEXT = re.compile(r"^\s*(\([^()]*\)\s*)+$")

# Largest S_k for which the (k!)^2 relative-class matrix is materialized.
_CLASS_MATRIX_MAX_K = 7


class Permutation:
    """An element of S_k given by its 1-based image word.

    Cycles are computed on demand and cached.  Instances are immutable and
    hashable, so they can key dictionaries and live in sets.
    """

    __slots__ = ("_images", "_cycles")

    def __init__(self, images: Iterable[int]) -> None:
        words = tuple(int(x) for x in images)
        if not words or sorted(words) != list(range(1, len(words) + 1)):
            raise DomainError(f"not a permutation image word: {words}")
        self._images = words
        self._cycles: tuple[tuple[int, ...], ...] | None = None

    # ── Constructors ─────────────────────────────────────────────────

    @classmethod
    def identity(cls, k: int) -> Permutation:
        return cls(range(1, k + 1))

    @classmethod
    def long_cycle(cls, k: int) -> Permutation:
        """The canonical k-cycle gamma: i -> i+1, k -> 1."""
        return cls([*range(2, k + 1), 1])

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], k: int | None = None) -> Permutation:
        """Build from disjoint cycles; points not mentioned are fixed."""
        cycles = [tuple(int(x) for x in c) for c in cycles]
        support = [x for c in cycles for x in c]
        if len(set(support)) != len(support):
            raise DomainError(f"cycles are not disjoint: {cycles}")
        size = k if k is not None else max(support, default=0)
        if size < 1 or any(x < 1 or x > size for x in support):
            raise DomainError(f"cycle entries out of range 1..{size}: {cycles}")
        images = list(range(1, size + 1))
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a - 1] = b
        return cls(images)

    @classmethod
    def parse(cls, text: str, k: int | None = None) -> Permutation:
        return parse_cycles(text, k)

    @classmethod
    def from_zero_based(cls, word: Sequence[int]) -> Permutation:
        """Trusted fast path for words coming out of :class:`SymmetricGroup`."""
        obj = cls.__new__(cls)
        obj._images = tuple(int(x) + 1 for x in word)
        obj._cycles = None
        return obj

    # ── Accessors ────────────────────────────────────────────────────

    @property
    def k(self) -> int:
        return len(self._images)

    @property
    def images(self) -> tuple[int, ...]:
        return self._images

    def zero_based(self) -> np.ndarray:
        return np.asarray(self._images, dtype=np.int64) - 1

    def __call__(self, i: int) -> int:
        return self._images[i - 1]

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles (fixed points included), each opened at its smallest point."""
        if self._cycles is None:
            seen = [False] * self.k
            found: list[tuple[int, ...]] = []
            for start in range(1, self.k + 1):
                if seen[start - 1]:
                    continue
                cycle = []
                i = start
                while not seen[i - 1]:
                    seen[i - 1] = True
                    cycle.append(i)
                    i = self._images[i - 1]
                found.append(tuple(cycle))
            self._cycles = tuple(found)
        return self._cycles

    @property
    def num_cycles(self) -> int:
        return len(self.cycles())

    @property
    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths as a partition of k (non-increasing)."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def inverse(self) -> Permutation:
        inv = [0] * self.k
        for i, image in enumerate(self._images, start=1):
            inv[image - 1] = i
        return Permutation(inv)

    # ── Dunder protocol ──────────────────────────────────────────────

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._images == other._images

    def __hash__(self) -> int:
        return hash(self._images)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r})"

    def __str__(self) -> str:
        return format_cycles(self)


# ── Group operations ─────────────────────────────────────────────────


def _check_same_k(a: Permutation, b: Permutation) -> None:
    if a.k != b.k:
        raise IncompatibleReplicaError(f"replica counts differ: {a.k} != {b.k}")


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Return a∘b, i.e. the map i -> a(b(i))."""
    _check_same_k(a, b)
    return Permutation(a.images[j - 1] for j in b.images)


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def num_cycles(p: Permutation) -> int:
    """Number of disjoint cycles of p, fixed points included."""
    return p.num_cycles


def cayley_distance(a: Permutation, b: Permutation) -> int:
    """Minimal number of transpositions taking a to b: k - #(a^-1 b)."""
    _check_same_k(a, b)
    return a.k - compose(a.inverse(), b).num_cycles


def adjacency_indicator(a: Permutation, b: Permutation, alpha: int) -> int:
    """1 if a and b are at Cayley distance alpha, else 0."""
    return int(cayley_distance(a, b) == alpha)


# ── Enumeration ──────────────────────────────────────────────────────


def _check_cap(k: int, cap: int) -> None:
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if k > cap:
        raise CapExceededError("k", k, cap)


def enumerate_permutations(k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> list[Permutation]:
    """All k! permutations, lexicographic by image word."""
    _check_cap(k, cap)
    return [Permutation(w) for w in itertools.permutations(range(1, k + 1))]


def iter_permutations(k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Permutation]:
    _check_cap(k, cap)
    return (Permutation(w) for w in itertools.permutations(range(1, k + 1)))


def rank(p: Permutation) -> int:
    """Position of p in the canonical enumeration (Lehmer code)."""
    word = p.images
    k = len(word)
    result = 0
    for i, w in enumerate(word):
        smaller_after = sum(1 for v in word[i + 1:] if v < w)
        result += smaller_after * math.factorial(k - 1 - i)
    return result


def unrank(index: int, k: int) -> Permutation:
    """Inverse of :func:`rank`."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if not 0 <= index < math.factorial(k):
        raise DomainError(f"rank {index} outside 0..{math.factorial(k) - 1}")
    pool = list(range(1, k + 1))
    word = []
    for i in range(k - 1, -1, -1):
        digit, index = divmod(index, math.factorial(i))
        word.append(pool.pop(digit))
    return Permutation(word)


# ── Cycle notation ───────────────────────────────────────────────────


def parse_cycles(text: str, k: int | None = None) -> Permutation:
    """Parse cycle notation such as ``"(123)(4)"`` or ``"(1 2 10)(3)"``.

    Single-character entries are read digit by digit; separate entries
    with spaces or commas once any point exceeds 9.
    """
    if not _CYCLE_TEXT.match(text or ""):
        raise DomainError(f"malformed cycle notation: {text!r}")
    cycles = []
    for body in _CYCLE_GROUP.findall(text):
        body = body.strip()
        if not body:
            raise DomainError(f"empty cycle in {text!r}")
        parts = re.split(r"[\s,]+", body) if re.search(r"[\s,]", body) else list(body)
        try:
            cycles.append(tuple(int(x) for x in parts))
        except ValueError as exc:
            raise DomainError(f"non-integer cycle entry in {text!r}") from exc
    return Permutation.from_cycles(cycles, k)


def format_cycles(p: Permutation) -> str:
    """Cycle notation with fixed points, e.g. ``"(123)(4)"``."""
    sep = "" if p.k <= 9 else " "
    return "".join("(" + sep.join(str(x) for x in c) + ")" for c in p.cycles())


# ── Conjugacy classes ────────────────────────────────────────────────


def integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n as non-increasing tuples, largest first part first."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - part, part):
            yield (part, *rest)


def conjugacy_classes(k: int) -> tuple[tuple[int, ...], ...]:
    """Cycle types of S_k, ordered by distance from e then lexicographically."""
    return tuple(sorted(integer_partitions(k), key=lambda lam: (k - len(lam), lam)))


def class_size(partition: Sequence[int]) -> int:
    """Number of permutations with the given cycle type: k! / z_lambda."""
    parts = tuple(partition)
    k = sum(parts)
    z = 1
    for length in set(parts):
        mult = parts.count(length)
        z *= length**mult * math.factorial(mult)
    return math.factorial(k) // z


def cycle_counts(words: np.ndarray) -> np.ndarray:
    """Number of cycles of every row of a (m, k) array of 0-based image words."""
    words = np.asarray(words, dtype=np.int64)
    m, k = words.shape
    visited = np.zeros((m, k), dtype=bool)
    counts = np.zeros(m, dtype=np.int64)
    rows = np.arange(m)
    for start in range(k):
        fresh = ~visited[:, start]
        counts += fresh
        cur = np.full(m, start, dtype=np.int64)
        for _ in range(k):
            visited[rows[fresh], cur[fresh]] = True
            cur = words[rows, cur]
    return counts


def _cycle_type_keys(words: np.ndarray) -> np.ndarray:
    """Per-row sorted cycle-length-per-point arrays (a canonical cycle type key)."""
    m, k = words.shape
    lengths = np.zeros((m, k), dtype=np.int64)
    base = np.arange(k)
    cur = words.copy()
    for t in range(1, k + 1):
        hit = (cur == base) & (lengths == 0)
        lengths[hit] = t
        cur = np.take_along_axis(words, cur, axis=1)
    return -np.sort(-lengths, axis=1)


def _key_to_partition(key: Sequence[int]) -> tuple[int, ...]:
    parts = []
    i = 0
    while i < len(key):
        length = int(key[i])
        parts.append(length)
        i += length
    return tuple(parts)


# ── Vectorized group tables ──────────────────────────────────────────


class SymmetricGroup:
    """Numpy tables over S_k in canonical order.

    Attributes:
        k: Replica count.
        order: k!.
        words: (k!, k) 0-based image words, lexicographic.
        inverse_words: image words of the inverses.
        cycle_counts: #(pi) per element.
        classes: cycle types in :func:`conjugacy_classes` order.
        class_index: conjugacy class of every element.
        kreweras_index: index of pi^-1 gamma for every pi.
    """

    def __init__(self, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> None:
        _check_cap(k, cap)
        started = time.perf_counter()
        self.k = k
        self.words = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
        self.order = len(self.words)
        self._radix = k ** np.arange(k - 1, -1, -1, dtype=np.int64)
        self._codes = self.words @ self._radix
        self.inverse_words = np.argsort(self.words, axis=1)
        self.cycle_counts = cycle_counts(self.words)
        self.distance_to_identity = k - self.cycle_counts

        self.classes = conjugacy_classes(k)
        position = {lam: c for c, lam in enumerate(self.classes)}
        keys, inverse_keys = np.unique(_cycle_type_keys(self.words), axis=0, return_inverse=True)
        key_class = np.array([position[_key_to_partition(key)] for key in keys], dtype=np.int64)
        self.class_index = key_class[np.asarray(inverse_keys).reshape(-1)]
        self.class_distance = np.array([k - len(lam) for lam in self.classes], dtype=np.int64)
        self.class_sizes = np.array([class_size(lam) for lam in self.classes], dtype=np.int64)
        self.class_representatives = np.array(
            [int(np.flatnonzero(self.class_index == c)[0]) for c in range(len(self.classes))],
            dtype=np.int64,
        )

        self.identity_index = 0
        self.gamma_word = (np.arange(k) + 1) % k
        self.long_cycle_index = int(self.index_of(self.gamma_word))
        self.kreweras_index = self.index_of(self.inverse_words[:, self.gamma_word])
        self.distance_to_long_cycle = k - self.cycle_counts[self.kreweras_index]

        self._class_matrix: np.ndarray | None = None
        self._structure: np.ndarray | None = None
        logger.debug("built S_%d tables in %.3fs", k, time.perf_counter() - started)

    # ── Lookups ──────────────────────────────────────────────────────

    def index_of(self, words: np.ndarray) -> np.ndarray | int:
        """Canonical index of one word (k,) or many words (m, k)."""
        codes = np.asarray(words, dtype=np.int64) @ self._radix
        return np.searchsorted(self._codes, codes)

    def index(self, p: Permutation) -> int:
        if p.k != self.k:
            raise IncompatibleReplicaError(f"permutation in S_{p.k} used with S_{self.k}")
        return int(self.index_of(p.zero_based()))

    def permutation(self, i: int) -> Permutation:
        return Permutation.from_zero_based(self.words[i])

    def permutations(self) -> list[Permutation]:
        return [Permutation.from_zero_based(w) for w in self.words]

    # ── Relative positions ───────────────────────────────────────────

    def products_with(self, word: np.ndarray) -> np.ndarray:
        """Indices of p sigma for every sigma, p given by its 0-based word."""
        word = np.asarray(word, dtype=np.int64)
        if word.shape != (self.k,):
            raise IncompatibleReplicaError(f"word of length {word.shape[-1]} used with S_{self.k}")
        return self.index_of(word[self.words])

    def left_quotient_indices(self, i: int) -> np.ndarray:
        """Indices of pi_i^-1 sigma for every sigma."""
        return self.products_with(self.inverse_words[i])

    def relative_class_row(self, i: int) -> np.ndarray:
        """Conjugacy class of pi_i^-1 sigma for every sigma."""
        return self.class_index[self.left_quotient_indices(i)]

    def class_matrix(self) -> np.ndarray:
        """(k!, k!) class index of pi^-1 sigma."""
        if self._class_matrix is None:
            if self.k > _CLASS_MATRIX_MAX_K:
                raise CapExceededError("k for (k!)^2 class matrix", self.k, _CLASS_MATRIX_MAX_K)
            dtype = np.int8 if len(self.classes) < 127 else np.int16
            matrix = np.empty((self.order, self.order), dtype=dtype)
            for i in range(self.order):
                matrix[i] = self.relative_class_row(i)
            self._class_matrix = matrix
        return self._class_matrix

    def distance_matrix(self) -> np.ndarray:
        """(k!, k!) Cayley distances."""
        return self.class_distance[self.class_matrix()]

    def class_structure(self) -> np.ndarray:
        """Structure constants N[l, m, n] = #{z in class m : rho_l z^-1 in class n}.

        rho_l is a fixed representative of class l.  Convolution of class
        functions reduces to contractions with this tensor.
        """
        if self._structure is None:
            p = len(self.classes)
            structure = np.zeros((p, p, p), dtype=np.int64)
            for lam, rep in enumerate(self.class_representatives):
                products = self.words[rep][self.inverse_words]
                target = self.class_index[self.index_of(products)]
                np.add.at(structure[lam], (self.class_index, target), 1)
            self._structure = structure
        return self._structure


_GROUPS: dict[int, SymmetricGroup] = {}


def symmetric_group(k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> SymmetricGroup:
    """Shared :class:`SymmetricGroup` for k (first builder wins)."""
    _check_cap(k, cap)
    group = _GROUPS.get(k)
    if group is None:
        group = _GROUPS.setdefault(k, SymmetricGroup(k, cap=max(cap, k)))
    return group


def clear_group_cache() -> None:
    _GROUPS.clear()
