"""Tests for permutations and the vectorized S_k tables."""
from __future__ import annotations

import math

import numpy as np
import pytest

from freeotoc.combinatorics.symgroup import (
    Permutation,
    adjacency_indicator,
    cayley_distance,
    class_size,
    compose,
    conjugacy_classes,
    enumerate_permutations,
    format_cycles,
    parse_cycles,
    rank,
    symmetric_group,
    unrank,
)
from freeotoc.core.exceptions import CapExceededError, DomainError, IncompatibleReplicaError


class TestPermutation:
    def test_parse_and_format(self):
        p = parse_cycles("(123)(4)")
        assert p.images == (2, 3, 1, 4)
        assert format_cycles(p) == "(123)(4)"

    def test_parse_wide_entries(self):
        p = parse_cycles("(1 10)", k=10)
        assert p(1) == 10 and p(10) == 1
        assert format_cycles(p).startswith("(1 10)")

    def test_composition_applies_right_factor_first(self):
        a = Permutation.parse("(12)", k=3)
        b = Permutation.parse("(23)", k=3)
        assert compose(a, b) == Permutation.parse("(123)")
        assert a * b != b * a

    def test_inverse(self):
        p = Permutation.parse("(1342)")
        assert p * p.inverse() == Permutation.identity(4)

    def test_long_cycle(self):
        gamma = Permutation.long_cycle(4)
        assert gamma.images == (2, 3, 4, 1)
        assert gamma.cycle_type == (4,)

    def test_cycle_type_non_increasing(self):
        assert Permutation.parse("(1)(23)(456)").cycle_type == (3, 2, 1)

    def test_hashable(self):
        assert len({Permutation.parse("(12)"), Permutation([2, 1])}) == 1

    @pytest.mark.parametrize("text", ["(12", "12", "(11)", "()"])
    def test_malformed_cycles_rejected(self, text):
        with pytest.raises(DomainError):
            parse_cycles(text)

    def test_not_a_word(self):
        with pytest.raises(DomainError):
            Permutation([1, 1, 3])


class TestDistances:
    def test_identity_to_long_cycle(self):
        for k in range(1, 7):
            assert cayley_distance(Permutation.identity(k), Permutation.long_cycle(k)) == k - 1

    def test_transposition(self):
        assert cayley_distance(Permutation.identity(3), Permutation.parse("(13)(2)")) == 1

    def test_mismatched_k(self):
        with pytest.raises(IncompatibleReplicaError):
            cayley_distance(Permutation.identity(2), Permutation.identity(3))

    def test_adjacency_indicator(self):
        e, gamma = Permutation.identity(4), Permutation.long_cycle(4)
        assert adjacency_indicator(e, gamma, 3) == 1
        assert adjacency_indicator(e, gamma, 1) == 0

    def test_from_cycles_fills_fixed_points(self):
        assert Permutation.from_cycles([[1, 3]], 4).images == (3, 2, 1, 4)


class TestEnumeration:
    def test_rank_matches_canonical_order(self):
        perms = enumerate_permutations(4)
        assert [rank(p) for p in perms] == list(range(24))
        assert unrank(17, 4) == perms[17]

    def test_unrank_out_of_range(self):
        with pytest.raises(DomainError):
            unrank(6, 3)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_permutations(9, cap=8)


class TestConjugacyClasses:
    def test_order_by_distance(self):
        assert conjugacy_classes(3) == ((1, 1, 1), (2, 1), (3,))
        assert conjugacy_classes(4)[0] == (1, 1, 1, 1)
        assert conjugacy_classes(4)[-1] == (4,)

    def test_class_sizes_sum_to_order(self):
        for k in range(1, 8):
            assert sum(class_size(lam) for lam in conjugacy_classes(k)) == math.factorial(k)

    def test_class_size(self):
        assert class_size((2, 1)) == 3
        assert class_size((2, 2)) == 3
        assert class_size((4,)) == 6


class TestSymmetricGroup:
    def test_tables(self):
        group = symmetric_group(4)
        assert group.order == 24
        assert group.cycle_counts[group.identity_index] == 4
        assert group.permutation(group.long_cycle_index) == Permutation.long_cycle(4)
        assert group.kreweras_index[group.identity_index] == group.long_cycle_index
        assert group.distance_to_long_cycle[group.long_cycle_index] == 0

    def test_index_round_trip(self):
        group = symmetric_group(5)
        p = Permutation.parse("(135)(24)")
        assert group.permutation(group.index(p)) == p

    def test_class_index_matches_cycle_type(self):
        group = symmetric_group(4)
        for i, p in enumerate(group.permutations()):
            assert group.classes[group.class_index[i]] == p.cycle_type

    def test_class_matrix_diagonal_is_identity_class(self):
        group = symmetric_group(4)
        assert np.all(np.diag(group.class_matrix()) == 0)

    def test_distance_matrix_symmetric(self):
        dist = symmetric_group(4).distance_matrix()
        assert np.array_equal(dist, dist.T)
        assert dist.max() == 3

    def test_class_structure_rows_sum_to_class_sizes(self):
        group = symmetric_group(5)
        structure = group.class_structure()
        for lam in range(len(group.classes)):
            assert np.array_equal(structure[lam].sum(axis=1), group.class_sizes)

    def test_products_with(self):
        group = symmetric_group(4)
        p = Permutation.parse("(12)(34)")
        products = group.products_with(p.zero_based())
        for j, sigma in enumerate(group.permutations()):
            assert group.permutation(products[j]) == p * sigma

    def test_products_with_wrong_length(self):
        with pytest.raises(IncompatibleReplicaError):
            symmetric_group(3).products_with(np.arange(4))

    def test_wrong_k_lookup(self):
        with pytest.raises(IncompatibleReplicaError):
            symmetric_group(3).index(Permutation.identity(4))
