"""Tests for the non-crossing lattice, multichain counts and genus strata."""
from __future__ import annotations

import math

import numpy as np
import pytest

from freeotoc.combinatorics.ncposet import (
    GeodesicChain,
    block_weighted_sums,
    catalan,
    count_genus_one_pairs,
    count_multichains,
    count_report,
    enumerate_broken_multichains,
    enumerate_genus_one_pairs,
    enumerate_multichains,
    enumerate_nc,
    fuss_catalan,
    genus_stratification,
    is_noncrossing,
    kreweras,
    mobius,
    nc_leq,
    nc_poset,
)
from freeotoc.combinatorics.symgroup import Permutation, cayley_distance, symmetric_group
from freeotoc.core.exceptions import CapExceededError, DomainError

# Genus-0 and genus-1 two-chain counts, k = 1..6.
GENUS_ZERO = [1, 3, 12, 55, 273, 1428]
GENUS_ONE = [0, 1, 21, 270, 2860, 27300]


class TestClosedForms:
    def test_catalan(self):
        assert [catalan(n) for n in range(6)] == [1, 1, 2, 5, 14, 42]

    def test_fuss_catalan_two_chains(self):
        assert [fuss_catalan(k, 2) for k in range(1, 7)] == GENUS_ZERO

    def test_fuss_catalan_one_chain_is_catalan(self):
        assert all(fuss_catalan(k, 1) == catalan(k) for k in range(8))

    def test_invalid(self):
        with pytest.raises(DomainError):
            fuss_catalan(3, 0)


class TestNonCrossing:
    def test_enumeration_size(self):
        for k in range(1, 7):
            assert len(enumerate_nc(k)) == catalan(k)

    def test_membership(self):
        assert is_noncrossing(Permutation.parse("(12)(34)"))
        assert is_noncrossing(Permutation.parse("(14)(23)"))
        assert not is_noncrossing(Permutation.parse("(13)(24)"))

    def test_kreweras_extremes(self):
        e, gamma = Permutation.identity(5), Permutation.long_cycle(5)
        assert kreweras(e) == gamma
        assert kreweras(gamma) == e

    def test_kreweras_is_noncrossing(self):
        for p in enumerate_nc(5):
            assert is_noncrossing(kreweras(p))

    def test_kreweras_of_crossing_rejected(self):
        with pytest.raises(DomainError):
            kreweras(Permutation.parse("(13)(24)"))

    def test_mobius_of_full_interval(self):
        e = Permutation.identity
        gamma = Permutation.long_cycle
        assert mobius(e(2), gamma(2)) == -1
        assert mobius(e(3), gamma(3)) == 2
        assert mobius(e(4), gamma(4)) == -5

    def test_order(self):
        e, gamma = Permutation.identity(4), Permutation.long_cycle(4)
        middle = Permutation.parse("(12)(34)")
        assert nc_leq(e, middle) and nc_leq(middle, gamma)
        assert not nc_leq(Permutation.parse("(1234)"), middle)

    def test_mobius_matrix_inverts_zeta(self):
        poset = nc_poset(4)
        product = poset.leq_matrix().astype(int) @ poset.mobius_matrix()
        assert np.array_equal(product, np.eye(poset.size, dtype=int))


class TestGeodesicChain:
    def test_valid(self):
        chain = GeodesicChain(elements=(Permutation.parse("(12)(3)"),), k=3)
        assert len(chain.elements) == 1

    def test_off_geodesic_rejected(self):
        with pytest.raises(ValueError):
            GeodesicChain(elements=(Permutation.parse("(13)(24)"),), k=4)


class TestMultichains:
    def test_counts_match_fuss_catalan(self):
        for k in range(1, 11):
            assert count_multichains(k, 2) == fuss_catalan(k, 2)
            assert count_multichains(k, 3) == fuss_catalan(k, 3)
        assert [count_multichains(k, 2) for k in range(1, 7)] == GENUS_ZERO

    def test_k10_two_chains(self):
        assert count_multichains(10, 2) == 1430715

    def test_single_chains_are_catalan(self):
        assert [count_multichains(k, 1) for k in range(1, 11)] == [catalan(k) for k in range(1, 11)]

    def test_block_weighted_sums_with_unit_weights(self):
        assert block_weighted_sums([1] * 6, 5) == [1, 1, 2, 5, 14, 42]

    def test_counting_cap(self):
        with pytest.raises(CapExceededError):
            count_multichains(11, 2)

    def test_order_matrix_cap(self):
        with pytest.raises(CapExceededError):
            nc_poset(10).leq_matrix()

    def test_enumeration_matches_count(self):
        chains = enumerate_multichains(4, 2)
        assert len(chains) == 55
        assert all(nc_leq(a, b) for a, b in chains)

    def test_count_report(self):
        rows = count_report([2, 3])
        assert [(r["k"], r["count"]) for r in rows] == [(2, 3), (3, 12)]
        assert all(r["wall_time"] >= 0 for r in rows)

    def test_bad_length(self):
        with pytest.raises(DomainError):
            count_multichains(3, 0)


class TestGenusStrata:
    def test_genus_one_counts(self):
        assert [count_genus_one_pairs(k) for k in range(1, 7)] == GENUS_ONE

    def test_enumerated_pairs_match_count(self):
        pairs = enumerate_genus_one_pairs(4)
        assert len(pairs) == 270
        e, gamma = Permutation.identity(4), Permutation.long_cycle(4)
        for pi, sigma in pairs[:20]:
            total = cayley_distance(e, pi) + cayley_distance(pi, sigma) + cayley_distance(sigma, gamma)
            assert total == 5

    def test_brute_force_k6(self):
        k = 6
        group = symmetric_group(k)
        total = (
            group.distance_to_identity[:, None]
            + group.distance_matrix()
            + group.distance_to_long_cycle[None, :]
        )
        brute = int(np.count_nonzero(total == k + 1))
        assert brute == 27300
        assert count_genus_one_pairs(k) == brute
        assert len(enumerate_genus_one_pairs(k)) == brute

    def test_histogram_covers_all_pairs(self):
        histogram = genus_stratification(4)
        assert sum(histogram.values()) == math.factorial(4) ** 2
        assert histogram[0] == 55
        assert all(excess % 2 == 0 for excess in histogram)

    def test_broken_walks(self):
        assert len(enumerate_broken_multichains(3, 2, 0)) == 12
        assert len(enumerate_broken_multichains(3, 2, 2)) == 21
        assert enumerate_broken_multichains(3, 2, 1) == []

    def test_pair_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_genus_one_pairs(8, cap=7)
