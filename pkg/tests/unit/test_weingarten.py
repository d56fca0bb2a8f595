"""Tests for Gram/Weingarten tables, the 1/D series, the disk cache and the twirl."""
from __future__ import annotations

import math
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse.linalg as spla

import freeotoc.weingarten.twirl as twirl_module
from freeotoc.combinatorics.symgroup import Permutation, symmetric_group
from freeotoc.core.exceptions import CapExceededError, DomainError, UnsupportedError
from freeotoc.predict.fits import fit_power_law
from freeotoc.weingarten import (
    WeingartenCache,
    clear_caches,
    genus_class_values,
    gram,
    haar_twirl_exact,
    mobius_class_values,
    replica_operator,
    replica_trace,
    weingarten,
    wg_asymptotic_coeff,
    wg_series_coefficients,
)
from freeotoc.weingarten.exact import inverse_matrix


@pytest.fixture(autouse=True)
def _fresh_tables():
    clear_caches()
    yield
    clear_caches()


class TestWeingartenTable:
    def test_k1_is_inverse_dimension(self):
        assert weingarten(7, 1).class_values == (Fraction(1, 7),)

    def test_k2_closed_form(self):
        wg = weingarten(3, 2)
        assert wg.class_value((1, 1)) == Fraction(1, 8)
        assert wg.class_value((2,)) == Fraction(-1, 24)

    def test_k3_closed_form(self):
        wg = weingarten(4, 3)
        assert wg.class_value((1, 1, 1)) == Fraction(7, 360)
        assert wg.class_value((2, 1)) == Fraction(-1, 180)
        assert wg.class_value((3,)) == Fraction(1, 360)

    def test_inverts_gram_exactly(self):
        G = gram(5, 3).entries
        W = weingarten(5, 3).matrix()
        product = G @ W
        n = product.shape[0]
        assert all(product[i, j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def test_matches_dense_exact_inverse(self):
        assert np.array_equal(inverse_matrix(gram(4, 2).entries), weingarten(4, 2).matrix())

    def test_float_mode_agrees(self):
        exact = np.array(weingarten(6, 3).class_values, dtype=float)
        assert np.allclose(weingarten(6, 3, "float").values_array(), exact, rtol=1e-12, atol=0)

    def test_pair_lookup(self):
        wg = weingarten(3, 2)
        tau = Permutation.parse("(12)")
        assert wg.value(tau, tau) == Fraction(1, 8)
        assert wg.value(Permutation.identity(2), tau) == Fraction(-1, 24)

    def test_dimension_not_above_k(self):
        with pytest.raises(DomainError):
            weingarten(3, 3)

    def test_invalid_mode(self):
        with pytest.raises(DomainError):
            weingarten(4, 2, mode="double")

    def test_table_cap(self):
        with pytest.raises(CapExceededError):
            weingarten(20, 4).matrix(cap=3)


class TestSeries:
    def test_k2_coefficients(self):
        series = wg_series_coefficients(2, 3)
        assert [list(c) for c in series] == [[1, 0], [0, -1], [1, 0], [0, -1]]

    def test_leading_order_is_mobius(self):
        k = 4
        series = wg_series_coefficients(k, 3)
        distance = symmetric_group(k).class_distance
        leading = [series[int(distance[c])][c] for c in range(len(distance))]
        assert leading == list(mobius_class_values(k))

    def test_genus_one_k2(self):
        assert list(genus_class_values(2, 1)) == [1, -1]

    def test_asymptotic_coeff(self):
        e, tau = Permutation.identity(3), Permutation.parse("(12)(3)")
        assert wg_asymptotic_coeff(e, e, 3, 0) == 1
        assert wg_asymptotic_coeff(e, tau, 3, 0) == -1
        assert wg_asymptotic_coeff(e, e, 3, 1) == int(genus_class_values(3, 1)[0])

    def test_series_reproduces_exact_value(self):
        # D^k Wg = sum_j B_j D^-j; truncating at high order matches the exact class values.
        D, k = 40, 3
        series = wg_series_coefficients(k, 12)
        approx = [sum(Fraction(int(c[i]), D**j) for j, c in enumerate(series)) / D**k for i in range(3)]
        exact = weingarten(D, k).class_values
        for a, b in zip(approx, exact):
            assert abs(float((a - b) / b)) < 1e-10

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_genus_one_bounded_by_mobius(self, k):
        bound = 6 * k**3.5
        for wg1, mu in zip(genus_class_values(k, 1), mobius_class_values(k)):
            assert abs(float(wg1)) <= bound * abs(float(mu))

    def test_higher_genus_unsupported(self):
        e = Permutation.identity(2)
        with pytest.raises(UnsupportedError):
            wg_asymptotic_coeff(e, e, 2, 2)


class TestCache:
    def test_store_and_reload(self, tmp_path):
        path = tmp_path / "wg.json"
        cache = WeingartenCache(path)
        table = weingarten(5, 3, store=cache)
        assert cache.size() == 1
        assert WeingartenCache(path).load(5, 3) == list(table.class_values)

    def test_values_served_from_store(self, tmp_path):
        cache = WeingartenCache(tmp_path / "wg.json")
        fake = [Fraction(1), Fraction(2), Fraction(3)]
        cache.store(9, 3, fake)
        assert weingarten(9, 3, store=cache).class_values == tuple(fake)

    def test_corrupt_file_starts_empty(self, tmp_path):
        path = tmp_path / "wg.json"
        path.write_text("not json", encoding="utf-8")
        assert WeingartenCache(path).size() == 0

    def test_clear(self, tmp_path):
        cache = WeingartenCache(tmp_path / "wg.json")
        cache.store(4, 2, [Fraction(1, 15), Fraction(-1, 60)])
        cache.clear()
        assert cache.load(4, 2) is None


class TestReplicaOperators:
    def test_swap(self):
        T = replica_operator(Permutation.parse("(12)"), 3).toarray()
        assert np.allclose(T @ T, np.eye(9))
        assert np.trace(T) == pytest.approx(3)

    def test_operator_is_homomorphism(self):
        a, b = Permutation.parse("(12)(3)"), Permutation.parse("(1)(23)")
        Ta = replica_operator(a, 2).toarray()
        Tb = replica_operator(b, 2).toarray()
        assert np.allclose(Ta @ Tb, replica_operator(a * b, 2).toarray())

    def test_replica_trace(self, rng):
        A = rng.standard_normal((3, 3))
        B = rng.standard_normal((3, 3))
        gamma_inverse = Permutation.long_cycle(2).inverse()
        assert replica_trace([A, B], gamma_inverse) == pytest.approx(np.trace(A @ B))
        assert replica_trace([A, B], Permutation.identity(2)) == pytest.approx(np.trace(A) * np.trace(B))

    def test_replica_trace_matches_operator(self, rng):
        A = rng.standard_normal((2, 2))
        B = rng.standard_normal((2, 2))
        p = Permutation.parse("(12)")
        dense = np.trace(np.kron(A, B) @ replica_operator(p, 2).toarray())
        assert replica_trace([A, B], p) == pytest.approx(dense)


class TestTwirl:
    def test_identity_is_invariant(self):
        twirled = haar_twirl_exact(np.eye(9), 3, 2).toarray()
        assert np.allclose(twirled, np.eye(9))

    def test_swap_is_invariant(self):
        swap = replica_operator(Permutation.parse("(12)"), 3).toarray()
        assert np.allclose(haar_twirl_exact(swap, 3, 2).toarray(), swap)

    def test_trace_preserved(self, rng):
        X = rng.standard_normal((9, 9))
        assert np.trace(haar_twirl_exact(X, 3, 2).toarray()) == pytest.approx(np.trace(X))

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            haar_twirl_exact(np.eye(8), 3, 2)

    @pytest.mark.parametrize("D, k", [(3, 2), (4, 3)])
    def test_pure_state_twirls_to_symmetric_projector(self, D, k, rng):
        psi = rng.standard_normal(D) + 1j * rng.standard_normal(D)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        X = rho
        for _ in range(k - 1):
            X = np.kron(X, rho)
        perms = symmetric_group(k).permutations()
        projector = sum(replica_operator(p, D).toarray() for p in perms) / math.factorial(k)
        expected = projector / math.comb(D + k - 1, k)
        assert np.allclose(haar_twirl_exact(X, D, k).toarray(), expected, atol=1e-12)

    def test_diagonal_approximation_error_decays_as_inverse_square(self, rng):
        dims = [8, 16, 32]
        errors = []
        for D in dims:
            psi = rng.standard_normal(D) + 1j * rng.standard_normal(D)
            psi /= np.linalg.norm(psi)
            rho = np.outer(psi, psi.conj())
            exact = haar_twirl_exact(np.kron(rho, rho), D, 2)
            leading = (replica_operator(Permutation.identity(2), D) + replica_operator(Permutation.parse("(12)"), D)) / D**2
            errors.append(spla.norm(exact - leading, "fro"))
        fit = fit_power_law(dims, errors)
        assert fit.consistent_with(-2.0, 0.3), fit

    def test_module_source_compiles_without_warnings(self):
        source = Path(twirl_module.__file__).read_text(encoding="utf-8")
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            compile(source, twirl_module.__file__, "exec")
