"""Tests for Haar sampling, dense RMPUs, observables and the Monte Carlo estimators."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import ks_2samp

from freeotoc.core.exceptions import CapExceededError, DomainError, ObservableError
from freeotoc.core.models import EnsembleConfig, Orientation, RmpuGeometry, Variant
from freeotoc.mcsim import (
    HaarEnsemble,
    RmpuEnsemble,
    build_rmpu,
    embed_gate,
    make_observable,
    mc_frame_potential,
    mc_otoc,
    observable_from_dict,
    operator_entanglement_rank,
    sample_haar_unitary,
    sample_stream,
    unitarity_residual,
)
from freeotoc.mcsim.observables import ObservableSpec
from freeotoc.predict import frame_potential_rmpu_exact, haar_otoc_exact, rmpu_otoc_exact


class TestSampling:
    def test_unitary(self, rng):
        U = sample_haar_unitary(6, rng)
        assert unitarity_residual(U) < 1e-10

    def test_streams_are_reproducible(self):
        a = sample_stream(7, 3).standard_normal(4)
        b = sample_stream(7, 3).standard_normal(4)
        assert np.array_equal(a, b)

    def test_streams_are_independent(self):
        a = sample_stream(7, 3).standard_normal(4)
        b = sample_stream(7, 4).standard_normal(4)
        assert not np.array_equal(a, b)

    def test_negative_index(self):
        with pytest.raises(DomainError):
            sample_stream(7, -1)

    def test_phases_are_uniform(self):
        # A Haar unitary's trace has mean zero; skipping the R rephasing biases it.
        traces = [np.trace(sample_haar_unitary(2, sample_stream(1, i))) for i in range(4000)]
        assert abs(np.mean(traces)) < 0.1

    def test_left_invariance(self):
        V = sample_haar_unitary(8, sample_stream(99, 0))
        plain = [abs(np.trace(sample_haar_unitary(8, sample_stream(11, i)))) ** 2 for i in range(2000)]
        rotated = [abs(np.trace(V @ sample_haar_unitary(8, sample_stream(12, i)))) ** 2 for i in range(2000)]
        assert ks_2samp(plain, rotated).pvalue > 0.01


class TestEnsembles:
    def test_rmpu_is_unitary(self, rng):
        geom = RmpuGeometry(d=2, r=1, n=3)
        U = RmpuEnsemble(geom).sample(rng)
        assert U.shape == (16, 16)
        assert unitarity_residual(U) < 1e-10

    def test_two_floor_is_unitary(self, rng):
        geom = RmpuGeometry(d=2, r=1, n=3, variant=Variant.TWO_FLOOR)
        assert unitarity_residual(RmpuEnsemble(geom).sample(rng)) < 1e-10

    def test_two_floor_needs_two_layers(self):
        with pytest.raises(ValueError):
            RmpuGeometry(d=2, r=1, n=1, variant=Variant.TWO_FLOOR)

    def test_bond_dimension_bounds_operator_rank(self, rng):
        geom = RmpuGeometry(d=2, r=1, n=3)
        U = build_rmpu(EnsembleConfig(geometry=geom, seed=1, samples=2), rng)
        assert operator_entanglement_rank(U, 2, 4, 2) <= geom.chi**2
        haar = HaarEnsemble(16).sample(rng)
        assert operator_entanglement_rank(haar, 2, 4, 2) == 16

    def test_descending_orientation(self, rng):
        geom = RmpuGeometry(d=2, r=1, n=2, orientation=Orientation.DESCENDING)
        assert unitarity_residual(RmpuEnsemble(geom).sample(rng)) < 1e-10

    def test_embed_gate_out_of_range(self):
        with pytest.raises(DomainError):
            embed_gate(np.eye(4), 3, 2, 3)

    def test_dense_cap(self):
        with pytest.raises(CapExceededError):
            HaarEnsemble(512)

    def test_config_needs_one_ensemble(self):
        with pytest.raises(ValueError):
            EnsembleConfig(seed=1, samples=10)


class TestObservables:
    def test_pauli_string(self):
        obs = make_observable("pauli_string", {"letters": "ZX"}, (1, 2))
        assert obs.traceless
        assert obs.moments(4).moments == (0, 1, 0, 1)
        assert obs.embed(2, 3).shape == (8, 8)

    def test_projector_moments(self):
        obs = make_observable("projector", {}, (1, 1))
        assert obs.moments(3).moments == (Fraction(1, 2),) * 3

    def test_shifted_projector(self):
        obs = make_observable("shifted_projector", {"rank": 1}, (2, 2))
        assert obs.moments(2).moments == (0, Fraction(1, 4))
        assert obs.first_site == 2

    @pytest.mark.parametrize("shift", ["0", "1", "1/2"])
    def test_shifted_projector_norm_at_most_one(self, shift):
        obs = make_observable("shifted_projector", {"shift": shift}, (1, 1))
        assert obs.operator_norm <= 1.0

    def test_random_hermitian(self):
        obs = make_observable("random_hermitian", {"seed": 5}, (1, 2))
        assert obs.operator_norm == pytest.approx(1.0)
        assert not obs.moments(2).is_exact

    def test_identity_is_scalar(self):
        assert make_observable("pauli_string", {"letters": "I"}, (1, 1)).is_scalar()

    def test_placed(self):
        obs = make_observable("pauli_string", {"letters": "ZZ"}, (1, 2)).placed(3)
        assert (obs.first_site, obs.last_site) == (3, 4)

    @pytest.mark.parametrize(
        "kind, params",
        [
            ("pauli_string", {"letters": "Q"}),
            ("pauli_string", {"letters": "ZZ"}),
            ("projector", {"rank": 5}),
            ("shifted_projector", {"shift": "3"}),
            ("shifted_projector", {"shift": "-1/2"}),
            ("shifted_projector", {"shift": "half"}),
            ("nope", {}),
        ],
    )
    def test_invalid(self, kind, params):
        with pytest.raises(ObservableError):
            make_observable(kind, params, (1, 1))

    def test_from_dict_matrix(self):
        obs = observable_from_dict({"matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "first_site": 2})
        assert obs.first_site == 2 and obs.last_site == 2
        assert obs.moments(2).moments == pytest.approx((0.0, 1.0))

    def test_from_dict_kind(self):
        obs = observable_from_dict({"kind": "pauli_string", "params": {"letters": "X"}})
        assert obs.kind == "pauli_string"

    def test_non_hermitian_rejected(self):
        with pytest.raises(ObservableError):
            observable_from_dict({"matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]})

    def test_from_json(self, tmp_path):
        path = tmp_path / "obs.json"
        path.write_text('{"kind": "projector", "params": {"rank": 1}}', encoding="utf-8")
        assert ObservableSpec.from_json(path).moments(1).moments == (Fraction(1, 2),)

    def test_embed_rejects_wrong_local_dimension(self):
        obs = make_observable("projector", {}, (1, 1), d=3)
        with pytest.raises(ObservableError):
            obs.embed(2, 2)

    def test_embed_rejects_short_chain(self):
        obs = make_observable("pauli_string", {"letters": "Z"}, (3, 3))
        with pytest.raises(ObservableError):
            obs.embed(2, 2)


class TestOtocEstimator:
    def test_haar_agrees_with_exact(self):
        A = make_observable("pauli_string", {"letters": "Z"}, (1, 1))
        B = make_observable("pauli_string", {"letters": "Z"}, (2, 2))
        record = mc_otoc(EnsembleConfig.global_haar(4, seed=11, samples=2000), A, B, 2)
        exact = haar_otoc_exact(A.moments(2), B.moments(2), 4, 2)
        assert record.agrees_with(float(exact), sigmas=5)
        assert record.samples == 2000

    def test_independent_of_worker_count(self):
        A = make_observable("projector", {}, (1, 1))
        B = make_observable("projector", {}, (2, 2))
        config = EnsembleConfig.global_haar(4, seed=3, samples=64)
        assert mc_otoc(config, A, B, 2, workers=1) == mc_otoc(config, A, B, 2, workers=4)

    def test_scalar_observable_is_exact(self):
        A = make_observable("pauli_string", {"letters": "I"}, (1, 1))
        B = make_observable("pauli_string", {"letters": "Z"}, (2, 2))
        record = mc_otoc(EnsembleConfig.global_haar(4, seed=3, samples=10), A, B, 2)
        assert record.mean == pytest.approx(1.0)
        assert record.stderr == 0.0

    def test_dimension_mismatch(self):
        A = make_observable("pauli_string", {"letters": "Z"}, (1, 1))
        with pytest.raises(ObservableError):
            mc_otoc(EnsembleConfig.global_haar(6, seed=1, samples=4), A, A, 2)

    def test_out_of_cone_factorizes(self):
        # A on the last site only meets the last gate, so it never reaches B on site 1.
        geom = RmpuGeometry(d=2, r=1, n=2)
        A = make_observable("projector", {}, (3, 3))
        B = make_observable("shifted_projector", {"rank": 1}, (1, 1))
        record = mc_otoc(EnsembleConfig(geometry=geom, seed=4, samples=50), A, B, 2)
        assert record.agrees_with(float(A.moments(2).m(2) * B.moments(2).m(2)))

    @pytest.mark.slow
    def test_rmpu_agrees_with_transfer(self):
        geom = RmpuGeometry(d=2, r=1, n=2)
        A = make_observable("pauli_string", {"letters": "Z"}, (1, 1))
        B = make_observable("pauli_string", {"letters": "Z"}, (3, 3))
        record = mc_otoc(EnsembleConfig(geometry=geom, seed=5, samples=4000), A, B, 2)
        exact = rmpu_otoc_exact(A.moments(2), B.moments(2), geom, 2)
        assert record.agrees_with(float(exact), sigmas=5)

    @pytest.mark.slow
    def test_descending_mirrors_placement(self):
        ascending = RmpuGeometry(d=2, r=1, n=2)
        descending = RmpuGeometry(d=2, r=1, n=2, orientation=Orientation.DESCENDING)
        A = make_observable("pauli_string", {"letters": "Z"}, (3, 3))
        B = make_observable("pauli_string", {"letters": "Z"}, (1, 1))
        record = mc_otoc(EnsembleConfig(geometry=descending, seed=6, samples=4000), A, B, 2)
        exact = rmpu_otoc_exact(A.moments(2), B.moments(2), ascending, 2)
        assert record.agrees_with(float(exact), sigmas=5)

    @pytest.mark.slow
    def test_two_floor_restores_placement_symmetry(self):
        geom = RmpuGeometry(d=2, r=1, n=2, variant=Variant.TWO_FLOOR)
        config = EnsembleConfig(geometry=geom, seed=8, samples=3000)
        first = make_observable("projector", {}, (1, 1))
        last = make_observable("projector", {}, (3, 3))
        forward = mc_otoc(config, first, last, 2)
        backward = mc_otoc(config, last, first, 2)
        spread = (forward.stderr**2 + backward.stderr**2) ** 0.5
        assert abs(forward.mean - backward.mean) <= 4 * spread


class TestFramePotentialEstimator:
    def test_first_moment(self):
        record = mc_frame_potential(EnsembleConfig.global_haar(4, seed=2, samples=400), 1)
        assert record.agrees_with(1.0, sigmas=5)

    def test_too_few_samples(self):
        with pytest.raises(DomainError):
            mc_frame_potential(EnsembleConfig.global_haar(4, seed=2, samples=50), 1)

    @pytest.mark.slow
    def test_rmpu_second_moment(self):
        geom = RmpuGeometry(d=2, r=1, n=2)
        record = mc_frame_potential(EnsembleConfig(geometry=geom, seed=9, samples=20000), 2)
        assert record.agrees_with(float(frame_potential_rmpu_exact(geom, 2)), sigmas=5)
