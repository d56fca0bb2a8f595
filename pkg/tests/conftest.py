"""Shared pytest fixtures for free-otoc tests."""
from __future__ import annotations

import numpy as np
import pytest

from freeotoc.config.loader import clear_caches as clear_reference_caches
from freeotoc.config.settings import reset_settings
from freeotoc.freeprob.moments import MomentSequence
from freeotoc.mcsim.observables import make_observable


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch, tmp_path):
    """Fresh Settings per test, read from a directory without config.yaml or .env."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr("dotenv.load_dotenv", lambda *a, **kw: None)
    monkeypatch.setenv("FOTOC_WEINGARTEN_CACHE__ENABLED", "false")
    reset_settings()
    clear_reference_caches()
    yield
    reset_settings()
    clear_reference_caches()


@pytest.fixture
def pauli_z() -> MomentSequence:
    """Moments 0, 1, 0, 1, ... of a single-site Pauli Z."""
    return make_observable("pauli_string", {"letters": "Z"}, (1, 1)).moments(6)


@pytest.fixture
def projector() -> MomentSequence:
    """Moments of a rank-1 projector on one qubit: 1/2 at every order."""
    return MomentSequence(moments=("1/2",) * 6)


@pytest.fixture
def semicircle() -> MomentSequence:
    """Catalan moments of the standard semicircle, exact."""
    return MomentSequence(moments=(0, 1, 0, 2, 0, 5))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(1234))
