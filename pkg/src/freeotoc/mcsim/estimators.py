"""Monte Carlo estimators for OTOCs and frame potentials.

Each sample index owns a generator (see :func:`sample_stream`); samples can
be spread over worker threads and are collected back by index, so the
estimate is bit-identical for any worker count.
"""
from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..config.defaults import (
    DEFAULT_DENSE_DIM_CAP,
    DEFAULT_FRAME_MIN_SAMPLES,
    DEFAULT_FRAME_REL_STDERR_WARN,
    DEFAULT_IMAG_TOLERANCE,
    DEFAULT_MC_WORKERS,
)
from ..core.exceptions import DomainError, ObservableError
from ..core.models import EnsembleConfig, EstimateRecord
from .observables import ObservableSpec
from .rmpu import make_ensemble
from .sampling import sample_stream

logger = logging.getLogger(__name__)


def _chain_shape(config: EnsembleConfig, d: int) -> tuple[int, int]:
    """(d, N) of the chain the observables live on."""
    if config.geometry is not None:
        if config.geometry.d != d:
            raise ObservableError(f"observables use d={d}, geometry has d={config.geometry.d}")
        return d, config.geometry.N
    N = round(math.log(config.D, d))
    if d**N != config.D:
        raise ObservableError(f"D={config.D} is not a power of the local dimension d={d}")
    return d, N


def _collect(values: Callable[[int], float], samples: int, workers: int) -> np.ndarray:
    if workers <= 1:
        return np.array([values(i) for i in range(samples)])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(values, range(samples))))


def _record(quantity: str, draws: np.ndarray, config: EnsembleConfig, k: int) -> EstimateRecord:
    mean = float(np.mean(draws))
    stderr = float(np.std(draws, ddof=1) / math.sqrt(draws.size))
    return EstimateRecord(
        quantity=quantity,
        mean=mean,
        stderr=stderr,
        samples=int(draws.size),
        seed=config.seed,
        k=k,
        ensemble=config.label,
    )


def mc_otoc(
    config: EnsembleConfig,
    A: ObservableSpec,
    B: ObservableSpec,
    k: int,
    workers: int = DEFAULT_MC_WORKERS,
    cap: int = DEFAULT_DENSE_DIM_CAP,
) -> EstimateRecord:
    """Sample mean of (1/D) Re tr[(U^dagger A U B)^k].

    A scalar A makes every sample identical; the value is returned without
    sampling and with zero standard error.
    """
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if A.d != B.d:
        raise ObservableError(f"A has d={A.d}, B has d={B.d}")
    d, N = _chain_shape(config, A.d)
    ensemble = make_ensemble(config, cap)
    D = config.D
    A_full = A.embed(d, N)
    B_full = B.embed(d, N)

    if A.is_scalar():
        value = float(np.trace(np.linalg.matrix_power(A.matrix[0, 0] * B_full, k)).real) / D
        return EstimateRecord(
            quantity="otoc", mean=value, stderr=0.0, samples=config.samples, seed=config.seed, k=k, ensemble=config.label
        )

    imaginary = np.zeros(config.samples)

    def one(i: int) -> float:
        U = ensemble.sample(sample_stream(config.seed, i))
        heisenberg = U.conj().T @ A_full @ U
        value = np.trace(np.linalg.matrix_power(heisenberg @ B_full, k)) / D
        imaginary[i] = abs(value.imag)
        return float(value.real)

    started = time.perf_counter()
    draws = _collect(one, config.samples, workers)
    worst = float(imaginary.max())
    if worst > DEFAULT_IMAG_TOLERANCE:
        logger.warning("OTOC samples carry an imaginary part up to %.3g (observables not Hermitian?)", worst)
    record = _record("otoc", draws, config, k)
    logger.info(
        "mc_otoc %s k=%d: %.6g ± %.2g (%d samples, %.2fs)",
        config.label, k, record.mean, record.stderr, record.samples, time.perf_counter() - started,
    )
    return record


def mc_frame_potential(
    config: EnsembleConfig,
    k: int,
    workers: int = DEFAULT_MC_WORKERS,
    cap: int = DEFAULT_DENSE_DIM_CAP,
    min_samples: int = DEFAULT_FRAME_MIN_SAMPLES,
) -> EstimateRecord:
    """Sample mean of |tr(U V^dagger)|^2k over independent pairs (U, V).

    The estimator is heavy-tailed; a warning with sample-count guidance is
    logged when the relative standard error exceeds 10%.
    """
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    if config.samples < min_samples:
        raise DomainError(f"frame potential needs at least {min_samples} samples, got {config.samples}")
    ensemble = make_ensemble(config, cap)

    def one(i: int) -> float:
        rng = sample_stream(config.seed, i)
        U = ensemble.sample(rng)
        V = ensemble.sample(rng)
        overlap = np.vdot(V, U)  # tr(U V^dagger)
        return float(abs(overlap) ** (2 * k))

    started = time.perf_counter()
    draws = _collect(one, config.samples, workers)
    record = _record("frame_potential", draws, config, k)
    if record.relative_stderr > DEFAULT_FRAME_REL_STDERR_WARN:
        suggested = int(config.samples * (record.relative_stderr / DEFAULT_FRAME_REL_STDERR_WARN) ** 2) + 1
        logger.warning(
            "frame potential relative stderr %.1f%% at %d samples; about %d samples bring it to %.0f%%",
            100 * record.relative_stderr, config.samples, suggested, 100 * DEFAULT_FRAME_REL_STDERR_WARN,
        )
    logger.info(
        "mc_frame_potential %s k=%d: %.6g ± %.2g (%.2fs)",
        config.label, k, record.mean, record.stderr, time.perf_counter() - started,
    )
    return record
