"""Least-squares fits that turn asymptotic statements into testable numbers."""
from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.exceptions import DomainError


class PowerLawFit(BaseModel):
    """y ~ prefactor * x^exponent, fitted in log-log space."""

    model_config = ConfigDict(frozen=True)

    exponent: float
    prefactor: float
    exponent_stderr: float
    points: int

    def consistent_with(self, exponent: float, tolerance: float) -> bool:
        return abs(self.exponent - exponent) <= tolerance


class InversePowerFit(BaseModel):
    """y ~ sum_p c_p x^-p over the requested powers."""

    model_config = ConfigDict(frozen=True)

    powers: tuple[int, ...]
    coefficients: tuple[float, ...]
    stderrs: tuple[float, ...]

    def coefficient(self, power: int) -> float:
        return self.coefficients[self.powers.index(power)]

    def stderr(self, power: int) -> float:
        return self.stderrs[self.powers.index(power)]


def _least_squares(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    beta, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    dof = len(y) - design.shape[1]
    if dof <= 0:
        return beta, np.full(design.shape[1], math.nan)
    residual = y - design @ beta
    sigma2 = float(residual @ residual) / dof
    covariance = sigma2 * np.linalg.pinv(design.T @ design)
    return beta, np.sqrt(np.clip(np.diag(covariance), 0.0, None))


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> PowerLawFit:
    """Fit |y| = c x^p by least squares on (log x, log |y|).

    The standard error of p is NaN with only two points.
    """
    x = np.asarray(xs, dtype=float)
    y = np.abs(np.asarray(ys, dtype=float))
    if x.shape != y.shape or x.size < 2:
        raise DomainError("power-law fit needs at least two paired points")
    if np.any(x <= 0) or np.any(y == 0):
        raise DomainError("power-law fit needs positive x and non-zero y")
    design = np.column_stack([np.log(x), np.ones_like(x)])
    beta, stderr = _least_squares(design, np.log(y))
    return PowerLawFit(
        exponent=float(beta[0]),
        prefactor=float(np.exp(beta[1])),
        exponent_stderr=float(stderr[0]),
        points=int(x.size),
    )


def fit_inverse_powers(xs: Sequence[float], ys: Sequence[float], powers: Sequence[int] = (1, 2, 3)) -> InversePowerFit:
    """Fit y = sum_p c_p x^-p (no constant term)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.size < len(powers):
        raise DomainError(f"need at least {len(powers)} points for {len(powers)} coefficients")
    if np.any(x <= 0):
        raise DomainError("inverse-power fit needs positive x")
    design = np.column_stack([x ** (-float(p)) for p in powers])
    beta, stderr = _least_squares(design, y)
    return InversePowerFit(
        powers=tuple(int(p) for p in powers),
        coefficients=tuple(float(b) for b in beta),
        stderrs=tuple(float(s) for s in stderr),
    )
