"""Free-independence mixed moments as bilinear forms in partitioned moments.

Every analytic OTOC coefficient in this package has the shape

    sum_{lam, rho} C[lam, rho] <A>_lam <B>_rho

over pairs of conjugacy classes of S_k.  :class:`BilinearMomentForm` stores
the p(k) x p(k) coefficient matrix once per k and evaluates it on any two
moment sequences.  The free-probability value C_FP is the 2-chain form

    C_FP = sum_{pi <= sigma <= gamma} mu(pi, sigma) <A>_pi <B>_{sigma^-1 gamma}.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..combinatorics.ncposet import mobius_of_type, nc_poset
from ..combinatorics.symgroup import compose, conjugacy_classes
from ..config.defaults import DEFAULT_COUNTING_CAP
from ..core.exceptions import IncompatibleReplicaError, InsufficientMomentsError
from .moments import MomentSequence, class_moments


class BilinearMomentForm(BaseModel):
    """Coefficients over (class of the A argument, class of the B argument)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    coefficients: np.ndarray

    @classmethod
    def zeros(cls, k: int) -> BilinearMomentForm:
        p = len(conjugacy_classes(k))
        return cls(k=k, coefficients=np.zeros((p, p), dtype=object) + 0)

    def terms(self) -> list[tuple[tuple[int, ...], tuple[int, ...], Any]]:
        """Non-zero entries as (A cycle type, B cycle type, coefficient)."""
        classes = conjugacy_classes(self.k)
        rows, cols = np.nonzero(self.coefficients != 0)
        return [(classes[i], classes[j], self.coefficients[i, j]) for i, j in zip(rows, cols)]

    def evaluate(self, mA: MomentSequence, mB: MomentSequence) -> Any:
        """sum C[lam, rho] <A>_lam <B>_rho (exact when both sequences are)."""
        available = min(mA.K, mB.K)
        if available < self.k:
            raise InsufficientMomentsError(self.k, available)
        a = class_moments(mA, self.k)
        b = class_moments(mB, self.k)
        if mA.is_exact and mB.is_exact:
            coefficients = np.vectorize(Fraction, otypes=[object])(self.coefficients)
            return a @ coefficients @ b
        return float(a.astype(float) @ self.coefficients.astype(float) @ b.astype(float))

    def __add__(self, other: BilinearMomentForm) -> BilinearMomentForm:
        if other.k != self.k:
            raise IncompatibleReplicaError(f"forms for k={self.k} and k={other.k}")
        return BilinearMomentForm(k=self.k, coefficients=self.coefficients + other.coefficients)

    def scaled(self, factor: Any) -> BilinearMomentForm:
        return BilinearMomentForm(k=self.k, coefficients=self.coefficients * factor)


@lru_cache(maxsize=None)
def two_chain_form(k: int, cap: int = DEFAULT_COUNTING_CAP) -> BilinearMomentForm:
    """The free-probability form: mu(pi, sigma) at (class pi, class sigma^-1 gamma)."""
    poset = nc_poset(k, cap)
    classes = conjugacy_classes(k)
    position = {lam: c for c, lam in enumerate(classes)}
    coefficients = np.zeros((len(classes), len(classes)), dtype=object) + 0
    inverses = [p.inverse() for p in poset.elements]
    complement_class = [position[poset.elements[j].cycle_type] for j in poset.kreweras_index]
    rows, cols = np.nonzero(poset.leq_matrix())
    for i, j in zip(rows, cols):
        weight = mobius_of_type(compose(inverses[i], poset.elements[j]).cycle_type)
        coefficients[position[poset.elements[i].cycle_type], complement_class[j]] += weight
    return BilinearMomentForm(k=k, coefficients=coefficients)


def free_otoc_prediction(mA: MomentSequence, mB: MomentSequence, k: int) -> Any:
    """C_FP^(k): the OTOC of freely independent A and B."""
    available = min(mA.K, mB.K)
    if available < k:
        raise InsufficientMomentsError(k, available)
    return two_chain_form(k).evaluate(mA, mB)
