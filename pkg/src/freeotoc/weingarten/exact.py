"""Exact linear algebra over numpy object arrays of ``fractions.Fraction``.

Gauss-Jordan elimination with row exchanges; arbitrary-precision integers
never wrap, so Gram entries like D**k are safe at any size.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..core.exceptions import DomainError


def identity_matrix(n: int) -> np.ndarray:
    return np.array([[Fraction(i == j) for j in range(n)] for i in range(n)], dtype=object)


def as_fraction_array(values) -> np.ndarray:
    """Copy any integer/rational array into an object array of Fractions."""
    array = np.asarray(values, dtype=object)
    flat = [Fraction(x) for x in array.ravel()]
    return np.array(flat, dtype=object).reshape(array.shape)


def _eliminate(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Reduce X to the identity, applying every row operation to Y as well."""
    n = X.shape[0]
    for i in range(n):
        for j in range(i, n):
            if X[j, i] != 0:
                if i != j:
                    rows_ij = slice(i, j + 1, j - i)
                    X[rows_ij] = np.flipud(X[rows_ij])
                    Y[rows_ij] = np.flipud(Y[rows_ij])
                break
        else:
            raise DomainError("matrix is not invertible")

        pivot = X[i, i]
        Y[i] = Y[i] / pivot
        X[i] = X[i] / pivot
        for j in range(i + 1, n):
            factor = X[j, i]
            if factor != 0:
                Y[j] = Y[j] - factor * Y[i]
                X[j] = X[j] - factor * X[i]

    for j in range(n - 2, -1, -1):
        for i in range(j + 1, n):
            factor = X[j, i]
            if factor != 0:
                Y[j] = Y[j] - factor * Y[i]
                X[j] = X[j] - factor * X[i]
    return Y


def _check_square(X: np.ndarray) -> None:
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DomainError(f"matrix is not square (shape = {X.shape})")


def inverse_matrix(X) -> np.ndarray:
    """Exact inverse of a square rational matrix."""
    X = as_fraction_array(X)
    _check_square(X)
    return _eliminate(X, identity_matrix(X.shape[0]))


def solve(X, b) -> np.ndarray:
    """Exact solution of X y = b for a vector (or matrix) right-hand side."""
    X = as_fraction_array(X)
    _check_square(X)
    rhs = as_fraction_array(b)
    column = rhs.ndim == 1
    Y = _eliminate(X, rhs.reshape(X.shape[0], -1).copy())
    return Y[:, 0] if column else Y
